#pragma once

#include "monk/error.hpp"
#include "monk/kernels.hpp"
#include "monk/mon.hpp"
#include "monk/rng.hpp"
#include "monk/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace monk {

// f = sum_n a_n k(., x_n) + sum_n b_n k(., y_n), with coef = [a; b].
struct CoefExpansion {
    Sample base_x;
    Sample base_y;
    Vector coef;

    Sample points() const { return concat(base_x, base_y); }
};

inline CoefExpansion feature(const Point& x, double weight = 1.0)
{
    CoefExpansion f;
    f.base_x = {x};
    f.coef = Vector::Constant(1, weight);
    return f;
}

inline void check_expansion(const CoefExpansion& f)
{
    if (static_cast<std::size_t>(f.coef.size()) != f.base_x.size() + f.base_y.size()) {
        throw DimensionMismatch("coefficient expansion: coefficient count does not match base points");
    }
}

// ||f - g||_k through Gram expansions, clamped at 0 before the root.
inline double rkhs_distance(const CoefExpansion& f, const CoefExpansion& g, const Kernel& k)
{
    check_expansion(f);
    check_expansion(g);
    const Sample pf = f.points();
    const Sample pg = g.points();
    const double ff = f.coef.dot(gram(k, pf) * f.coef);
    const double fg = f.coef.dot(gram(k, pf, pg) * g.coef);
    const double gg = g.coef.dot(gram(k, pg) * g.coef);
    return std::sqrt(std::max(ff - 2.0 * fg + gg, 0.0));
}

// Heuristic solver for the minmax median-of-means mean embedding. Starting from
// f = 0, each iteration reshuffles the blocks, scores block q by the block mean
// of x -> ||f - k(., x)||^2 - ||mu_q - k(., x)||^2, which equals ||f - mu_q||^2,
// and moves f to the empirical embedding of the block attaining the median
// score. With Q = 1 the result is the empirical mean embedding.
inline CoefExpansion monk_mean_embedding(const Kernel& k, const Sample& xs, std::size_t q, std::size_t iterations,
                                         std::uint64_t seed,
                                         RemainderPolicy policy = RemainderPolicy::strict)
{
    const std::size_t n = xs.size();
    check_block_count(n, q, policy);
    if (iterations < 1) {
        throw InvalidArgument("monk_mean_embedding: T must be >= 1");
    }

    const Matrix kxx = gram(k, xs);
    Vector f = Vector::Zero(static_cast<Eigen::Index>(n));
    Rng rng(seed);
    std::vector<double> scores(q);
    for (std::size_t t = 0; t < iterations; ++t) {
        const BlockPartition part = make_partition(n, q, random_permutation(n, rng), policy);
        const double m = static_cast<double>(part.block_size());
        const Vector kf = kxx * f;
        const double f_sq = f.dot(kf);
        for (std::size_t b = 0; b < q; ++b) {
            double cross = 0.0;
            double mu_sq = 0.0;
            for (std::size_t i : part.blocks[b]) {
                cross += kf[static_cast<Eigen::Index>(i)];
                for (std::size_t j : part.blocks[b]) {
                    mu_sq += kxx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                }
            }
            scores[b] = f_sq - 2.0 * cross / m + mu_sq / (m * m);
        }
        const std::size_t target = median_block(scores).index;
        f.setZero();
        for (std::size_t i : part.blocks[target]) {
            f[static_cast<Eigen::Index>(i)] = 1.0 / m;
        }
    }

    CoefExpansion out;
    out.base_x = xs;
    out.coef = std::move(f);
    return out;
}

// (1/n) sum_i k(., x_i).
inline CoefExpansion empirical_embedding(const Sample& xs)
{
    CoefExpansion out;
    out.base_x = xs;
    out.coef = Vector::Constant(static_cast<Eigen::Index>(xs.size()), 1.0 / static_cast<double>(xs.size()));
    return out;
}

} // namespace monk
