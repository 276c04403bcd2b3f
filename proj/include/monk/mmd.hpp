#pragma once

#include "monk/error.hpp"
#include "monk/kernels.hpp"
#include "monk/linalg.hpp"
#include "monk/mon.hpp"
#include "monk/rng.hpp"
#include "monk/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace monk {

enum class Estimator { vstat, ustat, monk_bcd, monk_bcd_fast };

inline std::string_view estimator_name(Estimator e)
{
    switch (e) {
    case Estimator::vstat: return "vstat";
    case Estimator::ustat: return "ustat";
    case Estimator::monk_bcd: return "monk_bcd";
    case Estimator::monk_bcd_fast: return "monk_bcd_fast";
    }
    return "unknown";
}

inline Estimator parse_estimator(std::string_view name)
{
    for (Estimator e : {Estimator::vstat, Estimator::ustat, Estimator::monk_bcd, Estimator::monk_bcd_fast}) {
        if (name == estimator_name(e)) {
            return e;
        }
    }
    throw InvalidArgument("unknown estimator '" + std::string(name) + "'");
}

inline bool is_monk(Estimator e)
{
    return e == Estimator::monk_bcd || e == Estimator::monk_bcd_fast;
}

struct EstimatorOptions {
    Estimator method = Estimator::vstat;
    std::size_t q = 1;               // number of blocks
    std::size_t iterations = 100;    // T
    std::size_t shuffle_every = 10;  // BCD-Fast: reshuffle at t = 1, 1 + k, 1 + 2k, ...
    std::vector<std::size_t> rebuild_iterations; // BCD-Fast: explicit 1-based J; overrides shuffle_every
    RemainderPolicy remainder = RemainderPolicy::strict;
};

struct MmdEstimate {
    double value = 0.0;
    Estimator method = Estimator::vstat;
    std::size_t q = 1;
    std::size_t iterations_run = 0;
    std::vector<double> objective_trace; // median objective after every iteration
    std::uint64_t seed = 0;

    // ustat: the squared-scale statistic u; value holds sign(u) sqrt|u|.
    std::optional<double> squared;

    // MONK estimators: block objectives and the median-attaining block at the
    // final iterate; monk_bcd also keeps its coefficient vector c = [a; b].
    std::vector<double> final_objectives;
    std::size_t median_block = 0;
    Vector coefficients;
};

// The value used when comparing against a true (non-negative) MMD: MONK outputs
// are clamped at 0, the U-statistic keeps its signed root.
inline double comparison_value(const MmdEstimate& e)
{
    return is_monk(e.method) ? std::max(e.value, 0.0) : e.value;
}

inline MmdEstimate mmd_vstat(const AggregatedGram& g)
{
    const auto n = static_cast<Eigen::Index>(g.n());
    const Matrix& k = g.entries();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            sum += k(i, j) + k(n + i, n + j) - 2.0 * k(i, n + j);
        }
    }
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    MmdEstimate out;
    out.method = Estimator::vstat;
    out.value = std::sqrt(std::max(sum / nn, 0.0));
    return out;
}

inline MmdEstimate mmd_ustat(const AggregatedGram& g)
{
    if (g.n() < 2) {
        throw InvalidArgument("mmd_ustat: needs at least 2 points per sample");
    }
    const auto n = static_cast<Eigen::Index>(g.n());
    const Matrix& k = g.entries();
    double within = 0.0;
    double cross = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i != j) {
                within += k(i, j) + k(n + i, n + j);
            }
            cross += k(i, n + j);
        }
    }
    const double nd = static_cast<double>(n);
    const double u = within / (nd * (nd - 1.0)) - 2.0 * cross / (nd * nd);
    MmdEstimate out;
    out.method = Estimator::ustat;
    out.squared = u;
    out.value = std::copysign(std::sqrt(std::abs(u)), u);
    return out;
}

namespace detail {

// Per-block projections (1/|S_q|) [1_q; -1_q]^T (K c), given K c.
inline std::vector<double> project_blocks(const Vector& kc, const BlockPartition& part)
{
    const std::size_t n = part.n;
    std::vector<double> out;
    out.reserve(part.q_count);
    for (const auto& block : part.blocks) {
        double sum = 0.0;
        for (std::size_t j : block) {
            sum += kc[static_cast<Eigen::Index>(j)] - kc[static_cast<Eigen::Index>(n + j)];
        }
        out.push_back(sum / static_cast<double>(block.size()));
    }
    return out;
}

// Support and values of [1_S; -1_S] in the aggregated index space.
inline void signed_indicator(const std::vector<std::size_t>& block, std::size_t n,
                             std::vector<std::size_t>& support, std::vector<double>& values)
{
    support.clear();
    values.clear();
    for (std::size_t j : block) {
        support.push_back(j);
        values.push_back(1.0);
    }
    for (std::size_t j : block) {
        support.push_back(n + j);
        values.push_back(-1.0);
    }
}

// A squared norm this small relative to the diagonal mass of the block is
// rounding noise (e.g. identical x and y blocks); the step then yields c = 0.
inline bool negligible_norm(double norm_sq, double diagonal_mass, std::size_t support_size)
{
    return !(norm_sq > 1e-12 * diagonal_mass * static_cast<double>(support_size));
}

inline void check_iterations(const EstimatorOptions& opt)
{
    if (opt.iterations < 1) {
        throw InvalidArgument("MONK estimator: T must be >= 1");
    }
}

inline constexpr double kEarlyStopTolerance = 1e-12;
inline constexpr std::size_t kEarlyStopPatience = 10;

} // namespace detail

// Block objectives (1/|S_q|) [1_q; -1_q]^T K c, i.e. <f, mu_{S_q,P} - mu_{S_q,Q}>
// for f = sum a_n k(., x_n) + sum b_n k(., y_n).
inline std::vector<double> block_objectives(const AggregatedGram& g, const Vector& c, const BlockPartition& part)
{
    if (static_cast<std::size_t>(c.size()) != 2 * g.n()) {
        throw DimensionMismatch("block_objectives: coefficient vector must have length 2n");
    }
    if (part.n != g.n()) {
        throw DimensionMismatch("block_objectives: partition size does not match the Gram matrix");
    }
    const Vector kc = g.entries() * c;
    return detail::project_blocks(kc, part);
}

// MONK BCD: each iteration reshuffles the blocks, finds the block attaining the
// median objective and moves c to the analytic maximiser for that block,
// c = [1; -1] / ||L^T [1; -1]||. Deterministic given the seed.
inline MmdEstimate monk_bcd(const AggregatedGram& g, const EstimatorOptions& opt, std::uint64_t seed)
{
    detail::check_iterations(opt);
    const std::size_t n = g.n();
    check_block_count(n, opt.q, opt.remainder);

    const Matrix& k = g.entries();
    const CholeskyFactor& factor = g.cholesky();
    const auto dim = static_cast<Eigen::Index>(2 * n);

    Rng rng(seed);
    Vector c = Vector::Zero(dim);
    Vector kc = Vector::Zero(dim);
    std::vector<std::size_t> support;
    std::vector<double> values;

    MmdEstimate out;
    out.method = Estimator::monk_bcd;
    out.q = opt.q;
    out.seed = seed;
    out.objective_trace.reserve(opt.iterations);

    std::vector<double> objectives;
    MedianBlock median;
    std::size_t stable = 0;
    for (std::size_t t = 0; t < opt.iterations; ++t) {
        const BlockPartition part = make_partition(n, opt.q, random_permutation(n, rng), opt.remainder);
        objectives = detail::project_blocks(kc, part);
        const std::size_t target = median_block(objectives).index;

        detail::signed_indicator(part.blocks[target], n, support, values);
        const double norm_sq = unjittered_quadratic_form(factor, support, values);
        double diagonal_mass = 0.0;
        for (std::size_t i : support) {
            diagonal_mass += std::abs(k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
        }

        c.setZero();
        kc.setZero();
        if (!detail::negligible_norm(norm_sq, diagonal_mass, support.size())) {
            const double scale = 1.0 / std::sqrt(norm_sq);
            for (std::size_t s = 0; s < support.size(); ++s) {
                const auto col = static_cast<Eigen::Index>(support[s]);
                c[col] = values[s] * scale;
                kc.noalias() += (values[s] * scale) * k.col(col);
            }
        }

        objectives = detail::project_blocks(kc, part);
        median = median_block(objectives);
        out.objective_trace.push_back(median.value);
        out.iterations_run = t + 1;

        if (t > 0) {
            const double change = std::abs(median.value - out.objective_trace[t - 1]);
            stable = change < detail::kEarlyStopTolerance ? stable + 1 : 0;
            if (stable >= detail::kEarlyStopPatience) {
                break;
            }
        }
    }

    out.value = median.value;
    out.median_block = median.index;
    out.final_objectives = std::move(objectives);
    out.coefficients = std::move(c);
    return out;
}

namespace detail {

inline std::vector<bool> rebuild_schedule(const EstimatorOptions& opt)
{
    std::vector<bool> rebuild(opt.iterations, false);
    if (opt.rebuild_iterations.empty()) {
        const std::size_t every = std::max<std::size_t>(opt.shuffle_every, 1);
        for (std::size_t t = 0; t < opt.iterations; t += every) {
            rebuild[t] = true;
        }
        return rebuild;
    }
    for (std::size_t t : opt.rebuild_iterations) {
        if (t < 1) {
            throw InvalidArgument("BCD-Fast: rebuild iterations are 1-based");
        }
        if (t <= opt.iterations) {
            rebuild[t - 1] = true;
        }
    }
    if (!rebuild[0]) {
        throw InvalidArgument("BCD-Fast: the rebuild set J must contain iteration 1");
    }
    return rebuild;
}

// BCD-Fast over any source of block Gram matrices. `block_gram(indices)` returns
// the Gram matrix over the given aggregated indices (x side in [0, n), y side in
// [n, 2n)). Per block q the state is K_q, its factor L_q (built on first use
// after each reshuffle), the local coefficients c_q and the objective
// (1/|S_q|) [1; -1]^T K_q c_q.
template <class BlockGram>
MmdEstimate monk_bcd_fast_impl(std::size_t n, BlockGram&& block_gram, const EstimatorOptions& opt,
                               std::uint64_t seed)
{
    check_iterations(opt);
    check_block_count(n, opt.q, opt.remainder);
    const std::vector<bool> rebuild = rebuild_schedule(opt);

    struct BlockState {
        std::vector<std::size_t> indices;
        Matrix gram;
        std::optional<CholeskyFactor> factor;
    };

    Rng rng(seed);
    std::vector<BlockState> blocks(opt.q);
    std::vector<double> objectives(opt.q, 0.0);
    std::size_t m = 0;

    MmdEstimate out;
    out.method = Estimator::monk_bcd_fast;
    out.q = opt.q;
    out.seed = seed;
    out.objective_trace.reserve(opt.iterations);

    std::vector<std::size_t> local_support;
    std::vector<double> local_values;
    MedianBlock median;
    for (std::size_t t = 0; t < opt.iterations; ++t) {
        if (rebuild[t]) {
            const BlockPartition part = make_partition(n, opt.q, random_permutation(n, rng), opt.remainder);
            m = part.block_size();
            for (std::size_t q = 0; q < opt.q; ++q) {
                auto& b = blocks[q];
                b.indices.clear();
                for (std::size_t j : part.blocks[q]) {
                    b.indices.push_back(j);
                }
                for (std::size_t j : part.blocks[q]) {
                    b.indices.push_back(n + j);
                }
                b.gram = block_gram(std::span<const std::size_t>(b.indices));
                b.factor.reset();
                objectives[q] = 0.0; // c_q = 0
            }
            local_support.resize(2 * m);
            local_values.resize(2 * m);
            for (std::size_t i = 0; i < 2 * m; ++i) {
                local_support[i] = i;
                local_values[i] = i < m ? 1.0 : -1.0;
            }
        }

        const std::size_t target = median_block(objectives).index;
        auto& b = blocks[target];
        if (!b.factor) {
            b.factor = cholesky_psd(b.gram);
        }
        const double norm_sq = unjittered_quadratic_form(*b.factor, local_support, local_values);
        const double diagonal_mass = b.gram.diagonal().cwiseAbs().sum();
        if (negligible_norm(norm_sq, diagonal_mass, 2 * m)) {
            objectives[target] = 0.0;
        } else {
            // v^T K_q (v / ||L_q^T v||) / m with v = [1; -1].
            const auto mm = static_cast<Eigen::Index>(m);
            const double quad = b.gram.topLeftCorner(mm, mm).sum() + b.gram.bottomRightCorner(mm, mm).sum()
                              - 2.0 * b.gram.topRightCorner(mm, mm).sum();
            objectives[target] = quad / std::sqrt(norm_sq) / static_cast<double>(m);
        }

        median = median_block(objectives);
        out.objective_trace.push_back(median.value);
        out.iterations_run = t + 1;
    }

    out.value = median.value;
    out.median_block = median.index;
    out.final_objectives = objectives;
    return out;
}

inline Sample gather_points(const Sample& xs, const Sample& ys, std::span<const std::size_t> indices)
{
    const std::size_t n = xs.size();
    Sample pts;
    pts.reserve(indices.size());
    for (std::size_t i : indices) {
        pts.push_back(i < n ? xs[i] : ys[i - n]);
    }
    return pts;
}

} // namespace detail

// MONK BCD-Fast: block-local Gram matrices and coefficients, reshuffled only at
// the iterations in J. Only the block Gram matrices are ever evaluated.
inline MmdEstimate monk_bcd_fast(const Kernel& k, const Sample& xs, const Sample& ys, const EstimatorOptions& opt,
                                 std::uint64_t seed)
{
    if (xs.size() != ys.size()) {
        throw DimensionMismatch("monk_bcd_fast: samples differ in size");
    }
    if (xs.empty()) {
        throw InvalidArgument("monk_bcd_fast: samples must be non-empty");
    }
    auto block_gram = [&](std::span<const std::size_t> indices) {
        return gram(k, detail::gather_points(xs, ys, indices));
    };
    return detail::monk_bcd_fast_impl(xs.size(), block_gram, opt, seed);
}

// Same algorithm reading block entries from a precomputed aggregated Gram matrix.
inline MmdEstimate monk_bcd_fast(const AggregatedGram& g, const EstimatorOptions& opt, std::uint64_t seed)
{
    const Matrix& k = g.entries();
    auto block_gram = [&](std::span<const std::size_t> indices) {
        const auto size = static_cast<Eigen::Index>(indices.size());
        Matrix out(size, size);
        for (Eigen::Index j = 0; j < size; ++j) {
            for (Eigen::Index i = 0; i < size; ++i) {
                out(i, j) = k(static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]),
                              static_cast<Eigen::Index>(indices[static_cast<std::size_t>(j)]));
            }
        }
        return out;
    };
    return detail::monk_bcd_fast_impl(g.n(), block_gram, opt, seed);
}

inline MmdEstimate estimate(const AggregatedGram& g, const EstimatorOptions& opt, std::uint64_t seed)
{
    switch (opt.method) {
    case Estimator::vstat: return mmd_vstat(g);
    case Estimator::ustat: return mmd_ustat(g);
    case Estimator::monk_bcd: return monk_bcd(g, opt, seed);
    case Estimator::monk_bcd_fast: return monk_bcd_fast(g, opt, seed);
    }
    throw InvalidArgument("estimate: unknown estimator");
}

// Convenience front-end that evaluates only what the estimator needs.
inline MmdEstimate estimate(const Kernel& k, const Sample& xs, const Sample& ys, const EstimatorOptions& opt,
                            std::uint64_t seed)
{
    if (opt.method == Estimator::monk_bcd_fast) {
        return monk_bcd_fast(k, xs, ys, opt, seed);
    }
    return estimate(aggregated_gram(k, xs, ys), opt, seed);
}

} // namespace monk
