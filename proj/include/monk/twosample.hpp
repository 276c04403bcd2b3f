#pragma once

#include "monk/detail/parallel.hpp"
#include "monk/error.hpp"
#include "monk/kernels.hpp"
#include "monk/mmd.hpp"
#include "monk/rng.hpp"
#include "monk/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace monk {

struct TestResult {
    Kernel theta_hat = Kernel::rbf(1.0); // kernel chosen on the first split
    double statistic = 0.0;              // estimator on the third split
    double quantile = 0.0;               // (1 - alpha) permutation quantile on the second split
    double alpha = 0.05;
    std::size_t b_boot = 0;
    bool reject = false;                 // statistic - quantile > 0
    double diff = 0.0;
    std::size_t split_size = 0;          // points per side in each split
    bool truncated = false;              // N was not a multiple of 3
};

inline void check_test_level(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1)");
    }
}

// The ceil((1 - alpha) B)-th order statistic of the B values.
inline double empirical_quantile(std::vector<double> values, double alpha)
{
    check_test_level(alpha);
    if (values.empty()) {
        throw InvalidArgument("empirical_quantile: no values");
    }
    const double b = static_cast<double>(values.size());
    // The small slack keeps products such as 0.95 * 100 from rounding up a rank.
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
    return values[rank - 1];
}

namespace detail {

inline Matrix select(const Matrix& m, const std::vector<std::size_t>& idx)
{
    const auto size = static_cast<Eigen::Index>(idx.size());
    Matrix out(size, size);
    for (Eigen::Index j = 0; j < size; ++j) {
        const auto cj = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]);
        for (Eigen::Index i = 0; i < size; ++i) {
            out(i, j) = m(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]), cj);
        }
    }
    return out;
}

inline Sample take(const Sample& s, std::span<const std::size_t> idx)
{
    Sample out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(s[i]);
    }
    return out;
}

inline void check_boot_count(std::size_t b)
{
    if (b < 1) {
        throw InvalidArgument("bootstrap: B must be >= 1");
    }
}

} // namespace detail

// Permutation statistics from the Gram matrix over a pooled sample of 2n points.
// Replicate b draws its permutation and estimator seed from derive_seed(seed, b),
// so the output does not depend on how replicates are scheduled.
inline std::vector<double> bootstrap_statistics(const Matrix& pooled_gram, const EstimatorOptions& est,
                                                std::size_t b_boot, std::uint64_t seed)
{
    detail::check_boot_count(b_boot);
    if (pooled_gram.rows() != pooled_gram.cols() || pooled_gram.rows() % 2 != 0 || pooled_gram.rows() == 0) {
        throw DimensionMismatch("bootstrap: pooled Gram matrix must be 2n x 2n");
    }
    const auto total = static_cast<std::size_t>(pooled_gram.rows());
    std::vector<double> stats(b_boot);
    detail::parallel_for(b_boot, [&](std::size_t b) {
        const std::uint64_t replicate = derive_seed(seed, b);
        Rng rng(derive_seed(replicate, 0));
        const auto perm = random_permutation(total, rng);
        const auto g = AggregatedGram::from_entries(detail::select(pooled_gram, perm));
        stats[b] = estimate(g, est, derive_seed(replicate, 1)).value;
    });
    return stats;
}

// (1 - alpha)-quantile of the estimator under the null, from B random
// permutations of the pooled sample xs2 u ys2 split into two halves.
inline double bootstrap_quantile(const Sample& xs2, const Sample& ys2, const Kernel& k, const EstimatorOptions& est,
                                 std::size_t b_boot, double alpha, std::uint64_t seed)
{
    detail::check_boot_count(b_boot);
    check_test_level(alpha);
    if (xs2.size() != ys2.size() || xs2.empty()) {
        throw DimensionMismatch("bootstrap_quantile: samples must be non-empty and equal in size");
    }
    const Matrix pooled = gram(k, concat(xs2, ys2));
    return empirical_quantile(bootstrap_statistics(pooled, est, b_boot, seed), alpha);
}

// Argmax of the estimator over the grid on (xs1, ys1); ties go to the earliest
// grid entry. Grid points whose evaluation fails are skipped. A one-element
// grid is returned without evaluation.
inline Kernel tune_kernel(const Sample& xs1, const Sample& ys1, std::span<const Kernel> grid,
                          const EstimatorOptions& est, std::uint64_t seed)
{
    if (grid.empty()) {
        throw InvalidArgument("tune_kernel: empty kernel grid");
    }
    if (xs1.size() != ys1.size()) {
        throw DimensionMismatch("tune_kernel: samples differ in size");
    }
    if (grid.size() == 1) {
        return grid.front();
    }
    std::optional<std::size_t> best;
    double best_value = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            const double v = estimate(aggregated_gram(grid[i], xs1, ys1), est, seed).value;
            if (std::isfinite(v) && (!best || v > best_value)) {
                best = i;
                best_value = v;
            }
        } catch (const Error&) {
            continue;
        }
    }
    if (!best) {
        throw Error("tune_kernel: the estimator failed on every grid kernel");
    }
    return grid[*best];
}

// Three-way split test, run for several estimators on one shared split:
// tune the kernel on part 1, estimate the null quantile by permutations of
// part 2, compute the statistic on part 3. Gram matrices are shared between
// estimators that select the same kernel.
inline std::vector<TestResult> two_sample_tests(const Sample& xs, const Sample& ys, std::span<const Kernel> grid,
                                                std::span<const EstimatorOptions> estimators, std::size_t b_boot,
                                                double alpha, std::uint64_t seed)
{
    if (xs.size() != ys.size()) {
        throw DimensionMismatch("two_sample_test: samples differ in size");
    }
    if (xs.size() < 3) {
        throw InvalidArgument("two_sample_test: needs N >= 3");
    }
    if (grid.empty()) {
        throw InvalidArgument("two_sample_test: empty kernel grid");
    }
    detail::check_boot_count(b_boot);
    check_test_level(alpha);

    const std::size_t n_total = xs.size();
    const std::size_t part = n_total / 3;
    Rng split_rng(derive_seed(seed, 0));
    const auto perm = random_permutation(n_total, split_rng);
    const std::span<const std::size_t> all(perm);
    const auto i1 = all.subspan(0, part);
    const auto i2 = all.subspan(part, part);
    const auto i3 = all.subspan(2 * part, part);

    const Sample x1 = detail::take(xs, i1), y1 = detail::take(ys, i1);
    const Sample x2 = detail::take(xs, i2), y2 = detail::take(ys, i2);
    const Sample x3 = detail::take(xs, i3), y3 = detail::take(ys, i3);
    const Sample pooled2 = concat(x2, y2);

    // Per-kernel caches keyed by grid position.
    std::map<std::size_t, Matrix> pooled_grams;
    std::map<std::size_t, AggregatedGram> test_grams;

    std::vector<TestResult> results;
    for (const auto& est : estimators) {
        const Kernel theta = tune_kernel(x1, y1, grid, est, derive_seed(seed, 1));
        const auto pos = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), theta) - grid.begin());

        auto pooled_it = pooled_grams.find(pos);
        if (pooled_it == pooled_grams.end()) {
            pooled_it = pooled_grams.emplace(pos, gram(theta, pooled2)).first;
        }
        auto test_it = test_grams.find(pos);
        if (test_it == test_grams.end()) {
            test_it = test_grams.emplace(pos, aggregated_gram(theta, x3, y3)).first;
        }

        TestResult r;
        r.theta_hat = theta;
        r.alpha = alpha;
        r.b_boot = b_boot;
        r.split_size = part;
        r.truncated = n_total % 3 != 0;
        r.quantile = empirical_quantile(bootstrap_statistics(pooled_it->second, est, b_boot, derive_seed(seed, 2)),
                                        alpha);
        r.statistic = estimate(test_it->second, est, derive_seed(seed, 3)).value;
        r.diff = r.statistic - r.quantile;
        r.reject = r.diff > 0.0;
        results.push_back(std::move(r));
    }
    return results;
}

inline TestResult two_sample_test(const Sample& xs, const Sample& ys, std::span<const Kernel> grid,
                                  const EstimatorOptions& est, std::size_t b_boot, double alpha, std::uint64_t seed)
{
    return two_sample_tests(xs, ys, grid, std::span<const EstimatorOptions>(&est, 1), b_boot, alpha, seed).front();
}

} // namespace monk
