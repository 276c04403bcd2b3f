#pragma once

#include "monk/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace monk {

enum class RemainderPolicy {
    strict,         // Q must divide n
    drop_remainder, // use the largest multiple of Q; trailing permuted indices are ignored
};

// Q disjoint equal-size index blocks. Block q holds
// perm[q*m], ..., perm[(q+1)*m - 1] with m = floor(n / Q). Indices are 0-based.
struct BlockPartition {
    std::size_t n = 0;
    std::size_t q_count = 0;
    std::vector<std::size_t> perm;
    std::vector<std::vector<std::size_t>> blocks;

    std::size_t block_size() const { return q_count == 0 ? 0 : n / q_count; }
    std::size_t used() const { return block_size() * q_count; }
};

inline void check_block_count(std::size_t n, std::size_t q, RemainderPolicy policy)
{
    if (q < 1) {
        throw InvalidArgument("partition: Q must be >= 1");
    }
    if (q > n) {
        throw InvalidArgument("partition: Q = " + std::to_string(q) + " exceeds n = " + std::to_string(n));
    }
    if (policy == RemainderPolicy::strict && n % q != 0) {
        throw InvalidArgument("partition: Q = " + std::to_string(q) + " does not divide n = " + std::to_string(n)
                              + " (enable drop-remainder to truncate)");
    }
}

inline BlockPartition make_partition(std::size_t n, std::size_t q, std::vector<std::size_t> perm,
                                     RemainderPolicy policy = RemainderPolicy::strict)
{
    check_block_count(n, q, policy);
    if (perm.size() != n) {
        throw InvalidArgument("partition: permutation length does not match n");
    }
    std::vector<char> seen(n, 0);
    for (std::size_t i : perm) {
        if (i >= n || seen[i]) {
            throw InvalidArgument("partition: sigma is not a permutation of [n]");
        }
        seen[i] = 1;
    }

    BlockPartition part;
    part.n = n;
    part.q_count = q;
    part.perm = std::move(perm);
    const std::size_t m = n / q;
    part.blocks.resize(q);
    for (std::size_t b = 0; b < q; ++b) {
        part.blocks[b].assign(part.perm.begin() + static_cast<std::ptrdiff_t>(b * m),
                              part.perm.begin() + static_cast<std::ptrdiff_t>((b + 1) * m));
    }
    return part;
}

struct MedianBlock {
    std::size_t index = 0; // 0-based block index
    double value = 0.0;
};

// Lower median (the ceil(Q/2)-th order statistic) and the smallest block index
// attaining it.
inline MedianBlock median_block(std::span<const double> block_values)
{
    if (block_values.empty()) {
        throw InvalidArgument("median_block: no block values");
    }
    for (double v : block_values) {
        if (std::isnan(v)) {
            throw InvalidArgument("median_block: NaN block value");
        }
    }
    std::vector<double> sorted(block_values.begin(), block_values.end());
    const std::size_t rank = (sorted.size() + 1) / 2 - 1;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank), sorted.end());
    const double value = sorted[rank];
    const auto it = std::find(block_values.begin(), block_values.end(), value);
    return {static_cast<std::size_t>(it - block_values.begin()), value};
}

inline std::vector<double> block_means(std::span<const double> values, const BlockPartition& part)
{
    if (values.size() != part.n) {
        throw InvalidArgument("mon: " + std::to_string(values.size()) + " values for a partition of "
                              + std::to_string(part.n));
    }
    std::vector<double> means;
    means.reserve(part.q_count);
    for (const auto& block : part.blocks) {
        double sum = 0.0;
        for (std::size_t i : block) {
            sum += values[i];
        }
        means.push_back(sum / static_cast<double>(block.size()));
    }
    return means;
}

// Median of block means. With Q = 1 this is the sample mean.
inline double mon_estimate(std::span<const double> values, const BlockPartition& part)
{
    const auto means = block_means(values, part);
    return median_block(means).value;
}

} // namespace monk
