#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <random>
#include <vector>

namespace monk {

using Rng = std::mt19937_64;

// SplitMix64 finaliser; decorrelates nearby seeds.
inline std::uint64_t mix_seed(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Child seed for an independent stream, e.g. one per replication or bootstrap
// replicate. Same (seed, path) always yields the same child.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t s = mix_seed(seed);
    for (auto p : path) {
        s = mix_seed(s ^ mix_seed(p + 0x632be59bd9b4e019ULL));
    }
    return s;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return derive_seed(seed, {stream});
}

inline std::vector<std::size_t> identity_permutation(std::size_t n)
{
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    return perm;
}

inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng)
{
    auto perm = identity_permutation(n);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

} // namespace monk
