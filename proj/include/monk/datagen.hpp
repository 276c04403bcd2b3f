#pragma once

#include "monk/error.hpp"
#include "monk/rng.hpp"
#include "monk/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>

namespace monk {

// n i.i.d. draws from N(m, s^2).
inline Sample sample_gaussian(double m, double s, std::size_t n, std::uint64_t seed)
{
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw InvalidArgument("sample_gaussian: standard deviation must be positive");
    }
    Rng rng(seed);
    std::normal_distribution<double> dist(m, s);
    Sample out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back(dist(rng));
    }
    return out;
}

// Pareto(alpha) with scale 1 by inversion: x = (1 - u)^(-1/alpha), u ~ U[0, 1).
inline Sample sample_pareto(double alpha, std::size_t n, std::uint64_t seed)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidArgument("sample_pareto: alpha must be positive");
    }
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Sample out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back(std::pow(1.0 - unif(rng), -1.0 / alpha));
    }
    return out;
}

struct ContaminationSpec {
    std::size_t n_corrupt = 0;
    double x_value = 2000.0;
    double y_value = 4000.0;
};

// Overwrites the last n_corrupt entries of xs with x_value and of ys with y_value.
inline std::pair<Sample, Sample> contaminate(Sample xs, Sample ys, const ContaminationSpec& spec)
{
    if (xs.size() != ys.size()) {
        throw DimensionMismatch("contaminate: samples differ in size");
    }
    if (spec.n_corrupt > xs.size()) {
        throw InvalidArgument("contaminate: n_corrupt = " + std::to_string(spec.n_corrupt)
                              + " exceeds the sample size " + std::to_string(xs.size()));
    }
    const std::size_t first = xs.size() - spec.n_corrupt;
    for (std::size_t i = first; i < xs.size(); ++i) {
        xs[i] = spec.x_value;
        ys[i] = spec.y_value;
    }
    return {std::move(xs), std::move(ys)};
}

} // namespace monk
