#pragma once

#include <Eigen/Dense>

#include <string>
#include <variant>
#include <vector>

namespace monk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

using RealVector = std::vector<double>;

// A point of the input domain: a real scalar, a real vector, or a symbol string.
using Point = std::variant<double, RealVector, std::string>;

// Ordered collection of points; the unit of all estimation.
using Sample = std::vector<Point>;

inline Sample to_sample(const std::vector<double>& values)
{
    return Sample(values.begin(), values.end());
}

inline Sample to_sample(const std::vector<std::string>& values)
{
    return Sample(values.begin(), values.end());
}

// xs followed by ys.
inline Sample concat(const Sample& xs, const Sample& ys)
{
    Sample out;
    out.reserve(xs.size() + ys.size());
    out.insert(out.end(), xs.begin(), xs.end());
    out.insert(out.end(), ys.begin(), ys.end());
    return out;
}

} // namespace monk
