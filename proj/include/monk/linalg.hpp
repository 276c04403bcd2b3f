#pragma once

#include "monk/error.hpp"
#include "monk/types.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

namespace monk {

/// Cholesky factor of M + jitter*I, stored as the upper triangle U = L^T so
/// that each row of L is a contiguous column.
struct CholeskyFactor {
    Matrix upper;
    double jitter = 0.0;

    std::size_t dim() const { return static_cast<std::size_t>(upper.rows()); }
    Matrix lower() const { return upper.transpose(); }
};

// Relative jitter levels, multiplied by the mean diagonal of the source matrix.
inline constexpr std::array<double, 5> kJitterLadder{0.0, 1e-12, 1e-10, 1e-8, 1e-6};

inline constexpr double kSymmetryTolerance = 1e-8;

// Cholesky factorisation of a symmetric positive semidefinite matrix. Tries the
// jitter ladder from the bottom and keeps the first level that factorises.
inline CholeskyFactor cholesky_psd(const Matrix& m)
{
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("cholesky_psd: matrix is not square");
    }
    const Eigen::Index n = m.rows();
    if (n == 0) {
        return {Matrix(0, 0), 0.0};
    }
    if (!m.allFinite()) {
        throw InvalidArgument("cholesky_psd: matrix has non-finite entries");
    }

    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    // Tiled so that both m(i, j) and m(j, i) stay in cache.
    constexpr Eigen::Index tile = 64;
    double asymmetry = 0.0;
    for (Eigen::Index j0 = 0; j0 < n; j0 += tile) {
        for (Eigen::Index i0 = j0; i0 < n; i0 += tile) {
            const Eigen::Index rows = std::min(tile, n - i0), cols = std::min(tile, n - j0);
            asymmetry = std::max(asymmetry, (m.block(i0, j0, rows, cols) - m.block(j0, i0, cols, rows).transpose())
                                                .cwiseAbs()
                                                .maxCoeff());
        }
    }
    if (asymmetry > kSymmetryTolerance * scale) {
        throw InvalidArgument("cholesky_psd: matrix is not symmetric");
    }

    const double mean_diagonal = m.diagonal().mean();
    const double base = mean_diagonal > 0.0 ? mean_diagonal : 1.0;

    Matrix work(n, n);
    for (double level : kJitterLadder) {
        const double jitter = level * base;
        work.triangularView<Eigen::Upper>() = m;
        work.diagonal().array() += jitter;
        Eigen::LLT<Eigen::Ref<Matrix>, Eigen::Upper> llt(work);
        // A non-finite entry in row j of L reaches L(j, j), so the diagonal suffices.
        if (llt.info() != Eigen::Success || !work.diagonal().allFinite()) {
            continue;
        }
        work.triangularView<Eigen::StrictlyLower>().setZero();
        return {std::move(work), jitter};
    }
    throw NotPsdError("cholesky_psd: not PSD within tolerance");
}

// ||L^T v||_2, i.e. sqrt(v^T (M + jitter I) v).
inline double weighted_norm(const CholeskyFactor& factor, const Vector& v)
{
    if (static_cast<std::size_t>(v.size()) != factor.dim()) {
        throw DimensionMismatch("weighted_norm: vector length does not match factor");
    }
    const Vector projected = factor.upper.triangularView<Eigen::Upper>() * v;
    return projected.norm();
}

namespace detail {

// ||L^T v||^2 for v supported on `support` with the given values.
inline double sparse_weighted_norm_sq(const CholeskyFactor& factor,
                                      std::span<const std::size_t> support,
                                      std::span<const double> values)
{
    const std::size_t n = factor.dim();
    if (support.size() != values.size()) {
        throw DimensionMismatch("weighted_norm: support and values differ in length");
    }
    Vector y = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t s = 0; s < support.size(); ++s) {
        const std::size_t i = support[s];
        if (i >= n) {
            throw DimensionMismatch("weighted_norm: support index out of range");
        }
        const auto len = static_cast<Eigen::Index>(i + 1);
        y.head(len) += values[s] * factor.upper.col(static_cast<Eigen::Index>(i)).head(len);
    }
    return y.squaredNorm();
}

} // namespace detail

inline double weighted_norm(const CholeskyFactor& factor,
                            std::span<const std::size_t> support,
                            std::span<const double> values)
{
    return std::sqrt(detail::sparse_weighted_norm_sq(factor, support, values));
}

// v^T M v recovered from the factor of M + jitter I by removing the jitter
// contribution again; clamped at 0.
inline double unjittered_quadratic_form(const CholeskyFactor& factor,
                                        std::span<const std::size_t> support,
                                        std::span<const double> values)
{
    double v_sq = 0.0;
    for (double x : values) {
        v_sq += x * x;
    }
    const double q = detail::sparse_weighted_norm_sq(factor, support, values) - factor.jitter * v_sq;
    return std::max(q, 0.0);
}

} // namespace monk
