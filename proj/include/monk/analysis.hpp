#pragma once

#include "monk/error.hpp"
#include "monk/kernels.hpp"
#include "monk/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace monk {

// Closed-form MMD between N(m1, s1^2) and N(m2, s2^2) for the rbf kernel and
// the degree-2 polynomial kernel.
inline double analytic_mmd_gaussian(const Kernel& k, double m1, double s1, double m2, double s2)
{
    if (!(s1 > 0.0) || !(s2 > 0.0)) {
        throw InvalidArgument("analytic_mmd_gaussian: standard deviations must be positive");
    }
    double mmd_sq = 0.0;
    if (k.family() == KernelFamily::rbf) {
        const double sig2 = k.sigma() * k.sigma();
        const double cross_var = sig2 + s1 * s1 + s2 * s2;
        const double dm = m1 - m2;
        mmd_sq = k.sigma() / std::sqrt(sig2 + 2.0 * s1 * s1) + k.sigma() / std::sqrt(sig2 + 2.0 * s2 * s2)
               - 2.0 * k.sigma() * std::exp(-dm * dm / (2.0 * cross_var)) / std::sqrt(cross_var);
    } else if (k.family() == KernelFamily::polynomial && k.degree() == 2) {
        // E (xy + c)^2 = E[x^2] E[y^2] + 2c E[x] E[y] + c^2 for independent x, y.
        const double a1 = m1 * m1 + s1 * s1;
        const double a2 = m2 * m2 + s2 * s2;
        const double dm = m1 - m2;
        mmd_sq = (a1 - a2) * (a1 - a2) + 2.0 * k.offset() * dm * dm;
    } else {
        throw UnsupportedKernel("analytic_mmd_gaussian: only rbf and degree-2 polynomial kernels are supported");
    }
    return std::sqrt(std::max(mmd_sq, 0.0));
}

struct BoundDiagnostics {
    double trace_hat = 0.0;  // empirical Tr(Sigma)
    double opnorm_hat = 0.0; // empirical ||Sigma||
    double delta = 0.5;
    double eta = 0.1;
    std::size_t n_corrupt = 0;
};

enum class BoundKind { mean_embedding, mmd };

struct BoundEvaluation {
    double bound = 0.0;
    double q_required = 0.0;
    bool contamination_admissible = true;
};

inline void check_confidence(double delta, double eta)
{
    if (!(delta > 0.0 && delta <= 0.5)) {
        throw InvalidArgument("delta must lie in (0, 1/2]");
    }
    if (!(eta > 0.0 && eta < 1.0)) {
        throw InvalidArgument("eta must lie in (0, 1)");
    }
}

// Number of blocks the deviation bounds ask for: 72 delta^-2 ln(1/eta).
inline double required_blocks(double delta, double eta)
{
    check_confidence(delta, eta);
    return 72.0 / (delta * delta) * std::log(1.0 / eta);
}

// N_c <= Q (1/2 - delta).
inline bool contamination_admissible(std::size_t n_corrupt, double q, double delta)
{
    return static_cast<double>(n_corrupt) <= q * (0.5 - delta);
}

// Empirical covariance-operator surrogates: trace = mean k(x,x) minus the mean
// of the Gram matrix; operator norm = top eigenvalue of the doubly centred Gram
// matrix over n.
inline BoundDiagnostics cov_diagnostics(const Kernel& k, const Sample& xs)
{
    const std::size_t n = xs.size();
    if (n < 2) {
        throw InvalidArgument("cov_diagnostics: needs at least 2 points");
    }
    const Matrix g = gram(k, xs);
    const double nd = static_cast<double>(n);

    BoundDiagnostics d;
    d.trace_hat = std::max(g.diagonal().sum() / nd - g.sum() / (nd * nd), 0.0);

    const Vector row_mean = g.rowwise().mean();
    const double grand = g.mean();
    Matrix centred = g;
    centred.colwise() -= row_mean;
    centred.rowwise() -= row_mean.transpose();
    centred.array() += grand;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(centred, Eigen::EigenvaluesOnly);
    d.opnorm_hat = std::max(eig.eigenvalues().maxCoeff() / nd, 0.0);
    // The top eigenvalue never exceeds the trace; pin rounding differences.
    d.opnorm_hat = std::min(d.opnorm_hat, d.trace_hat);
    return d;
}

// Diagnostics for the pair (P, Q): traces and operator norms add up.
inline BoundDiagnostics combine(const BoundDiagnostics& p, const BoundDiagnostics& q)
{
    BoundDiagnostics out = p;
    out.trace_hat = p.trace_hat + q.trace_hat;
    out.opnorm_hat = p.opnorm_hat + q.opnorm_hat;
    return out;
}

// Right-hand side of the sub-Gaussian deviation bounds.
//   mean_embedding: 12 (1 + sqrt 2) / delta * max(sqrt(6 ||S|| ln(1/eta) / (delta N)), 2 sqrt(Tr S / N))
//   mmd:            12 / delta * max(sqrt((||S_P|| + ||S_Q||) ln(1/eta) / (delta N)), 2 sqrt((Tr S_P + Tr S_Q) / N))
// For `mmd`, pass combine(diag_P, diag_Q).
inline BoundEvaluation theorem_bound(const BoundDiagnostics& d, std::size_t n, BoundKind which)
{
    check_confidence(d.delta, d.eta);
    if (n < 1) {
        throw InvalidArgument("theorem_bound: N must be >= 1");
    }
    if (d.trace_hat < 0.0 || d.opnorm_hat < 0.0) {
        throw InvalidArgument("theorem_bound: covariance surrogates must be non-negative");
    }
    const double nd = static_cast<double>(n);
    const double log_term = std::log(1.0 / d.eta);
    const double trace_term = 2.0 * std::sqrt(d.trace_hat / nd);

    BoundEvaluation out;
    if (which == BoundKind::mean_embedding) {
        const double op_term = std::sqrt(6.0 * d.opnorm_hat * log_term / (d.delta * nd));
        out.bound = 12.0 * (1.0 + std::numbers::sqrt2) / d.delta * std::max(op_term, trace_term);
    } else {
        const double op_term = std::sqrt(d.opnorm_hat * log_term / (d.delta * nd));
        out.bound = 12.0 / d.delta * std::max(op_term, trace_term);
    }
    out.q_required = required_blocks(d.delta, d.eta);
    out.contamination_admissible = contamination_admissible(d.n_corrupt, out.q_required, d.delta);
    return out;
}

} // namespace monk
