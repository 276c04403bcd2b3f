#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond the Point type and favour obviousness over speed.

#include "monk/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Fn = std::function<double(double, double)>;

inline Fn rbf(double sigma)
{
    return [sigma](double x, double y) { return std::exp(-(x - y) * (x - y) / (2.0 * sigma * sigma)); };
}

inline Fn poly(int degree, double c)
{
    return [degree, c](double x, double y) { return std::pow(x * y + c, degree); };
}

// All strictly increasing index tuples of length p in [0, len).
inline void tuples(std::size_t len, std::size_t p, std::vector<std::size_t>& cur,
                   std::vector<std::vector<std::size_t>>& out)
{
    if (cur.size() == p) {
        out.push_back(cur);
        return;
    }
    const std::size_t start = cur.empty() ? 0 : cur.back() + 1;
    for (std::size_t i = start; i < len; ++i) {
        cur.push_back(i);
        tuples(len, p, cur, out);
        cur.pop_back();
    }
}

// Sum over every pair of index tuples spelling the same subsequence of
// lambda^(span in s + span in t).
inline double ssk_brute(const std::string& s, const std::string& t, int p, double lambda)
{
    if (p < 1) {
        return 0.0;
    }
    const auto plen = static_cast<std::size_t>(p);
    std::vector<std::vector<std::size_t>> ts, tt;
    std::vector<std::size_t> cur;
    tuples(s.size(), plen, cur, ts);
    tuples(t.size(), plen, cur, tt);
    double sum = 0.0;
    for (const auto& i : ts) {
        for (const auto& j : tt) {
            bool same = true;
            for (std::size_t k = 0; k < plen && same; ++k) {
                same = s[i[k]] == t[j[k]];
            }
            if (same) {
                const double span = static_cast<double>(i.back() - i.front() + 1 + j.back() - j.front() + 1);
                sum += std::pow(lambda, span);
            }
        }
    }
    return sum;
}

inline double ssk_brute_normalized(const std::string& s, const std::string& t, int p, double lambda)
{
    const double ss = ssk_brute(s, s, p, lambda);
    const double tt = ssk_brute(t, t, p, lambda);
    if (ss == 0.0 || tt == 0.0) {
        return 0.0;
    }
    return ssk_brute(s, t, p, lambda) / std::sqrt(ss * tt);
}

inline double mean_kernel(const Fn& k, const std::vector<double>& a, const std::vector<double>& b, bool skip_diag)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (skip_diag && i == j) {
                continue;
            }
            sum += k(a[i], b[j]);
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

inline double vstat_sq(const Fn& k, const std::vector<double>& x, const std::vector<double>& y)
{
    return mean_kernel(k, x, x, false) + mean_kernel(k, y, y, false) - 2.0 * mean_kernel(k, x, y, false);
}

inline double vstat(const Fn& k, const std::vector<double>& x, const std::vector<double>& y)
{
    return std::sqrt(std::max(vstat_sq(k, x, y), 0.0));
}

inline double ustat_sq(const Fn& k, const std::vector<double>& x, const std::vector<double>& y)
{
    return mean_kernel(k, x, x, true) + mean_kernel(k, y, y, true) - 2.0 * mean_kernel(k, x, y, false);
}

// Population MMD^2 between two distributions on {0, 1} with P(1) = p, Q(1) = q.
inline double discrete_mmd_sq(const Fn& k, double p, double q)
{
    const double pw[2] = {1.0 - p, p};
    const double qw[2] = {1.0 - q, q};
    double sum = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            sum += (pw[a] * pw[b] + qw[a] * qw[b] - 2.0 * pw[a] * qw[b]) * k(a, b);
        }
    }
    return sum;
}

// Expected U-statistic over all size-2 samples from the two distributions.
inline double expected_ustat_sq(const Fn& k, double p, double q)
{
    const double pw[2] = {1.0 - p, p};
    const double qw[2] = {1.0 - q, q};
    double sum = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
        const int x0 = mask & 1, x1 = (mask >> 1) & 1, y0 = (mask >> 2) & 1, y1 = (mask >> 3) & 1;
        const double w = pw[x0] * pw[x1] * qw[y0] * qw[y1];
        sum += w * ustat_sq(k, {double(x0), double(x1)}, {double(y0), double(y1)});
    }
    return sum;
}

struct MonteCarlo {
    double mean = 0.0;
    double std_error = 0.0;
};

// Unbiased Monte-Carlo estimate of MMD^2 between N(m1, s1^2) and N(m2, s2^2)
// from independent quadruples (x, x', y, y').
inline MonteCarlo mc_gaussian_mmd_sq(const Fn& k, double m1, double s1, double m2, double s2, std::size_t draws,
                                     std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> px(m1, s1), py(m2, s2);
    double mean = 0.0, m2acc = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double x = px(rng), xp = px(rng), y = py(rng), yp = py(rng);
        const double h = k(x, xp) + k(y, yp) - k(x, yp) - k(xp, y);
        const double delta = h - mean;
        mean += delta / static_cast<double>(i + 1);
        m2acc += delta * (h - mean);
    }
    const double var = m2acc / static_cast<double>(draws - 1);
    return {mean, std::sqrt(var / static_cast<double>(draws))};
}

// Closed forms of the two deviation bounds written out term by term.
inline double mean_embedding_bound(double delta, double eta, double n, double trace, double opnorm)
{
    const double a = std::sqrt(6.0 * opnorm * std::log(1.0 / eta) / (delta * n));
    const double b = 2.0 * std::sqrt(trace / n);
    return 12.0 * (1.0 + std::sqrt(2.0)) / delta * (a > b ? a : b);
}

inline double mmd_bound(double delta, double eta, double n, double trace_sum, double opnorm_sum)
{
    const double a = std::sqrt(opnorm_sum * std::log(1.0 / eta) / (delta * n));
    const double b = 2.0 * std::sqrt(trace_sum / n);
    return 12.0 / delta * (a > b ? a : b);
}

// k-th order statistic (1-based) by full sort.
inline double order_statistic(std::vector<double> v, std::size_t k)
{
    std::sort(v.begin(), v.end());
    return v[k - 1];
}

inline std::vector<double> reals(const monk::Sample& s)
{
    std::vector<double> out;
    for (const auto& p : s) {
        out.push_back(std::get<double>(p));
    }
    return out;
}

} // namespace oracle
