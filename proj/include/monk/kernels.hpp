#pragma once

#include "monk/detail/parallel.hpp"
#include "monk/error.hpp"
#include "monk/linalg.hpp"
#include "monk/types.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace monk {

enum class KernelFamily { rbf, polynomial, linear, string_subsequence };

inline std::string_view family_name(KernelFamily family)
{
    switch (family) {
    case KernelFamily::rbf: return "rbf";
    case KernelFamily::polynomial: return "poly";
    case KernelFamily::linear: return "linear";
    case KernelFamily::string_subsequence: return "ssk";
    }
    return "unknown";
}

// Positive-definite kernel on reals, real vectors, or strings.
//
//   rbf                 exp(-||x - y||^2 / (2 sigma^2))
//   polynomial          (<x, y> + c)^d
//   linear              <x, y>
//   string_subsequence  length-p gapped subsequence kernel with decay lambda,
//                       optionally normalised to k(s,t)/sqrt(k(s,s) k(t,t))
class Kernel {
public:
    static Kernel rbf(double sigma)
    {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw InvalidArgument("rbf kernel: sigma must be positive");
        }
        Kernel k(KernelFamily::rbf);
        k.sigma_ = sigma;
        return k;
    }

    static Kernel polynomial(int degree, double offset = 1.0)
    {
        if (degree < 1) {
            throw InvalidArgument("polynomial kernel: degree must be >= 1");
        }
        if (!(offset >= 0.0) || !std::isfinite(offset)) {
            throw InvalidArgument("polynomial kernel: offset must be >= 0");
        }
        Kernel k(KernelFamily::polynomial);
        k.degree_ = degree;
        k.offset_ = offset;
        return k;
    }

    static Kernel linear() { return Kernel(KernelFamily::linear); }

    static Kernel string_subsequence(int length, double decay, bool normalized)
    {
        if (length < 1) {
            throw InvalidArgument("string subsequence kernel: p must be >= 1");
        }
        if (!(decay > 0.0 && decay <= 1.0)) {
            throw InvalidArgument("string subsequence kernel: lambda must lie in (0, 1]");
        }
        Kernel k(KernelFamily::string_subsequence);
        k.length_ = length;
        k.decay_ = decay;
        k.normalized_ = normalized;
        return k;
    }

    KernelFamily family() const { return family_; }
    double sigma() const { return sigma_; }
    int degree() const { return degree_; }
    double offset() const { return offset_; }
    int length() const { return length_; }
    double decay() const { return decay_; }
    bool normalized() const { return normalized_; }

    // Named hyperparameters of the active family.
    std::map<std::string, double> params() const
    {
        switch (family_) {
        case KernelFamily::rbf: return {{"sigma", sigma_}};
        case KernelFamily::polynomial: return {{"degree", degree_}, {"c", offset_}};
        case KernelFamily::linear: return {};
        case KernelFamily::string_subsequence:
            return {{"p", length_}, {"lambda", decay_}, {"norm", normalized_ ? 1.0 : 0.0}};
        }
        return {};
    }

    double operator()(const Point& x, const Point& y) const;

    friend bool operator==(const Kernel&, const Kernel&) = default;

private:
    explicit Kernel(KernelFamily family) : family_(family) {}

    KernelFamily family_;
    double sigma_ = 1.0;
    int degree_ = 2;
    double offset_ = 1.0;
    int length_ = 3;
    double decay_ = 0.8;
    bool normalized_ = true;
};

namespace detail {

inline const char* point_kind(const Point& p)
{
    switch (p.index()) {
    case 0: return "real";
    case 1: return "real vector";
    default: return "string";
    }
}

// <x, y> and ||x - y||^2 for two real points of matching shape.
struct RealPair {
    double dot;
    double sq_dist;
};

inline RealPair real_pair(const Point& x, const Point& y, std::string_view who)
{
    if (const double* a = std::get_if<double>(&x)) {
        if (const double* b = std::get_if<double>(&y)) {
            const double d = *a - *b;
            return {*a * *b, d * d};
        }
    } else if (const RealVector* u = std::get_if<RealVector>(&x)) {
        if (const RealVector* v = std::get_if<RealVector>(&y)) {
            if (u->size() != v->size()) {
                throw DimensionMismatch(std::string(who) + " kernel: vector points differ in dimension");
            }
            RealPair r{0.0, 0.0};
            for (std::size_t i = 0; i < u->size(); ++i) {
                r.dot += (*u)[i] * (*v)[i];
                const double d = (*u)[i] - (*v)[i];
                r.sq_dist += d * d;
            }
            return r;
        }
    }
    throw DomainError(std::string(who) + " kernel: cannot evaluate on (" + point_kind(x) + ", "
                      + point_kind(y) + ") points");
}

// Unnormalised length-p subsequence kernel via the O(p |s| |t|) recursion of
// Lodhi et al. Kp[l](i, j) holds K'_l on the prefixes s[:i], t[:j].
inline double ssk_raw(std::string_view s, std::string_view t, int p, double lambda)
{
    if (p < 1) {
        throw InvalidArgument("string subsequence kernel: p must be >= 1");
    }
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw InvalidArgument("string subsequence kernel: lambda must lie in (0, 1]");
    }
    const auto plen = static_cast<std::size_t>(p);
    if (s.empty() || t.empty() || plen > s.size() || plen > t.size()) {
        return 0.0;
    }
    // Evaluate in a canonical argument order so k(s,t) and k(t,s) agree bitwise.
    if (t < s) {
        std::swap(s, t);
    }

    const std::size_t rows = s.size() + 1;
    const std::size_t cols = t.size() + 1;
    thread_local std::vector<double> prev;
    thread_local std::vector<double> curr;
    prev.assign(rows * cols, 1.0); // K'_0 == 1
    auto at = [cols](std::vector<double>& m, std::size_t i, std::size_t j) -> double& {
        return m[i * cols + j];
    };

    for (std::size_t l = 1; l < plen; ++l) {
        curr.assign(rows * cols, 0.0);
        for (std::size_t i = l; i < rows; ++i) {
            double kpp = 0.0;
            const char si = s[i - 1];
            for (std::size_t j = l; j < cols; ++j) {
                const double match = (si == t[j - 1]) ? lambda * at(prev, i - 1, j - 1) : 0.0;
                kpp = lambda * (kpp + match);
                at(curr, i, j) = lambda * at(curr, i - 1, j) + kpp;
            }
        }
        std::swap(prev, curr);
    }

    const double lambda2 = lambda * lambda;
    double total = 0.0;
    for (std::size_t i = plen; i < rows; ++i) {
        const char si = s[i - 1];
        double row = 0.0;
        for (std::size_t j = plen; j < cols; ++j) {
            if (si == t[j - 1]) {
                row += at(prev, i - 1, j - 1);
            }
        }
        total += row;
    }
    return lambda2 * total;
}

inline double normalize_ssk(double raw, double self_s, double self_t)
{
    const double denom = std::sqrt(self_s * self_t);
    return denom > 0.0 ? raw / denom : 0.0;
}

inline const std::string& as_string(const Point& p)
{
    if (const std::string* s = std::get_if<std::string>(&p)) {
        return *s;
    }
    throw DomainError(std::string("ssk kernel: cannot evaluate on a ") + point_kind(p) + " point");
}

} // namespace detail

// String subsequence kernel. p longer than either string, or an empty string,
// gives 0; the normalised form maps 0/0 to 0.
inline double ssk_eval(std::string_view s, std::string_view t, int p, double lambda, bool normalized)
{
    const double raw = detail::ssk_raw(s, t, p, lambda);
    if (!normalized) {
        return raw;
    }
    if (raw == 0.0) {
        return 0.0;
    }
    return detail::normalize_ssk(raw, detail::ssk_raw(s, s, p, lambda), detail::ssk_raw(t, t, p, lambda));
}

inline double kernel_eval(const Kernel& k, const Point& x, const Point& y)
{
    switch (k.family()) {
    case KernelFamily::rbf: {
        const auto r = detail::real_pair(x, y, "rbf");
        return std::exp(-r.sq_dist / (2.0 * k.sigma() * k.sigma()));
    }
    case KernelFamily::polynomial: {
        const auto r = detail::real_pair(x, y, "polynomial");
        const double base = r.dot + k.offset();
        return k.degree() == 2 ? base * base : std::pow(base, k.degree());
    }
    case KernelFamily::linear:
        return detail::real_pair(x, y, "linear").dot;
    case KernelFamily::string_subsequence:
        return ssk_eval(detail::as_string(x), detail::as_string(y), k.length(), k.decay(), k.normalized());
    }
    throw UnsupportedKernel("kernel_eval: unknown kernel family");
}

inline double Kernel::operator()(const Point& x, const Point& y) const
{
    return kernel_eval(*this, x, y);
}

namespace detail {

// Raw self-similarities needed to normalise an SSK Gram matrix.
inline std::vector<double> ssk_self_values(const Kernel& k, const Sample& xs)
{
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        const auto& s = as_string(xs[i]);
        out[i] = ssk_raw(s, s, k.length(), k.decay());
    });
    return out;
}

class PairEvaluator {
public:
    PairEvaluator(const Kernel& k, const Sample& xs, const Sample& ys, bool same)
        : k_(k), xs_(xs), ys_(ys)
    {
        if (k.family() == KernelFamily::string_subsequence && k.normalized()) {
            self_x_ = ssk_self_values(k, xs);
            self_y_ = same ? self_x_ : ssk_self_values(k, ys);
        }
    }

    double operator()(std::size_t i, std::size_t j) const
    {
        if (self_x_.empty() && self_y_.empty()) {
            return kernel_eval(k_, xs_[i], ys_[j]);
        }
        const double raw = ssk_raw(as_string(xs_[i]), as_string(ys_[j]), k_.length(), k_.decay());
        return raw == 0.0 ? 0.0 : normalize_ssk(raw, self_x_[i], self_y_[j]);
    }

private:
    const Kernel& k_;
    const Sample& xs_;
    const Sample& ys_;
    std::vector<double> self_x_;
    std::vector<double> self_y_;
};

// Scalar points under a closed-form kernel skip the per-pair dispatch. The
// arithmetic matches kernel_eval term for term, so values are identical.
inline std::optional<std::vector<double>> scalar_values(const Kernel& k, const Sample& xs)
{
    if (k.family() == KernelFamily::string_subsequence) {
        return std::nullopt;
    }
    std::vector<double> out;
    out.reserve(xs.size());
    for (const auto& p : xs) {
        const double* v = std::get_if<double>(&p);
        if (v == nullptr) {
            return std::nullopt;
        }
        out.push_back(*v);
    }
    return out;
}

inline Matrix scalar_gram(const Kernel& k, const std::vector<double>& a, const std::vector<double>& b)
{
    Matrix out(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    auto fill = [&](auto f) {
        parallel_for(b.size(), [&](std::size_t j) {
            double* col = out.col(static_cast<Eigen::Index>(j)).data();
            const double y = b[j];
            for (std::size_t i = 0; i < a.size(); ++i) {
                col[i] = f(a[i], y);
            }
        });
    };
    switch (k.family()) {
    case KernelFamily::rbf: {
        const double denom = 2.0 * k.sigma() * k.sigma();
        fill([denom](double x, double y) {
            const double d = x - y;
            return std::exp(-(d * d) / denom);
        });
        break;
    }
    case KernelFamily::polynomial: {
        const double c = k.offset();
        const int degree = k.degree();
        fill([c, degree](double x, double y) {
            const double base = x * y + c;
            return degree == 2 ? base * base : std::pow(base, degree);
        });
        break;
    }
    case KernelFamily::linear:
        fill([](double x, double y) { return x * y; });
        break;
    case KernelFamily::string_subsequence:
        throw UnsupportedKernel("scalar_gram: string kernel");
    }
    return out;
}

} // namespace detail

// Gram matrix over a single sample; exactly symmetric (each unordered pair is
// evaluated once).
inline Matrix gram(const Kernel& k, const Sample& xs)
{
    if (const auto values = detail::scalar_values(k, xs)) {
        return detail::scalar_gram(k, *values, *values);
    }
    const std::size_t n = xs.size();
    Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const detail::PairEvaluator eval(k, xs, xs, true);
    detail::parallel_for(n, [&](std::size_t i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (std::size_t j = i; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const double v = eval(i, j);
            out(ii, jj) = v;
            out(jj, ii) = v;
        }
    });
    return out;
}

// |xs| x |ys| cross Gram matrix. Passing the same Sample object twice takes the
// symmetric path.
inline Matrix gram(const Kernel& k, const Sample& xs, const Sample& ys)
{
    if (&xs == &ys) {
        return gram(k, xs);
    }
    const auto a = detail::scalar_values(k, xs);
    const auto b = a ? detail::scalar_values(k, ys) : std::nullopt;
    if (a && b) {
        return detail::scalar_gram(k, *a, *b);
    }
    const std::size_t rows = xs.size();
    const std::size_t cols = ys.size();
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const detail::PairEvaluator eval(k, xs, ys, false);
    detail::parallel_for(rows, [&](std::size_t i) {
        for (std::size_t j = 0; j < cols; ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = eval(i, j);
        }
    });
    return out;
}

// The 2n x 2n matrix [Kxx Kxy; Kyx Kyy] over two equal-size samples. The
// Cholesky factor is computed on first request and cached; the first call to
// cholesky() is not safe to race from several threads.
class AggregatedGram {
public:
    AggregatedGram(const Kernel& k, const Sample& xs, const Sample& ys)
    {
        if (xs.size() != ys.size()) {
            throw DimensionMismatch("aggregated_gram: samples differ in size");
        }
        if (xs.empty()) {
            throw InvalidArgument("aggregated_gram: samples must be non-empty");
        }
        n_ = xs.size();
        entries_ = gram(k, concat(xs, ys));
    }

    // Wraps a precomputed 2n x 2n matrix laid out as [Kxx Kxy; Kyx Kyy].
    static AggregatedGram from_entries(Matrix entries)
    {
        if (entries.rows() != entries.cols() || entries.rows() == 0 || entries.rows() % 2 != 0) {
            throw DimensionMismatch("aggregated_gram: expected a non-empty 2n x 2n matrix");
        }
        AggregatedGram g;
        g.n_ = static_cast<std::size_t>(entries.rows() / 2);
        g.entries_ = std::move(entries);
        return g;
    }

    std::size_t n() const { return n_; }
    const Matrix& entries() const { return entries_; }

    auto xx() const { return entries_.topLeftCorner(idx(), idx()); }
    auto xy() const { return entries_.topRightCorner(idx(), idx()); }
    auto yx() const { return entries_.bottomLeftCorner(idx(), idx()); }
    auto yy() const { return entries_.bottomRightCorner(idx(), idx()); }

    const CholeskyFactor& cholesky() const
    {
        if (!chol_) {
            chol_ = cholesky_psd(entries_);
        }
        return *chol_;
    }

    bool has_cholesky() const { return chol_.has_value(); }

private:
    AggregatedGram() = default;

    Eigen::Index idx() const { return static_cast<Eigen::Index>(n_); }

    std::size_t n_ = 0;
    Matrix entries_;
    mutable std::optional<CholeskyFactor> chol_;
};

inline AggregatedGram aggregated_gram(const Kernel& k, const Sample& xs, const Sample& ys)
{
    return AggregatedGram(k, xs, ys);
}

// ---------------------------------------------------------------------------
// Kernel spec strings: "rbf:sigma=1", "poly:degree=2,c=1",
// "ssk:p=3,lambda=0.8,norm=1", "linear".
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline double parse_real(std::string_view text, std::string_view what)
{
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw InvalidArgument("cannot parse " + std::string(what) + " value '" + t + "'");
    }
    return value;
}

inline int parse_int(std::string_view text, std::string_view what)
{
    const double v = parse_real(text, what);
    if (v != std::floor(v)) {
        throw InvalidArgument(std::string(what) + " must be an integer");
    }
    return static_cast<int>(v);
}

inline std::string format_real(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace detail

inline Kernel parse_kernel(std::string_view spec)
{
    const std::string text = detail::trim(spec);
    const auto colon = text.find(':');
    const std::string name = detail::trim(std::string_view(text).substr(0, colon));

    std::map<std::string, std::string> args;
    if (colon != std::string::npos) {
        std::string_view rest = std::string_view(text).substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view item = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            if (detail::trim(item).empty()) {
                continue;
            }
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) {
                throw InvalidArgument("kernel spec: expected key=value, got '" + std::string(item) + "'");
            }
            args[detail::trim(item.substr(0, eq))] = detail::trim(item.substr(eq + 1));
        }
    }

    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = args.find(key);
        if (it == args.end()) {
            return std::nullopt;
        }
        std::string v = it->second;
        args.erase(it);
        return v;
    };
    auto finish = [&](Kernel k) {
        if (!args.empty()) {
            throw InvalidArgument("kernel spec: unknown parameter '" + args.begin()->first + "' for "
                                  + name);
        }
        return k;
    };

    if (name == "rbf" || name == "gauss") {
        const auto sigma = take("sigma");
        return finish(Kernel::rbf(sigma ? detail::parse_real(*sigma, "sigma") : 1.0));
    }
    if (name == "poly" || name == "polynomial" || name == "quadratic") {
        const auto degree = take("degree");
        const auto c = take("c");
        return finish(Kernel::polynomial(degree ? detail::parse_int(*degree, "degree") : 2,
                                         c ? detail::parse_real(*c, "c") : 1.0));
    }
    if (name == "linear") {
        return finish(Kernel::linear());
    }
    if (name == "ssk") {
        const auto p = take("p");
        const auto lambda = take("lambda");
        const auto norm = take("norm");
        return finish(Kernel::string_subsequence(p ? detail::parse_int(*p, "p") : 3,
                                                 lambda ? detail::parse_real(*lambda, "lambda") : 0.8,
                                                 norm ? detail::parse_int(*norm, "norm") != 0 : true));
    }
    throw InvalidArgument("kernel spec: unknown kernel family '" + name + "'");
}

inline std::string to_string(const Kernel& k)
{
    using detail::format_real;
    switch (k.family()) {
    case KernelFamily::rbf: return "rbf:sigma=" + format_real(k.sigma());
    case KernelFamily::polynomial:
        return "poly:degree=" + std::to_string(k.degree()) + ",c=" + format_real(k.offset());
    case KernelFamily::linear: return "linear";
    case KernelFamily::string_subsequence:
        return "ssk:p=" + std::to_string(k.length()) + ",lambda=" + format_real(k.decay())
             + ",norm=" + (k.normalized() ? "1" : "0");
    }
    return "unknown";
}

} // namespace monk
