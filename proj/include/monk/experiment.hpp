#pragma once

#include "monk/analysis.hpp"
#include "monk/datagen.hpp"
#include "monk/error.hpp"
#include "monk/kernels.hpp"
#include "monk/mmd.hpp"
#include "monk/rng.hpp"
#include "monk/splice.hpp"
#include "monk/twosample.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace monk {

enum class ExperimentKind { gauss_clean, gauss_outliers, pareto, dna };

inline std::string_view experiment_name(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::gauss_clean: return "gauss_clean";
    case ExperimentKind::gauss_outliers: return "gauss_outliers";
    case ExperimentKind::pareto: return "pareto";
    case ExperimentKind::dna: return "dna";
    }
    return "unknown";
}

struct GaussianParams {
    double m1 = 0.2;
    double s1 = 0.7;
    double m2 = 0.9;
    double s2 = 0.4;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::gauss_clean;
    std::string kernel = "poly:degree=2,c=1";
    std::vector<std::string> grid; // dna tuning grid; empty means {kernel}
    std::vector<Estimator> estimators{Estimator::ustat, Estimator::monk_bcd, Estimator::monk_bcd_fast};
    std::vector<std::size_t> n_list{200};
    std::vector<std::size_t> q_list{5};
    std::size_t reps = 1;
    std::size_t iterations = 100;
    std::size_t shuffle_every = 10;
    std::size_t b_boot = 150;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::optional<ContaminationSpec> contamination;
    GaussianParams gaussian;
    double pareto_alpha = 3.0;
    std::string data_path;
    std::vector<std::string> pairs{"EI-IE", "EI-EI", "IE-IE"};
    bool drop_remainder = false;
    bool same_sample = false; // dna debug: use the X subsample for Y as well

    EstimatorOptions estimator_options(Estimator e, std::size_t q) const
    {
        EstimatorOptions opt;
        opt.method = e;
        opt.q = q;
        opt.iterations = iterations;
        opt.shuffle_every = shuffle_every;
        opt.remainder = drop_remainder ? RemainderPolicy::drop_remainder : RemainderPolicy::strict;
        return opt;
    }

    std::vector<Kernel> kernel_grid() const
    {
        std::vector<Kernel> out;
        if (grid.empty()) {
            out.push_back(parse_kernel(kernel));
        }
        for (const auto& spec : grid) {
            out.push_back(parse_kernel(spec));
        }
        return out;
    }
};

namespace detail {

template <class T>
T json_get(const nlohmann::json& j, const char* key)
{
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

inline ContaminationSpec& contamination_slot(ExperimentConfig& cfg)
{
    if (!cfg.contamination) {
        cfg.contamination = ContaminationSpec{};
    }
    return *cfg.contamination;
}

} // namespace detail

// Reads a flat JSON object; unknown keys are rejected so typos surface early.
inline ExperimentConfig parse_config(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    ExperimentConfig cfg;
    for (const auto& [key, value] : j.items()) {
        const char* k = key.c_str();
        if (key == "experiment") {
            const auto name = detail::json_get<std::string>(j, k);
            bool found = false;
            for (auto kind : {ExperimentKind::gauss_clean, ExperimentKind::gauss_outliers, ExperimentKind::pareto,
                              ExperimentKind::dna}) {
                if (name == experiment_name(kind)) {
                    cfg.experiment = kind;
                    found = true;
                }
            }
            if (!found) {
                throw ConfigError("unknown experiment '" + name + "'");
            }
        } else if (key == "kernel") {
            cfg.kernel = detail::json_get<std::string>(j, k);
        } else if (key == "grid") {
            cfg.grid = detail::json_get<std::vector<std::string>>(j, k);
        } else if (key == "estimators") {
            cfg.estimators.clear();
            for (const auto& name : detail::json_get<std::vector<std::string>>(j, k)) {
                try {
                    cfg.estimators.push_back(parse_estimator(name));
                } catch (const InvalidArgument& e) {
                    throw ConfigError(e.what());
                }
            }
        } else if (key == "N_list" || key == "N") {
            cfg.n_list = detail::json_get<std::vector<std::size_t>>(j, k);
        } else if (key == "Q_list" || key == "Q") {
            cfg.q_list = detail::json_get<std::vector<std::size_t>>(j, k);
        } else if (key == "reps") {
            cfg.reps = detail::json_get<std::size_t>(j, k);
        } else if (key == "T") {
            cfg.iterations = detail::json_get<std::size_t>(j, k);
        } else if (key == "shuffle_every") {
            cfg.shuffle_every = detail::json_get<std::size_t>(j, k);
        } else if (key == "B") {
            cfg.b_boot = detail::json_get<std::size_t>(j, k);
        } else if (key == "alpha") {
            cfg.alpha = detail::json_get<double>(j, k);
        } else if (key == "seed") {
            cfg.seed = detail::json_get<std::uint64_t>(j, k);
        } else if (key == "n_corrupt") {
            detail::contamination_slot(cfg).n_corrupt = detail::json_get<std::size_t>(j, k);
        } else if (key == "outlier_x") {
            detail::contamination_slot(cfg).x_value = detail::json_get<double>(j, k);
        } else if (key == "outlier_y") {
            detail::contamination_slot(cfg).y_value = detail::json_get<double>(j, k);
        } else if (key == "m1") {
            cfg.gaussian.m1 = detail::json_get<double>(j, k);
        } else if (key == "s1") {
            cfg.gaussian.s1 = detail::json_get<double>(j, k);
        } else if (key == "m2") {
            cfg.gaussian.m2 = detail::json_get<double>(j, k);
        } else if (key == "s2") {
            cfg.gaussian.s2 = detail::json_get<double>(j, k);
        } else if (key == "pareto_alpha") {
            cfg.pareto_alpha = detail::json_get<double>(j, k);
        } else if (key == "data") {
            cfg.data_path = detail::json_get<std::string>(j, k);
        } else if (key == "pairs") {
            cfg.pairs = detail::json_get<std::vector<std::string>>(j, k);
        } else if (key == "drop_remainder") {
            cfg.drop_remainder = detail::json_get<bool>(j, k);
        } else if (key == "same_sample") {
            cfg.same_sample = detail::json_get<bool>(j, k);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (cfg.experiment == ExperimentKind::gauss_outliers && !cfg.contamination) {
        cfg.contamination = ContaminationSpec{5, 2000.0, 4000.0};
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config '" + path + "'");
    }
    try {
        return parse_config(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

inline std::pair<SpliceLabel, SpliceLabel> parse_pair(const std::string& pair)
{
    auto label = [&](std::string_view s) {
        if (s == "EI") {
            return SpliceLabel::EI;
        }
        if (s == "IE") {
            return SpliceLabel::IE;
        }
        if (s == "N") {
            return SpliceLabel::N;
        }
        throw ConfigError("unknown class in pair '" + pair + "'");
    };
    const auto dash = pair.find('-');
    if (dash == std::string::npos) {
        throw ConfigError("pair '" + pair + "' must look like EI-IE");
    }
    return {label(std::string_view(pair).substr(0, dash)), label(std::string_view(pair).substr(dash + 1))};
}

// Checks every cross-field invariant of the configuration.
inline void validate(const ExperimentConfig& cfg)
{
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (cfg.reps < 1) {
        fail("reps must be >= 1");
    }
    if (cfg.estimators.empty()) {
        fail("no estimators configured");
    }
    if (cfg.n_list.empty() || cfg.q_list.empty()) {
        fail("N_list and Q_list must be non-empty");
    }
    if (cfg.iterations < 1) {
        fail("T must be >= 1");
    }
    std::vector<Kernel> grid;
    try {
        grid = cfg.kernel_grid();
    } catch (const InvalidArgument& e) {
        fail(e.what());
    }

    const bool dna = cfg.experiment == ExperimentKind::dna;
    const bool any_monk = std::any_of(cfg.estimators.begin(), cfg.estimators.end(), is_monk);
    const bool any_ustat = std::find(cfg.estimators.begin(), cfg.estimators.end(), Estimator::ustat)
                         != cfg.estimators.end();
    for (std::size_t n : cfg.n_list) {
        const std::size_t effective = dna ? n / 3 : n;
        if (effective < 1 || (any_ustat && effective < 2)) {
            fail("N = " + std::to_string(n) + " is too small");
        }
        if (!any_monk) {
            continue;
        }
        for (std::size_t q : cfg.q_list) {
            if (q < 1 || q > effective) {
                fail("Q = " + std::to_string(q) + " is not in [1, " + std::to_string(effective) + "]");
            }
            if (effective % q != 0 && !cfg.drop_remainder) {
                fail("Q = " + std::to_string(q) + " does not divide " + std::to_string(effective)
                     + " (enable drop_remainder)");
            }
        }
    }

    if (dna) {
        if (cfg.q_list.size() != 1) {
            fail("dna experiment takes a single Q");
        }
        if (cfg.b_boot < 1) {
            fail("B must be >= 1");
        }
        if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
            fail("alpha must lie in (0, 1)");
        }
        if (cfg.pairs.empty()) {
            fail("no class pairs configured");
        }
        for (const auto& p : cfg.pairs) {
            parse_pair(p);
        }
        for (const auto& k : grid) {
            if (k.family() != KernelFamily::string_subsequence) {
                fail("dna experiment needs string kernels, got " + to_string(k));
            }
        }
        return;
    }

    if (grid.size() != 1) {
        fail("experiment-1 runs take a single kernel");
    }
    if (cfg.experiment != ExperimentKind::pareto) {
        try {
            analytic_mmd_gaussian(grid.front(), cfg.gaussian.m1, cfg.gaussian.s1, cfg.gaussian.m2, cfg.gaussian.s2);
        } catch (const Error& e) {
            fail(e.what());
        }
    } else if (!(cfg.pareto_alpha > 0.0)) {
        fail("pareto_alpha must be positive");
    }
    if (cfg.contamination) {
        for (std::size_t n : cfg.n_list) {
            if (cfg.contamination->n_corrupt > n) {
                fail("n_corrupt exceeds N = " + std::to_string(n));
            }
        }
    }
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

inline std::string fixed_ms(double ms)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", ms);
    return buf;
}

// Quotes a CSV field when it contains a separator, quote or line break.
inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

} // namespace detail

inline constexpr const char* kExperiment1Header =
    "experiment,kernel,estimator,N,Q,rep,seed,mmd_hat,mmd_true,abs_error,wall_ms,error";
inline constexpr const char* kExperiment2Header = "pair,N,rep,seed,estimator,mmd_hat,q_hat,diff,error";

// Synthetic-data sweep. For every (N, rep) one data set is drawn and shared by
// all estimators and Q values; rows are written in (estimator, N, Q, rep)
// order. Returns the number of data rows.
inline std::size_t run_experiment1(const ExperimentConfig& cfg, std::ostream& out)
{
    validate(cfg);
    if (cfg.experiment == ExperimentKind::dna) {
        throw ConfigError("run_experiment1: dna experiments go through run_experiment2");
    }
    const Kernel kernel = cfg.kernel_grid().front();
    const std::string kernel_label = detail::csv_field(to_string(kernel));
    const bool pareto = cfg.experiment == ExperimentKind::pareto;
    const auto& gp = cfg.gaussian;
    const double mmd_true = pareto ? 0.0 : analytic_mmd_gaussian(kernel, gp.m1, gp.s1, gp.m2, gp.s2);

    const std::size_t n_est = cfg.estimators.size();
    const std::size_t n_n = cfg.n_list.size();
    const std::size_t n_q = cfg.q_list.size();
    std::vector<std::string> rows(n_est * n_n * n_q * cfg.reps);
    auto slot = [&](std::size_t e, std::size_t ni, std::size_t qi, std::size_t rep) -> std::string& {
        return rows[((e * n_n + ni) * n_q + qi) * cfg.reps + rep];
    };

    for (std::size_t ni = 0; ni < n_n; ++ni) {
        const std::size_t n = cfg.n_list[ni];
        for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
            const std::uint64_t data_seed = derive_seed(cfg.seed, {n, rep});
            Sample xs = pareto ? sample_pareto(cfg.pareto_alpha, n, derive_seed(data_seed, 1))
                               : sample_gaussian(gp.m1, gp.s1, n, derive_seed(data_seed, 1));
            Sample ys = pareto ? sample_pareto(cfg.pareto_alpha, n, derive_seed(data_seed, 2))
                               : sample_gaussian(gp.m2, gp.s2, n, derive_seed(data_seed, 2));
            if (cfg.contamination) {
                std::tie(xs, ys) = contaminate(std::move(xs), std::move(ys), *cfg.contamination);
            }

            // Shared Gram matrix and factor; their build times are charged to
            // every row that needs them.
            std::optional<AggregatedGram> shared;
            double gram_ms = 0.0;
            double chol_ms = 0.0;
            auto shared_gram = [&]() -> AggregatedGram& {
                if (!shared) {
                    const auto t0 = detail::Clock::now();
                    shared.emplace(kernel, xs, ys);
                    gram_ms = detail::elapsed_ms(t0);
                }
                return *shared;
            };

            for (std::size_t e = 0; e < n_est; ++e) {
                const Estimator method = cfg.estimators[e];
                for (std::size_t qi = 0; qi < n_q; ++qi) {
                    const std::size_t q = cfg.q_list[qi];
                    const auto opt = cfg.estimator_options(method, q);
                    const std::uint64_t est_seed = derive_seed(data_seed, {100, q});
                    std::string mmd_hat, abs_error, error;
                    double wall = 0.0;
                    try {
                        MmdEstimate est;
                        if (method == Estimator::monk_bcd_fast) {
                            const auto t0 = detail::Clock::now();
                            est = monk_bcd_fast(kernel, xs, ys, opt, est_seed);
                            wall = detail::elapsed_ms(t0);
                        } else {
                            const AggregatedGram& g = shared_gram();
                            if (method == Estimator::monk_bcd && !g.has_cholesky()) {
                                const auto t0 = detail::Clock::now();
                                g.cholesky();
                                chol_ms = detail::elapsed_ms(t0);
                            }
                            const auto t0 = detail::Clock::now();
                            est = estimate(g, opt, est_seed);
                            wall = detail::elapsed_ms(t0) + gram_ms + (method == Estimator::monk_bcd ? chol_ms : 0.0);
                        }
                        mmd_hat = detail::format_real(est.value);
                        abs_error = detail::format_real(std::abs(comparison_value(est) - mmd_true));
                    } catch (const Error& ex) {
                        error = detail::csv_field(ex.what());
                    }
                    slot(e, ni, qi, rep) = std::string(experiment_name(cfg.experiment)) + "," + kernel_label + ","
                                         + std::string(estimator_name(method)) + "," + std::to_string(n) + ","
                                         + std::to_string(q) + "," + std::to_string(rep) + ","
                                         + std::to_string(data_seed) + "," + mmd_hat + ","
                                         + detail::format_real(mmd_true) + "," + abs_error + ","
                                         + detail::fixed_ms(wall) + "," + error;
                }
            }
        }
    }

    out << kExperiment1Header << '\n';
    for (const auto& r : rows) {
        out << r << '\n';
    }
    return rows.size();
}

// DNA two-sample sweep. For every (pair, N, rep) both sides are drawn
// uniformly without replacement from their classes and all estimators are
// tested on one shared three-way split. Rows follow (pair, N, rep, estimator).
inline std::size_t run_experiment2(const ExperimentConfig& cfg, const std::vector<SpliceRecord>& records,
                                   std::ostream& out)
{
    validate(cfg);
    if (cfg.experiment != ExperimentKind::dna) {
        throw ConfigError("run_experiment2: needs experiment = dna");
    }
    const std::vector<Kernel> grid = cfg.kernel_grid();
    std::vector<EstimatorOptions> estimators;
    for (Estimator e : cfg.estimators) {
        estimators.push_back(cfg.estimator_options(e, cfg.q_list.front()));
    }

    out << kExperiment2Header << '\n';
    std::size_t written = 0;
    for (std::size_t pi = 0; pi < cfg.pairs.size(); ++pi) {
        const auto [label_x, label_y] = parse_pair(cfg.pairs[pi]);
        const auto pool_x = sequences_with_label(records, label_x);
        const auto pool_y = sequences_with_label(records, label_y);
        for (std::size_t n : cfg.n_list) {
            if (n > pool_x.size() || n > pool_y.size()) {
                throw ConfigError("N = " + std::to_string(n) + " exceeds the class sizes of pair " + cfg.pairs[pi]);
            }
            for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
                const std::uint64_t rep_seed = derive_seed(cfg.seed, {pi, n, rep});
                auto subsample = [&](const std::vector<std::string>& pool, std::uint64_t s) {
                    Rng rng(s);
                    const auto perm = random_permutation(pool.size(), rng);
                    Sample out_sample;
                    out_sample.reserve(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        out_sample.emplace_back(pool[perm[i]]);
                    }
                    return out_sample;
                };
                const Sample xs = subsample(pool_x, derive_seed(rep_seed, 1));
                const Sample ys = cfg.same_sample ? xs : subsample(pool_y, derive_seed(rep_seed, 2));

                std::vector<std::string> lines(estimators.size());
                try {
                    const auto results = two_sample_tests(xs, ys, grid, estimators, cfg.b_boot, cfg.alpha,
                                                          derive_seed(rep_seed, 3));
                    for (std::size_t e = 0; e < estimators.size(); ++e) {
                        const auto& r = results[e];
                        lines[e] = detail::format_real(r.statistic) + "," + detail::format_real(r.quantile) + ","
                                 + detail::format_real(r.diff) + ",";
                    }
                } catch (const Error& ex) {
                    for (auto& l : lines) {
                        l = ",,," + detail::csv_field(ex.what());
                    }
                }
                for (std::size_t e = 0; e < estimators.size(); ++e) {
                    out << cfg.pairs[pi] << ',' << n << ',' << rep << ',' << rep_seed << ','
                        << estimator_name(estimators[e].method) << ',' << lines[e] << '\n';
                    ++written;
                }
            }
        }
    }
    return written;
}

} // namespace monk
