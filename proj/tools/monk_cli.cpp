// Command-line front-end: experiment sweeps and one-off estimates.

#include "monk/monk.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw monk::ConfigError("cannot open output file '" + path + "'");
    }
    return out;
}

void apply_globals(monk::ExperimentConfig& cfg, const std::optional<std::uint64_t>& seed, bool drop_remainder)
{
    if (seed) {
        cfg.seed = *seed;
    }
    cfg.drop_remainder = cfg.drop_remainder || drop_remainder;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Robust kernel MMD estimation (median-of-means, MONK)"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    bool drop_remainder = false;
    app.add_option("--seed", seed, "Master seed (overrides the config)");
    app.add_flag("--drop-remainder", drop_remainder, "Drop trailing points when Q does not divide N");

    std::string config_path, out_path, data_path;
    auto* exp1 = app.add_subcommand("exp1", "Synthetic error sweep (gauss_clean, gauss_outliers, pareto)");
    exp1->add_option("--config", config_path, "JSON config")->required();
    exp1->add_option("--out", out_path, "Output CSV")->required();

    auto* dna = app.add_subcommand("dna", "Two-sample tests on the splice junction data");
    dna->add_option("--data", data_path, "Splice data file")->required();
    dna->add_option("--config", config_path, "JSON config")->required();
    dna->add_option("--out", out_path, "Output CSV")->required();

    std::string estimator_name, kernel_spec, x_path, y_path;
    std::size_t q = 1;
    std::size_t t = 100;
    auto* est = app.add_subcommand("estimate", "Estimate MMD between two samples and print it");
    est->add_option("--estimator", estimator_name, "vstat | ustat | monk_bcd | monk_bcd_fast")->required();
    est->add_option("--kernel", kernel_spec, "Kernel spec, e.g. rbf:sigma=1")->required();
    est->add_option("--x", x_path, "CSV with the first sample")->required();
    est->add_option("--y", y_path, "CSV with the second sample")->required();
    est->add_option("--q", q, "Number of blocks")->capture_default_str();
    est->add_option("--t", t, "Iterations")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (exp1->parsed()) {
            auto cfg = monk::load_config(config_path);
            apply_globals(cfg, seed, drop_remainder);
            auto out = open_output(out_path);
            monk::run_experiment1(cfg, out);
        } else if (dna->parsed()) {
            auto cfg = monk::load_config(config_path);
            apply_globals(cfg, seed, drop_remainder);
            if (!cfg.data_path.empty() && cfg.data_path != data_path) {
                std::cerr << "note: --data overrides the config data path\n";
            }
            const auto data = monk::load_splice(data_path);
            for (const auto& d : data.diagnostics) {
                std::cerr << "skipped line " << d.line << ": " << d.message << '\n';
            }
            auto out = open_output(out_path);
            monk::run_experiment2(cfg, data.records, out);
        } else if (est->parsed()) {
            monk::EstimatorOptions opt;
            try {
                opt.method = monk::parse_estimator(estimator_name);
            } catch (const monk::InvalidArgument& e) {
                throw monk::ConfigError(e.what());
            }
            opt.q = q;
            opt.iterations = t;
            opt.remainder = drop_remainder ? monk::RemainderPolicy::drop_remainder : monk::RemainderPolicy::strict;
            monk::Kernel kernel = monk::Kernel::linear();
            try {
                kernel = monk::parse_kernel(kernel_spec);
            } catch (const monk::InvalidArgument& e) {
                throw monk::ConfigError(e.what());
            }
            const auto xs = monk::read_sample_csv(x_path);
            const auto ys = monk::read_sample_csv(y_path);
            const auto result = monk::estimate(kernel, xs, ys, opt, seed.value_or(0));
            std::printf("%.17g\n", result.value);
        }
    } catch (const monk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const monk::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const monk::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
