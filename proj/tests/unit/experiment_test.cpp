#include "monk/experiment.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace monk;

namespace {

std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> out(1);
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    return out;
}

std::vector<std::vector<std::string>> rows(const std::string& csv)
{
    std::vector<std::vector<std::string>> out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        out.push_back(split_row(line));
    }
    return out;
}

std::string run1(const ExperimentConfig& cfg)
{
    std::ostringstream out;
    run_experiment1(cfg, out);
    return out.str();
}

ExperimentConfig small_config()
{
    return parse_config(nlohmann::json::parse(R"({
        "experiment": "gauss_outliers", "N_list": [20, 30], "Q_list": [1, 5], "reps": 2,
        "T": 15, "n_corrupt": 2, "seed": 17
    })"));
}

const std::vector<SpliceRecord>& splice_records()
{
    static const auto data = load_splice(std::string(MONK_SPLICE_PATH));
    return data.records;
}

} // namespace

TEST(Config, DefaultsAndAliases)
{
    const auto cfg = parse_config(nlohmann::json::parse(R"({"N": [30], "Q": [3]})"));
    EXPECT_EQ(cfg.experiment, ExperimentKind::gauss_clean);
    EXPECT_EQ(cfg.n_list, std::vector<std::size_t>{30});
    EXPECT_EQ(cfg.q_list, std::vector<std::size_t>{3});
    EXPECT_EQ(cfg.iterations, 100u);
    EXPECT_FALSE(cfg.contamination.has_value());
    EXPECT_NO_THROW(validate(cfg));

    const auto dirty = parse_config(nlohmann::json::parse(R"({"experiment": "gauss_outliers"})"));
    ASSERT_TRUE(dirty.contamination.has_value());
    EXPECT_EQ(dirty.contamination->n_corrupt, 5u);
    EXPECT_EQ(dirty.contamination->x_value, 2000.0);
    EXPECT_EQ(dirty.contamination->y_value, 4000.0);
}

TEST(Config, RejectsBadInput)
{
    auto bad = [](const char* text) {
        return [text] { validate(parse_config(nlohmann::json::parse(text))); };
    };
    EXPECT_THROW(bad(R"({"Nlist": [10]})")(), ConfigError);
    EXPECT_THROW(bad(R"({"experiment": "exp3"})")(), ConfigError);
    EXPECT_THROW(bad(R"({"N_list": "ten"})")(), ConfigError);
    EXPECT_THROW(bad(R"({"N_list": [10], "Q_list": [3]})")(), ConfigError);
    EXPECT_THROW(bad(R"({"reps": 0})")(), ConfigError);
    EXPECT_THROW(bad(R"({"estimators": ["median"]})")(), ConfigError);
    EXPECT_THROW(bad(R"({"kernel": "rbf:sigma=-1"})")(), ConfigError);
    EXPECT_THROW(bad(R"({"kernel": "linear"})")(), ConfigError);
    EXPECT_THROW(bad(R"({"experiment": "gauss_outliers", "N_list": [10], "Q_list": [1], "n_corrupt": 11})")(),
                 ConfigError);
    EXPECT_THROW(bad(R"({"experiment": "dna", "Q_list": [1, 2]})")(), ConfigError);
    EXPECT_THROW(bad(R"({"experiment": "dna", "kernel": "rbf:sigma=1"})")(), ConfigError);
    EXPECT_THROW(bad(R"({"experiment": "dna", "pairs": ["EI-XX"]})")(), ConfigError);
    EXPECT_THROW(bad("[1, 2]")(), ConfigError);
    EXPECT_NO_THROW(bad(R"({"N_list": [10], "Q_list": [3], "drop_remainder": true})")());
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Experiment1, WritesOneRowPerCell)
{
    const auto table = rows(run1(small_config()));
    ASSERT_EQ(table.size(), 1u + 3 * 2 * 2 * 2);
    EXPECT_EQ(table[0], split_row(kExperiment1Header));
    for (std::size_t i = 1; i < table.size(); ++i) {
        ASSERT_EQ(table[i].size(), 12u);
        EXPECT_EQ(table[i][0], "gauss_outliers");
        EXPECT_EQ(table[i][1], "poly:degree=2,c=1");
        EXPECT_TRUE(table[i][11].empty()) << table[i][11];
        const double hat = std::stod(table[i][7]), truth = std::stod(table[i][8]);
        EXPECT_NEAR(std::stod(table[i][9]), std::abs(hat - truth), 1e-12);
    }
    // ustat has no Q: its rows carry Q=1 regardless of Q_list
    EXPECT_EQ(table[1][2], "ustat");
    EXPECT_EQ(table[1][4], "1");
}

TEST(Experiment1, ReRunsAreIdenticalApartFromTiming)
{
    auto strip_time = [](std::vector<std::vector<std::string>> t) {
        for (auto& r : t) {
            r[10].clear();
        }
        return t;
    };
    const auto cfg = small_config();
    EXPECT_EQ(strip_time(rows(run1(cfg))), strip_time(rows(run1(cfg))));

    auto other = cfg;
    other.seed = 18;
    EXPECT_NE(strip_time(rows(run1(cfg))), strip_time(rows(run1(other))));
}

TEST(Experiment1, ParetoRowsHaveZeroTruth)
{
    auto cfg = parse_config(nlohmann::json::parse(R"({
        "experiment": "pareto", "kernel": "rbf:sigma=1", "N_list": [25], "Q_list": [5], "reps": 3, "T": 5
    })"));
    const auto table = rows(run1(cfg));
    ASSERT_EQ(table.size(), 1u + 3 * 3);
    for (std::size_t i = 1; i < table.size(); ++i) {
        EXPECT_EQ(std::stod(table[i][8]), 0.0);
    }
}

TEST(Experiment1, CleanGaussianTruthMatchesTheClosedForm)
{
    const auto cfg = parse_config(nlohmann::json::parse(R"({"N_list": [10], "Q_list": [2], "T": 3})"));
    const auto table = rows(run1(cfg));
    const double truth = analytic_mmd_gaussian(Kernel::polynomial(2, 1.0), 0.2, 0.7, 0.9, 0.4);
    for (std::size_t i = 1; i < table.size(); ++i) {
        EXPECT_NEAR(std::stod(table[i][8]), truth, 1e-15);
    }
}

TEST(Experiment2, RowsAndSeedsAreReproducible)
{
    auto cfg = parse_config(nlohmann::json::parse(R"({
        "experiment": "dna", "kernel": "ssk:p=2,lambda=0.8", "estimators": ["vstat"],
        "N_list": [30], "Q_list": [1], "reps": 2, "B": 20, "pairs": ["EI-IE"]
    })"));
    std::ostringstream a, b;
    EXPECT_EQ(run_experiment2(cfg, splice_records(), a), 2u);
    run_experiment2(cfg, splice_records(), b);
    EXPECT_EQ(a.str(), b.str());
    const auto table = rows(a.str());
    ASSERT_EQ(table.size(), 3u);
    EXPECT_EQ(table[0], split_row(kExperiment2Header));
    for (std::size_t i = 1; i < table.size(); ++i) {
        EXPECT_EQ(table[i][0], "EI-IE");
        EXPECT_EQ(table[i][4], "vstat");
        const double diff = std::stod(table[i][5]) - std::stod(table[i][6]);
        EXPECT_NEAR(std::stod(table[i][7]), diff, 1e-12);
    }
    EXPECT_NE(table[1][3], table[2][3]);
}

TEST(Experiment2, SameSampleNeverRejects)
{
    auto cfg = parse_config(nlohmann::json::parse(R"({
        "experiment": "dna", "kernel": "ssk:p=2,lambda=0.8", "estimators": ["vstat", "monk_bcd_fast"],
        "N_list": [30], "Q_list": [2], "reps": 2, "B": 20, "pairs": ["EI-IE"], "same_sample": true,
        "drop_remainder": true
    })"));
    std::ostringstream out;
    EXPECT_EQ(run_experiment2(cfg, splice_records(), out), 4u);
    const auto table = rows(out.str());
    for (std::size_t i = 1; i < table.size(); ++i) {
        EXPECT_LE(std::stod(table[i][7]), 0.0) << table[i][4];
    }
}

TEST(Experiment2, NeedsEnoughRecords)
{
    auto cfg = parse_config(nlohmann::json::parse(R"({
        "experiment": "dna", "kernel": "ssk:p=2,lambda=0.8", "estimators": ["vstat"],
        "N_list": [30], "Q_list": [1], "B": 5, "pairs": ["EI-IE"]
    })"));
    std::ostringstream out;
    EXPECT_THROW(run_experiment2(cfg, {}, out), Error);
    EXPECT_THROW(run_experiment1(cfg, out), ConfigError);
}
