#include "generators.hpp"
#include "oracles.hpp"

#include "monk/datagen.hpp"
#include "monk/twosample.hpp"

#include <gtest/gtest.h>

using namespace monk;

namespace {

EstimatorOptions vstat()
{
    EstimatorOptions opt;
    opt.method = Estimator::vstat;
    return opt;
}

} // namespace

TEST(Quantile, OrderStatisticRule)
{
    EXPECT_EQ(empirical_quantile({4.0, 1.0, 3.0, 2.0}, 0.25), 3.0);
    EXPECT_EQ(empirical_quantile({7.0}, 0.05), 7.0);
    EXPECT_EQ(empirical_quantile({7.0}, 0.95), 7.0);
    EXPECT_THROW(empirical_quantile({}, 0.05), InvalidArgument);
    EXPECT_THROW(empirical_quantile({1.0}, 0.0), InvalidArgument);
    EXPECT_THROW(empirical_quantile({1.0}, 1.0), InvalidArgument);
}

TEST(Quantile, MatchesSortedOracleAndIsMonotone)
{
    gen::Source src(71);
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = src.reals(src.size(1, 200));
        double last = -1e300;
        for (double alpha : {0.9, 0.5, 0.25, 0.1, 0.05, 0.01}) {
            const auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * double(v.size()) - 1e-9));
            const double q = empirical_quantile(v, alpha);
            EXPECT_EQ(q, oracle::order_statistic(v, std::max<std::size_t>(rank, 1)));
            EXPECT_GE(q, last);
            last = q;
        }
    }
    // 0.95 * 100 must select the 95th value, not the 96th.
    std::vector<double> hundred(100);
    for (std::size_t i = 0; i < 100; ++i) {
        hundred[i] = double(i + 1);
    }
    EXPECT_EQ(empirical_quantile(hundred, 0.05), 95.0);
}

TEST(Bootstrap, IdenticalPointsGiveZero)
{
    const Sample same(10, Point{1.5});
    for (std::size_t b : {1, 7, 50}) {
        EXPECT_EQ(bootstrap_quantile(same, same, Kernel::rbf(1.0), vstat(), b, 0.05, 3), 0.0);
    }
}

TEST(Bootstrap, SingleReplicateIsReturnedAsIs)
{
    gen::Source src(72);
    const Sample xs = src.sample(15), ys = src.sample(15, 1.0);
    const auto k = Kernel::rbf(1.0);
    const double only = bootstrap_statistics(gram(k, concat(xs, ys)), vstat(), 1, 9)[0];
    for (double alpha : {0.01, 0.5, 0.9}) {
        EXPECT_EQ(bootstrap_quantile(xs, ys, k, vstat(), 1, alpha, 9), only);
    }
}

TEST(Bootstrap, ReplicatesFollowTheirDerivedSeeds)
{
    gen::Source src(73);
    const Sample xs = src.sample(12), ys = src.sample(12, 0.5);
    const auto k = Kernel::polynomial(2, 1.0);
    const Sample pooled = concat(xs, ys);
    const auto stats = bootstrap_statistics(gram(k, pooled), vstat(), 20, 77);
    ASSERT_EQ(stats.size(), 20u);
    for (std::size_t b = 0; b < stats.size(); ++b) {
        Rng rng(derive_seed(derive_seed(77, b), 0));
        const auto perm = random_permutation(pooled.size(), rng);
        std::vector<double> px, py;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            (i < 12 ? px : py).push_back(std::get<double>(pooled[perm[i]]));
        }
        EXPECT_NEAR(stats[b], oracle::vstat(oracle::poly(2, 1.0), px, py), 1e-10);
    }
    EXPECT_EQ(stats, bootstrap_statistics(gram(k, pooled), vstat(), 20, 77));
    EXPECT_THROW(bootstrap_statistics(gram(k, pooled), vstat(), 0, 77), InvalidArgument);
}

TEST(Tune, SingletonGridIsReturned)
{
    gen::Source src(74);
    const std::vector<Kernel> grid{Kernel::rbf(0.3)};
    EXPECT_EQ(tune_kernel(src.sample(9), src.sample(9), grid, vstat(), 0), grid[0]);
}

TEST(Tune, PicksTheLargerStatistic)
{
    const Sample xs = sample_gaussian(0, 1, 60, 1), ys = sample_gaussian(5, 1, 60, 2);
    const std::vector<Kernel> grid{Kernel::rbf(0.01), Kernel::rbf(1.0)};
    EXPECT_EQ(tune_kernel(xs, ys, grid, vstat(), 0), Kernel::rbf(1.0));
}

TEST(Tune, TiesGoToTheFirstKernel)
{
    const Sample xs = sample_gaussian(0, 1, 30, 1);
    const std::vector<Kernel> grid{Kernel::rbf(2.0), Kernel::rbf(0.5), Kernel::rbf(1.0)};
    EXPECT_EQ(tune_kernel(xs, xs, grid, vstat(), 0), grid[0]);
}

TEST(Tune, FailingKernelsAreSkipped)
{
    const Sample xs = to_sample(std::vector<std::string>{"ACGT", "GGTA"});
    const Sample ys = to_sample(std::vector<std::string>{"TTTT", "ACGA"});
    const std::vector<Kernel> grid{Kernel::rbf(1.0), Kernel::string_subsequence(2, 0.5, true)};
    EXPECT_EQ(tune_kernel(xs, ys, grid, vstat(), 0), grid[1]);
    const std::vector<Kernel> bad{Kernel::rbf(1.0), Kernel::linear()};
    EXPECT_THROW(tune_kernel(xs, ys, bad, vstat(), 0), Error);
    EXPECT_THROW(tune_kernel(xs, ys, std::vector<Kernel>{}, vstat(), 0), InvalidArgument);
}

TEST(TwoSample, SharedPointsNeverReject)
{
    const Sample xs = sample_gaussian(0, 1, 60, 5);
    const std::vector<Kernel> grid{Kernel::rbf(1.0)};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto r = two_sample_test(xs, xs, grid, vstat(), 50, 0.05, seed);
        EXPECT_EQ(r.statistic, 0.0);
        EXPECT_LE(r.statistic, r.quantile);
        EXPECT_FALSE(r.reject);
    }
}

TEST(TwoSample, WellSeparatedSamplesReject)
{
    const Sample xs = sample_gaussian(0, 1, 300, 1), ys = sample_gaussian(10, 1, 300, 2);
    const std::vector<Kernel> grid{Kernel::rbf(0.5), Kernel::rbf(1.0), Kernel::rbf(2.0)};
    const auto r = two_sample_test(xs, ys, grid, vstat(), 150, 0.05, 3);
    EXPECT_TRUE(r.reject);
    EXPECT_GT(r.diff, 0.0);
    EXPECT_EQ(r.split_size, 100u);
    EXPECT_FALSE(r.truncated);
    EXPECT_EQ(r.b_boot, 150u);
}

TEST(TwoSample, DeterministicAndConsistent)
{
    const Sample xs = sample_gaussian(0, 1, 61, 1), ys = sample_gaussian(0.3, 1, 61, 2);
    const std::vector<Kernel> grid{Kernel::rbf(1.0), Kernel::rbf(2.0)};
    EstimatorOptions monk;
    monk.method = Estimator::monk_bcd;
    monk.q = 5;
    monk.remainder = RemainderPolicy::drop_remainder;
    for (const auto& est : {vstat(), monk}) {
        const auto a = two_sample_test(xs, ys, grid, est, 40, 0.05, 11);
        const auto b = two_sample_test(xs, ys, grid, est, 40, 0.05, 11);
        EXPECT_EQ(a.statistic, b.statistic);
        EXPECT_EQ(a.quantile, b.quantile);
        EXPECT_EQ(a.theta_hat, b.theta_hat);
        EXPECT_EQ(a.reject, a.diff > 0.0);
        EXPECT_EQ(a.diff, a.statistic - a.quantile);
        EXPECT_TRUE(a.truncated);
        EXPECT_EQ(a.split_size, 20u);
    }
}

TEST(TwoSample, SharedSplitMatchesSingleEstimatorRuns)
{
    const Sample xs = sample_gaussian(0, 1, 45, 1), ys = sample_gaussian(1, 1, 45, 2);
    const std::vector<Kernel> grid{Kernel::rbf(1.0), Kernel::polynomial(2, 1.0)};
    EstimatorOptions fast;
    fast.method = Estimator::monk_bcd_fast;
    fast.q = 5;
    const std::vector<EstimatorOptions> ests{vstat(), fast};
    const auto joint = two_sample_tests(xs, ys, grid, ests, 30, 0.1, 4);
    for (std::size_t i = 0; i < ests.size(); ++i) {
        const auto single = two_sample_test(xs, ys, grid, ests[i], 30, 0.1, 4);
        EXPECT_EQ(joint[i].statistic, single.statistic);
        EXPECT_EQ(joint[i].quantile, single.quantile);
    }
}

TEST(TwoSample, ArgumentErrors)
{
    const std::vector<Kernel> grid{Kernel::rbf(1.0)};
    const Sample two = sample_gaussian(0, 1, 2, 1);
    EXPECT_THROW(two_sample_test(two, two, grid, vstat(), 10, 0.05, 0), InvalidArgument);
    const Sample six = sample_gaussian(0, 1, 6, 1);
    EXPECT_THROW(two_sample_test(six, two, grid, vstat(), 10, 0.05, 0), DimensionMismatch);
    EXPECT_THROW(two_sample_test(six, six, grid, vstat(), 0, 0.05, 0), InvalidArgument);
    EXPECT_THROW(two_sample_test(six, six, grid, vstat(), 10, 1.5, 0), InvalidArgument);
}
