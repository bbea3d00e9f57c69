#include "oracles.hpp"

#include "segwise/errors.hpp"
#include "segwise/inference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace segwise;

namespace {

DeltaTable table_from(const RowMatrix& delta, SplitMode mode = SplitMode::odd_even,
                      std::vector<std::size_t> fold_of = {}, std::size_t folds = 1) {
    DeltaTable t;
    t.mode = mode;
    t.folds = folds;
    t.delta = delta;
    t.n_total = static_cast<std::size_t>(delta.rows());
    for (Eigen::Index c = 0; c < delta.cols(); ++c) t.s_values.push_back(static_cast<std::size_t>(c) + 1);
    t.fold_of = fold_of.empty() ? std::vector<std::size_t>(t.n_total, 1) : std::move(fold_of);
    t.finalize();
    return t;
}

Series two_segment(std::mt19937_64& rng, std::size_t n, double jump, double sd) {
    std::normal_distribution<double> z(0.0, sd);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (i < n / 2 ? 0.0 : jump) + z(rng);
    return Series::univariate(v);
}

UqConfig quick_config(std::uint64_t seed, std::size_t B = 200) {
    UqConfig c;
    c.B = B;
    c.seed = seed;
    c.detector.kind = DetectorKind::pelt;
    c.detector.seed = seed;
    return c;
}

}  // namespace

TEST(TestStatisticTest, Examples) {
    RowMatrix one(3, 1);
    one << 2, 0, -2;
    EXPECT_NEAR(test_statistic(table_from(one)), 0.0, 1e-15);

    const double h = std::sqrt(3.0) / 2.0;
    RowMatrix two(4, 2);
    two << -1 - h, 0.5 - h, -1 - h, 0.5 - h, -1 + h, 0.5 + h, -1 + h, 0.5 + h;
    const auto t = table_from(two);
    EXPECT_NEAR(t.delta_hat(0) / t.sigma_hat(0), -1.0, 1e-12);
    EXPECT_NEAR(t.delta_hat(1) / t.sigma_hat(1), 0.5, 1e-12);
    EXPECT_NEAR(test_statistic(t), 1.0, 1e-12);
}

TEST(TestStatisticTest, DegenerateColumnsIgnored) {
    RowMatrix m(4, 2);
    m << 1, 3, 2, 3, 3, 3, 4, 3;
    const auto t = table_from(m);
    ASSERT_FALSE(t.degenerate[0]);
    ASSERT_TRUE(t.degenerate[1]);
    const auto single = table_from(m.leftCols(1));
    EXPECT_DOUBLE_EQ(test_statistic(t), test_statistic(single));

    RowMatrix flat = RowMatrix::Zero(5, 2);
    EXPECT_EQ(test_statistic(table_from(flat)), -std::numeric_limits<double>::infinity());
}

TEST(TestStatisticTest, VFoldScalesByTotalSampleSize) {
    RowMatrix m(6, 1);
    m << 1, 2, 3, 2, 4, 6;
    const auto t = table_from(m, SplitMode::vfold, {1, 2, 3, 1, 2, 3}, 3);
    // fold means (V/n) * sums: folds {1,2},{2,4},{3,6} -> 1.5, 3, 4.5; delta-hat = 3.
    EXPECT_NEAR(t.delta_hat(0), 3.0, 1e-12);
    // centred within folds: -0.5, -1, -1.5, 0.5, 1, 1.5; sample sd over 6 rows.
    const double sd = std::sqrt((2 * 0.25 + 2 * 1.0 + 2 * 2.25) / 5.0);
    EXPECT_NEAR(t.sigma_hat(0), sd, 1e-12);
    EXPECT_NEAR(test_statistic(t), std::sqrt(6.0) * 3.0 / sd, 1e-12);
}

TEST(CriticalValueTest, Examples) {
    std::vector<double> draws{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_DOUBLE_EQ(critical_value(draws, 0.2), 8.0);
    std::vector<double> flat(37, 2.5);
    for (double a : {0.01, 0.1, 0.5, 0.9}) EXPECT_DOUBLE_EQ(critical_value(flat, a), 2.5);
}

TEST(CriticalValueTest, MatchesOracles) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> size(1, 600);
    std::uniform_int_distribution<int> pct(1, 99);
    std::normal_distribution<double> z;
    std::uniform_int_distribution<int> coarse(-5, 5);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> draws(size(rng));
        for (auto& d : draws) d = rep % 3 == 0 ? coarse(rng) : z(rng);
        const int a = pct(rng);
        const double alpha = a / 100.0;
        const double got = critical_value(draws, alpha);
        EXPECT_EQ(got, oracle::counting_critical_value(draws, a));
        std::vector<double> sorted = draws;
        std::sort(sorted.begin(), sorted.end());
        const auto B = static_cast<long long>(draws.size());
        const long long rank = (B * (100 - a) + 99) / 100;  // integer ceil(B(1-alpha))
        EXPECT_EQ(got, sorted[static_cast<std::size_t>(std::max<long long>(rank, 1) - 1)]);
    }
}

TEST(CriticalValueTest, MonotoneInAlpha) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> draws(257);
        for (auto& d : draws) d = z(rng);
        double prev = INFINITY;
        for (int a = 1; a < 100; ++a) {
            const double c = critical_value(draws, a / 100.0);
            EXPECT_LE(c, prev);
            prev = c;
        }
    }
}

TEST(BootstrapTest, ZeroColumnGivesZeroDraws) {
    const auto draws = bootstrap_draws(table_from(RowMatrix::Zero(6, 1)), 50, 1);
    ASSERT_EQ(draws.size(), 50u);
    for (double d : draws) EXPECT_EQ(d, 0.0);
}

TEST(BootstrapTest, ZeroDrawsIsConfigError) {
    RowMatrix m(3, 1);
    m << 2, 0, -2;
    EXPECT_THROW(bootstrap_draws(table_from(m), 0, 1), ConfigError);
}

TEST(BootstrapTest, DeterministicAcrossWorkers) {
    std::mt19937_64 gen(8);
    const Series x = oracle::random_series(gen, 80, 1);
    const RowMatrix m = x.values().replicate(1, 3) + oracle::random_series(gen, 80, 3).values();
    const auto t = table_from(m);
    const auto a = bootstrap_draws(t, 300, 42, 1);
    EXPECT_EQ(a, bootstrap_draws(t, 300, 42, 1));
    EXPECT_EQ(a, bootstrap_draws(t, 300, 42, 4));
    EXPECT_EQ(a, bootstrap_draws(t, 300, 42, 16));
    EXPECT_NE(a, bootstrap_draws(t, 300, 43, 1));
}

TEST(BootstrapTest, SingleColumnMeanNearZero) {
    std::mt19937_64 gen(10);
    const auto t = table_from(oracle::random_series(gen, 50, 1).values());
    const std::size_t B = 10000;
    const auto draws = bootstrap_draws(t, B, 7);
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / B;
    double ss = 0.0;
    for (double d : draws) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / (B - 1));
    EXPECT_LE(std::abs(mean), 4.0 * sd / std::sqrt(static_cast<double>(B)));
    // one column: each draw is a centred Gaussian with variance (N-1)/N
    EXPECT_NEAR(sd, std::sqrt(49.0 / 50.0), 0.05);
}

TEST(BootstrapTest, SharedMultipliersAcrossColumns) {
    // Two identical columns must give exactly the single-column draws.
    std::mt19937_64 gen(12);
    const RowMatrix col = oracle::random_series(gen, 40, 1).values();
    RowMatrix twin(40, 2);
    twin << col, col;
    EXPECT_EQ(bootstrap_draws(table_from(col), 200, 3), bootstrap_draws(table_from(twin), 200, 3));
}

TEST(TestCandidateTest, DecisionMatchesComparison) {
    std::mt19937_64 gen(13);
    for (int rep = 0; rep < 50; ++rep) {
        RowMatrix m = oracle::random_series(gen, 30, 2).values();
        m.array() += 0.3 * (rep % 3);
        const auto res = test_candidate(table_from(m), 0.1, 200, rep);
        EXPECT_EQ(res.rejected, res.statistic > res.critical_value);
        EXPECT_EQ(res.B, 200u);
    }
    const auto acc = test_candidate(table_from(RowMatrix::Zero(8, 2)), 0.1, 100, 1);
    EXPECT_FALSE(acc.rejected);
    EXPECT_EQ(acc.degenerate_s, (std::vector<std::size_t>{1, 2}));
}

TEST(SequentialTest, ReportInvariantsAndKcvBound) {
    std::mt19937_64 gen(21);
    for (int rep = 0; rep < 20; ++rep) {
        const Series x = two_segment(gen, 200, 2.0, 1.0);
        for (SplitMode mode : {SplitMode::odd_even, SplitMode::vfold}) {
            UqConfig c = quick_config(static_cast<std::uint64_t>(rep));
            c.mode = mode;
            const auto report = sequential_k_min(x, c);
            EXPECT_EQ(report.u, static_cast<long>(report.k_cv) - static_cast<long>(report.k_min));
            ASSERT_FALSE(report.trace.empty());
            for (std::size_t r = 0; r < report.trace.size(); ++r) {
                EXPECT_EQ(report.trace[r].r, r);
                EXPECT_EQ(report.trace[r].rejected, report.trace[r].statistic > report.trace[r].critical_value);
            }
            if (!report.saturated) {
                ASSERT_EQ(report.trace.size(), report.k_min + 1);
                for (std::size_t r = 0; r < report.k_min; ++r) EXPECT_TRUE(report.trace[r].rejected);
                EXPECT_FALSE(report.trace.back().rejected);
            }
            // The statistic at the CV argmin is never positive.
            if (report.k_cv < report.p_n) {
                const SplitPlan plan = make_split(x.n(), mode, c.folds);
                const CrossValidator cv(x, plan, c.p_n, c.detector);
                EXPECT_LE(test_statistic(cv.delta_table(report.k_cv)), 1e-9);
            }
            if (report.k_cv < report.trace.size() && report.trace[report.k_cv].critical_value > 0)
                EXPECT_LE(report.k_min, report.k_cv);
            EXPECT_EQ(report.change_points_at_k_cv.size(), report.k_cv);
        }
    }
}

TEST(SequentialTest, DeterministicAcrossWorkers) {
    std::mt19937_64 gen(22);
    const Series x = two_segment(gen, 300, 1.5, 1.0);
    UqConfig c = quick_config(5);
    c.detector.kind = DetectorKind::wbs;
    const auto a = sequential_k_min(x, c);
    c.workers = 6;
    const auto b = sequential_k_min(x, c);
    EXPECT_EQ(a.k_min, b.k_min);
    EXPECT_EQ(a.k_cv, b.k_cv);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t r = 0; r < a.trace.size(); ++r) {
        EXPECT_EQ(a.trace[r].statistic, b.trace[r].statistic);
        EXPECT_EQ(a.trace[r].critical_value, b.trace[r].critical_value);
    }
}

TEST(SequentialTest, NullSizeSmallSample) {
    std::mt19937_64 gen(23);
    const int reps = 100;
    int rejected = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const Series x = oracle::random_series(gen, 400, 1);
        const auto report = sequential_k_min(x, quick_config(static_cast<std::uint64_t>(rep)));
        rejected += report.trace.front().rejected ? 1 : 0;
    }
    EXPECT_LE(rejected, static_cast<int>(reps * (0.1 + 3 * std::sqrt(0.09 / reps))));
}

TEST(SequentialTest, TwoSegmentsAtSnrTwo) {
    // Means 0 and 1 on halves: sd of the signal is about 0.5, so sigma = 0.25.
    std::mt19937_64 gen(24);
    const int reps = 40;
    int at_one = 0, above_one = 0;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<double> mu(400);
        for (std::size_t i = 0; i < 400; ++i) mu[i] = i < 200 ? 0.0 : 1.0;
        const double mean = 0.5;
        double ss = 0.0;
        for (double m : mu) ss += (m - mean) * (m - mean);
        const double sigma = std::sqrt(ss / 399.0) / 2.0;
        std::normal_distribution<double> z(0.0, sigma);
        for (auto& m : mu) m += z(gen);
        const auto report = sequential_k_min(Series::univariate(mu), quick_config(static_cast<std::uint64_t>(rep)));
        at_one += report.k_min == 1 ? 1 : 0;
        above_one += report.k_min > 1 ? 1 : 0;
    }
    EXPECT_EQ(above_one, 0);
    EXPECT_GT(at_one, reps / 2);
}

TEST(SequentialTest, ConfigErrors) {
    const auto x = Series::univariate(std::vector<double>(20, 0.0));
    UqConfig c;
    c.alpha = 0.0;
    EXPECT_THROW(sequential_k_min(x, c), ConfigError);
    c = UqConfig{};
    c.B = 0;
    EXPECT_THROW(sequential_k_min(x, c), ConfigError);
    c = UqConfig{};
    c.p_n = 0;
    EXPECT_THROW(sequential_k_min(x, c), ConfigError);
}

TEST(OverfitConditionTest, SingleSplitClosedForm) {
    std::mt19937_64 gen(31);
    std::uniform_int_distribution<std::size_t> n_dist(4, 60);
    int nonpositive = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = n_dist(gen);
        const Series xi = oracle::random_series(gen, n, 1);
        const Series mu = Series::univariate(std::vector<double>(n, 0.7));
        std::uniform_int_distribution<std::size_t> tau_dist(1, n - 1);
        const std::size_t tau = tau_dist(gen);
        const double value = check_overfit_condition(xi, mu, Segmentation({}, n), Segmentation({tau}, n));
        const double left = segment_mean(xi, 0, tau)(0), right = segment_mean(xi, tau, n)(0);
        const double expected = -(static_cast<double>(tau * (n - tau)) / n) * (left - right) * (left - right);
        EXPECT_NEAR(value, expected, 1e-10 * (1.0 + std::abs(expected)));
        nonpositive += value <= 1e-12 ? 1 : 0;
    }
    EXPECT_EQ(nonpositive, 1000);
}

TEST(OverfitConditionTest, RefinementWithConstantMeans) {
    std::mt19937_64 gen(32);
    for (int rep = 0; rep < 200; ++rep) {
        const Series xi = oracle::random_series(gen, 30, 2);
        RowMatrix flat = RowMatrix::Constant(30, 2, -1.5);
        const auto coarse = oracle::random_segmentation(gen, 30, 3);
        std::vector<std::size_t> fine = coarse.change_points();
        fine.push_back(1 + rep % 29);
        std::sort(fine.begin(), fine.end());
        fine.erase(std::unique(fine.begin(), fine.end()), fine.end());
        EXPECT_LE(check_overfit_condition(xi, Series(flat), coarse, Segmentation(fine, 30)), 1e-10);
    }
}

TEST(OverfitConditionTest, ShapeMismatch) {
    const auto a = Series::univariate({1, 2, 3, 4});
    const auto b = Series::univariate({1, 2, 3});
    EXPECT_THROW(check_overfit_condition(a, b, Segmentation({}, 4), Segmentation({2}, 4)), ShapeError);
}
