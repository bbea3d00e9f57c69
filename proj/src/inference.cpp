#include "segwise/inference.hpp"

#include "segwise/errors.hpp"
#include "segwise/parallel.hpp"
#include "segwise/random.hpp"
#include "segwise/segment_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace segwise {
namespace {

constexpr std::size_t kDrawBatch = 64;

std::vector<Eigen::Index> live_columns(const DeltaTable& table) {
    std::vector<Eigen::Index> live;
    for (std::size_t j = 0; j < table.columns(); ++j)
        if (!table.degenerate[j]) live.push_back(static_cast<Eigen::Index>(j));
    return live;
}

double scale_count(const DeltaTable& table) {
    return table.mode == SplitMode::odd_even ? static_cast<double>(table.rows()) : static_cast<double>(table.n_total);
}

}  // namespace

void UqConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (B < 1) throw ConfigError("bootstrap size B must be >= 1");
    if (p_n && *p_n < 1) throw ConfigError("p_n must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    detector.validate();
}

double test_statistic(const DeltaTable& table) {
    const double root_n = std::sqrt(scale_count(table));
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j : live_columns(table)) best = std::max(best, root_n * table.delta_hat(j) / table.sigma_hat(j));
    return best;
}

std::vector<double> bootstrap_draws(const DeltaTable& table, std::size_t B, std::uint64_t seed, std::size_t workers) {
    if (B < 1) throw ConfigError("bootstrap size B must be >= 1");
    const auto live = live_columns(table);
    // Max over an empty column set: every replicate is zero.
    if (live.empty()) return std::vector<double>(B, 0.0);

    const RowMatrix centered = table.centered();
    const auto N = static_cast<Eigen::Index>(table.rows());
    Eigen::MatrixXd z(N, static_cast<Eigen::Index>(live.size()));
    for (std::size_t k = 0; k < live.size(); ++k)
        z.col(static_cast<Eigen::Index>(k)) = centered.col(live[k]) / table.sigma_hat(live[k]);
    z /= std::sqrt(scale_count(table));

    std::vector<double> draws(B);
    const std::size_t batches = (B + kDrawBatch - 1) / kDrawBatch;
    parallel_for(batches, workers, [&](std::size_t batch) {
        const std::size_t b0 = batch * kDrawBatch;
        const std::size_t b1 = std::min(B, b0 + kDrawBatch);
        Eigen::MatrixXd e(static_cast<Eigen::Index>(b1 - b0), N);
        for (std::size_t b = b0; b < b1; ++b) {
            Rng rng = make_stream(seed, StreamTag::bootstrap, {b});
            std::normal_distribution<double> normal(0.0, 1.0);
            for (Eigen::Index i = 0; i < N; ++i) e(static_cast<Eigen::Index>(b - b0), i) = normal(rng);
        }
        const Eigen::MatrixXd sums = e * z;
        for (std::size_t b = b0; b < b1; ++b) draws[b] = sums.row(static_cast<Eigen::Index>(b - b0)).maxCoeff();
    });
    return draws;
}

double critical_value(std::span<const double> draws, double alpha) {
    if (draws.empty()) throw ConfigError("critical value needs at least one draw");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const double B = static_cast<double>(draws.size());
    // ceil(B(1-alpha)), guarded against 1-alpha rounding just above an integer
    auto rank = static_cast<std::size_t>(std::ceil(B * (1.0 - alpha) - 1e-9 * B));
    rank = std::clamp<std::size_t>(rank, 1, draws.size());
    std::vector<double> sorted(draws.begin(), draws.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
    return sorted[rank - 1];
}

TestResult test_candidate(const DeltaTable& table, double alpha, std::size_t B, std::uint64_t seed,
                          std::size_t workers) {
    TestResult result;
    result.r = table.r;
    result.alpha = alpha;
    result.B = B;
    for (std::size_t j = 0; j < table.columns(); ++j)
        if (table.degenerate[j]) result.degenerate_s.push_back(table.s_values[j]);
    result.statistic = test_statistic(table);
    if (result.degenerate_s.size() == table.columns()) {
        // Predictively indistinguishable models: accept.
        result.critical_value = 0.0;
        result.rejected = false;
        return result;
    }
    const auto draws = bootstrap_draws(table, B, derive_seed(seed, StreamTag::bootstrap, {table.r}), workers);
    result.critical_value = critical_value(draws, alpha);
    result.rejected = result.statistic > result.critical_value;
    return result;
}

UqReport sequential_k_min(const Series& series, const UqConfig& config) {
    config.validate();
    const SplitPlan plan = make_split(series.n(), config.mode, config.folds);
    const CrossValidator cv(series, plan, config.p_n, config.detector, config.workers);
    return sequential_k_min(series, cv, config);
}

UqReport sequential_k_min(const Series& series, const CrossValidator& cv, const UqConfig& config) {
    config.validate();
    UqReport report;
    report.alpha = config.alpha;
    report.mode = cv.plan().mode;
    report.config = config;
    report.p_n = cv.p_n();
    report.n_used = cv.plan().n;
    report.n_original = cv.plan().n_original;
    report.curve = cv.cv_curve();
    report.k_cv = select_k_cv(report.curve);

    const std::uint64_t stream = derive_seed(config.seed, StreamTag::uq);
    report.k_min = cv.p_n();
    report.saturated = true;
    for (std::size_t r = 0; r < cv.p_n(); ++r) {
        TestResult t = test_candidate(cv.delta_table(r), config.alpha, config.B, stream, config.workers);
        const bool rejected = t.rejected;
        report.trace.push_back(std::move(t));
        if (!rejected) {
            report.k_min = r;
            report.saturated = false;
            break;
        }
    }
    report.u = static_cast<long>(report.k_cv) - static_cast<long>(report.k_min);

    if (cv.plan().mode == SplitMode::odd_even) {
        // training position j is full-series index 2j - 1
        for (std::size_t tau : cv.models().front()[report.k_cv].segmentation.change_points())
            report.change_points_at_k_cv.push_back(2 * tau - 1);
    } else {
        Rng rng = make_stream(config.detector.seed, StreamTag::wbs_intervals, {0});
        report.change_points_at_k_cv = detect(series, report.k_cv, config.detector, rng).change_points();
    }
    return report;
}

double check_overfit_condition(const Series& train, const Series& true_means, const Segmentation& t_kn,
                               const Segmentation& t_s) {
    if (train.n() != true_means.n() || train.d() != true_means.d())
        throw ShapeError("training series and true means must have identical shape");
    const double quad = c_inner(train, train, t_kn) - c_inner(train, train, t_s);
    const double cross = c_inner(true_means, train, t_kn) - c_inner(true_means, train, t_s);
    return quad - 2.0 * cross;
}

}  // namespace segwise
