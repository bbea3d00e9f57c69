#include "segwise/cross_validation.hpp"

#include "segwise/errors.hpp"
#include "segwise/parallel.hpp"
#include "segwise/segment_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace segwise {

std::string to_string(SplitMode mode) { return mode == SplitMode::odd_even ? "split" : "vfold"; }

SplitMode parse_split_mode(const std::string& name) {
    if (name == "split" || name == "odd-even" || name == "odd_even") return SplitMode::odd_even;
    if (name == "vfold") return SplitMode::vfold;
    throw ConfigError("unknown split mode '" + name + "'");
}

SplitPlan make_split(std::size_t n, SplitMode mode, std::size_t folds) {
    if (n < 4) throw ConfigError("splitting needs at least 4 observations");
    SplitPlan plan;
    plan.mode = mode;
    plan.n_original = n;
    if (mode == SplitMode::odd_even) {
        plan.folds = 2;
        plan.n = n - (n % 2);
        plan.labels.resize(plan.n);
        for (std::size_t i = 1; i <= plan.n; ++i) plan.labels[i - 1] = (i % 2 == 1) ? 0 : 1;
        return plan;
    }
    if (folds < 2 || folds > n / 2)
        throw ConfigError("fold count " + std::to_string(folds) + " outside [2, n/2]");
    plan.folds = folds;
    plan.n = n;
    plan.labels.resize(n);
    for (std::size_t i = 1; i <= n; ++i) plan.labels[i - 1] = ((i - 1) % folds) + 1;
    return plan;
}

std::vector<Portion> portions(const SplitPlan& plan) {
    std::vector<Portion> out;
    if (plan.mode == SplitMode::odd_even) {
        Portion p;
        p.group = 1;
        for (std::size_t i = 0; i < plan.n; ++i) {
            if (plan.labels[i] == 0) {
                p.train_rows.push_back(i);
            } else {
                p.eval_rows.push_back(i);
                p.eval_positions.push_back(p.eval_rows.size());
            }
        }
        p.eval_len = p.eval_rows.size();
        out.push_back(std::move(p));
        return out;
    }
    for (std::size_t v = 1; v <= plan.folds; ++v) {
        Portion p;
        p.group = v;
        for (std::size_t i = 0; i < plan.n; ++i) {
            if (plan.labels[i] == v) {
                p.eval_rows.push_back(i);
                p.eval_positions.push_back(i + 1);
            } else {
                p.train_rows.push_back(i);
            }
        }
        p.eval_len = plan.n;
        out.push_back(std::move(p));
    }
    return out;
}

FittedModel fit_segmentation(const Series& train, Segmentation segmentation) {
    if (segmentation.n() != train.n()) throw ShapeError("segmentation does not match the training series");
    const auto b = segmentation.boundaries();
    RowMatrix means(static_cast<Eigen::Index>(segmentation.segment_count()), static_cast<Eigen::Index>(train.d()));
    for (std::size_t j = 0; j + 1 < b.size(); ++j)
        means.row(static_cast<Eigen::Index>(j)) = segment_mean(train, b[j], b[j + 1]).transpose();
    return FittedModel(std::move(segmentation), std::move(means));
}

FittedModel fit(const Series& train, std::size_t r, const DetectorConfig& detector, Rng& rng) {
    return fit_segmentation(train, detect(train, r, detector, rng));
}

double predict_loss(const FittedModel& model, const Eigen::Ref<const Vector>& point, std::size_t position,
                    std::size_t eval_len) {
    if (position < 1 || position > eval_len)
        throw RangeError("position " + std::to_string(position) + " outside 1.." + std::to_string(eval_len));
    if (static_cast<Eigen::Index>(point.size()) != model.params.cols()) throw ShapeError("point dimension mismatch");
    const std::size_t n_fit = model.n_fit();
    // ceil(position * n_fit / eval_len) in integer arithmetic
    const std::size_t mapped = (position * n_fit + eval_len - 1) / eval_len;
    const std::size_t j = model.segmentation.segment_of(mapped);
    return (point - model.params.row(static_cast<Eigen::Index>(j)).transpose()).squaredNorm();
}

void DeltaTable::finalize() {
    const Eigen::Index N = delta.rows();
    const Eigen::Index S = delta.cols();
    if (static_cast<std::size_t>(S) != s_values.size()) throw ShapeError("delta columns do not match s_values");
    if (static_cast<std::size_t>(N) != fold_of.size()) throw ShapeError("fold labels do not match delta rows");
    if (N < 2) throw CapacityError("need at least two evaluation points");

    if (mode == SplitMode::odd_even) {
        folds = 1;
        delta_hat = delta.colwise().mean().transpose();
        fold_means = delta_hat.transpose();
    } else {
        fold_means = RowMatrix::Zero(static_cast<Eigen::Index>(folds), S);
        for (Eigen::Index i = 0; i < N; ++i) fold_means.row(static_cast<Eigen::Index>(fold_of[i] - 1)) += delta.row(i);
        fold_means *= static_cast<double>(folds) / static_cast<double>(n_total);
        delta_hat = fold_means.colwise().mean().transpose();
    }

    const RowMatrix c = centered();
    sigma_hat.resize(S);
    degenerate.assign(static_cast<std::size_t>(S), false);
    for (Eigen::Index j = 0; j < S; ++j) {
        const double mean = c.col(j).mean();
        const double ss = (c.col(j).array() - mean).square().sum();
        sigma_hat(j) = std::sqrt(ss / static_cast<double>(N - 1));
        degenerate[static_cast<std::size_t>(j)] = sigma_hat(j) < kDegenerateTolerance;
    }
}

RowMatrix DeltaTable::centered() const {
    if (mode == SplitMode::odd_even) return delta.rowwise() - delta_hat.transpose();
    // Within-fold means; these equal (V/n) * fold sum when the folds are balanced.
    RowMatrix sums = RowMatrix::Zero(static_cast<Eigen::Index>(folds), delta.cols());
    std::vector<double> counts(folds, 0.0);
    for (Eigen::Index i = 0; i < delta.rows(); ++i) {
        sums.row(static_cast<Eigen::Index>(fold_of[i] - 1)) += delta.row(i);
        counts[fold_of[i] - 1] += 1.0;
    }
    for (std::size_t v = 0; v < folds; ++v)
        if (counts[v] > 0) sums.row(static_cast<Eigen::Index>(v)) /= counts[v];
    RowMatrix out = delta;
    for (Eigen::Index i = 0; i < delta.rows(); ++i) out.row(i) -= sums.row(static_cast<Eigen::Index>(fold_of[i] - 1));
    return out;
}

std::vector<std::size_t> CvCurve::feasible_r() const {
    std::vector<std::size_t> r(errors.size());
    std::iota(r.begin(), r.end(), std::size_t{0});
    return r;
}

std::size_t select_k_cv(const CvCurve& curve) {
    if (curve.errors.empty()) throw ConfigError("empty CV curve");
    std::size_t best = 0;
    for (std::size_t r = 1; r < curve.errors.size(); ++r)
        if (curve.errors[r] < curve.errors[best]) best = r;
    return best;
}

std::size_t default_candidate_ceiling(const Series& anchor, std::size_t n_train, std::size_t m) {
    const auto grid = auto_penalty_grid(anchor);
    const std::size_t k0 = pelt(anchor, grid.front(), m).size();
    return std::min<std::size_t>(15 + k0, n_train / (2 * m));
}

CrossValidator::CrossValidator(const Series& series, SplitPlan plan, std::optional<std::size_t> p_n,
                               DetectorConfig detector, std::size_t workers)
    : plan_(std::move(plan)), detector_(std::move(detector)) {
    detector_.validate();
    if (plan_.n_original != series.n()) throw ShapeError("split plan was built for a different series length");
    portions_ = portions(plan_);

    std::vector<Series> trains;
    trains.reserve(portions_.size());
    for (const auto& p : portions_) trains.push_back(series.select(p.train_rows));

    requested_p_n_ = p_n ? *p_n
                         : default_candidate_ceiling(trains.front(), trains.front().n(), detector_.min_segment_length);
    if (requested_p_n_ < 1) throw ConfigError("candidate ceiling p_n must be >= 1");

    std::vector<std::vector<Segmentation>> families(portions_.size());
    parallel_for(portions_.size(), workers, [&](std::size_t k) {
        Rng rng = make_stream(detector_.seed, StreamTag::wbs_intervals, {portions_[k].group});
        families[k] = detect_family(trains[k], requested_p_n_, detector_, rng);
    });

    std::size_t avail = requested_p_n_;
    for (const auto& f : families) avail = std::min(avail, f.size() - 1);
    if (avail < 1) throw CapacityError("detector cannot produce any candidate beyond r = 0");
    p_n_ = avail;

    models_.resize(portions_.size());
    for (std::size_t k = 0; k < portions_.size(); ++k) {
        models_[k].reserve(p_n_ + 1);
        for (std::size_t r = 0; r <= p_n_; ++r) models_[k].push_back(fit_segmentation(trains[k], families[k][r]));
    }

    // Evaluation rows in full-series order.
    struct Slot {
        std::size_t row, portion, k;
    };
    std::vector<Slot> slots;
    for (std::size_t q = 0; q < portions_.size(); ++q)
        for (std::size_t k = 0; k < portions_[q].eval_rows.size(); ++k) slots.push_back({portions_[q].eval_rows[k], q, k});
    std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.row < b.row; });

    losses_.resize(static_cast<Eigen::Index>(slots.size()), static_cast<Eigen::Index>(p_n_ + 1));
    eval_rows_.resize(slots.size());
    eval_fold_.resize(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const Portion& p = portions_[slots[i].portion];
        eval_rows_[i] = slots[i].row;
        eval_fold_[i] = p.group;
        const Vector point = series.row(slots[i].row).transpose();
        for (std::size_t r = 0; r <= p_n_; ++r)
            losses_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) =
                predict_loss(models_[slots[i].portion][r], point, p.eval_positions[slots[i].k], p.eval_len);
    }
}

DeltaTable CrossValidator::delta_table(std::size_t r) const {
    if (r >= p_n_)
        throw CapacityError("no feasible candidate s > " + std::to_string(r) + " (p_n = " + std::to_string(p_n_) + ")");
    DeltaTable t;
    t.r = r;
    t.mode = plan_.mode;
    t.folds = plan_.mode == SplitMode::vfold ? plan_.folds : 1;
    t.n_total = n_eval();
    t.fold_of = eval_fold_;
    const auto S = static_cast<Eigen::Index>(p_n_ - r);
    t.delta.resize(losses_.rows(), S);
    for (Eigen::Index j = 0; j < S; ++j) {
        t.s_values.push_back(r + 1 + static_cast<std::size_t>(j));
        t.delta.col(j) = losses_.col(static_cast<Eigen::Index>(r)) - losses_.col(static_cast<Eigen::Index>(r) + 1 + j);
    }
    t.finalize();
    return t;
}

CvCurve CrossValidator::cv_curve() const {
    CvCurve curve;
    curve.errors.resize(p_n_ + 1);
    for (std::size_t r = 0; r <= p_n_; ++r) curve.errors[r] = losses_.col(static_cast<Eigen::Index>(r)).sum();
    return curve;
}

DeltaTable delta_table(const Series& series, const SplitPlan& plan, std::size_t r, std::size_t p_n,
                       const DetectorConfig& detector) {
    return CrossValidator(series, plan, p_n, detector).delta_table(r);
}

CvCurve cv_curve(const Series& series, const SplitPlan& plan, std::size_t p_n, const DetectorConfig& detector) {
    return CrossValidator(series, plan, p_n, detector).cv_curve();
}

}  // namespace segwise
