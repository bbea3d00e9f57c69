#pragma once

#include "segwise/detectors.hpp"
#include "segwise/series.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace segwise {

enum class SplitMode { odd_even, vfold };

std::string to_string(SplitMode mode);
SplitMode parse_split_mode(const std::string& name);

/// Order-preserved assignment of observations to training/testing roles.
///
/// odd-even: label 0 = train (odd 1-based index), 1 = test (even index).
/// vfold: label v in 1..V, index i goes to fold ((i-1) mod V) + 1.
struct SplitPlan {
    SplitMode mode = SplitMode::odd_even;
    std::size_t folds = 2;
    std::size_t n = 0;           // observations in use
    std::size_t n_original = 0;  // before odd-length trimming
    std::vector<std::size_t> labels;

    bool trimmed() const { return n != n_original; }
};

SplitPlan make_split(std::size_t n, SplitMode mode, std::size_t folds = 3);

/// One fit/evaluate pair: the model is trained on `train_rows` and scored on
/// `eval_rows`; eval_positions/eval_len drive predict_loss's position mapping.
struct Portion {
    std::size_t group = 1;
    std::vector<std::size_t> train_rows;      // 0-based storage rows
    std::vector<std::size_t> eval_rows;       // 0-based storage rows
    std::vector<std::size_t> eval_positions;  // 1-based
    std::size_t eval_len = 0;
};

std::vector<Portion> portions(const SplitPlan& plan);

FittedModel fit_segmentation(const Series& train, Segmentation segmentation);

FittedModel fit(const Series& train, std::size_t r, const DetectorConfig& detector, Rng& rng);

/// Quadratic loss of `point` against the model's segment mean at the mapped
/// position p = ceil(position * n_fit / eval_len).
double predict_loss(const FittedModel& model, const Eigen::Ref<const Vector>& point, std::size_t position,
                    std::size_t eval_len);

/// Per-evaluation-point loss discrepancies between candidate r and each s > r.
struct DeltaTable {
    std::size_t r = 0;
    std::vector<std::size_t> s_values;
    RowMatrix delta;                   // rows: evaluation points, cols: s_values
    std::vector<std::size_t> fold_of;  // per row; 1 in split mode
    SplitMode mode = SplitMode::odd_even;
    std::size_t folds = 1;
    std::size_t n_total = 0;  // sample size used by the vfold scaling

    Vector delta_hat;     // per column
    Vector sigma_hat;     // per column
    RowMatrix fold_means;  // folds x columns, (V/n) * sum over the fold
    std::vector<bool> degenerate;

    /// Columns with sigma_hat below this are excluded from inference.
    static constexpr double kDegenerateTolerance = 1e-12;

    /// Computes delta_hat, sigma_hat, fold_means and degenerate from `delta`.
    void finalize();

    /// delta minus Delta-hat (split) or minus the within-fold mean (vfold).
    RowMatrix centered() const;

    std::size_t rows() const { return static_cast<std::size_t>(delta.rows()); }
    std::size_t columns() const { return s_values.size(); }
};

/// Total validation loss per candidate r = 0..p_n.
struct CvCurve {
    std::vector<double> errors;

    std::vector<std::size_t> feasible_r() const;
};

std::size_t select_k_cv(const CvCurve& curve);

/// Default candidate ceiling min(15 + K0, floor(n_tr / (2 m))), where K0 is the
/// PELT change-point count at the anchor penalty 2 s^2 log n on `anchor`.
std::size_t default_candidate_ceiling(const Series& anchor, std::size_t n_train, std::size_t min_segment_length);

/// Fits the candidate family once per portion and caches the loss matrix that
/// every DeltaTable and the CV curve are derived from.
class CrossValidator {
public:
    CrossValidator(const Series& series, SplitPlan plan, std::optional<std::size_t> p_n, DetectorConfig detector,
                   std::size_t workers = 1);

    const SplitPlan& plan() const { return plan_; }
    const DetectorConfig& detector() const { return detector_; }
    std::size_t requested_p_n() const { return requested_p_n_; }
    // Largest candidate every portion can realise (<= the requested ceiling).
    std::size_t p_n() const { return p_n_; }
    std::size_t n_eval() const { return static_cast<std::size_t>(losses_.rows()); }

    // rows: evaluation points in full-series order; cols: r = 0..p_n.
    const RowMatrix& losses() const { return losses_; }
    const std::vector<std::size_t>& eval_rows() const { return eval_rows_; }
    const std::vector<std::size_t>& eval_fold() const { return eval_fold_; }
    const std::vector<Portion>& portion_list() const { return portions_; }
    const std::vector<std::vector<FittedModel>>& models() const { return models_; }

    DeltaTable delta_table(std::size_t r) const;
    CvCurve cv_curve() const;

private:
    SplitPlan plan_;
    DetectorConfig detector_;
    std::size_t requested_p_n_ = 0;
    std::size_t p_n_ = 0;
    std::vector<Portion> portions_;
    std::vector<std::vector<FittedModel>> models_;
    RowMatrix losses_;
    std::vector<std::size_t> eval_rows_;
    std::vector<std::size_t> eval_fold_;
};

DeltaTable delta_table(const Series& series, const SplitPlan& plan, std::size_t r, std::size_t p_n,
                       const DetectorConfig& detector);

CvCurve cv_curve(const Series& series, const SplitPlan& plan, std::size_t p_n, const DetectorConfig& detector);

}  // namespace segwise
