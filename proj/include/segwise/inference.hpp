#pragma once

#include "segwise/cross_validation.hpp"
#include "segwise/detectors.hpp"
#include "segwise/series.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace segwise {

struct TestResult {
    std::size_t r = 0;
    double statistic = 0.0;
    double critical_value = 0.0;
    double alpha = 0.1;
    std::size_t B = 0;
    bool rejected = false;
    std::vector<std::size_t> degenerate_s;
};

struct UqConfig {
    double alpha = 0.1;
    std::size_t B = 500;
    SplitMode mode = SplitMode::odd_even;
    std::size_t folds = 3;
    std::optional<std::size_t> p_n;
    DetectorConfig detector;
    std::uint64_t seed = 0;
    std::size_t workers = 1;

    void validate() const;
};

struct UqReport {
    std::size_t k_cv = 0;
    std::size_t k_min = 0;
    long u = 0;
    double alpha = 0.1;
    SplitMode mode = SplitMode::odd_even;
    std::vector<TestResult> trace;
    // The loop hit the candidate ceiling without accepting.
    bool saturated = false;
    std::size_t p_n = 0;
    CvCurve curve;
    // Change-points of the K_CV model in full-series coordinates.
    std::vector<std::size_t> change_points_at_k_cv;
    std::size_t n_used = 0;
    std::size_t n_original = 0;
    UqConfig config;
};

/// Max over non-degenerate columns of sqrt(N) * Delta-hat / sigma-hat, with N the
/// number of rows (split) or the total sample size (vfold). Returns -infinity
/// when every column is degenerate.
double test_statistic(const DeltaTable& table);

/// B multiplier-bootstrap replicates of the max statistic. Draw b uses Gaussian
/// multipliers from the substream (seed, b), shared across all columns.
std::vector<double> bootstrap_draws(const DeltaTable& table, std::size_t B, std::uint64_t seed,
                                    std::size_t workers = 1);

/// Smallest t with at most alpha*B draws strictly above it: the
/// ceil(B(1-alpha))-th order statistic.
double critical_value(std::span<const double> draws, double alpha);

/// Statistic, bootstrap calibration and decision for one candidate r.
TestResult test_candidate(const DeltaTable& table, double alpha, std::size_t B, std::uint64_t seed,
                          std::size_t workers = 1);

/// Sequential tests of r = 0, 1, ... until the first acceptance, plus K_CV.
UqReport sequential_k_min(const Series& series, const UqConfig& config);
UqReport sequential_k_min(const Series& series, const CrossValidator& cv, const UqConfig& config);

/// {C^2_xi(T_K) - C^2_xi(T_s)} - 2 {C_mu,xi(T_K) - C_mu,xi(T_s)}; nonpositive
/// values mean the overfitting condition holds for this pair. `train` holds the
/// training-half noise xi (observations minus true means).
double check_overfit_condition(const Series& train, const Series& true_means, const Segmentation& t_kn,
                               const Segmentation& t_s);

}  // namespace segwise
