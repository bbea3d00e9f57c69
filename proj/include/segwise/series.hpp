#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace segwise {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Observed data: n rows in time order, d coordinates per row.
///
/// Rows are 1-based in the mathematical sense: row i (1..n) is stored at
/// storage index i-1. All entries are finite.
class Series {
public:
    explicit Series(RowMatrix values);

    static Series univariate(const std::vector<double>& values);

    std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t d() const { return static_cast<std::size_t>(values_.cols()); }
    const RowMatrix& values() const { return values_; }

    // 0-based storage row.
    auto row(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)); }

    // Rows at the given 0-based storage indices, in the given order.
    Series select(const std::vector<std::size_t>& rows) const;

private:
    RowMatrix values_;
};

/// Ordered change-points 0 < tau_1 < ... < tau_r < n over a series of length n.
/// Segment k is the index interval (tau_k, tau_{k+1}] with tau_0 = 0, tau_{r+1} = n.
class Segmentation {
public:
    Segmentation() = default;
    Segmentation(std::vector<std::size_t> change_points, std::size_t n);

    const std::vector<std::size_t>& change_points() const { return cps_; }
    std::size_t n() const { return n_; }
    std::size_t size() const { return cps_.size(); }
    std::size_t segment_count() const { return cps_.size() + 1; }

    // Boundaries tau_0 = 0, tau_1, ..., tau_r, tau_{r+1} = n.
    std::vector<std::size_t> boundaries() const;

    // Segment index j (0-based) containing 1-based position p, i.e. tau_j < p <= tau_{j+1}.
    std::size_t segment_of(std::size_t position) const;

    std::size_t min_segment_length() const;

    bool contains_all(const Segmentation& other) const;

    friend bool operator==(const Segmentation&, const Segmentation&) = default;

private:
    std::vector<std::size_t> cps_;
    std::size_t n_ = 0;
};

/// A segmentation of a training series plus one mean vector per segment.
struct FittedModel {
    Segmentation segmentation;
    RowMatrix params;  // (r+1) x d

    FittedModel(Segmentation seg, RowMatrix means);

    std::size_t n_fit() const { return segmentation.n(); }
};

/// Simulation ground truth: true change-points and the per-segment means.
struct TrueModel {
    Segmentation change_points;
    RowMatrix means;  // (K_n+1) x d

    TrueModel(Segmentation cps, RowMatrix segment_means);

    std::size_t k_n() const { return change_points.size(); }
    std::size_t min_spacing() const;
    std::size_t max_spacing() const;
    double min_jump_sq() const;

    // The n x d piecewise-constant signal mu_1..mu_n.
    Series signal() const;
};

}  // namespace segwise
