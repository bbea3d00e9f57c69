#pragma once

#include "segwise/series.hpp"

#include <cstddef>

namespace segwise {

/// Coordinate-wise mean of rows a+1..b, the interval (a, b].
Vector segment_mean(const Series& series, std::size_t a, std::size_t b);

/// Within-segment sum of squared deviations from the segment mean over (a, b].
/// Two-pass: mean first, then squared deviations.
double sse_cost(const Series& series, std::size_t a, std::size_t b);

/// Sum over segments of (segment length) * mean_x' mean_y.
double c_inner(const Series& x, const Series& y, const Segmentation& t);

/// Sum over segments of the centered cross products (x_i - mean_x)'(y_i - mean_y).
double s_inner(const Series& x, const Series& y, const Segmentation& t);

/// Total within-segment quadratic cost of a segmentation.
double segmentation_cost(const Series& series, const Segmentation& t);

/// Sum over rows of ||x_i||^2.
double total_sum_squares(const Series& series);

/// Running mean and centered sum of squares (Welford), extended one row at a time.
class SegmentAccumulator {
public:
    explicit SegmentAccumulator(std::size_t d) : mean_(Vector::Zero(static_cast<Eigen::Index>(d))) {}

    template <typename Row>
    void push(const Row& x) {
        ++count_;
        const Vector delta = x.transpose() - mean_;
        mean_ += delta / static_cast<double>(count_);
        sse_ += delta.dot(x.transpose() - mean_);
    }

    std::size_t count() const { return count_; }
    double sse() const { return sse_ < 0.0 ? 0.0 : sse_; }
    const Vector& mean() const { return mean_; }

private:
    std::size_t count_ = 0;
    Vector mean_;
    double sse_ = 0.0;
};

}  // namespace segwise
