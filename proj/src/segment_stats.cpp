#include "segwise/segment_stats.hpp"

#include "segwise/errors.hpp"

#include <string>

namespace segwise {
namespace {

void check_range(const Series& series, std::size_t a, std::size_t b) {
    if (!(a < b && b <= series.n()))
        throw RangeError("segment (" + std::to_string(a) + ", " + std::to_string(b) + "] outside series of length " +
                         std::to_string(series.n()));
}

void check_shapes(const Series& x, const Series& y, const Segmentation& t) {
    if (x.n() != y.n() || x.d() != y.d()) throw ShapeError("x and y must have identical shape");
    if (t.n() != x.n()) throw ShapeError("segmentation length does not match the series");
}

auto block(const Series& s, std::size_t a, std::size_t b) {
    return s.values().middleRows(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b - a));
}

}  // namespace

Vector segment_mean(const Series& series, std::size_t a, std::size_t b) {
    check_range(series, a, b);
    return block(series, a, b).colwise().mean().transpose();
}

double sse_cost(const Series& series, std::size_t a, std::size_t b) {
    check_range(series, a, b);
    const auto seg = block(series, a, b);
    const Eigen::RowVectorXd mean = seg.colwise().mean();
    return (seg.rowwise() - mean).squaredNorm();
}

double c_inner(const Series& x, const Series& y, const Segmentation& t) {
    check_shapes(x, y, t);
    const auto b = t.boundaries();
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        const double len = static_cast<double>(b[k + 1] - b[k]);
        total += len * segment_mean(x, b[k], b[k + 1]).dot(segment_mean(y, b[k], b[k + 1]));
    }
    return total;
}

double s_inner(const Series& x, const Series& y, const Segmentation& t) {
    check_shapes(x, y, t);
    const auto b = t.boundaries();
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        const auto xs = block(x, b[k], b[k + 1]);
        const auto ys = block(y, b[k], b[k + 1]);
        const Eigen::RowVectorXd mx = xs.colwise().mean();
        const Eigen::RowVectorXd my = ys.colwise().mean();
        total += ((xs.rowwise() - mx).array() * (ys.rowwise() - my).array()).sum();
    }
    return total;
}

double segmentation_cost(const Series& series, const Segmentation& t) {
    if (t.n() != series.n()) throw ShapeError("segmentation length does not match the series");
    const auto b = t.boundaries();
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) total += sse_cost(series, b[k], b[k + 1]);
    return total;
}

double total_sum_squares(const Series& series) { return series.values().squaredNorm(); }

}  // namespace segwise
