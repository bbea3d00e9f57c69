#include "segwise/series.hpp"

#include "segwise/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace segwise {

Series::Series(RowMatrix values) : values_(std::move(values)) {
    if (values_.rows() < 2) throw InputError("series needs at least 2 observations");
    if (values_.cols() < 1) throw InputError("series needs at least 1 coordinate");
    if (!values_.allFinite()) throw InputError("series contains non-finite values");
}

Series Series::univariate(const std::vector<double>& values) {
    RowMatrix m(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
    return Series(std::move(m));
}

Series Series::select(const std::vector<std::size_t>& rows) const {
    RowMatrix out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] >= n()) throw RangeError("row index out of range");
        out.row(static_cast<Eigen::Index>(k)) = values_.row(static_cast<Eigen::Index>(rows[k]));
    }
    return Series(std::move(out));
}

Segmentation::Segmentation(std::vector<std::size_t> change_points, std::size_t n)
    : cps_(std::move(change_points)), n_(n) {
    for (std::size_t k = 0; k < cps_.size(); ++k) {
        if (cps_[k] == 0 || cps_[k] >= n_)
            throw RangeError("change-point " + std::to_string(cps_[k]) + " outside (0, " +
                             std::to_string(n_) + ")");
        if (k > 0 && cps_[k] <= cps_[k - 1]) throw RangeError("change-points must be strictly increasing");
    }
}

std::vector<std::size_t> Segmentation::boundaries() const {
    std::vector<std::size_t> b;
    b.reserve(cps_.size() + 2);
    b.push_back(0);
    b.insert(b.end(), cps_.begin(), cps_.end());
    b.push_back(n_);
    return b;
}

std::size_t Segmentation::segment_of(std::size_t position) const {
    if (position == 0 || position > n_) throw RangeError("position outside 1..n");
    // number of change-points strictly below position
    return static_cast<std::size_t>(std::lower_bound(cps_.begin(), cps_.end(), position) - cps_.begin());
}

std::size_t Segmentation::min_segment_length() const {
    const auto b = boundaries();
    std::size_t m = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k + 1 < b.size(); ++k) m = std::min(m, b[k + 1] - b[k]);
    return m;
}

bool Segmentation::contains_all(const Segmentation& other) const {
    return std::includes(cps_.begin(), cps_.end(), other.cps_.begin(), other.cps_.end());
}

FittedModel::FittedModel(Segmentation seg, RowMatrix means)
    : segmentation(std::move(seg)), params(std::move(means)) {
    if (static_cast<std::size_t>(params.rows()) != segmentation.segment_count())
        throw ShapeError("one parameter vector per segment required");
    if (!params.allFinite()) throw InputError("non-finite segment parameter");
}

TrueModel::TrueModel(Segmentation cps, RowMatrix segment_means)
    : change_points(std::move(cps)), means(std::move(segment_means)) {
    if (static_cast<std::size_t>(means.rows()) != change_points.segment_count())
        throw ShapeError("one mean vector per true segment required");
    for (Eigen::Index k = 0; k + 1 < means.rows(); ++k)
        if (means.row(k) == means.row(k + 1)) throw ConfigError("consecutive true means must differ");
}

std::size_t TrueModel::min_spacing() const { return change_points.min_segment_length(); }

std::size_t TrueModel::max_spacing() const {
    const auto b = change_points.boundaries();
    std::size_t m = 0;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) m = std::max(m, b[k + 1] - b[k]);
    return m;
}

double TrueModel::min_jump_sq() const {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 1; k < means.rows(); ++k) m = std::min(m, (means.row(k - 1) - means.row(k)).squaredNorm());
    return m;
}

Series TrueModel::signal() const {
    const auto b = change_points.boundaries();
    RowMatrix mu(static_cast<Eigen::Index>(change_points.n()), means.cols());
    for (std::size_t k = 0; k + 1 < b.size(); ++k)
        for (std::size_t i = b[k]; i < b[k + 1]; ++i)
            mu.row(static_cast<Eigen::Index>(i)) = means.row(static_cast<Eigen::Index>(k));
    return Series(std::move(mu));
}

}  // namespace segwise
