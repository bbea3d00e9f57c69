#include "segwise/detectors.hpp"

#include "segwise/errors.hpp"
#include "segwise/segment_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace segwise {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative tolerance under which two segmentation costs count as tied.
constexpr double kTieTolerance = 1e-10;
// Largest training length handed to the quadratic dynamic program.
constexpr std::size_t kDpLengthCap = 5000;

bool tied(double a, double b) { return std::abs(a - b) <= kTieTolerance * (1.0 + std::abs(a) + std::abs(b)); }

// Prefix sums of the series centred at its global mean.
class PrefixSums {
public:
    explicit PrefixSums(const Series& series) : sums_(series.n() + 1, series.d()) {
        const Eigen::RowVectorXd centre = series.values().colwise().mean();
        sums_.row(0).setZero();
        for (std::size_t i = 0; i < series.n(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            sums_.row(k + 1) = sums_.row(k) + (series.row(i) - centre);
        }
    }

    double cusum(std::size_t l, std::size_t u, std::size_t t) const {
        const double left = static_cast<double>(t - l);
        const double right = static_cast<double>(u - t);
        const auto L = static_cast<Eigen::Index>(l), U = static_cast<Eigen::Index>(u), T = static_cast<Eigen::Index>(t);
        const Eigen::RowVectorXd diff = (sums_.row(T) - sums_.row(L)) / left - (sums_.row(U) - sums_.row(T)) / right;
        return std::sqrt(left * right / (left + right)) * diff.norm();
    }

private:
    RowMatrix sums_;
};

struct Interval {
    std::size_t l;
    std::size_t u;
};

std::vector<double> pelt_grid(const Series& series, const DetectorConfig& config) {
    std::vector<double> grid = config.pelt_penalty_grid.empty() ? auto_penalty_grid(series) : config.pelt_penalty_grid;
    std::sort(grid.begin(), grid.end(), std::greater<>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

}  // namespace

std::string to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::wbs: return "wbs";
        case DetectorKind::pelt: return "pelt";
        case DetectorKind::dp_exact: return "dp";
    }
    return "?";
}

DetectorKind parse_detector_kind(const std::string& name) {
    if (name == "wbs") return DetectorKind::wbs;
    if (name == "pelt") return DetectorKind::pelt;
    if (name == "dp" || name == "dp-exact" || name == "dp_exact") return DetectorKind::dp_exact;
    throw ConfigError("unknown detector '" + name + "'");
}

void DetectorConfig::validate() const {
    if (wbs_intervals < 1) throw ConfigError("wbs_intervals must be >= 1");
    if (min_segment_length < 1) throw ConfigError("min_segment_length must be >= 1");
    for (std::size_t i = 0; i < pelt_penalty_grid.size(); ++i) {
        const double p = pelt_penalty_grid[i];
        if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("penalties must be finite and nonnegative");
        for (std::size_t j = 0; j < i; ++j)
            if (pelt_penalty_grid[j] == p) throw ConfigError("penalty grid values must be distinct");
    }
}

Segmentation RankedCandidates::prefix(std::size_t r) const {
    if (r > entries.size())
        throw CapacityError("ranking holds only " + std::to_string(entries.size()) + " candidates, " +
                            std::to_string(r) + " requested");
    std::vector<std::size_t> cps;
    cps.reserve(r);
    for (std::size_t k = 0; k < r; ++k) cps.push_back(entries[k].change_point);
    std::sort(cps.begin(), cps.end());
    return Segmentation(std::move(cps), n);
}

std::size_t max_feasible_changepoints(std::size_t n, std::size_t min_segment_length) {
    const std::size_t segments = n / std::max<std::size_t>(1, min_segment_length);
    return segments == 0 ? 0 : segments - 1;
}

double cusum(const Series& series, std::size_t l, std::size_t u, std::size_t t) {
    if (!(l < t && t < u && u <= series.n()))
        throw RangeError("cusum split " + std::to_string(t) + " not inside (" + std::to_string(l) + ", " +
                         std::to_string(u) + ")");
    const double left = static_cast<double>(t - l);
    const double right = static_cast<double>(u - t);
    const Vector diff = segment_mean(series, l, t) - segment_mean(series, t, u);
    return std::sqrt(left * right / (left + right)) * diff.norm();
}

RankedCandidates wbs_rank(const Series& series, const DetectorConfig& config, Rng& rng) {
    config.validate();
    const std::size_t n = series.n();
    const std::size_t m = config.min_segment_length;
    RankedCandidates ranked;
    ranked.n = n;
    if (n < 2 * m) return ranked;

    // Random windows (l, u] with u - l >= 2m, drawn before any recursion so the
    // set depends only on the seed.
    std::vector<Interval> windows;
    windows.reserve(config.wbs_intervals);
    std::uniform_int_distribution<std::size_t> endpoint(0, n);
    while (windows.size() < config.wbs_intervals) {
        std::size_t a = endpoint(rng), b = endpoint(rng);
        if (a > b) std::swap(a, b);
        if (b - a >= 2 * m) windows.push_back({a, b});
    }

    const PrefixSums sums(series);
    std::vector<Interval> stack{{0, n}};
    std::size_t discovered = 0;
    std::vector<std::pair<std::size_t, RankedCandidate>> found;  // (discovery order, candidate)
    while (!stack.empty()) {
        const Interval seg = stack.back();
        stack.pop_back();
        if (seg.u - seg.l < 2 * m) continue;

        double best = -1.0;
        std::size_t best_t = 0;
        auto scan = [&](Interval w) {
            for (std::size_t t = w.l + m; t + m <= w.u; ++t) {
                const double c = sums.cusum(w.l, w.u, t);
                if (c > best) {
                    best = c;
                    best_t = t;
                }
            }
        };
        scan(seg);
        for (const Interval& w : windows)
            if (w.l >= seg.l && w.u <= seg.u) scan(w);

        found.push_back({discovered++, {best_t, best}});
        stack.push_back({best_t, seg.u});
        stack.push_back({seg.l, best_t});
    }

    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.second.score != b.second.score) return a.second.score > b.second.score;
        return a.second.change_point < b.second.change_point;
    });
    ranked.entries.reserve(found.size());
    for (const auto& f : found) ranked.entries.push_back(f.second);
    return ranked;
}

std::vector<Segmentation> dp_exact_all(const Series& series, std::size_t r_max, std::size_t m) {
    if (m < 1) throw ConfigError("min_segment_length must be >= 1");
    const std::size_t n = series.n();
    const std::size_t K = std::min(r_max, max_feasible_changepoints(n, m));

    // tail[k][i]: minimum cost of splitting (i, n] with exactly k change-points.
    std::vector<std::vector<double>> tail(K + 1, std::vector<double>(n + 1, kInf));
    std::vector<double> row(n + 1);
    auto cost_row = [&](std::size_t i) {
        SegmentAccumulator acc(series.d());
        for (std::size_t t = i + 1; t <= n; ++t) {
            acc.push(series.row(t - 1));
            row[t] = acc.sse();
        }
    };

    for (std::size_t i = n; i-- > 0;) {
        cost_row(i);
        if (n - i >= m) tail[0][i] = row[n];
        for (std::size_t k = 1; k <= K; ++k) {
            double best = kInf;
            for (std::size_t t = i + m; t + m <= n; ++t) {
                if (tail[k - 1][t] == kInf) continue;
                best = std::min(best, row[t] + tail[k - 1][t]);
            }
            tail[k][i] = best;
        }
    }

    std::vector<Segmentation> out;
    out.reserve(K + 1);
    for (std::size_t r = 0; r <= K; ++r) {
        if (tail[r][0] == kInf) break;
        std::vector<std::size_t> cps;
        std::size_t i = 0;
        for (std::size_t k = r; k >= 1; --k) {
            cost_row(i);
            const double target = tail[k][i];
            std::size_t chosen = 0;
            for (std::size_t t = i + m; t + m <= n; ++t) {
                if (tail[k - 1][t] == kInf) continue;
                if (tied(row[t] + tail[k - 1][t], target) || row[t] + tail[k - 1][t] < target) {
                    chosen = t;
                    break;
                }
            }
            cps.push_back(chosen);
            i = chosen;
        }
        out.emplace_back(std::move(cps), n);
    }
    return out;
}

Segmentation dp_exact(const Series& series, std::size_t r, std::size_t m) {
    if (m < 1) throw ConfigError("min_segment_length must be >= 1");
    if (series.n() < m || r > max_feasible_changepoints(series.n(), m))
        throw CapacityError(std::to_string(r) + " change-points infeasible for n=" + std::to_string(series.n()));
    auto all = dp_exact_all(series, r, m);
    return std::move(all.at(r));
}

Segmentation pelt(const Series& series, double penalty, std::size_t m) {
    if (!(penalty >= 0.0)) throw ConfigError("penalty must be nonnegative");
    if (m < 1) throw ConfigError("min_segment_length must be >= 1");
    const std::size_t n = series.n();

    struct Candidate {
        std::size_t t;
        SegmentAccumulator acc;
        std::size_t pruned_at;  // 0 = live
    };
    constexpr std::size_t kLive = 0;

    std::vector<double> best(n + 1, kInf);
    std::vector<std::size_t> changes(n + 1, 0);
    std::vector<std::size_t> last(n + 1, 0);
    best[0] = -penalty;

    std::vector<Candidate> candidates;
    candidates.push_back({0, SegmentAccumulator(series.d()), kLive});

    for (std::size_t s = 1; s <= n; ++s) {
        for (auto& c : candidates) c.acc.push(series.row(s - 1));

        double f = kInf;
        std::size_t f_changes = 0, f_last = 0;
        for (const auto& c : candidates) {
            if (s - c.t < m) continue;
            const double value = best[c.t] + c.acc.sse() + penalty;
            const std::size_t cnt = c.t == 0 ? 0 : changes[c.t] + 1;
            if (f == kInf || (value < f && !tied(value, f)) || (tied(value, f) && cnt < f_changes)) {
                f = value;
                f_changes = cnt;
                f_last = c.t;
            }
        }
        best[s] = f;
        changes[s] = f_changes;
        last[s] = f_last;

        if (f != kInf) {
            // A candidate beaten at s is beaten for every s' >= s + m; it stays
            // available for the m-1 positions where s itself is not yet usable.
            std::erase_if(candidates, [&](const Candidate& c) { return c.pruned_at != kLive && s >= c.pruned_at + m - 1; });
            for (auto& c : candidates) {
                if (c.pruned_at != kLive || s - c.t < m) continue;
                if (best[c.t] + c.acc.sse() > f && !tied(best[c.t] + c.acc.sse(), f)) c.pruned_at = s;
            }
            if (s < n) candidates.push_back({s, SegmentAccumulator(series.d()), kLive});
        }
    }

    std::vector<std::size_t> cps;
    for (std::size_t s = n; last[s] != 0; s = last[s]) cps.push_back(last[s]);
    std::reverse(cps.begin(), cps.end());
    return Segmentation(std::move(cps), n);
}

double difference_variance(const Series& series) {
    const auto& v = series.values();
    const Eigen::Index n = v.rows();
    const double ss = (v.bottomRows(n - 1) - v.topRows(n - 1)).squaredNorm();
    return ss / (2.0 * static_cast<double>(n - 1) * static_cast<double>(series.d()));
}

std::vector<double> auto_penalty_grid(const Series& series) {
    const double s2 = difference_variance(series);
    if (!(s2 > 0.0)) return {0.0};
    const double hi = 2.0 * s2 * std::log(static_cast<double>(series.n()));
    const double lo = 0.01 * s2;
    constexpr int kPoints = 40;
    std::vector<double> grid(kPoints);
    for (int k = 0; k < kPoints; ++k) grid[k] = hi * std::pow(lo / hi, static_cast<double>(k) / (kPoints - 1));
    return grid;
}

std::map<std::size_t, Segmentation> penalty_path(const Series& series, const DetectorConfig& config) {
    config.validate();
    std::map<std::size_t, Segmentation> path;
    for (double penalty : pelt_grid(series, config)) {
        Segmentation seg = pelt(series, penalty, config.min_segment_length);
        path.try_emplace(seg.size(), std::move(seg));
    }
    return path;
}

std::vector<Segmentation> detect_family(const Series& series, std::size_t r_max, const DetectorConfig& config,
                                        Rng& rng) {
    config.validate();
    const std::size_t m = config.min_segment_length;
    const std::size_t top = std::min(r_max, max_feasible_changepoints(series.n(), m));
    std::vector<Segmentation> family;

    switch (config.kind) {
        case DetectorKind::dp_exact: return dp_exact_all(series, top, m);
        case DetectorKind::wbs: {
            const RankedCandidates ranked = wbs_rank(series, config, rng);
            const std::size_t avail = std::min(top, ranked.entries.size());
            for (std::size_t r = 0; r <= avail; ++r) family.push_back(ranked.prefix(r));
            return family;
        }
        case DetectorKind::pelt: {
            auto path = penalty_path(series, config);
            bool gaps = false;
            for (std::size_t r = 0; r <= top; ++r) gaps = gaps || !path.contains(r);
            std::vector<Segmentation> fallback;
            if (gaps) {
                if (series.n() <= kDpLengthCap) {
                    fallback = dp_exact_all(series, top, m);
                } else {
                    const RankedCandidates ranked = wbs_rank(series, config, rng);
                    for (std::size_t r = 0; r <= std::min(top, ranked.entries.size()); ++r)
                        fallback.push_back(ranked.prefix(r));
                }
            }
            for (std::size_t r = 0; r <= top; ++r) {
                if (auto it = path.find(r); it != path.end()) {
                    family.push_back(it->second);
                } else if (r < fallback.size()) {
                    family.push_back(fallback[r]);
                } else {
                    break;
                }
            }
            return family;
        }
    }
    return family;
}

Segmentation detect(const Series& series, std::size_t r, const DetectorConfig& config, Rng& rng) {
    if (r > max_feasible_changepoints(series.n(), config.min_segment_length))
        throw CapacityError(std::to_string(r) + " change-points infeasible for n=" + std::to_string(series.n()) +
                            " with minimum segment length " + std::to_string(config.min_segment_length));
    auto family = detect_family(series, r, config, rng);
    if (family.size() <= r)
        throw CapacityError("detector " + to_string(config.kind) + " produced at most " +
                            std::to_string(family.empty() ? 0 : family.size() - 1) + " change-points");
    return std::move(family[r]);
}

}  // namespace segwise
