#pragma once

#include "segwise/random.hpp"
#include "segwise/series.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace segwise {

enum class DetectorKind { wbs, pelt, dp_exact };

std::string to_string(DetectorKind kind);
DetectorKind parse_detector_kind(const std::string& name);

struct DetectorConfig {
    DetectorKind kind = DetectorKind::pelt;
    std::size_t wbs_intervals = 500;
    std::size_t min_segment_length = 2;
    // Empty means "auto".
    std::vector<double> pelt_penalty_grid;
    std::uint64_t seed = 0;

    void validate() const;
};

struct RankedCandidate {
    std::size_t change_point;
    double score;
};

/// Candidate change-points in decreasing order of CUSUM score.
struct RankedCandidates {
    std::vector<RankedCandidate> entries;
    std::size_t n = 0;

    // The top-r candidates, re-sorted by position.
    Segmentation prefix(std::size_t r) const;
};

// Largest r for which r change-points fit with every segment >= min_segment_length.
std::size_t max_feasible_changepoints(std::size_t n, std::size_t min_segment_length);

/// sqrt((u-t)(t-l)/(u-l)) * ||mean(l,t] - mean(t,u]||.
double cusum(const Series& series, std::size_t l, std::size_t u, std::size_t t);

/// Wild binary segmentation producing one global ranking of split points.
RankedCandidates wbs_rank(const Series& series, const DetectorConfig& config, Rng& rng);

/// Segment-neighbourhood dynamic program: the exact r-change-point segmentation
/// with minimum total SSE. Ties go to the lexicographically smallest vector.
Segmentation dp_exact(const Series& series, std::size_t r, std::size_t min_segment_length);

/// dp_exact for every r = 0..min(r_max, max feasible) from a single table.
std::vector<Segmentation> dp_exact_all(const Series& series, std::size_t r_max,
                                       std::size_t min_segment_length);

/// Pruned exact minimisation of SSE + penalty * (#change-points).
Segmentation pelt(const Series& series, double penalty, std::size_t min_segment_length);

/// Noise variance estimate sum ||x_{i+1} - x_i||^2 / (2 (n-1) d).
double difference_variance(const Series& series);

/// 40-point geometric grid from 2 s^2 log n down to 0.01 s^2.
std::vector<double> auto_penalty_grid(const Series& series);

/// First segmentation observed for each change-point count while sweeping a
/// decreasing penalty grid.
std::map<std::size_t, Segmentation> penalty_path(const Series& series, const DetectorConfig& config);

/// Segmentations for r = 0, 1, ..., up to r_max (fewer when the detector
/// cannot produce larger counts). Entry r has exactly r change-points.
std::vector<Segmentation> detect_family(const Series& series, std::size_t r_max,
                                        const DetectorConfig& config, Rng& rng);

/// Exactly r change-points from the configured detector.
/// Throws CapacityError when r is infeasible.
Segmentation detect(const Series& series, std::size_t r, const DetectorConfig& config, Rng& rng);

}  // namespace segwise
