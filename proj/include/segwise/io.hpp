#pragma once

#include "segwise/inference.hpp"
#include "segwise/series.hpp"
#include "segwise/simulation.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace segwise {

struct CsvData {
    Series series;
    std::size_t dropped_rows = 0;
    bool had_header = false;
};

/// Comma-separated numeric rows; an optional non-numeric first line is a header.
/// Rows with empty fields or NA/NaN tokens are dropped and counted.
CsvData parse_csv(const std::string& text);
CsvData ingest_csv(const std::filesystem::path& path);

/// Flat `key = value` scenario text ('#' starts a comment).
SimConfig parse_scenario(const std::string& text);
SimConfig load_scenario(const std::filesystem::path& path);

inline constexpr int kSchemaVersion = 1;

std::string uq_report_json(const UqReport& report, std::size_t dropped_rows);
std::string uq_trace_csv(const UqReport& report);

std::string sim_summary_json(const SimConfig& config, const SimMetrics& metrics);
std::string sim_records_csv(const SimMetrics& metrics);

struct CostPathRow {
    std::size_t r;
    double cost;
};
std::string cost_path_csv(const std::vector<CostPathRow>& rows);

}  // namespace segwise
