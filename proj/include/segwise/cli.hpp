#pragma once

#include "segwise/detectors.hpp"
#include "segwise/inference.hpp"
#include "segwise/io.hpp"
#include "segwise/simulation.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace segwise::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConfig = 3;

enum class Format { json, csv };

std::string cmd_uq(const CsvData& data, const UqConfig& config, Format format = Format::json);

std::vector<CostPathRow> cost_path(const Series& series, const DetectorConfig& detector,
                                   std::optional<std::size_t> p_n);
std::string cmd_cost_path(const Series& series, const DetectorConfig& detector, std::optional<std::size_t> p_n,
                          Format format = Format::csv);

std::string cmd_detect(const Series& series, std::size_t r, const DetectorConfig& detector);

struct SimulateOutput {
    std::string summary_json;
    std::string records_csv;
};
SimulateOutput cmd_simulate(const SimConfig& config, std::size_t workers);

/// Full command-line entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace segwise::cli
