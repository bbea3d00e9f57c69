#include "segwise/cli.hpp"

#include "segwise/errors.hpp"
#include "segwise/segment_stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <ostream>

namespace segwise::cli {
namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SEGWISE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError(std::string("SEGWISE_SEED is not an unsigned integer: ") + env);
        }
    }
    return 0;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << text;
}

struct DetectorFlags {
    std::string kind = "pelt";
    std::size_t min_seg = 2;
    std::size_t wbs_intervals = 500;
    std::vector<double> penalties;

    void attach(CLI::App& app) {
        app.add_option("--detector", kind, "Change-point detector")->check(CLI::IsMember({"wbs", "pelt", "dp"}));
        app.add_option("--min-seg", min_seg, "Minimum segment length")->check(CLI::PositiveNumber);
        app.add_option("--wbs-intervals", wbs_intervals, "Random intervals drawn by WBS")->check(CLI::PositiveNumber);
        app.add_option("--penalties", penalties, "Explicit PELT penalty grid (default: auto)")->delimiter(',');
    }

    DetectorConfig build(std::uint64_t seed) const {
        DetectorConfig d;
        d.kind = parse_detector_kind(kind);
        d.min_segment_length = min_seg;
        d.wbs_intervals = wbs_intervals;
        d.pelt_penalty_grid = penalties;
        d.seed = seed;
        d.validate();
        return d;
    }
};

Format parse_format(const std::string& f) { return f == "csv" ? Format::csv : Format::json; }

}  // namespace

std::string cmd_uq(const CsvData& data, const UqConfig& config, Format format) {
    const UqReport report = sequential_k_min(data.series, config);
    return format == Format::csv ? uq_trace_csv(report) : uq_report_json(report, data.dropped_rows);
}

std::vector<CostPathRow> cost_path(const Series& series, const DetectorConfig& detector,
                                   std::optional<std::size_t> p_n) {
    const std::size_t ceiling =
        p_n ? *p_n : default_candidate_ceiling(series, series.n(), detector.min_segment_length);
    Rng rng = make_stream(detector.seed, StreamTag::wbs_intervals, {0});
    const auto family = detect_family(series, ceiling, detector, rng);
    std::vector<CostPathRow> rows;
    rows.reserve(family.size());
    for (std::size_t r = 0; r < family.size(); ++r) rows.push_back({r, segmentation_cost(series, family[r])});
    return rows;
}

std::string cmd_cost_path(const Series& series, const DetectorConfig& detector, std::optional<std::size_t> p_n,
                          Format format) {
    const auto rows = cost_path(series, detector, p_n);
    if (format == Format::csv) return cost_path_csv(rows);
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) arr.push_back({{"r", row.r}, {"cost", row.cost}});
    j["cost_path"] = std::move(arr);
    return j.dump(2) + "\n";
}

std::string cmd_detect(const Series& series, std::size_t r, const DetectorConfig& detector) {
    Rng rng = make_stream(detector.seed, StreamTag::wbs_intervals, {0});
    const Segmentation seg = detect(series, r, detector, rng);
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["detector"] = to_string(detector.kind);
    j["r"] = r;
    j["change_points"] = seg.change_points();
    j["cost"] = segmentation_cost(series, seg);
    return j.dump(2) + "\n";
}

SimulateOutput cmd_simulate(const SimConfig& config, std::size_t workers) {
    const SimMetrics metrics = run_replications(config, workers);
    return {sim_summary_json(config, metrics), sim_records_csv(metrics)};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Change-point detection with cross-validated model size and overestimation control", "segwise"};
    app.require_subcommand(1);

    std::string input, out_path, records_path, format = "json", mode = "split";
    double alpha = 0.1;
    std::size_t B = 500, folds = 3, workers = 1, r = 0;
    std::optional<std::size_t> pn;
    std::uint64_t seed = 0;
    bool seed_given = false;
    DetectorFlags det;

    auto common = [&](CLI::App* sub, bool with_input) {
        if (with_input) sub->add_option("input", input, "CSV data file")->required();
        det.attach(*sub);
        sub->add_option("--pn", pn, "Candidate ceiling p_n (default: automatic)");
        sub->add_option("--seed", seed, "Random seed (default: $SEGWISE_SEED or 0)")
            ->each([&](const std::string&) { seed_given = true; });
        sub->add_option("--out", out_path, "Write output to this path instead of stdout");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--workers", workers, "Concurrent workers")->check(CLI::PositiveNumber);
    };

    auto* uq = app.add_subcommand("uq", "Select K_CV and the overestimation budget U for a dataset");
    common(uq, true);
    uq->add_option("--alpha", alpha, "Test level")->check(CLI::Range(0.0, 1.0));
    uq->add_option("--B", B, "Bootstrap draws")->check(CLI::PositiveNumber);
    uq->add_option("--mode", mode, "split or vfold")->check(CLI::IsMember({"split", "vfold"}));
    uq->add_option("--folds", folds, "Folds in vfold mode");

    auto* cost = app.add_subcommand("cost-path", "In-sample cost for r = 0..p_n (slope heuristic)");
    common(cost, true);

    auto* detect_cmd = app.add_subcommand("detect", "Run the detector for a fixed number of change-points");
    common(detect_cmd, true);
    detect_cmd->add_option("--r", r, "Number of change-points")->required();

    auto* sim = app.add_subcommand("simulate", "Run a scenario file of synthetic replications");
    sim->add_option("scenario", input, "Scenario file (key = value)")->required();
    sim->add_option("--out", out_path, "Write the JSON summary here");
    sim->add_option("--records", records_path, "Write per-replication CSV records here");
    sim->add_option("--format", format, "Stdout format")->check(CLI::IsMember({"json", "csv"}));
    sim->add_option("--workers", workers, "Concurrent replications")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "Override the scenario master seed")
        ->each([&](const std::string&) { seed_given = true; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (!seed_given) seed = default_seed();
        if (*sim) {
            SimConfig config = load_scenario(input);
            if (seed_given) config.master_seed = seed;
            const auto result = cmd_simulate(config, workers);
            if (!records_path.empty()) emit(result.records_csv, records_path, out);
            if (!out_path.empty()) emit(result.summary_json, out_path, out);
            if (out_path.empty() || format == "csv")
                out << (format == "csv" ? result.records_csv : result.summary_json);
            return kExitOk;
        }

        const CsvData data = ingest_csv(input);
        if (data.dropped_rows > 0) err << "warning: dropped " << data.dropped_rows << " rows with missing values\n";
        const DetectorConfig detector = det.build(seed);

        if (*uq) {
            UqConfig config;
            config.alpha = alpha;
            config.B = B;
            config.mode = parse_split_mode(mode);
            config.folds = folds;
            config.p_n = pn;
            config.detector = detector;
            config.seed = seed;
            config.workers = workers;
            config.validate();
            if (config.mode == SplitMode::odd_even && data.series.n() % 2 == 1)
                err << "warning: odd sample size, dropping the final observation for the odd/even split\n";
            emit(cmd_uq(data, config, parse_format(format)), out_path, out);
        } else if (*cost) {
            emit(cmd_cost_path(data.series, detector, pn, format == "json" && cost->count("--format") ? Format::json
                                                                                                    : Format::csv),
                 out_path, out);
        } else if (*detect_cmd) {
            emit(cmd_detect(data.series, r, detector), out_path, out);
        }
        return kExitOk;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace segwise::cli
