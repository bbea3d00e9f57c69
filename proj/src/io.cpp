#include "segwise/io.hpp"

#include "segwise/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace segwise {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) fields.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool is_missing(const std::string& field) {
    const std::string l = lower(field);
    return l.empty() || l == "na" || l == "nan";
}

std::string read_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(std::string("cannot read ") + what + " '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::ordered_json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

nlohmann::ordered_json detector_json(const DetectorConfig& d) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(d.kind);
    j["min_segment_length"] = d.min_segment_length;
    j["wbs_intervals"] = d.wbs_intervals;
    if (d.pelt_penalty_grid.empty()) {
        j["penalty_grid"] = "auto";
    } else {
        j["penalty_grid"] = d.pelt_penalty_grid;
    }
    return j;
}

}  // namespace

CsvData parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first = true;
    std::size_t dropped = 0;
    bool header = false;
    std::vector<std::vector<double>> rows;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw InputError("ragged row at line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                             " fields, found " + std::to_string(fields.size()));

        std::vector<double> values(width);
        bool missing = false, numeric = true;
        for (std::size_t k = 0; k < width; ++k) {
            if (is_missing(fields[k])) {
                missing = true;
            } else if (!parse_double(fields[k], values[k])) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (first) {
                header = true;
                first = false;
                continue;
            }
            throw InputError("non-numeric field at line " + std::to_string(line_no));
        }
        first = false;
        if (missing) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw InputError("no parseable numeric rows");
    if (rows.size() < 2) throw InputError("need at least 2 observations, found 1");

    RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < width; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    return CsvData{Series(std::move(m)), dropped, header};
}

CsvData ingest_csv(const std::filesystem::path& path) { return parse_csv(read_file(path, "input")); }

SimConfig parse_scenario(const std::string& text) {
    SimConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("scenario line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
            value = value.substr(1, value.size() - 2);

        auto fail = [&](const char* what) {
            return ConfigError("scenario line " + std::to_string(line_no) + ": " + key + " " + what);
        };
        auto as_real = [&] {
            double v = 0.0;
            if (!parse_double(value, v)) throw fail("must be a number");
            return v;
        };
        auto as_count = [&] {
            const double v = as_real();
            if (v < 0 || v != std::floor(v)) throw fail("must be a nonnegative integer");
            return static_cast<std::size_t>(v);
        };
        auto as_list = [&] {
            std::string inner = value;
            std::erase(inner, '[');
            std::erase(inner, ']');
            std::vector<double> out;
            for (const auto& f : split_fields(inner)) {
                double v = 0.0;
                if (!parse_double(f, v)) throw fail("must be a list of numbers");
                out.push_back(v);
            }
            return out;
        };

        if (key == "n") c.n = as_count();
        else if (key == "k_n" || key == "kn") c.k_n = as_count();
        else if (key == "d") c.d = as_count();
        else if (key == "snr") c.snr = as_real();
        else if (key == "error_law" || key == "errors") c.error_law = parse_error_law(lower(value));
        else if (key == "theta") {
            const auto t = as_list();
            if (t.size() != 2) throw fail("must hold exactly two values");
            c.theta = {t[0], t[1]};
        } else if (key == "jitter_a") c.jitter_a = as_count();
        else if (key == "replications" || key == "r") c.replications = as_count();
        else if (key == "b") c.B = as_count();
        else if (key == "alpha") c.alpha = as_real();
        else if (key == "detector") c.detector.kind = parse_detector_kind(lower(value));
        else if (key == "min_seg" || key == "min_segment_length") c.detector.min_segment_length = as_count();
        else if (key == "wbs_intervals") c.detector.wbs_intervals = as_count();
        else if (key == "penalties" || key == "pelt_penalty_grid") {
            if (lower(value) != "auto") c.detector.pelt_penalty_grid = as_list();
        } else if (key == "mode") c.mode = parse_split_mode(lower(value));
        else if (key == "folds" || key == "v") c.folds = as_count();
        else if (key == "p_n" || key == "pn") {
            if (lower(value) != "auto") c.p_n = as_count();
        } else if (key == "master_seed" || key == "seed") c.master_seed = static_cast<std::uint64_t>(as_count());
        else throw ConfigError("scenario line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

SimConfig load_scenario(const std::filesystem::path& path) { return parse_scenario(read_file(path, "scenario")); }

std::string uq_report_json(const UqReport& report, std::size_t dropped_rows) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["k_cv"] = report.k_cv;
    j["k_min"] = report.k_min;
    j["u"] = report.u;
    j["alpha"] = report.alpha;
    j["mode"] = to_string(report.mode);
    j["saturated"] = report.saturated;
    j["p_n"] = report.p_n;
    j["n"] = report.n_used;
    j["n_input"] = report.n_original;
    j["dropped_rows"] = dropped_rows;
    auto trace = nlohmann::ordered_json::array();
    for (const auto& t : report.trace) {
        nlohmann::ordered_json e;
        e["r"] = t.r;
        e["statistic"] = finite_or_null(t.statistic);
        e["critical_value"] = finite_or_null(t.critical_value);
        e["rejected"] = t.rejected;
        e["degenerate_s"] = t.degenerate_s;
        trace.push_back(std::move(e));
    }
    j["trace"] = std::move(trace);
    j["cv_errors"] = report.curve.errors;
    j["change_points_at_k_cv"] = report.change_points_at_k_cv;
    nlohmann::ordered_json cfg;
    cfg["detector"] = detector_json(report.config.detector);
    cfg["B"] = report.config.B;
    cfg["mode"] = to_string(report.config.mode);
    cfg["folds"] = report.config.folds;
    if (report.config.p_n) {
        cfg["p_n"] = *report.config.p_n;
    } else {
        cfg["p_n"] = "auto";
    }
    j["config"] = std::move(cfg);
    j["seed"] = report.config.seed;
    return j.dump(2) + "\n";
}

std::string uq_trace_csv(const UqReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "r,statistic,critical_value,rejected\n";
    for (const auto& t : report.trace)
        out << t.r << ',' << t.statistic << ',' << t.critical_value << ',' << (t.rejected ? 1 : 0) << '\n';
    return out.str();
}

std::string sim_summary_json(const SimConfig& config, const SimMetrics& m) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["requested"] = m.requested;
    j["completed"] = m.completed;
    j["p_plus"] = m.p_plus;
    j["mean_u"] = m.mean_u;
    j["sd_u"] = m.sd_u;
    j["mean_k_cv_minus_k_n"] = m.mean_over;
    j["sd_k_cv_minus_k_n"] = m.sd_over;
    j["saturation_count"] = m.saturation_count;
    nlohmann::ordered_json cfg;
    cfg["n"] = config.n;
    cfg["k_n"] = config.k_n;
    cfg["d"] = config.d;
    cfg["snr"] = config.snr;
    cfg["error_law"] = to_string(config.error_law);
    cfg["theta"] = config.theta;
    cfg["jitter_a"] = config.jitter();
    cfg["replications"] = config.replications;
    cfg["B"] = config.B;
    cfg["alpha"] = config.alpha;
    cfg["detector"] = detector_json(config.detector);
    cfg["mode"] = to_string(config.mode);
    cfg["folds"] = config.folds;
    if (config.p_n) {
        cfg["p_n"] = *config.p_n;
    } else {
        cfg["p_n"] = "auto";
    }
    cfg["master_seed"] = config.master_seed;
    j["config"] = std::move(cfg);
    return j.dump(2) + "\n";
}

std::string sim_records_csv(const SimMetrics& m) {
    std::ostringstream out;
    out.precision(17);
    out << "replication,seed,k_n,k_cv,k_min,u,saturated,rejected_at_zero,critical_at_k_cv,status\n";
    for (const auto& r : m.records) {
        out << r.replication << ',' << r.seed << ',' << r.k_n << ',' << r.k_cv << ',' << r.k_min << ',' << r.u << ','
            << (r.saturated ? 1 : 0) << ',' << (r.rejected_at_zero ? 1 : 0) << ',';
        if (r.critical_at_k_cv) out << *r.critical_at_k_cv;
        out << ',' << (r.completed ? "ok" : "failed") << '\n';
    }
    return out.str();
}

std::string cost_path_csv(const std::vector<CostPathRow>& rows) {
    std::ostringstream out;
    out.precision(17);
    out << "r,cost\n";
    for (const auto& row : rows) out << row.r << ',' << row.cost << '\n';
    return out.str();
}

}  // namespace segwise
