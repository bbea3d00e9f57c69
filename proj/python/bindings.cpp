#include "segwise/cli.hpp"
#include "segwise/cross_validation.hpp"
#include "segwise/detectors.hpp"
#include "segwise/errors.hpp"
#include "segwise/inference.hpp"
#include "segwise/io.hpp"
#include "segwise/segment_stats.hpp"
#include "segwise/simulation.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace segwise;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Series to_series(const Array& a) {
    if (a.ndim() == 1) {
        RowMatrix m(a.shape(0), 1);
        for (py::ssize_t i = 0; i < a.shape(0); ++i) m(i, 0) = a.at(i);
        return Series(std::move(m));
    }
    if (a.ndim() != 2) throw ShapeError("expected a 1-d or 2-d array");
    RowMatrix m(a.shape(0), a.shape(1));
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t k = 0; k < a.shape(1); ++k) m(i, k) = a.at(i, k);
    return Series(std::move(m));
}

DetectorConfig make_detector(const std::string& kind, std::size_t min_seg, std::size_t wbs_intervals,
                             std::vector<double> penalties, std::uint64_t seed) {
    DetectorConfig d;
    d.kind = parse_detector_kind(kind);
    d.min_segment_length = min_seg;
    d.wbs_intervals = wbs_intervals;
    d.pelt_penalty_grid = std::move(penalties);
    d.seed = seed;
    d.validate();
    return d;
}

py::dict report_dict(const UqReport& r) {
    py::list trace;
    for (const auto& t : r.trace) {
        py::dict e;
        e["r"] = t.r;
        e["statistic"] = t.statistic;
        e["critical_value"] = t.critical_value;
        e["rejected"] = t.rejected;
        e["degenerate_s"] = t.degenerate_s;
        trace.append(e);
    }
    py::dict d;
    d["k_cv"] = r.k_cv;
    d["k_min"] = r.k_min;
    d["u"] = r.u;
    d["alpha"] = r.alpha;
    d["mode"] = to_string(r.mode);
    d["saturated"] = r.saturated;
    d["p_n"] = r.p_n;
    d["trace"] = trace;
    d["cv_errors"] = r.curve.errors;
    d["change_points_at_k_cv"] = r.change_points_at_k_cv;
    return d;
}

}  // namespace

PYBIND11_MODULE(_segwise, m) {
    m.doc() = "Change-point detection with cross-validated model size and overestimation control.";

    py::register_exception<CapacityError>(m, "CapacityError");
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    m.def("segment_mean", [](const Array& x, std::size_t a, std::size_t b) {
        const Vector v = segment_mean(to_series(x), a, b);
        return std::vector<double>(v.data(), v.data() + v.size());
    }, py::arg("x"), py::arg("a"), py::arg("b"));
    m.def("sse_cost", [](const Array& x, std::size_t a, std::size_t b) { return sse_cost(to_series(x), a, b); },
          py::arg("x"), py::arg("a"), py::arg("b"));
    m.def("cusum", [](const Array& x, std::size_t l, std::size_t u, std::size_t t) {
        return cusum(to_series(x), l, u, t);
    }, py::arg("x"), py::arg("l"), py::arg("u"), py::arg("t"));
    m.def("segmentation_cost", [](const Array& x, std::vector<std::size_t> cps) {
        const Series s = to_series(x);
        return segmentation_cost(s, Segmentation(std::move(cps), s.n()));
    }, py::arg("x"), py::arg("change_points"));

    m.def("dp_exact", [](const Array& x, std::size_t r, std::size_t min_seg) {
        return dp_exact(to_series(x), r, min_seg).change_points();
    }, py::arg("x"), py::arg("r"), py::arg("min_seg") = 2);
    m.def("pelt", [](const Array& x, double penalty, std::size_t min_seg) {
        return pelt(to_series(x), penalty, min_seg).change_points();
    }, py::arg("x"), py::arg("penalty"), py::arg("min_seg") = 2);
    m.def("wbs_rank", [](const Array& x, std::size_t intervals, std::size_t min_seg, std::uint64_t seed) {
        const auto cfg = make_detector("wbs", min_seg, intervals, {}, seed);
        Rng rng = make_stream(seed, StreamTag::wbs_intervals, {0});
        std::vector<std::pair<std::size_t, double>> out;
        for (const auto& e : wbs_rank(to_series(x), cfg, rng).entries) out.emplace_back(e.change_point, e.score);
        return out;
    }, py::arg("x"), py::arg("intervals") = 500, py::arg("min_seg") = 2, py::arg("seed") = 0);
    m.def("detect", [](const Array& x, std::size_t r, const std::string& detector, std::size_t min_seg,
                       std::size_t intervals, std::uint64_t seed) {
        const auto cfg = make_detector(detector, min_seg, intervals, {}, seed);
        Rng rng = make_stream(seed, StreamTag::wbs_intervals, {0});
        return detect(to_series(x), r, cfg, rng).change_points();
    }, py::arg("x"), py::arg("r"), py::arg("detector") = "pelt", py::arg("min_seg") = 2,
       py::arg("intervals") = 500, py::arg("seed") = 0);

    m.def("critical_value", [](std::vector<double> draws, double alpha) { return critical_value(draws, alpha); },
          py::arg("draws"), py::arg("alpha"));

    m.def("cv_curve", [](const Array& x, std::size_t p_n, const std::string& mode, std::size_t folds,
                         const std::string& detector, std::uint64_t seed) {
        const Series s = to_series(x);
        const auto plan = make_split(s.n(), parse_split_mode(mode), folds);
        return cv_curve(s, plan, p_n, make_detector(detector, 2, 500, {}, seed)).errors;
    }, py::arg("x"), py::arg("p_n"), py::arg("mode") = "split", py::arg("folds") = 3,
       py::arg("detector") = "pelt", py::arg("seed") = 0);

    m.def("uq", [](const Array& x, double alpha, std::size_t B, const std::string& mode, std::size_t folds,
                   const std::string& detector, std::optional<std::size_t> p_n, std::size_t min_seg,
                   std::size_t intervals, std::uint64_t seed, std::size_t workers) {
        UqConfig cfg;
        cfg.alpha = alpha;
        cfg.B = B;
        cfg.mode = parse_split_mode(mode);
        cfg.folds = folds;
        cfg.p_n = p_n;
        cfg.detector = make_detector(detector, min_seg, intervals, {}, seed);
        cfg.seed = seed;
        cfg.workers = workers;
        const Series s = to_series(x);
        UqReport report;
        {
            py::gil_scoped_release release;
            report = sequential_k_min(s, cfg);
        }
        return report_dict(report);
    }, py::arg("x"), py::arg("alpha") = 0.1, py::arg("B") = 500, py::arg("mode") = "split", py::arg("folds") = 3,
       py::arg("detector") = "pelt", py::arg("p_n") = py::none(), py::arg("min_seg") = 2,
       py::arg("wbs_intervals") = 500, py::arg("seed") = 0, py::arg("workers") = 1);

    m.def("simulate", [](const std::string& scenario, std::size_t workers) {
        const SimConfig cfg = parse_scenario(scenario);
        cli::SimulateOutput out;
        {
            py::gil_scoped_release release;
            out = cli::cmd_simulate(cfg, workers);
        }
        return py::make_tuple(out.summary_json, out.records_csv);
    }, py::arg("scenario"), py::arg("workers") = 1,
       "Run a scenario given as key = value text; returns (summary_json, records_csv).");

    m.def("cost_path", [](const Array& x, const std::string& detector, std::optional<std::size_t> p_n) {
        std::vector<std::pair<std::size_t, double>> out;
        for (const auto& row : cli::cost_path(to_series(x), make_detector(detector, 2, 500, {}, 0), p_n))
            out.emplace_back(row.r, row.cost);
        return out;
    }, py::arg("x"), py::arg("detector") = "dp", py::arg("p_n") = py::none());
}
