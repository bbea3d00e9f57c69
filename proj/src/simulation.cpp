#include "segwise/simulation.hpp"

#include "segwise/errors.hpp"
#include "segwise/inference.hpp"
#include "segwise/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace segwise {

std::string to_string(ErrorLaw law) { return law == ErrorLaw::gauss ? "gauss" : "t5scaled"; }

ErrorLaw parse_error_law(const std::string& name) {
    if (name == "gauss" || name == "gaussian" || name == "normal") return ErrorLaw::gauss;
    if (name == "t5scaled" || name == "t5") return ErrorLaw::t5scaled;
    throw ConfigError("unknown error law '" + name + "'");
}

std::size_t SimConfig::jitter() const {
    return jitter_a ? *jitter_a : static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.25)));
}

void SimConfig::validate() const {
    if (!(snr > 0.0) || !std::isfinite(snr)) throw ConfigError("snr must be positive");
    if (d < 1) throw ConfigError("d must be >= 1");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (B < 1) throw ConfigError("B must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (theta[0] == theta[1]) throw ConfigError("theta entries must differ");
    if (n < 4) throw ConfigError("n must be >= 4");
    const std::size_t spacing = n / (k_n + 1);
    if (spacing < 2 * jitter() + 2)
        throw ConfigError("segments of length " + std::to_string(spacing) + " cannot absorb jitter " +
                          std::to_string(jitter()));
    detector.validate();
}

TrueModel gen_model(const SimConfig& config, Rng& rng) {
    config.validate();
    const std::size_t n = config.n;
    const std::size_t spacing = n / (config.k_n + 1);
    const double a = static_cast<double>(config.jitter());
    std::uniform_real_distribution<double> jitter(-a, a);

    std::vector<std::size_t> cps;
    constexpr std::size_t kMinLength = 2;
    for (std::size_t j = 1; j <= config.k_n; ++j) {
        const double raw = static_cast<double>(j * spacing) + (a > 0.0 ? jitter(rng) : 0.0);
        auto tau = static_cast<long>(std::lround(raw));
        const long lo = static_cast<long>(cps.empty() ? 0 : cps.back()) + static_cast<long>(kMinLength);
        const long hi = static_cast<long>(n) - static_cast<long>((config.k_n - j + 1) * kMinLength);
        tau = std::clamp(tau, lo, hi);
        cps.push_back(static_cast<std::size_t>(tau));
    }

    std::uniform_int_distribution<int> start(1, 2);
    const int j0 = start(rng);
    RowMatrix means(static_cast<Eigen::Index>(config.k_n + 1), static_cast<Eigen::Index>(config.d));
    for (std::size_t j = 0; j <= config.k_n; ++j)
        means.row(static_cast<Eigen::Index>(j)).setConstant(config.theta[static_cast<std::size_t>(j0 + j) % 2]);
    return TrueModel(Segmentation(std::move(cps), n), std::move(means));
}

double noise_scale(const Series& signal, double snr) {
    const auto& v = signal.values();
    const double mean = v.mean();
    const double count = static_cast<double>(v.size());
    const double sd = std::sqrt((v.array() - mean).square().sum() / (count - 1.0));
    return sd > 0.0 ? sd / snr : 1.0;
}

double draw_error(ErrorLaw law, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    if (law == ErrorLaw::gauss) return normal(rng);
    std::chi_squared_distribution<double> chi2(5.0);
    const double z = normal(rng);
    return std::sqrt(0.6) * z / std::sqrt(chi2(rng) / 5.0);
}

Series gen_series(const Series& signal, ErrorLaw law, double sigma, Rng& rng) {
    RowMatrix x = signal.values();
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index k = 0; k < x.cols(); ++k) x(i, k) += sigma * draw_error(law, rng);
    return Series(std::move(x));
}

Series gen_series(const TrueModel& model, const SimConfig& config, Rng& rng) {
    const Series signal = model.signal();
    return gen_series(signal, config.error_law, noise_scale(signal, config.snr), rng);
}

ReplicationRecord run_replication(const SimConfig& config, std::size_t replication) {
    ReplicationRecord rec;
    rec.replication = replication;
    rec.seed = derive_seed(config.master_seed, StreamTag::replication, {replication});
    rec.k_n = config.k_n;
    try {
        Rng model_rng = make_stream(rec.seed, StreamTag::model);
        Rng noise_rng = make_stream(rec.seed, StreamTag::noise);
        const TrueModel truth = gen_model(config, model_rng);
        const Series series = gen_series(truth, config, noise_rng);

        UqConfig uq;
        uq.alpha = config.alpha;
        uq.B = config.B;
        uq.mode = config.mode;
        uq.folds = config.folds;
        uq.p_n = config.p_n;
        uq.detector = config.detector;
        uq.detector.seed = derive_seed(rec.seed, StreamTag::wbs_intervals);
        uq.seed = derive_seed(rec.seed, StreamTag::uq);
        const UqReport report = sequential_k_min(series, uq);

        rec.k_cv = report.k_cv;
        rec.k_min = report.k_min;
        rec.u = report.u;
        rec.saturated = report.saturated;
        rec.rejected_at_zero = !report.trace.empty() && report.trace.front().rejected;
        if (report.k_cv < report.trace.size()) rec.critical_at_k_cv = report.trace[report.k_cv].critical_value;
        rec.completed = true;
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

double p_plus(std::span<const ReplicationRecord> records) {
    std::size_t done = 0, over = 0;
    for (const auto& r : records) {
        if (!r.completed) continue;
        ++done;
        if (static_cast<long>(r.k_cv) - static_cast<long>(r.k_n) > r.u) ++over;
    }
    return done == 0 ? 0.0 : static_cast<double>(over) / static_cast<double>(done);
}

SimMetrics aggregate(std::vector<ReplicationRecord> records) {
    SimMetrics m;
    m.requested = records.size();
    std::vector<double> u, over;
    for (const auto& r : records) {
        if (!r.completed) continue;
        ++m.completed;
        u.push_back(static_cast<double>(r.u));
        over.push_back(static_cast<double>(r.k_cv) - static_cast<double>(r.k_n));
        if (r.saturated) ++m.saturation_count;
    }
    auto mean_sd = [](const std::vector<double>& v, double& mean, double& sd) {
        mean = sd = 0.0;
        if (v.empty()) return;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (v.size() < 2) return;
        for (double x : v) sd += (x - mean) * (x - mean);
        sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
    };
    mean_sd(u, m.mean_u, m.sd_u);
    mean_sd(over, m.mean_over, m.sd_over);
    m.p_plus = p_plus(records);
    m.records = std::move(records);
    return m;
}

SimMetrics run_replications(const SimConfig& config, std::size_t workers) {
    config.validate();
    std::vector<ReplicationRecord> records(config.replications);
    parallel_for(config.replications, workers,
                 [&](std::size_t rho) { records[rho] = run_replication(config, rho); });
    return aggregate(std::move(records));
}

}  // namespace segwise
