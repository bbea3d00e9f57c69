#pragma once

#include "segwise/cross_validation.hpp"
#include "segwise/detectors.hpp"
#include "segwise/random.hpp"
#include "segwise/series.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace segwise {

enum class ErrorLaw { gauss, t5scaled };

std::string to_string(ErrorLaw law);
ErrorLaw parse_error_law(const std::string& name);

struct SimConfig {
    std::size_t n = 600;
    std::size_t k_n = 5;
    std::size_t d = 1;
    double snr = 1.0;
    ErrorLaw error_law = ErrorLaw::gauss;
    std::array<double, 2> theta{-1.0, 1.0};
    std::optional<std::size_t> jitter_a;  // default floor(n^{1/4})
    std::size_t replications = 200;
    std::size_t B = 500;
    double alpha = 0.1;
    DetectorConfig detector;
    SplitMode mode = SplitMode::odd_even;
    std::size_t folds = 3;
    std::optional<std::size_t> p_n;
    std::uint64_t master_seed = 0;

    std::size_t jitter() const;
    void validate() const;
};

struct ReplicationRecord {
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    std::size_t k_n = 0;
    std::size_t k_cv = 0;
    std::size_t k_min = 0;
    long u = 0;
    bool saturated = false;
    bool rejected_at_zero = false;
    // Critical value of the test at r = K_CV, when the loop reached it.
    std::optional<double> critical_at_k_cv;
    bool completed = false;
    std::string error;
};

struct SimMetrics {
    std::size_t requested = 0;
    std::size_t completed = 0;
    double p_plus = 0.0;
    double mean_u = 0.0;
    double sd_u = 0.0;
    double mean_over = 0.0;  // mean of K_CV - K_n
    double sd_over = 0.0;
    std::size_t saturation_count = 0;
    std::vector<ReplicationRecord> records;
};

/// Jittered grid of true change-points with alternating theta means.
TrueModel gen_model(const SimConfig& config, Rng& rng);

/// sd(mu_1..mu_n) / snr, or 1 when the signal is constant.
double noise_scale(const Series& signal, double snr);

/// signal + sigma * eps with eps drawn from the error law (unit variance).
Series gen_series(const Series& signal, ErrorLaw law, double sigma, Rng& rng);
Series gen_series(const TrueModel& model, const SimConfig& config, Rng& rng);

/// Unit-variance error draw: N(0,1) or sqrt(0.6) * t(5).
double draw_error(ErrorLaw law, Rng& rng);

/// One complete replication (data generation + UQ pipeline).
ReplicationRecord run_replication(const SimConfig& config, std::size_t replication);

SimMetrics run_replications(const SimConfig& config, std::size_t workers = 1);

/// Fraction of completed records with K_CV - K_n > U.
double p_plus(std::span<const ReplicationRecord> records);

SimMetrics aggregate(std::vector<ReplicationRecord> records);

}  // namespace segwise
