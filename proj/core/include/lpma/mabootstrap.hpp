#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lpma/dgp.hpp"
#include "lpma/resample.hpp"
#include "lpma/rng.hpp"

namespace lpma {

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] double width() const { return hi - lo; }
    [[nodiscard]] bool covers(double v) const { return lo <= v && v <= hi; }
};

/// Bootstrap pipeline configuration shared by the estimators.
struct BootPipelineConfig {
    int B = 999;
    double alpha = 0.10;
    ResampleScheme scheme{};
    int method = 1;      ///< 1 truncates the MA at H, 2 appends the multiplicative extension
    int s_max = -1;      ///< method-2 extension cap; -1 resolves to T - H
    int s_var = -1;      ///< VAR-based MA truncation; -1 resolves to T
    bool fallback_to_method1 = true;
    double max_failure_fraction = 0.10;
    int n_threads = 1;
};

/// Per-horizon bootstrap summary.
struct HorizonSummary {
    int horizon = 0;
    double point = 0.0;
    double lo_t = 0.0;       ///< percentile-t lower bound
    double hi_t = 0.0;
    double lo_efron = 0.0;   ///< percentile interval lower bound
    double hi_efron = 0.0;
    double boot_mean = 0.0;
    double vhat = 0.0;       ///< cross-replicate sample variance
    double q_lo = 0.0;       ///< studentized quantile at alpha/2
    double q_hi = 0.0;       ///< studentized quantile at 1 - alpha/2
    std::vector<double> t_stats;  ///< studentized statistics of surviving replicates
};

/// Result of one bootstrap run; horizons[i] summarizes horizon i + 1.
struct BootstrapResult {
    std::string estimator;
    int p = 0;
    int H = 0;
    double alpha = 0.0;
    std::vector<HorizonSummary> horizons;
    int n_failures = 0;
    int n_explosive = 0;          ///< re-fits with companion spectral radius above one
    bool method2_fallback = false;
};

/// Test seam: supplies the innovation sequence for one bootstrap replicate.
using InnovationSource =
    std::function<std::vector<double>(int length, int replicate, RngStream& rng)>;

/// @brief Order statistic quantile: the ceil(kappa * n)-th smallest value (1-indexed).
/// @param sorted_values values in non-decreasing order; must be non-empty.
[[nodiscard]] double empirical_quantile(std::span<const double> sorted_values, double kappa);

/// @brief Percentile-t interval [point - scale q_{1-a/2}, point - scale q_{a/2}].
[[nodiscard]] Interval percentile_t_interval(double point, double scale,
                                             std::span<const double> sorted_stats,
                                             double alpha);

/// @brief Percentile interval [q_{a/2}, q_{1-a/2}] of the replicate estimates.
[[nodiscard]] Interval efron_interval(std::span<const double> sorted_estimates, double alpha);

/// @brief Moving-average path: y_t = sum_{j=0..s} coeffs[j] innovations[t + s - j].
/// @throws Error{InvalidInput} unless innovations has at least T + s entries.
[[nodiscard]] TimeSeries generate_ma_path(std::span<const double> coeffs,
                                          std::span<const double> innovations, int T);

/// @brief Local-projection MA bootstrap.
///
/// Fits LP coefficients up to H, simulates B MA paths from resampled first-step
/// innovations (method 2 first extends the coefficients past H through the
/// multiplicative tail estimate), re-fits LP on each path with the same p, and
/// studentizes with the cross-replicate standard deviation.
/// @throws Error{PipelineFailure} when more than max_failure_fraction of the
/// replicates fail.
[[nodiscard]] BootstrapResult run_lp_bootstrap(const TimeSeries& y, int p, int H,
                                               const BootPipelineConfig& cfg,
                                               std::uint64_t root_seed,
                                               const InnovationSource& source = {});

/// @brief Benchmark bootstrap that inverts a fitted AR(p) into a long MA before
/// simulating, re-fitting the AR and re-inverting on each replicate.
[[nodiscard]] BootstrapResult run_var_ma_bootstrap(const TimeSeries& y, int p, int H,
                                                   const BootPipelineConfig& cfg,
                                                   std::uint64_t root_seed,
                                                   const InnovationSource& source = {});

/// @brief Recursive-design AR residual bootstrap benchmark.
///
/// Fits an AR(p) with intercept, rebuilds paths recursively from resampled
/// centered residuals seeded with the first p observations, re-fits, and maps
/// each re-fit to its impulse response. Explosive re-fits are kept and counted.
[[nodiscard]] BootstrapResult run_ar_benchmark(const TimeSeries& y, int p, int H,
                                               const BootPipelineConfig& cfg,
                                               std::uint64_t root_seed,
                                               const InnovationSource& source = {});

/// @brief Serialize a result to JSON, including the trivial horizon-0 record.
[[nodiscard]] std::string to_json(const BootstrapResult& result, int indent = 2);

}  // namespace lpma
