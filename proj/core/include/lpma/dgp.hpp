#pragma once

#include <vector>

#include "lpma/rng.hpp"

namespace lpma {

using TimeSeries = std::vector<double>;

/// AR(1) data-generating process y_t = phi * y_{t-1} + eps_t.
struct Ar1Spec {
    double phi = 0.0;
    double innovation_sd = 1.0;
};

/// AR(p) data-generating process y_t = sum_i coeffs[i-1] * y_{t-i} + eps_t.
struct ArpSpec {
    std::vector<double> coeffs;
    double innovation_sd = 1.0;
};

/// One Gaussian basis component a * exp(-((h - b) / c)^2).
struct GbfComponent {
    double a = 0.0;
    double b = 0.0;
    double c = 1.0;
};

/// MA(q) process with Gaussian-basis coefficients theta_h.
struct GbfSpec {
    int q = 1;
    std::vector<GbfComponent> components;
    double innovation_sd = 1.0;
};

/// True impulse response r_0..r_H to a one-standard-deviation shock; r_0 = 1.
struct TrueIrf {
    std::vector<double> values;
};

inline constexpr int kDefaultBurnIn = 500;

/// @brief Simulate T observations of an AR(1) process.
///
/// For |phi| < 1 the recursion warms up for burn_in steps from a zero start; the
/// unit-root case starts at y_0 = 0 with no burn-in (there is no stationary law).
/// @throws Error{InvalidSpec} for non-finite phi, |phi| > 1, or invalid sd/length.
[[nodiscard]] TimeSeries simulate_ar1(const Ar1Spec& spec, int T, RngStream& rng,
                                      int burn_in = kDefaultBurnIn);

/// @brief Simulate T observations of a stationary AR(p) process.
///
/// burn_in < 0 selects the default max(500, 50 * p).
/// @throws Error{InvalidSpec} if the companion matrix is explosive.
[[nodiscard]] TimeSeries simulate_arp(const ArpSpec& spec, int T, RngStream& rng,
                                      int burn_in = -1);

/// @brief Simulate T observations of the MA(q) Gaussian-basis process.
///
/// Presample innovations are drawn so the first observation already follows the
/// stationary law.
[[nodiscard]] TimeSeries simulate_ma_gbf(const GbfSpec& spec, int T, RngStream& rng);

/// @brief Run the AR recursion over explicit innovations from an explicit presample.
///
/// presample holds (y_{-1}, ..., y_{-p}); the result has one value per innovation.
[[nodiscard]] TimeSeries filter_ar(const std::vector<double>& coeffs,
                                   const std::vector<double>& presample,
                                   const std::vector<double>& innovations);

/// @brief MA coefficients theta_0 = 1, theta_1..theta_q from the Gaussian-basis formula.
[[nodiscard]] std::vector<double> gbf_coefficients(const GbfSpec& spec);

/// @brief Spectral radius of the AR companion matrix (stability check).
[[nodiscard]] double companion_spectral_radius(const std::vector<double>& coeffs);

/// @brief Rejection-sample a stable AR(p) coefficient set with sum(phi) in [low, high].
///
/// Coefficients are drawn i.i.d. uniform on (-1, 1), rescaled so their sum hits a
/// uniform target within the band, and redrawn until the companion matrix is stable.
/// @throws Error{InfeasibleBand} after max_attempts rejections.
[[nodiscard]] ArpSpec draw_arp_coefficients(int order, double low, double high,
                                            RngStream& rng, int max_attempts = 100000);

/// @brief True IRF of an AR(1): r_h = phi^h.
[[nodiscard]] TrueIrf true_irf(const Ar1Spec& spec, int H);

/// @brief True IRF of an AR(p) via the MA recursion with the true coefficients.
[[nodiscard]] TrueIrf true_irf(const ArpSpec& spec, int H);

/// @brief True IRF of the MA(q): (1, theta_1..theta_q, 0, ...); exactly zero past q.
[[nodiscard]] TrueIrf true_irf(const GbfSpec& spec, int H);

}  // namespace lpma
