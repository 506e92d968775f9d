#include "lpma/dgp.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstddef>

#include "lpma/errors.hpp"

namespace lpma {

namespace {

constexpr double kStabilityTolerance = 1e-8;

void check_common(double innovation_sd, int T) {
    if (!(innovation_sd > 0.0) || !std::isfinite(innovation_sd)) {
        throw Error(ErrorCode::InvalidSpec, "innovation_sd must be positive and finite");
    }
    if (T < 1) {
        throw Error(ErrorCode::InvalidSpec, "series length must be positive");
    }
}

std::vector<double> draw_normals(int count, double sd, RngStream& rng) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (double& value : out) {
        value = sd * rng.normal();
    }
    return out;
}

}  // namespace

TimeSeries filter_ar(const std::vector<double>& coeffs,
                     const std::vector<double>& presample,
                     const std::vector<double>& innovations) {
    const std::size_t p = coeffs.size();
    if (presample.size() != p) {
        throw Error(ErrorCode::InvalidInput, "presample length must equal AR order");
    }
    TimeSeries out(innovations.size());
    for (std::size_t t = 0; t < out.size(); ++t) {
        double acc = innovations[t];
        for (std::size_t i = 0; i < p; ++i) {
            const double lagged = (t > i) ? out[t - 1 - i] : presample[i - t];
            acc += coeffs[i] * lagged;
        }
        out[t] = acc;
    }
    return out;
}

TimeSeries simulate_ar1(const Ar1Spec& spec, int T, RngStream& rng, int burn_in) {
    check_common(spec.innovation_sd, T);
    if (!std::isfinite(spec.phi)) {
        throw Error(ErrorCode::InvalidSpec, "phi must be finite");
    }
    if (std::abs(spec.phi) > 1.0) {
        throw Error(ErrorCode::InvalidSpec, "explosive AR(1): |phi| > 1");
    }
    if (burn_in < 0) {
        throw Error(ErrorCode::InvalidSpec, "burn_in must be nonnegative");
    }
    const bool unit_root = spec.phi == 1.0 || spec.phi == -1.0;
    const int warmup = unit_root ? 0 : burn_in;
    const auto innovations = draw_normals(T + warmup, spec.innovation_sd, rng);
    const auto path = filter_ar({spec.phi}, {0.0}, innovations);
    return TimeSeries(path.begin() + warmup, path.end());
}

TimeSeries simulate_arp(const ArpSpec& spec, int T, RngStream& rng, int burn_in) {
    check_common(spec.innovation_sd, T);
    const int p = static_cast<int>(spec.coeffs.size());
    if (p < 1) {
        throw Error(ErrorCode::InvalidSpec, "AR(p) requires at least one coefficient");
    }
    const double radius = companion_spectral_radius(spec.coeffs);
    if (radius > 1.0 + kStabilityTolerance) {
        throw Error(ErrorCode::InvalidSpec, "explosive AR(p): companion spectral radius > 1",
                    radius);
    }
    const int warmup = burn_in >= 0 ? burn_in : std::max(kDefaultBurnIn, 50 * p);
    const auto innovations = draw_normals(T + warmup, spec.innovation_sd, rng);
    const auto path = filter_ar(spec.coeffs, std::vector<double>(spec.coeffs.size(), 0.0),
                                innovations);
    return TimeSeries(path.begin() + warmup, path.end());
}

std::vector<double> gbf_coefficients(const GbfSpec& spec) {
    if (spec.q < 1) {
        throw Error(ErrorCode::InvalidSpec, "GBF order q must be at least 1");
    }
    for (const GbfComponent& comp : spec.components) {
        if (!(comp.c > 0.0)) {
            throw Error(ErrorCode::InvalidSpec, "GBF component width c must be positive");
        }
    }
    std::vector<double> theta(static_cast<std::size_t>(spec.q) + 1, 0.0);
    theta[0] = 1.0;
    for (int h = 1; h <= spec.q; ++h) {
        double acc = 0.0;
        for (const GbfComponent& comp : spec.components) {
            const double z = (h - comp.b) / comp.c;
            acc += comp.a * std::exp(-z * z);
        }
        theta[static_cast<std::size_t>(h)] = acc;
    }
    return theta;
}

TimeSeries simulate_ma_gbf(const GbfSpec& spec, int T, RngStream& rng) {
    check_common(spec.innovation_sd, T);
    const auto theta = gbf_coefficients(spec);
    const auto innovations = draw_normals(T + spec.q, spec.innovation_sd, rng);
    TimeSeries out(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        double acc = 0.0;
        for (int h = 0; h <= spec.q; ++h) {
            acc += theta[static_cast<std::size_t>(h)] *
                   innovations[static_cast<std::size_t>(t + spec.q - h)];
        }
        out[static_cast<std::size_t>(t)] = acc;
    }
    return out;
}

double companion_spectral_radius(const std::vector<double>& coeffs) {
    const int p = static_cast<int>(coeffs.size());
    if (p == 0) {
        return 0.0;
    }
    if (p == 1) {
        return std::abs(coeffs[0]);
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) {
        companion(0, j) = coeffs[static_cast<std::size_t>(j)];
    }
    companion.block(1, 0, p - 1, p - 1).setIdentity();
    const Eigen::VectorXcd eigenvalues = companion.eigenvalues();
    double radius = 0.0;
    for (int i = 0; i < eigenvalues.size(); ++i) {
        radius = std::max(radius, std::abs(eigenvalues(i)));
    }
    return radius;
}

ArpSpec draw_arp_coefficients(int order, double low, double high, RngStream& rng,
                              int max_attempts) {
    if (order < 1) {
        throw Error(ErrorCode::InvalidSpec, "order must be at least 1");
    }
    if (!(0.0 <= low && low < high && high < 1.0)) {
        throw Error(ErrorCode::InvalidSpec, "persistence band must satisfy 0 <= low < high < 1");
    }
    constexpr double kMinRawSum = 1e-3;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<double> raw(static_cast<std::size_t>(order));
        double sum = 0.0;
        for (double& value : raw) {
            value = 2.0 * rng.uniform01() - 1.0;
            sum += value;
        }
        if (std::abs(sum) < kMinRawSum) {
            continue;
        }
        const double target = low + (high - low) * rng.uniform01();
        const double scale = target / sum;
        for (double& value : raw) {
            value *= scale;
        }
        if (companion_spectral_radius(raw) < 1.0 - 1e-10) {
            return ArpSpec{std::move(raw), 1.0};
        }
    }
    throw Error(ErrorCode::InfeasibleBand,
                "could not draw a stable AR coefficient set within the persistence band");
}

TrueIrf true_irf(const Ar1Spec& spec, int H) {
    if (H < 0) {
        throw Error(ErrorCode::InvalidInput, "H must be nonnegative");
    }
    TrueIrf irf;
    irf.values.resize(static_cast<std::size_t>(H) + 1);
    double power = 1.0;
    for (int h = 0; h <= H; ++h) {
        irf.values[static_cast<std::size_t>(h)] = power;
        power *= spec.phi;
    }
    return irf;
}

TrueIrf true_irf(const ArpSpec& spec, int H) {
    if (H < 0) {
        throw Error(ErrorCode::InvalidInput, "H must be nonnegative");
    }
    const int p = static_cast<int>(spec.coeffs.size());
    TrueIrf irf;
    irf.values.assign(static_cast<std::size_t>(H) + 1, 0.0);
    irf.values[0] = 1.0;
    for (int h = 1; h <= H; ++h) {
        double acc = 0.0;
        for (int i = 1; i <= std::min(h, p); ++i) {
            acc += spec.coeffs[static_cast<std::size_t>(i - 1)] *
                   irf.values[static_cast<std::size_t>(h - i)];
        }
        irf.values[static_cast<std::size_t>(h)] = acc;
    }
    return irf;
}

TrueIrf true_irf(const GbfSpec& spec, int H) {
    if (H < 0) {
        throw Error(ErrorCode::InvalidInput, "H must be nonnegative");
    }
    const auto theta = gbf_coefficients(spec);
    TrueIrf irf;
    irf.values.assign(static_cast<std::size_t>(H) + 1, 0.0);
    for (int h = 0; h <= H; ++h) {
        irf.values[static_cast<std::size_t>(h)] =
            (h <= spec.q) ? theta[static_cast<std::size_t>(h)] : 0.0;
    }
    return irf;
}

}  // namespace lpma
