#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "lpma/dgp.hpp"
#include "lpma/regress.hpp"

namespace lpma {

/// Local-projection impulse response estimate up to horizon H.
///
/// b_hats[h] estimates the MA coefficient at lag h, with b_hats[0] fixed at 1.
/// nuisance[h] holds the coefficients on the deeper lags (y_{t-2}..y_{t-p}) of the
/// horizon-h regression. first_step_residuals are the centered h = 0 residuals,
/// aligned with t = p..T-1.
struct LpIrfEstimate {
    int p = 0;
    int H = 0;
    std::vector<double> b_hats;
    std::vector<std::vector<double>> nuisance;
    std::vector<double> first_step_residuals;
};

/// Multiplicative extension of an LP estimate past horizon H.
///
/// coefficients holds B_0..B_s_max where the entries past H follow
/// B_{H+1+j} = G_hat * B_j, applying another factor of G_hat each H+1 steps.
struct MaExtension {
    double g_hat = 0.0;
    int H = 0;
    std::vector<double> coefficients;
    std::vector<double> aux_residuals;
};

namespace detail {

/// Reusable workspace for repeated LP fits of identical shape (bootstrap hot path).
struct LpWorkspace {
    Eigen::MatrixXd x;
    Eigen::MatrixXd gram;
    Eigen::VectorXd xty;
    Eigen::VectorXd beta;
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
};

/// @brief Fill b_hats (size H+1, b_hats[0] = 1) from LP regressions on y, reusing ws.
/// @throws Error{SingularDesign} when any horizon's normal equations are unsolvable.
void fit_lp_coefficients(std::span<const double> y, int p, int H, LpWorkspace& ws,
                         std::vector<double>& b_hats);

}  // namespace detail

/// @brief Estimate the impulse response by least-squares local projections.
///
/// The horizon-h regression of y_{t+h} on (y_{t-1}, ..., y_{t-p}) estimates the
/// MA coefficient at lag h+1; regressions run for h = 0..H-1. No intercept.
/// @throws Error{InsufficientSample} unless T > 2p + H + 2.
/// @throws Error{SingularDesign} on rank-deficient designs.
[[nodiscard]] LpIrfEstimate fit_lp(const TimeSeries& y, int p, int H);

/// @brief Estimate the multiplicative MA extension from LP fit residual structure.
///
/// The auxiliary residual v_t = y_t - sum_{h=0..H} b_hats[h] eps_{t-h} is regressed
/// on y_{t-(H+1)} without intercept over t = max(p+H, H+1)..T-1.
/// @throws Error{InvalidInput} when s_max <= H.
/// @throws Error{InsufficientSample} when fewer than 10 rows overlap.
/// @throws Error{DegenerateExtension} when the auxiliary regressor has no variation.
[[nodiscard]] MaExtension fit_ma_extension(const TimeSeries& y, const LpIrfEstimate& lp,
                                           int s_max);

/// @brief Point value and standard-error scale of a linear functional delta' beta.
/// @throws Error{NumericalCovariance} when the quadratic form is materially negative.
[[nodiscard]] std::pair<double, double> lp_point_and_scale(const Eigen::VectorXd& beta,
                                                           const Eigen::MatrixXd& vhat,
                                                           const Eigen::VectorXd& delta);

}  // namespace lpma
