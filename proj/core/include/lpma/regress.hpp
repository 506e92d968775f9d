#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lpma/dgp.hpp"

namespace lpma {

/// Ordered MA coefficients B_0..B_s of an impulse response.
using ImpulseResponse = std::vector<double>;

/// Relative singular-value cutoff below which a design is treated as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Lagged design matrix: row t maps target y_{t+h} to regressors (y_{t-1}, ..., y_{t-p}),
/// with an optional leading intercept column; rows span t = p .. T-h-1.
struct LagMatrix {
    Eigen::MatrixXd x;
    Eigen::VectorXd target;
    int p = 0;
    int h = 0;
    bool intercept = false;
};

/// Ordinary least squares fit.
struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    double residual_variance = 0.0;  // RSS / rows
    int dof = 0;                     // rows - columns
};

/// AR(p) fit via OLS, per the h = 0 local projection.
struct VarFit {
    int p = 0;
    std::vector<double> a_hats;
    double intercept = 0.0;
    Eigen::VectorXd residuals;
    std::vector<double> centered_residuals;
    double residual_variance = 0.0;
};

/// @brief Build the lag design matrix for horizon h.
/// @throws Error{InsufficientSample} when T <= p + h + columns + 2.
[[nodiscard]] LagMatrix build_lag_matrix(const TimeSeries& y, int p, int h,
                                         bool intercept = false);

/// @brief Least squares via SVD with an explicit rank check.
/// @throws Error{SingularDesign} carrying the condition number when the smallest
/// singular value is at most rank_tol times the largest.
[[nodiscard]] OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& target,
                         double rank_tol = kRankTolerance);

/// @brief Default SBIC lag-candidate cap: floor(12 * (T/100)^(1/4)).
[[nodiscard]] int default_sbic_p_max(int T);

/// @brief Select the AR lag order by SBIC over p = 1..p_max.
///
/// All candidate fits share the common effective sample t = p_max..T-1 so the
/// criteria are comparable; the variance is the ML estimate (RSS / rows); ties
/// break toward the smaller order.
[[nodiscard]] int select_lag_sbic(const TimeSeries& y, int p_max);

/// @brief Fit an AR(p) by OLS; residuals are also returned centered.
[[nodiscard]] VarFit fit_var(const TimeSeries& y, int p, bool intercept = false);

/// @brief Map AR coefficients to MA coefficients: B_0 = 1, B_h = sum_i A_i B_{h-i}.
[[nodiscard]] ImpulseResponse durbin_ma_from_ar(const std::vector<double>& a, int s);

}  // namespace lpma
