#include "lpma/localproj.hpp"

#include <algorithm>
#include <cmath>

#include "lpma/errors.hpp"

namespace lpma {
namespace detail {

void fit_lp_coefficients(std::span<const double> y, int p, int H, LpWorkspace& ws,
                         std::vector<double>& b_hats) {
    if (p < 1) throw Error(ErrorCode::InvalidInput, "lag order must be positive");
    if (H < 1) throw Error(ErrorCode::InvalidInput, "horizon cap must be positive");
    const int T = static_cast<int>(y.size());
    if (T <= 2 * p + H + 2) {
        throw Error(ErrorCode::InsufficientSample,
                    "need T > 2p + H + 2 for the local projections",
                    static_cast<double>(T));
    }

    // Shared design: row i is (y_{t-1}..y_{t-p}) for t = p + i. The horizon-h
    // regression uses the leading T - p - h rows, so horizons are fit from the
    // shortest sample upward, promoting the Gram matrix by one row at a time.
    const int n_max = T - p;
    ws.x.resize(n_max, p);
    for (int i = 0; i < n_max; ++i) {
        const int t = p + i;
        for (int j = 0; j < p; ++j) ws.x(i, j) = y[static_cast<std::size_t>(t - 1 - j)];
    }
    if (!ws.x.allFinite()) {
        throw Error(ErrorCode::SingularDesign, "non-finite regressors in local projection");
    }

    b_hats.assign(static_cast<std::size_t>(H) + 1, 0.0);
    b_hats[0] = 1.0;

    const int n_first = n_max - (H - 1);
    ws.gram.noalias() = ws.x.topRows(n_first).transpose() * ws.x.topRows(n_first);
    for (int h = H - 1; h >= 0; --h) {
        const int n_h = n_max - h;
        if (h != H - 1) ws.gram.selfadjointView<Eigen::Lower>().rankUpdate(ws.x.row(n_h - 1).transpose());
        ws.xty.resize(p);
        ws.xty.setZero();
        for (int i = 0; i < n_h; ++i) {
            const double yv = y[static_cast<std::size_t>(p + h + i)];
            ws.xty.noalias() += yv * ws.x.row(i).transpose();
        }
        ws.ldlt.compute(ws.gram.selfadjointView<Eigen::Lower>());
        ws.beta = ws.ldlt.solve(ws.xty);
        if (!ws.beta.allFinite()) {
            throw Error(ErrorCode::SingularDesign,
                        "rank-deficient local projection at some horizon",
                        static_cast<double>(h));
        }
        b_hats[static_cast<std::size_t>(h) + 1] = ws.beta(0);
    }
}

}  // namespace detail

LpIrfEstimate fit_lp(const TimeSeries& y, int p, int H) {
    LpIrfEstimate est;
    est.p = p;
    est.H = H;
    est.nuisance.assign(static_cast<std::size_t>(H), {});

    // Same scheme as the fast path, but retaining nuisance coefficients and the
    // h = 0 residuals, and cross-checking each design through the SVD-based fit.
    if (p < 1) throw Error(ErrorCode::InvalidInput, "lag order must be positive");
    if (H < 1) throw Error(ErrorCode::InvalidInput, "horizon cap must be positive");
    const int T = static_cast<int>(y.size());
    if (T <= 2 * p + H + 2) {
        throw Error(ErrorCode::InsufficientSample,
                    "need T > 2p + H + 2 for the local projections",
                    static_cast<double>(T));
    }

    est.b_hats.assign(static_cast<std::size_t>(H) + 1, 0.0);
    est.b_hats[0] = 1.0;
    const LagMatrix base = build_lag_matrix(y, p, 0, false);
    const int n_max = static_cast<int>(base.x.rows());
    for (int h = 0; h < H; ++h) {
        const int n_h = n_max - h;
        Eigen::VectorXd target(n_h);
        for (int i = 0; i < n_h; ++i) target(i) = y[static_cast<std::size_t>(p + h + i)];
        const OlsFit hfit = ols(base.x.topRows(n_h), target);
        est.b_hats[static_cast<std::size_t>(h) + 1] = hfit.coefficients(0);
        std::vector<double>& nu = est.nuisance[static_cast<std::size_t>(h)];
        nu.resize(static_cast<std::size_t>(p - 1));
        for (int j = 1; j < p; ++j) nu[static_cast<std::size_t>(j - 1)] = hfit.coefficients(j);
        if (h == 0) {
            const double mean = hfit.residuals.mean();
            est.first_step_residuals.resize(static_cast<std::size_t>(n_h));
            for (int i = 0; i < n_h; ++i) {
                est.first_step_residuals[static_cast<std::size_t>(i)] = hfit.residuals(i) - mean;
            }
        }
    }
    return est;
}

MaExtension fit_ma_extension(const TimeSeries& y, const LpIrfEstimate& lp, int s_max) {
    const int T = static_cast<int>(y.size());
    const int p = lp.p;
    const int H = lp.H;
    if (s_max <= H) {
        throw Error(ErrorCode::InvalidInput, "extension cap must exceed the fitted horizon",
                    static_cast<double>(s_max));
    }

    // eps_t for t = p..T-1 are the centered first-step residuals.
    const auto eps_at = [&](int t) { return lp.first_step_residuals[static_cast<std::size_t>(t - p)]; };

    const int t0 = std::max(p + H, H + 1);
    const int rows = T - t0;
    if (rows < 10) {
        throw Error(ErrorCode::InsufficientSample,
                    "too few rows for the extension regression", static_cast<double>(rows));
    }

    MaExtension ext;
    ext.H = H;
    ext.aux_residuals.resize(static_cast<std::size_t>(rows));
    double sxx = 0.0;
    double sxv = 0.0;
    for (int i = 0; i < rows; ++i) {
        const int t = t0 + i;
        double fitted = 0.0;
        for (int h = 0; h <= H; ++h) fitted += lp.b_hats[static_cast<std::size_t>(h)] * eps_at(t - h);
        const double v = y[static_cast<std::size_t>(t)] - fitted;
        const double x = y[static_cast<std::size_t>(t - (H + 1))];
        ext.aux_residuals[static_cast<std::size_t>(i)] = v;
        sxx += x * x;
        sxv += x * v;
    }
    if (!(sxx > 0.0) || !std::isfinite(sxx) || !std::isfinite(sxv)) {
        throw Error(ErrorCode::DegenerateExtension,
                    "auxiliary regressor carries no usable variation", sxx);
    }
    ext.g_hat = sxv / sxx;
    for (int i = 0; i < rows; ++i) {
        const int t = t0 + i;
        ext.aux_residuals[static_cast<std::size_t>(i)] -=
            ext.g_hat * y[static_cast<std::size_t>(t - (H + 1))];
    }

    ext.coefficients.assign(static_cast<std::size_t>(s_max) + 1, 0.0);
    for (int h = 0; h <= H; ++h) ext.coefficients[static_cast<std::size_t>(h)] = lp.b_hats[static_cast<std::size_t>(h)];
    for (int j = H + 1; j <= s_max; ++j) {
        ext.coefficients[static_cast<std::size_t>(j)] =
            ext.g_hat * ext.coefficients[static_cast<std::size_t>(j - (H + 1))];
    }
    if (!std::all_of(ext.coefficients.begin(), ext.coefficients.end(),
                     [](double c) { return std::isfinite(c); })) {
        throw Error(ErrorCode::DegenerateExtension, "extension coefficients overflow");
    }
    return ext;
}

std::pair<double, double> lp_point_and_scale(const Eigen::VectorXd& beta,
                                             const Eigen::MatrixXd& vhat,
                                             const Eigen::VectorXd& delta) {
    if (beta.size() != delta.size() || vhat.rows() != beta.size() || vhat.cols() != beta.size()) {
        throw Error(ErrorCode::InvalidInput, "dimension mismatch in the linear functional");
    }
    const double point = delta.dot(beta);
    const double quad = delta.dot(vhat * delta);
    const double tol = 1e-12 * (1.0 + std::abs(vhat.diagonal().sum()));
    if (quad < -tol || !std::isfinite(quad)) {
        throw Error(ErrorCode::NumericalCovariance,
                    "covariance quadratic form is negative", quad);
    }
    return {point, std::sqrt(std::max(quad, 0.0))};
}

}  // namespace lpma
