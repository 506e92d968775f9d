#include "lpma/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lpma/errors.hpp"

namespace lpma {

LagMatrix build_lag_matrix(const TimeSeries& y, int p, int h, bool intercept) {
    if (p < 1) throw Error(ErrorCode::InvalidInput, "lag order must be positive");
    if (h < 0) throw Error(ErrorCode::InvalidInput, "horizon must be non-negative");
    const int T = static_cast<int>(y.size());
    const int cols = p + (intercept ? 1 : 0);
    const int rows = T - p - h;
    if (T <= p + h + cols + 2) {
        throw Error(ErrorCode::InsufficientSample,
                    "need T > p + h + columns + 2 to build the lag matrix",
                    static_cast<double>(T));
    }

    LagMatrix lm;
    lm.p = p;
    lm.h = h;
    lm.intercept = intercept;
    lm.x.resize(rows, cols);
    lm.target.resize(rows);
    const int off = intercept ? 1 : 0;
    for (int i = 0; i < rows; ++i) {
        const int t = p + i;
        if (intercept) lm.x(i, 0) = 1.0;
        for (int j = 0; j < p; ++j) lm.x(i, off + j) = y[static_cast<std::size_t>(t - 1 - j)];
        lm.target(i) = y[static_cast<std::size_t>(t + h)];
    }
    return lm;
}

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, double rank_tol) {
    if (x.rows() != target.size()) {
        throw Error(ErrorCode::InvalidInput, "design and target row counts differ");
    }
    if (x.rows() == 0 || x.cols() == 0) {
        throw Error(ErrorCode::InvalidInput, "empty design matrix");
    }
    if (!x.allFinite() || !target.allFinite()) {
        throw Error(ErrorCode::InvalidInput, "non-finite values in regression data");
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (x.rows() < x.cols() || smin <= rank_tol * smax) {
        const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
        throw Error(ErrorCode::SingularDesign, "rank-deficient design matrix", cond);
    }

    OlsFit fit;
    fit.coefficients = svd.solve(target);
    fit.residuals = target - x * fit.coefficients;
    fit.residual_variance = fit.residuals.squaredNorm() / static_cast<double>(x.rows());
    fit.dof = static_cast<int>(x.rows() - x.cols());
    return fit;
}

int default_sbic_p_max(int T) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
}

int select_lag_sbic(const TimeSeries& y, int p_max) {
    if (p_max < 1) throw Error(ErrorCode::InvalidInput, "p_max must be positive");
    const int T = static_cast<int>(y.size());
    const int rows = T - p_max;
    if (rows < p_max + 3 || rows < 10) {
        throw Error(ErrorCode::InsufficientSample,
                    "sample too short for the SBIC lag scan", static_cast<double>(T));
    }

    // All candidates share the sample t = p_max..T-1; the Gram matrix of the
    // widest design contains every nested design as a leading block.
    Eigen::MatrixXd x(rows, p_max);
    Eigen::VectorXd target(rows);
    for (int i = 0; i < rows; ++i) {
        const int t = p_max + i;
        for (int j = 0; j < p_max; ++j) x(i, j) = y[static_cast<std::size_t>(t - 1 - j)];
        target(i) = y[static_cast<std::size_t>(t)];
    }
    if (!x.allFinite() || !target.allFinite()) {
        throw Error(ErrorCode::InvalidInput, "non-finite values in regression data");
    }
    const Eigen::MatrixXd gram = x.transpose() * x;
    const Eigen::VectorXd xty = x.transpose() * target;
    const double yty = target.squaredNorm();
    const double n = static_cast<double>(rows);

    int best_p = 1;
    double best_crit = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p) {
        const Eigen::MatrixXd gp = gram.topLeftCorner(p, p);
        const Eigen::VectorXd cp = xty.head(p);
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(gp);
        const Eigen::VectorXd b = ldlt.solve(cp);
        if (!b.allFinite() || (gp * b - cp).norm() > 1e-6 * (cp.norm() + 1.0)) {
            throw Error(ErrorCode::SingularDesign,
                        "rank-deficient design in the SBIC lag scan",
                        static_cast<double>(p));
        }
        const double rss = std::max(yty - cp.dot(b), 1e-300);
        const double crit = std::log(rss / n) + static_cast<double>(p) * std::log(n) / n;
        if (crit < best_crit) {
            best_crit = crit;
            best_p = p;
        }
    }
    return best_p;
}

VarFit fit_var(const TimeSeries& y, int p, bool intercept) {
    const LagMatrix lm = build_lag_matrix(y, p, 0, intercept);
    const OlsFit fit = ols(lm.x, lm.target);

    VarFit vf;
    vf.p = p;
    const int off = intercept ? 1 : 0;
    if (intercept) vf.intercept = fit.coefficients(0);
    vf.a_hats.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) vf.a_hats[static_cast<std::size_t>(j)] = fit.coefficients(off + j);
    vf.residuals = fit.residuals;
    vf.residual_variance = fit.residual_variance;
    const double mean = fit.residuals.mean();
    vf.centered_residuals.resize(static_cast<std::size_t>(fit.residuals.size()));
    for (Eigen::Index i = 0; i < fit.residuals.size(); ++i) {
        vf.centered_residuals[static_cast<std::size_t>(i)] = fit.residuals(i) - mean;
    }
    return vf;
}

ImpulseResponse durbin_ma_from_ar(const std::vector<double>& a, int s) {
    if (s < 0) throw Error(ErrorCode::InvalidInput, "horizon must be non-negative");
    const int p = static_cast<int>(a.size());
    ImpulseResponse b(static_cast<std::size_t>(s) + 1, 0.0);
    b[0] = 1.0;
    for (int h = 1; h <= s; ++h) {
        double acc = 0.0;
        const int kmax = std::min(h, p);
        for (int i = 1; i <= kmax; ++i) {
            acc += a[static_cast<std::size_t>(i - 1)] * b[static_cast<std::size_t>(h - i)];
        }
        b[static_cast<std::size_t>(h)] = acc;
    }
    return b;
}

}  // namespace lpma
