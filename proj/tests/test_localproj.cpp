#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <lpma/dgp.hpp>
#include <lpma/errors.hpp>
#include <lpma/localproj.hpp>
#include <lpma/regress.hpp>
#include <lpma/rng.hpp>

using namespace lpma;

TEST_CASE("first projection step coincides with the autoregressive fit") {
    RngStream rng(501);
    const auto y = simulate_ar1(Ar1Spec{0.6, 1.0}, 800, rng);
    const LpIrfEstimate lp = fit_lp(y, 3, 5);
    const VarFit vf = fit_var(y, 3, false);

    CHECK(std::abs(lp.b_hats[1] - vf.a_hats[0]) < 1e-10);
    REQUIRE(lp.nuisance[0].size() == 2);
    CHECK(std::abs(lp.nuisance[0][0] - vf.a_hats[1]) < 1e-10);
    CHECK(std::abs(lp.nuisance[0][1] - vf.a_hats[2]) < 1e-10);

    REQUIRE(lp.first_step_residuals.size() == vf.centered_residuals.size());
    for (std::size_t i = 0; i < lp.first_step_residuals.size(); ++i) {
        CHECK(std::abs(lp.first_step_residuals[i] - vf.centered_residuals[i]) < 1e-12);
    }
    double mean = 0.0;
    for (double e : lp.first_step_residuals) mean += e;
    CHECK(std::abs(mean / static_cast<double>(lp.first_step_residuals.size())) < 1e-14);
}

TEST_CASE("projection coefficients converge to the geometric response") {
    RngStream rng(502);
    const auto y = simulate_ar1(Ar1Spec{0.5, 1.0}, 100000, rng);
    const LpIrfEstimate lp = fit_lp(y, 1, 10);
    REQUIRE(lp.b_hats.size() == 11);
    CHECK(lp.b_hats[0] == 1.0);
    double worst = 0.0;
    for (int h = 1; h <= 10; ++h) {
        worst = std::max(worst, std::abs(lp.b_hats[static_cast<std::size_t>(h)] -
                                         std::pow(0.5, h)));
    }
    CHECK(worst < 0.02);
}

TEST_CASE("workspace fast path agrees with the instrumented fit") {
    RngStream rng(503);
    const auto y = simulate_arp(ArpSpec{{0.4, 0.2, -0.1}, 1.0}, 600, rng);
    const LpIrfEstimate lp = fit_lp(y, 4, 8);

    detail::LpWorkspace ws;
    std::vector<double> fast;
    detail::fit_lp_coefficients(y, 4, 8, ws, fast);
    REQUIRE(fast.size() == lp.b_hats.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(std::abs(fast[i] - lp.b_hats[i]) < 1e-9);
    }
}

TEST_CASE("projection fits reject short samples and bad arguments") {
    TimeSeries y(9, 0.5);
    try {
        (void)fit_lp(y, 2, 3);
        FAIL("expected InsufficientSample");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientSample);
    }
    TimeSeries longer(100, 0.5);
    CHECK_THROWS_AS((void)fit_lp(longer, 0, 3), Error);
    CHECK_THROWS_AS((void)fit_lp(longer, 2, 0), Error);
}

TEST_CASE("constant series is a singular projection design") {
    TimeSeries y(60, 1.0);
    try {
        (void)fit_lp(y, 2, 3);
        FAIL("expected SingularDesign");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularDesign);
    }
}

TEST_CASE("non-finite observations are rejected by the fast path") {
    RngStream rng(504);
    TimeSeries y(100);
    for (auto& v : y) v = rng.normal();
    y[40] = std::numeric_limits<double>::quiet_NaN();
    detail::LpWorkspace ws;
    std::vector<double> out;
    try {
        detail::fit_lp_coefficients(y, 2, 4, ws, out);
        FAIL("expected SingularDesign");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularDesign);
    }
}

TEST_CASE("extension slope is exactly zero when the fit is exact") {
    const int p = 2;
    const int H = 3;
    const int T = 40;
    LpIrfEstimate lp;
    lp.p = p;
    lp.H = H;
    lp.b_hats = {1.0, 0.5, 0.25, -0.3};
    RngStream rng(505);
    lp.first_step_residuals.resize(static_cast<std::size_t>(T - p));
    for (auto& e : lp.first_step_residuals) e = rng.normal();

    const auto eps_at = [&](int t) {
        return lp.first_step_residuals[static_cast<std::size_t>(t - p)];
    };
    TimeSeries y(static_cast<std::size_t>(T));
    for (int t = 0; t < p + H; ++t) y[static_cast<std::size_t>(t)] = 1.0 + 0.1 * t;
    for (int t = p + H; t < T; ++t) {
        double fitted = 0.0;
        for (int h = 0; h <= H; ++h) {
            fitted += lp.b_hats[static_cast<std::size_t>(h)] * eps_at(t - h);
        }
        y[static_cast<std::size_t>(t)] = fitted;
    }

    const MaExtension ext = fit_ma_extension(y, lp, 20);
    CHECK(ext.g_hat == 0.0);
    REQUIRE(ext.coefficients.size() == 21);
    for (int h = 0; h <= H; ++h) {
        CHECK(ext.coefficients[static_cast<std::size_t>(h)] ==
              lp.b_hats[static_cast<std::size_t>(h)]);
    }
    for (std::size_t j = static_cast<std::size_t>(H) + 1; j < ext.coefficients.size(); ++j) {
        CHECK(ext.coefficients[j] == 0.0);
    }
    for (double v : ext.aux_residuals) CHECK(v == 0.0);
}

TEST_CASE("extension slope estimates the horizon-plus-one response") {
    RngStream rng(506);
    const auto y = simulate_ar1(Ar1Spec{0.5, 1.0}, 20000, rng);
    const LpIrfEstimate lp = fit_lp(y, 1, 3);
    const MaExtension ext = fit_ma_extension(y, lp, 50);
    CHECK(std::abs(ext.g_hat - std::pow(0.5, 4)) < 0.02);

    REQUIRE(ext.coefficients.size() == 51);
    for (std::size_t j = 0; j + 4 < ext.coefficients.size(); ++j) {
        CHECK(ext.coefficients[j + 4] == ext.g_hat * ext.coefficients[j]);
    }
}

TEST_CASE("extension argument validation") {
    RngStream rng(507);
    const auto y = simulate_ar1(Ar1Spec{0.5, 1.0}, 200, rng);
    const LpIrfEstimate lp = fit_lp(y, 1, 4);
    try {
        (void)fit_ma_extension(y, lp, 4);
        FAIL("expected InvalidInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidInput);
    }

    RngStream rng2(508);
    const auto small = simulate_ar1(Ar1Spec{0.5, 1.0}, 30, rng2);
    const LpIrfEstimate lp_small = fit_lp(small, 1, 20);
    try {
        (void)fit_ma_extension(small, lp_small, 25);
        FAIL("expected InsufficientSample");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientSample);
    }
}

TEST_CASE("extension degenerates when the aux regressor is identically zero") {
    const int p = 1;
    const int H = 1;
    const int T = 30;
    LpIrfEstimate lp;
    lp.p = p;
    lp.H = H;
    lp.b_hats = {1.0, 0.5};
    lp.first_step_residuals.assign(static_cast<std::size_t>(T - p), 0.0);

    TimeSeries y(static_cast<std::size_t>(T), 0.0);
    y[static_cast<std::size_t>(T - 1)] = 1.0;
    try {
        (void)fit_ma_extension(y, lp, 10);
        FAIL("expected DegenerateExtension");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateExtension);
    }
}

TEST_CASE("linear functional point and scale") {
    Eigen::VectorXd beta(1);
    beta << 3.0;
    Eigen::MatrixXd vhat(1, 1);
    vhat << 4.0;
    Eigen::VectorXd delta(1);
    delta << 1.0;
    const auto [point, scale] = lp_point_and_scale(beta, vhat, delta);
    CHECK(point == 3.0);
    CHECK(scale == 2.0);

    vhat(0, 0) = -1.0;
    try {
        (void)lp_point_and_scale(beta, vhat, delta);
        FAIL("expected NumericalCovariance");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NumericalCovariance);
    }

    Eigen::VectorXd wrong(2);
    wrong << 1.0, 0.0;
    try {
        (void)lp_point_and_scale(beta, vhat, wrong);
        FAIL("expected InvalidInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidInput);
    }
}
