#include "lpma/mabootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <nlohmann/json.hpp>

#include "lpma/errors.hpp"
#include "lpma/localproj.hpp"
#include "lpma/regress.hpp"

namespace lpma {

double empirical_quantile(std::span<const double> sorted_values, double kappa) {
    if (sorted_values.empty()) {
        throw Error(ErrorCode::InvalidInput, "quantile of an empty sample");
    }
    if (!std::isfinite(kappa)) {
        throw Error(ErrorCode::InvalidInput, "quantile level must be finite");
    }
    const int n = static_cast<int>(sorted_values.size());
    const int idx = static_cast<int>(std::ceil(kappa * static_cast<double>(n) - 1e-9));
    const int clamped = std::clamp(idx, 1, n);
    return sorted_values[static_cast<std::size_t>(clamped - 1)];
}

Interval percentile_t_interval(double point, double scale,
                               std::span<const double> sorted_stats, double alpha) {
    const double q_lo = empirical_quantile(sorted_stats, alpha / 2.0);
    const double q_hi = empirical_quantile(sorted_stats, 1.0 - alpha / 2.0);
    return {point - scale * q_hi, point - scale * q_lo};
}

Interval efron_interval(std::span<const double> sorted_estimates, double alpha) {
    return {empirical_quantile(sorted_estimates, alpha / 2.0),
            empirical_quantile(sorted_estimates, 1.0 - alpha / 2.0)};
}

TimeSeries generate_ma_path(std::span<const double> coeffs,
                            std::span<const double> innovations, int T) {
    if (coeffs.empty()) throw Error(ErrorCode::InvalidInput, "no MA coefficients");
    if (T < 1) throw Error(ErrorCode::InvalidInput, "path length must be positive");
    const int s = static_cast<int>(coeffs.size()) - 1;
    if (static_cast<int>(innovations.size()) < T + s) {
        throw Error(ErrorCode::InvalidInput,
                    "need at least T + s innovations for the MA path",
                    static_cast<double>(innovations.size()));
    }
    TimeSeries y(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        double acc = 0.0;
        for (int j = 0; j <= s; ++j) acc += coeffs[static_cast<std::size_t>(j)] *
                                            innovations[static_cast<std::size_t>(t + s - j)];
        y[static_cast<std::size_t>(t)] = acc;
    }
    return y;
}

namespace {

void validate_config(const BootPipelineConfig& cfg) {
    if (cfg.B < 19) {
        throw Error(ErrorCode::InvalidSpec, "at least 19 bootstrap replicates required",
                    static_cast<double>(cfg.B));
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
        throw Error(ErrorCode::InvalidSpec, "alpha must lie strictly inside (0, 1)", cfg.alpha);
    }
    if (cfg.method != 1 && cfg.method != 2) {
        throw Error(ErrorCode::InvalidSpec, "method must be 1 or 2",
                    static_cast<double>(cfg.method));
    }
    if (cfg.max_failure_fraction < 0.0 || cfg.max_failure_fraction > 1.0) {
        throw Error(ErrorCode::InvalidSpec, "max_failure_fraction must lie in [0, 1]",
                    cfg.max_failure_fraction);
    }
}

InnovationSource make_default_source(const ResampleScheme& scheme,
                                     std::vector<double> residuals) {
    return [scheme, res = std::move(residuals)](int length, int, RngStream& rng) {
        return draw_innovations(res, length, scheme, rng);
    };
}

void check_block_feasible(const ResampleScheme& scheme, std::size_t n_residuals) {
    if (scheme.kind == SchemeKind::Block &&
        scheme.block_length > static_cast<int>(n_residuals)) {
        throw Error(ErrorCode::InvalidInput,
                    "block length exceeds the residual sample",
                    static_cast<double>(scheme.block_length));
    }
}

/// Run the replicate body over b = 0..B-1, splitting contiguously across threads.
/// Any exception inside a replicate marks it failed.
void drive_replicates(int B, int n_threads, std::uint64_t root_seed,
                      std::vector<char>& failed,
                      const std::function<void(int, RngStream&)>& body) {
    const auto worker = [&](int b0, int b1) {
        for (int b = b0; b < b1; ++b) {
            RngStream rng(RngStream::derive_seed(root_seed,
                                                 {static_cast<std::uint64_t>(b)}));
            try {
                body(b, rng);
            } catch (const std::exception&) {
                failed[static_cast<std::size_t>(b)] = 1;
            }
        }
    };
    const int threads = std::max(1, std::min(n_threads, B));
    if (threads == 1) {
        worker(0, B);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    const int chunk = (B + threads - 1) / threads;
    for (int k = 0; k < threads; ++k) {
        const int b0 = k * chunk;
        const int b1 = std::min(B, b0 + chunk);
        if (b0 >= b1) break;
        pool.emplace_back(worker, b0, b1);
    }
    for (auto& th : pool) th.join();
}

void enforce_failure_budget(const BootPipelineConfig& cfg, int n_failures) {
    if (static_cast<double>(n_failures) > cfg.max_failure_fraction * cfg.B ||
        cfg.B - n_failures < 2) {
        throw Error(ErrorCode::PipelineFailure,
                    "too many bootstrap replicates failed",
                    static_cast<double>(n_failures) / static_cast<double>(cfg.B));
    }
}

std::vector<HorizonSummary> summarize(const std::vector<double>& points,
                                      const Eigen::MatrixXd& est,
                                      const std::vector<char>& failed, double alpha) {
    const int H = static_cast<int>(points.size());
    const int B = static_cast<int>(est.rows());
    std::vector<HorizonSummary> out(static_cast<std::size_t>(H));
    std::vector<double> vals;
    std::vector<double> sorted_vals;
    std::vector<double> sorted_stats;
    for (int h = 1; h <= H; ++h) {
        HorizonSummary& hs = out[static_cast<std::size_t>(h - 1)];
        hs.horizon = h;
        hs.point = points[static_cast<std::size_t>(h - 1)];

        vals.clear();
        for (int b = 0; b < B; ++b) {
            if (!failed[static_cast<std::size_t>(b)]) vals.push_back(est(b, h - 1));
        }
        const double n = static_cast<double>(vals.size());
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= n;
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        const double var = ss / (n - 1.0);
        const double sd = std::sqrt(std::max(var, 0.0));
        hs.boot_mean = mean;
        hs.vhat = var;

        hs.t_stats.resize(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            hs.t_stats[i] = sd > 0.0 ? (vals[i] - hs.point) / sd : 0.0;
        }
        sorted_stats = hs.t_stats;
        std::sort(sorted_stats.begin(), sorted_stats.end());
        hs.q_lo = empirical_quantile(sorted_stats, alpha / 2.0);
        hs.q_hi = empirical_quantile(sorted_stats, 1.0 - alpha / 2.0);
        const Interval ti = percentile_t_interval(hs.point, sd, sorted_stats, alpha);
        hs.lo_t = ti.lo;
        hs.hi_t = ti.hi;

        sorted_vals = vals;
        std::sort(sorted_vals.begin(), sorted_vals.end());
        const Interval ei = efron_interval(sorted_vals, alpha);
        hs.lo_efron = ei.lo;
        hs.hi_efron = ei.hi;
    }
    return out;
}

int count_flags(const std::vector<char>& flags) {
    int n = 0;
    for (char f : flags) n += f != 0;
    return n;
}

}  // namespace

BootstrapResult run_lp_bootstrap(const TimeSeries& y, int p, int H,
                                 const BootPipelineConfig& cfg, std::uint64_t root_seed,
                                 const InnovationSource& source) {
    validate_config(cfg);
    const int T = static_cast<int>(y.size());

    BootstrapResult result;
    result.p = p;
    result.H = H;
    result.alpha = cfg.alpha;
    result.estimator = cfg.method == 2 ? "lp-method2" : "lp-method1";

    const LpIrfEstimate lp = fit_lp(y, p, H);
    std::vector<double> coeffs;
    if (cfg.method == 2) {
        const int s_cap = cfg.s_max < 0 ? T - H : cfg.s_max;
        try {
            coeffs = fit_ma_extension(y, lp, s_cap).coefficients;
        } catch (const Error& e) {
            if (cfg.fallback_to_method1 && e.code() == ErrorCode::DegenerateExtension) {
                coeffs = lp.b_hats;
                result.method2_fallback = true;
            } else {
                throw;
            }
        }
        while (static_cast<int>(coeffs.size()) > H + 1 && coeffs.back() == 0.0) {
            coeffs.pop_back();
        }
    } else {
        coeffs = lp.b_hats;
    }
    const int s = static_cast<int>(coeffs.size()) - 1;
    const int L = T + s;

    check_block_feasible(cfg.scheme, lp.first_step_residuals.size());
    const InnovationSource src =
        source ? source : make_default_source(cfg.scheme, lp.first_step_residuals);

    Eigen::MatrixXd est(cfg.B, H);
    est.setZero();
    std::vector<char> failed(static_cast<std::size_t>(cfg.B), 0);
    drive_replicates(cfg.B, cfg.n_threads, root_seed, failed, [&](int b, RngStream& rng) {
        const std::vector<double> inn = src(L, b, rng);
        const TimeSeries path = generate_ma_path(coeffs, inn, T);
        thread_local detail::LpWorkspace ws;
        thread_local std::vector<double> bh;
        detail::fit_lp_coefficients(path, p, H, ws, bh);
        for (int h = 1; h <= H; ++h) est(b, h - 1) = bh[static_cast<std::size_t>(h)];
    });

    result.n_failures = count_flags(failed);
    enforce_failure_budget(cfg, result.n_failures);
    const std::vector<double> points(lp.b_hats.begin() + 1, lp.b_hats.end());
    result.horizons = summarize(points, est, failed, cfg.alpha);
    return result;
}

BootstrapResult run_var_ma_bootstrap(const TimeSeries& y, int p, int H,
                                     const BootPipelineConfig& cfg, std::uint64_t root_seed,
                                     const InnovationSource& source) {
    validate_config(cfg);
    const int T = static_cast<int>(y.size());
    if (H < 1) throw Error(ErrorCode::InvalidInput, "horizon cap must be positive");

    BootstrapResult result;
    result.p = p;
    result.H = H;
    result.alpha = cfg.alpha;
    result.estimator = "var-ma";

    const VarFit vf = fit_var(y, p, false);
    const int s = cfg.s_var < 0 ? T : cfg.s_var;
    if (s < H) {
        throw Error(ErrorCode::InvalidSpec, "MA truncation must reach the horizon cap",
                    static_cast<double>(s));
    }
    const ImpulseResponse coeffs = durbin_ma_from_ar(vf.a_hats, s);
    const int L = T + s;

    check_block_feasible(cfg.scheme, vf.centered_residuals.size());
    const InnovationSource src =
        source ? source : make_default_source(cfg.scheme, vf.centered_residuals);

    Eigen::MatrixXd est(cfg.B, H);
    est.setZero();
    std::vector<char> failed(static_cast<std::size_t>(cfg.B), 0);
    std::vector<char> explosive(static_cast<std::size_t>(cfg.B), 0);
    drive_replicates(cfg.B, cfg.n_threads, root_seed, failed, [&](int b, RngStream& rng) {
        const std::vector<double> inn = src(L, b, rng);
        const TimeSeries path = generate_ma_path(coeffs, inn, T);
        const VarFit rf = fit_var(path, p, false);
        if (companion_spectral_radius(rf.a_hats) > 1.0) {
            explosive[static_cast<std::size_t>(b)] = 1;
        }
        const ImpulseResponse irf = durbin_ma_from_ar(rf.a_hats, H);
        for (int h = 1; h <= H; ++h) est(b, h - 1) = irf[static_cast<std::size_t>(h)];
    });

    result.n_failures = count_flags(failed);
    enforce_failure_budget(cfg, result.n_failures);
    result.n_explosive = count_flags(explosive);
    const ImpulseResponse point_irf = durbin_ma_from_ar(vf.a_hats, H);
    const std::vector<double> points(point_irf.begin() + 1, point_irf.end());
    result.horizons = summarize(points, est, failed, cfg.alpha);
    return result;
}

BootstrapResult run_ar_benchmark(const TimeSeries& y, int p, int H,
                                 const BootPipelineConfig& cfg, std::uint64_t root_seed,
                                 const InnovationSource& source) {
    validate_config(cfg);
    const int T = static_cast<int>(y.size());
    if (H < 1) throw Error(ErrorCode::InvalidInput, "horizon cap must be positive");

    BootstrapResult result;
    result.p = p;
    result.H = H;
    result.alpha = cfg.alpha;
    result.estimator = "ar-benchmark";

    const VarFit vf = fit_var(y, p, true);

    check_block_feasible(cfg.scheme, vf.centered_residuals.size());
    const InnovationSource src =
        source ? source : make_default_source(cfg.scheme, vf.centered_residuals);

    Eigen::MatrixXd est(cfg.B, H);
    est.setZero();
    std::vector<char> failed(static_cast<std::size_t>(cfg.B), 0);
    std::vector<char> explosive(static_cast<std::size_t>(cfg.B), 0);
    drive_replicates(cfg.B, cfg.n_threads, root_seed, failed, [&](int b, RngStream& rng) {
        const std::vector<double> inn = src(T - p, b, rng);
        TimeSeries path(static_cast<std::size_t>(T));
        for (int t = 0; t < p; ++t) path[static_cast<std::size_t>(t)] = y[static_cast<std::size_t>(t)];
        for (int t = p; t < T; ++t) {
            double acc = vf.intercept + inn[static_cast<std::size_t>(t - p)];
            for (int i = 0; i < p; ++i) {
                acc += vf.a_hats[static_cast<std::size_t>(i)] *
                       path[static_cast<std::size_t>(t - 1 - i)];
            }
            path[static_cast<std::size_t>(t)] = acc;
        }
        const VarFit rf = fit_var(path, p, true);
        if (companion_spectral_radius(rf.a_hats) > 1.0) {
            explosive[static_cast<std::size_t>(b)] = 1;
        }
        const ImpulseResponse irf = durbin_ma_from_ar(rf.a_hats, H);
        for (int h = 1; h <= H; ++h) est(b, h - 1) = irf[static_cast<std::size_t>(h)];
    });

    result.n_failures = count_flags(failed);
    enforce_failure_budget(cfg, result.n_failures);
    result.n_explosive = count_flags(explosive);
    const ImpulseResponse point_irf = durbin_ma_from_ar(vf.a_hats, H);
    const std::vector<double> points(point_irf.begin() + 1, point_irf.end());
    result.horizons = summarize(points, est, failed, cfg.alpha);
    return result;
}

std::string to_json(const BootstrapResult& result, int indent) {
    nlohmann::ordered_json j;
    j["estimator"] = result.estimator;
    j["p"] = result.p;
    j["H"] = result.H;
    j["alpha"] = result.alpha;
    j["n_failures"] = result.n_failures;
    j["n_explosive"] = result.n_explosive;
    j["method2_fallback"] = result.method2_fallback;
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    nlohmann::ordered_json h0;
    h0["horizon"] = 0;
    h0["point"] = 1.0;
    h0["lo_t"] = 1.0;
    h0["hi_t"] = 1.0;
    h0["lo_efron"] = 1.0;
    h0["hi_efron"] = 1.0;
    h0["n_failures"] = result.n_failures;
    records.push_back(h0);
    for (const HorizonSummary& hs : result.horizons) {
        nlohmann::ordered_json r;
        r["horizon"] = hs.horizon;
        r["point"] = hs.point;
        r["lo_t"] = hs.lo_t;
        r["hi_t"] = hs.hi_t;
        r["lo_efron"] = hs.lo_efron;
        r["hi_efron"] = hs.hi_efron;
        r["n_failures"] = result.n_failures;
        records.push_back(r);
    }
    j["records"] = records;
    return j.dump(indent);
}

}  // namespace lpma
