#include <benchmark/benchmark.h>

#include <vector>

#include "lpma/dgp.hpp"
#include "lpma/localproj.hpp"
#include "lpma/mabootstrap.hpp"
#include "lpma/regress.hpp"
#include "lpma/resample.hpp"
#include "lpma/rng.hpp"

namespace {

lpma::TimeSeries make_series(int T, double phi, std::uint64_t seed) {
    lpma::RngStream rng(seed);
    return lpma::simulate_ar1(lpma::Ar1Spec{phi, 1.0}, T, rng);
}

void BM_LpFitShortSample(benchmark::State& state) {
    const lpma::TimeSeries y = make_series(200, 0.5, 7);
    lpma::detail::LpWorkspace ws;
    std::vector<double> b_hats;
    for (auto _ : state) {
        lpma::detail::fit_lp_coefficients(y, 1, 60, ws, b_hats);
        benchmark::DoNotOptimize(b_hats.data());
    }
}
BENCHMARK(BM_LpFitShortSample);

void BM_LpFitWideDesign(benchmark::State& state) {
    const lpma::TimeSeries y = make_series(1000, 0.5, 11);
    lpma::detail::LpWorkspace ws;
    std::vector<double> b_hats;
    for (auto _ : state) {
        lpma::detail::fit_lp_coefficients(y, 20, 40, ws, b_hats);
        benchmark::DoNotOptimize(b_hats.data());
    }
}
BENCHMARK(BM_LpFitWideDesign);

void BM_DurbinRecursion(benchmark::State& state) {
    const std::vector<double> a{0.4, 0.2, 0.1, 0.05};
    for (auto _ : state) {
        auto irf = lpma::durbin_ma_from_ar(a, 200);
        benchmark::DoNotOptimize(irf.data());
    }
}
BENCHMARK(BM_DurbinRecursion);

void BM_DrawInnovationsBwb(benchmark::State& state) {
    const lpma::TimeSeries y = make_series(200, 0.5, 13);
    const lpma::LpIrfEstimate lp = lpma::fit_lp(y, 1, 10);
    const lpma::ResampleScheme scheme{lpma::SchemeKind::BlockWild, 10,
                                      lpma::WeightLaw::Rademacher};
    lpma::RngStream rng(17);
    for (auto _ : state) {
        auto inn = lpma::draw_innovations(lp.first_step_residuals, 400, scheme, rng);
        benchmark::DoNotOptimize(inn.data());
    }
}
BENCHMARK(BM_DrawInnovationsBwb);

void BM_BootstrapReplicate(benchmark::State& state) {
    const lpma::TimeSeries y = make_series(200, 0.5, 19);
    const lpma::LpIrfEstimate lp = lpma::fit_lp(y, 1, 10);
    const lpma::ResampleScheme scheme{lpma::SchemeKind::BlockWild, 10,
                                      lpma::WeightLaw::Rademacher};
    lpma::RngStream rng(23);
    lpma::detail::LpWorkspace ws;
    std::vector<double> b_hats;
    const int T = static_cast<int>(y.size());
    const int s = static_cast<int>(lp.b_hats.size()) - 1;
    for (auto _ : state) {
        auto inn = lpma::draw_innovations(lp.first_step_residuals, T + s, scheme, rng);
        auto path = lpma::generate_ma_path(lp.b_hats, inn, T);
        lpma::detail::fit_lp_coefficients(path, 1, 10, ws, b_hats);
        benchmark::DoNotOptimize(b_hats.data());
    }
}
BENCHMARK(BM_BootstrapReplicate);

void BM_SbicSelection(benchmark::State& state) {
    const lpma::TimeSeries y = make_series(1000, 0.95, 29);
    for (auto _ : state) {
        const int p = lpma::select_lag_sbic(y, 21);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_SbicSelection);

}  // namespace

BENCHMARK_MAIN();
