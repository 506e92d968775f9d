#include "doctest.h"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <lpma/dgp.hpp>
#include <lpma/errors.hpp>
#include <lpma/experiment.hpp>
#include <lpma/mabootstrap.hpp>
#include <lpma/metrics.hpp>
#include <lpma/regress.hpp>
#include <lpma/resample.hpp>
#include <lpma/rng.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace lpma;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("lpma_it_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& file) {
    std::ifstream is(file, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

void spit(const fs::path& file, const std::string& text) {
    std::ofstream os(file, std::ios::binary);
    REQUIRE(os.good());
    os << text;
}

const char* kRawHeader =
    "design,dgp,T,lag_rule,method,scheme,h,rep,p,failed,error,truth,point,"
    "lo_t,hi_t,lo_efron,hi_efron,boot_mean,covered,rel_length,degenerate,"
    "n_boot_failures,n_explosive,method2_fallback";

}  // namespace

TEST_CASE("projection bootstrap intervals attain near-nominal coverage") {
    const int mc = 150;
    const int T = 1000;
    const int H = 10;
    const double truth = std::pow(0.5, H);

    // Each reported horizon gets its own bootstrap run with the window and
    // block length set to that horizon, matching the experiment engine.
    const auto run_at = [](const TimeSeries& y, int h, std::uint64_t seed) {
        BootPipelineConfig cfg;
        cfg.B = 299;
        cfg.alpha = 0.10;
        cfg.scheme = ResampleScheme{SchemeKind::BlockWild, h, WeightLaw::Rademacher};
        return run_lp_bootstrap(y, 1, h, cfg, seed);
    };

    int hits_flat = 0;
    int hits_ar = 0;
    for (int rep = 0; rep < mc; ++rep) {
        RngStream sim = RngStream::derive(55001, {static_cast<std::uint64_t>(rep), 1});
        const auto flat = simulate_ar1(Ar1Spec{0.0, 1.0}, T, sim);
        const auto y = simulate_ar1(Ar1Spec{0.5, 1.0}, T, sim);
        const std::uint64_t boot_root =
            RngStream::derive_seed(55001, {static_cast<std::uint64_t>(rep), 2});
        const HorizonSummary f3 = run_at(flat, 3, boot_root).horizons.back();
        const HorizonSummary a10 = run_at(y, H, boot_root).horizons.back();
        if (Interval{f3.lo_t, f3.hi_t}.covers(0.0)) ++hits_flat;
        if (Interval{a10.lo_t, a10.hi_t}.covers(truth)) ++hits_ar;
    }
    // A serially flat process sits near the nominal 90 percent level; a
    // persistent one degrades at the far horizon but must stay informative.
    const double cov_flat = static_cast<double>(hits_flat) / mc;
    const double cov_ar = static_cast<double>(hits_ar) / mc;
    CHECK(cov_flat >= 0.82);
    CHECK(cov_flat <= 0.97);
    CHECK(cov_ar >= 0.72);
    CHECK(cov_ar <= 0.97);
}

TEST_CASE("benchmark pipeline intervals cover a flat response") {
    const int mc = 150;
    const int T = 300;
    const int H = 5;

    BootPipelineConfig cfg;
    cfg.B = 99;
    cfg.alpha = 0.10;
    cfg.scheme = ResampleScheme{SchemeKind::Iid, 1, {}};
    cfg.s_var = 40;

    int joint_hits = 0;
    int marginal_hits = 0;
    for (int rep = 0; rep < mc; ++rep) {
        RngStream sim = RngStream::derive(55002, {static_cast<std::uint64_t>(rep), 1});
        TimeSeries y(static_cast<std::size_t>(T));
        for (auto& v : y) v = sim.normal();
        const std::uint64_t boot_root =
            RngStream::derive_seed(55002, {static_cast<std::uint64_t>(rep), 2});
        const BootstrapResult r = run_var_ma_bootstrap(y, 1, H, cfg, boot_root);
        bool all = true;
        for (const HorizonSummary& hs : r.horizons) {
            const bool in = Interval{hs.lo_t, hs.hi_t}.covers(0.0);
            all = all && in;
            if (in) ++marginal_hits;
        }
        if (all) ++joint_hits;
    }
    CHECK(static_cast<double>(joint_hits) / mc >= 0.75);
    CHECK(static_cast<double>(marginal_hits) / (mc * H) >= 0.85);
}

TEST_CASE("experiment run covers every estimator on an AR(1) grid") {
    const char* spec_text = R"(
name = "it-ar1"
root_seed = 91
T = [80]
H = 4
horizons = [2, 4]
mc_reps = 4
B = 29
alpha = 0.1
scheme = "bwb"
estimators = ["lp-method1", "lp-method2", "var-ma", "ar-benchmark"]
lag_rules = ["fixed:1"]

[dgp]
family = "ar1"
phi = [0.3]
)";
    const ExperimentSpec spec = parse_experiment_spec(spec_text);
    const fs::path dir = fresh_dir("ar1_grid");
    RunOptions opts;
    opts.workers = 1;
    const RunReport report = run_experiment(spec, dir, opts);

    CHECK(report.cells_total == 8);
    CHECK(report.cells.size() == 8);
    CHECK(report.cells_failed == 0);
    CHECK(report.records_failed == 0);
    for (const McCell& cell : report.cells) {
        CHECK(cell.design == "ar1-phi0.3");
        CHECK(cell.dgp == "ar1");
        CHECK(cell.T == 80);
        CHECK(cell.n_reps == 4);
        CHECK(cell.coverage >= 0.0);
        CHECK(cell.coverage <= 1.0);
    }

    for (const char* name :
         {"metrics.csv", "metrics.json", "raw_records.csv", "run_manifest.json"}) {
        CHECK(fs::exists(dir / name));
    }

    std::ifstream metrics_in(dir / "metrics.csv");
    const auto parsed = read_metrics_csv(metrics_in);
    REQUIRE(parsed.size() == report.cells.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].design == report.cells[i].design);
        CHECK(parsed[i].method == report.cells[i].method);
        CHECK(parsed[i].h == report.cells[i].h);
        CHECK(parsed[i].n_reps == report.cells[i].n_reps);
    }

    const auto from_json = metrics_from_json(slurp(dir / "metrics.json"));
    CHECK(from_json.size() == report.cells.size());

    const std::string raw = slurp(dir / "raw_records.csv");
    CHECK(raw.rfind(kRawHeader, 0) == 0);
    // Header plus one row per (cell, replication).
    CHECK(std::count(raw.begin(), raw.end(), '\n') == 1 + 8 * 4);
    // Benchmark estimators resample iid regardless of the spec scheme.
    CHECK(raw.find("var-ma,iid") != std::string::npos);
    CHECK(raw.find("ar-benchmark,iid") != std::string::npos);
    CHECK(raw.find("lp-method1,bwb") != std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(dir / "run_manifest.json"));
    CHECK(manifest["name"] == "it-ar1");
    CHECK(manifest["root_seed"] == 91);
    CHECK(manifest["B"] == 29);
    CHECK(manifest["mc_reps"] == 4);
    CHECK(manifest["workers"] == 1);
    CHECK(manifest["n_cells"] == 8);
    CHECK(manifest["n_records"] == 32);
    CHECK(manifest["records_failed"] == 0);
}

TEST_CASE("experiment outputs are byte-identical across worker counts") {
    const char* spec_text = R"(
name = "it-workers"
root_seed = 92
T = [80]
H = 3
horizons = [3]
mc_reps = 5
B = 29
alpha = 0.1
scheme = "bwb"
estimators = ["lp-method1", "var-ma"]
lag_rules = ["fixed:1"]

[dgp]
family = "ar1"
phi = [0.5]
)";
    const ExperimentSpec spec = parse_experiment_spec(spec_text);
    const fs::path d1 = fresh_dir("workers1");
    const fs::path d2 = fresh_dir("workers2");
    RunOptions o1;
    o1.workers = 1;
    RunOptions o2;
    o2.workers = 2;
    (void)run_experiment(spec, d1, o1);
    (void)run_experiment(spec, d2, o2);

    CHECK(slurp(d1 / "metrics.csv") == slurp(d2 / "metrics.csv"));
    CHECK(slurp(d1 / "raw_records.csv") == slurp(d2 / "raw_records.csv"));
    CHECK(slurp(d1 / "metrics.json") == slurp(d2 / "metrics.json"));
}

TEST_CASE("experiment run handles random-coefficient and moving-average designs") {
    const char* arp_text = R"(
name = "it-arp"
root_seed = 93
T = [100]
H = 3
horizons = [3]
mc_reps = 3
B = 29
alpha = 0.1
scheme = "bwb"
estimators = ["lp-method1", "ar-benchmark"]
lag_rules = ["true-order", "sbic"]

[dgp]
family = "arp"
orders = [2]
persistence = [0.2, 0.6]
)";
    const ExperimentSpec arp_spec = parse_experiment_spec(arp_text);
    REQUIRE(arp_spec.designs.size() == 1);
    CHECK(arp_spec.designs[0].label == "arp-P2-0.2to0.6");
    const fs::path arp_dir = fresh_dir("arp_grid");
    RunOptions opts;
    opts.workers = 1;
    const RunReport arp_report = run_experiment(arp_spec, arp_dir, opts);
    CHECK(arp_report.cells_total == 4);
    CHECK(arp_report.cells_failed == 0);
    for (const McCell& cell : arp_report.cells) {
        CHECK(cell.dgp == "arp");
    }

    const char* gbf_text = R"(
name = "it-gbf"
root_seed = 94
T = [100]
H = 2
horizons = [2]
mc_reps = 3
B = 29
alpha = 0.1
scheme = "wild"
estimators = ["lp-method1", "var-ma"]
lag_rules = ["fixed:3", "sbic"]

[dgp]
family = "ma-gbf"
q = 3

[[dgp.components]]
a = 0.8
b = 1.0
c = 1.5
)";
    const ExperimentSpec gbf_spec = parse_experiment_spec(gbf_text);
    CHECK(gbf_spec.designs[0].label == "ma3-gbf");
    const fs::path gbf_dir = fresh_dir("gbf_grid");
    const RunReport gbf_report = run_experiment(gbf_spec, gbf_dir, opts);
    CHECK(gbf_report.cells_total == 4);
    CHECK(gbf_report.cells_failed == 0);
    for (const McCell& cell : gbf_report.cells) {
        CHECK(cell.dgp == "ma-gbf");
    }
}

TEST_CASE("cli run executes a spec end to end") {
    const fs::path fixture = fs::path(LPMA_FIXTURE_DIR) / "smoke.toml";
    REQUIRE(fs::exists(fixture));
    const fs::path dir = fresh_dir("cli_run");
    const int code = cli::run_main(
        {"run", fixture.string(), "--out", dir.string(), "--workers", "1"});
    CHECK(code == 0);
    CHECK(fs::exists(dir / "metrics.csv"));
    CHECK(fs::exists(dir / "run_manifest.json"));

    std::ifstream metrics_in(dir / "metrics.csv");
    const auto cells = read_metrics_csv(metrics_in);
    CHECK(cells.size() == 2);

    const fs::path bars = dir / "bars.csv";
    const int plot_code = cli::run_main({"plot-data", (dir / "metrics.json").string(),
                                         "--kind", "coverage-bars", "--out", bars.string()});
    CHECK(plot_code == 0);
    const std::string bars_text = slurp(bars);
    CHECK(bars_text.rfind("design,dgp,T,lag_rule,method,h,coverage", 0) == 0);
}

TEST_CASE("cli run failure modes exit with the input-error code") {
    const fs::path dir = fresh_dir("cli_run_bad");
    CHECK(cli::run_main({"run", (dir / "missing.toml").string(), "--out",
                         dir.string()}) == 2);

    const fs::path bad_spec = dir / "bad.toml";
    spit(bad_spec, "name = \"x\"\nsurprise = 1\n");
    CHECK(cli::run_main({"run", bad_spec.string(), "--out", dir.string()}) == 2);

    CHECK(cli::run_main({"frobnicate"}) == 2);
    CHECK(cli::run_main({}) == 2);
    CHECK(cli::run_main({"run", bad_spec.string(), "--out", dir.string(),
                         "--no-such-flag"}) == 2);
    CHECK(cli::run_main({"--version"}) == 0);
}

TEST_CASE("cli paper-scale raises the replicate count in the manifest") {
    const fs::path dir = fresh_dir("cli_paper");
    const fs::path spec_file = dir / "tiny.toml";
    spit(spec_file, R"(
name = "tiny"
root_seed = 5
T = [60]
H = 2
horizons = [2]
mc_reps = 2
B = 29
alpha = 0.1
scheme = "iid"
estimators = ["lp-method1"]
lag_rules = ["fixed:1"]

[dgp]
family = "ar1"
phi = [0.3]
)");
    const int code = cli::run_main({"run", spec_file.string(), "--out",
                                    (dir / "out").string(), "--workers", "1",
                                    "--paper-scale"});
    CHECK(code == 0);
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "run_manifest.json"));
    CHECK(manifest["B"] == 999);
}

TEST_CASE("cli infer produces a parseable result and handles edge cases") {
    const fs::path dir = fresh_dir("cli_infer");
    const fs::path csv = dir / "series.csv";
    {
        RngStream rng(7777);
        const auto y = simulate_ar1(Ar1Spec{0.6, 1.0}, 300, rng);
        std::ostringstream os;
        os << "idx,y\n";
        for (std::size_t i = 0; i < y.size(); ++i) os << i << ',' << y[i] << '\n';
        spit(csv, os.str());
    }

    const fs::path out = dir / "result.json";
    const int code = cli::run_main({"infer", csv.string(), "--column", "y", "--H", "6",
                                    "--p", "1", "--B", "199", "--seed", "3", "--out",
                                    out.string()});
    CHECK(code == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["estimator"] == "lp-method1");
    CHECK(j["p"] == 1);
    REQUIRE(j["records"].size() == 7);
    CHECK(j["records"][0]["horizon"] == 0);
    CHECK(j["records"][0]["point"] == 1.0);

    const fs::path band = dir / "band.csv";
    CHECK(cli::run_main({"plot-data", out.string(), "--kind", "irf-band", "--out",
                         band.string()}) == 0);
    const std::string band_text = slurp(band);
    CHECK(band_text.rfind("horizon,point,lo,hi", 0) == 0);
    CHECK(std::count(band_text.begin(), band_text.end(), '\n') >= 7);

    CHECK(cli::run_main({"plot-data", out.string(), "--kind", "nonsense"}) == 2);

    CHECK(cli::run_main({"infer", csv.string(), "--column", "absent", "--H", "6"}) == 2);
    CHECK(cli::run_main({"infer", csv.string(), "--column", "y", "--H", "6", "--p",
                         "bogus"}) == 2);
    CHECK(cli::run_main({"infer", (dir / "none.csv").string(), "--column", "y",
                         "--H", "6"}) == 2);

    // Two lags of a constant series are collinear, so the fit is singular.
    const fs::path flat = dir / "flat.csv";
    spit(flat, "y\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n");
    CHECK(cli::run_main({"infer", flat.string(), "--column", "y", "--H", "2",
                         "--p", "2", "--B", "29"}) == 2);
}

TEST_CASE("inference request validation and the trivial horizon") {
    RngStream rng(8888);
    InferRequest req;
    req.y = simulate_ar1(Ar1Spec{0.5, 1.0}, 200, rng);
    req.rule = LagRule{LagRule::Kind::Fixed, 1};
    req.B = 49;

    req.H = 0;
    const InferReport trivial = run_infer(req);
    CHECK(trivial.result.horizons.empty());
    CHECK(trivial.result.H == 0);

    req.H = -1;
    CHECK_THROWS_AS((void)run_infer(req), Error);

    req.H = 4;
    req.method = 3;
    CHECK_THROWS_AS((void)run_infer(req), Error);
    req.method = 1;

    req.rule = LagRule{LagRule::Kind::TrueOrder, 0};
    CHECK_THROWS_AS((void)run_infer(req), Error);
    req.rule = LagRule{LagRule::Kind::Fixed, 1};

    req.y.resize(14);
    try {
        (void)run_infer(req);
        FAIL("expected InsufficientSample");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientSample);
    }
}
