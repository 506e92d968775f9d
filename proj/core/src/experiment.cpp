#include "lpma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "lpma/errors.hpp"
#include "lpma/regress.hpp"
#include "lpma/tomlite.hpp"
#include "lpma/version.hpp"

namespace lpma {

const char* estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::LpMethod1: return "lp-method1";
        case EstimatorKind::LpMethod2: return "lp-method2";
        case EstimatorKind::VarMa: return "var-ma";
        case EstimatorKind::ArBenchmark: return "ar-benchmark";
    }
    return "unknown";
}

std::string lag_rule_name(const LagRule& rule) {
    switch (rule.kind) {
        case LagRule::Kind::Sbic: return "sbic";
        case LagRule::Kind::TrueOrder: return "true-order";
        case LagRule::Kind::Fixed: return "fixed:" + std::to_string(rule.fixed_p);
    }
    return "unknown";
}

LagRule parse_lag_rule(const std::string& text) {
    if (text == "sbic") return {LagRule::Kind::Sbic, 0};
    if (text == "true-order") return {LagRule::Kind::TrueOrder, 0};
    if (text.starts_with("fixed:")) {
        const std::string num = text.substr(6);
        try {
            std::size_t pos = 0;
            const int p = std::stoi(num, &pos);
            if (pos == num.size() && p >= 1) return {LagRule::Kind::Fixed, p};
        } catch (const std::exception&) {
        }
    }
    throw Error(ErrorCode::InvalidSpec, "unknown lag rule '" + text + "'");
}

namespace {

const toml::Value& require_field(const toml::Table& t, const std::string& key,
                                 const std::string& scope) {
    const auto it = t.find(key);
    if (it == t.end()) {
        throw Error(ErrorCode::InvalidSpec, "missing field '" + scope + key + "'");
    }
    return it->second;
}

void reject_unknown(const toml::Table& t, const std::set<std::string>& allowed,
                    const std::string& scope) {
    for (const auto& [key, value] : t) {
        if (!allowed.contains(key)) {
            throw Error(ErrorCode::InvalidSpec, "unknown field '" + scope + key + "'");
        }
    }
}

std::vector<int> int_array(const toml::Value& v, const std::string& what) {
    std::vector<int> out;
    for (const toml::Value& item : v.as_array()) {
        const std::int64_t raw = item.as_integer();
        if (raw < -(1LL << 31) || raw > (1LL << 31)) {
            throw Error(ErrorCode::InvalidSpec, what + " entry out of range");
        }
        out.push_back(static_cast<int>(raw));
    }
    if (out.empty()) throw Error(ErrorCode::InvalidSpec, what + " must be non-empty");
    return out;
}

std::vector<double> float_array(const toml::Value& v, const std::string& what) {
    std::vector<double> out;
    for (const toml::Value& item : v.as_array()) out.push_back(item.as_float());
    if (out.empty()) throw Error(ErrorCode::InvalidSpec, what + " must be non-empty");
    return out;
}

SchemeKind parse_scheme_kind(const std::string& s) {
    if (s == "iid") return SchemeKind::Iid;
    if (s == "wild") return SchemeKind::Wild;
    if (s == "bwb") return SchemeKind::BlockWild;
    if (s == "bb") return SchemeKind::Block;
    throw Error(ErrorCode::InvalidSpec, "unknown scheme '" + s + "'");
}

WeightLaw parse_weight_law(const std::string& s) {
    if (s == "rademacher") return WeightLaw::Rademacher;
    if (s == "normal") return WeightLaw::StandardNormal;
    throw Error(ErrorCode::InvalidSpec, "unknown weight law '" + s + "'");
}

BlockRule parse_block_rule(const std::string& s) {
    if (s == "H") return BlockRule::FullH;
    if (s == "1.5H") return BlockRule::OneAndHalfH;
    throw Error(ErrorCode::InvalidSpec, "unknown block rule '" + s + "'");
}

EstimatorKind parse_estimator(const std::string& s) {
    if (s == "lp-method1") return EstimatorKind::LpMethod1;
    if (s == "lp-method2") return EstimatorKind::LpMethod2;
    if (s == "var-ma") return EstimatorKind::VarMa;
    if (s == "ar-benchmark") return EstimatorKind::ArBenchmark;
    throw Error(ErrorCode::InvalidSpec, "unknown estimator '" + s + "'");
}

std::vector<DesignSpec> parse_dgp(const toml::Table& dgp) {
    const std::string family = require_field(dgp, "family", "dgp.").as_string();
    std::vector<DesignSpec> designs;
    if (family == "ar1") {
        reject_unknown(dgp, {"family", "phi"}, "dgp.");
        for (double phi : float_array(require_field(dgp, "phi", "dgp."), "dgp.phi")) {
            if (!(std::abs(phi) <= 1.0)) {
                throw Error(ErrorCode::InvalidSpec, "ar1 requires |phi| <= 1", phi);
            }
            DesignSpec d;
            d.family = "ar1";
            d.ar1 = Ar1Spec{phi, 1.0};
            d.label = "ar1-phi" + format_g6(phi);
            designs.push_back(std::move(d));
        }
    } else if (family == "arp") {
        reject_unknown(dgp, {"family", "orders", "persistence"}, "dgp.");
        const std::vector<int> orders =
            int_array(require_field(dgp, "orders", "dgp."), "dgp.orders");
        const std::vector<double> band =
            float_array(require_field(dgp, "persistence", "dgp."), "dgp.persistence");
        if (band.size() != 2 || !(band[0] >= 0.0 && band[0] < band[1] && band[1] < 1.0)) {
            throw Error(ErrorCode::InvalidSpec,
                        "dgp.persistence must be [lo, hi] with 0 <= lo < hi < 1");
        }
        for (int order : orders) {
            if (order < 1) throw Error(ErrorCode::InvalidSpec, "dgp.orders entries must be >= 1");
            DesignSpec d;
            d.family = "arp";
            d.arp_order = order;
            d.arp_band_lo = band[0];
            d.arp_band_hi = band[1];
            d.label = "arp-P" + std::to_string(order) + "-" + format_g6(band[0]) + "to" +
                      format_g6(band[1]);
            designs.push_back(std::move(d));
        }
    } else if (family == "ma-gbf") {
        reject_unknown(dgp, {"family", "q", "components", "label"}, "dgp.");
        DesignSpec d;
        d.family = "ma-gbf";
        const std::int64_t q = require_field(dgp, "q", "dgp.").as_integer();
        if (q < 1 || q > 10000) throw Error(ErrorCode::InvalidSpec, "dgp.q must be >= 1");
        d.gbf.q = static_cast<int>(q);
        d.gbf.innovation_sd = 1.0;
        for (const toml::Table& comp :
             require_field(dgp, "components", "dgp.").as_table_array()) {
            reject_unknown(comp, {"a", "b", "c"}, "dgp.components.");
            GbfComponent g;
            g.a = require_field(comp, "a", "dgp.components.").as_float();
            g.b = require_field(comp, "b", "dgp.components.").as_float();
            g.c = require_field(comp, "c", "dgp.components.").as_float();
            if (!(g.c > 0.0)) {
                throw Error(ErrorCode::InvalidSpec, "dgp.components.c must be positive", g.c);
            }
            d.gbf.components.push_back(g);
        }
        if (d.gbf.components.empty()) {
            throw Error(ErrorCode::InvalidSpec, "dgp.components must be non-empty");
        }
        const auto label_it = dgp.find("label");
        d.label = label_it != dgp.end() ? label_it->second.as_string()
                                        : "ma" + std::to_string(d.gbf.q) + "-gbf";
        if (d.label.find(',') != std::string::npos) {
            throw Error(ErrorCode::InvalidSpec, "dgp.label must not contain commas");
        }
        designs.push_back(std::move(d));
    } else {
        throw Error(ErrorCode::InvalidSpec, "unknown dgp family '" + family + "'");
    }
    return designs;
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& text) {
    const toml::Table root = toml::parse(text);
    reject_unknown(root,
                   {"name", "root_seed", "T", "H", "horizons", "mc_reps", "B", "alpha",
                    "scheme", "block_rule", "weight_law", "estimators", "lag_rules",
                    "sbic_p_max", "dgp"},
                   "");

    ExperimentSpec spec;
    spec.name = require_field(root, "name", "").as_string();
    if (spec.name.empty()) throw Error(ErrorCode::InvalidSpec, "name must be non-empty");
    const std::int64_t seed = require_field(root, "root_seed", "").as_integer();
    if (seed < 0) throw Error(ErrorCode::InvalidSpec, "root_seed must be non-negative");
    spec.root_seed = static_cast<std::uint64_t>(seed);

    spec.sample_sizes = int_array(require_field(root, "T", ""), "T");
    for (int T : spec.sample_sizes) {
        if (T < 20) throw Error(ErrorCode::InvalidSpec, "sample sizes must be at least 20");
    }
    const std::int64_t H = require_field(root, "H", "").as_integer();
    if (H < 1 || H > 10000) throw Error(ErrorCode::InvalidSpec, "H must be >= 1");
    spec.H = static_cast<int>(H);

    spec.horizons = int_array(require_field(root, "horizons", ""), "horizons");
    std::sort(spec.horizons.begin(), spec.horizons.end());
    if (std::adjacent_find(spec.horizons.begin(), spec.horizons.end()) !=
        spec.horizons.end()) {
        throw Error(ErrorCode::InvalidSpec, "horizons must be distinct");
    }
    for (int h : spec.horizons) {
        if (h < 1 || h > spec.H) {
            throw Error(ErrorCode::InvalidSpec, "horizons must lie in [1, H]",
                        static_cast<double>(h));
        }
    }

    const std::int64_t reps = require_field(root, "mc_reps", "").as_integer();
    if (reps < 1) throw Error(ErrorCode::InvalidSpec, "mc_reps must be >= 1");
    spec.mc_reps = static_cast<int>(reps);
    const std::int64_t B = require_field(root, "B", "").as_integer();
    if (B < 19) throw Error(ErrorCode::InvalidSpec, "B must be >= 19");
    spec.B = static_cast<int>(B);
    spec.alpha = require_field(root, "alpha", "").as_float();
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
        throw Error(ErrorCode::InvalidSpec, "alpha must lie strictly inside (0, 1)",
                    spec.alpha);
    }

    spec.scheme_kind = parse_scheme_kind(require_field(root, "scheme", "").as_string());
    if (const auto it = root.find("block_rule"); it != root.end()) {
        spec.block_rule = parse_block_rule(it->second.as_string());
    }
    if (const auto it = root.find("weight_law"); it != root.end()) {
        spec.weight_law = parse_weight_law(it->second.as_string());
    }
    if (const auto it = root.find("sbic_p_max"); it != root.end()) {
        const std::int64_t pm = it->second.as_integer();
        if (pm < 1) throw Error(ErrorCode::InvalidSpec, "sbic_p_max must be >= 1");
        spec.sbic_p_max = static_cast<int>(pm);
    }

    for (const toml::Value& e : require_field(root, "estimators", "").as_array()) {
        spec.estimators.push_back(parse_estimator(e.as_string()));
    }
    if (spec.estimators.empty()) {
        throw Error(ErrorCode::InvalidSpec, "estimators must be non-empty");
    }
    for (const toml::Value& r : require_field(root, "lag_rules", "").as_array()) {
        spec.lag_rules.push_back(parse_lag_rule(r.as_string()));
    }
    if (spec.lag_rules.empty()) {
        throw Error(ErrorCode::InvalidSpec, "lag_rules must be non-empty");
    }

    spec.designs = parse_dgp(require_field(root, "dgp", "").as_table());

    const bool has_gbf = std::any_of(spec.designs.begin(), spec.designs.end(),
                                     [](const DesignSpec& d) { return d.family == "ma-gbf"; });
    const bool wants_true_order =
        std::any_of(spec.lag_rules.begin(), spec.lag_rules.end(),
                    [](const LagRule& r) { return r.kind == LagRule::Kind::TrueOrder; });
    if (has_gbf && wants_true_order) {
        throw Error(ErrorCode::InvalidSpec,
                    "true-order lag rule is undefined for ma-gbf designs");
    }
    return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) {
        throw Error(ErrorCode::IoFailure, "cannot read spec file " + file.string());
    }
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_experiment_spec(buf.str());
}

namespace {

struct CellPlan {
    int ordinal = 0;
    int design = 0;
    int T = 0;
    int rule = 0;
    int estimator = 0;
    int h = 0;
};

struct RepRecord {
    bool failed = false;
    std::string error;
    int p = 0;
    double truth = 0.0;
    double point = 0.0;
    double lo_t = 0.0;
    double hi_t = 0.0;
    double lo_efron = 0.0;
    double hi_efron = 0.0;
    double boot_mean = 0.0;
    double rel_length = 0.0;
    bool degenerate = false;
    bool covered = false;
    int n_boot_failures = 0;
    int n_explosive = 0;
    bool fallback = false;
    std::vector<double> irf;
};

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LPMA_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

int resolve_lag_order(const ExperimentSpec& spec, const DesignSpec& design,
                      const LagRule& rule, const TimeSeries& y) {
    switch (rule.kind) {
        case LagRule::Kind::Fixed:
            return rule.fixed_p;
        case LagRule::Kind::TrueOrder:
            return design.family == "ar1" ? 1 : design.arp_order;
        case LagRule::Kind::Sbic: {
            const int p_max = spec.sbic_p_max > 0
                                  ? spec.sbic_p_max
                                  : default_sbic_p_max(static_cast<int>(y.size()));
            return select_lag_sbic(y, p_max);
        }
    }
    throw Error(ErrorCode::InvalidSpec, "unhandled lag rule");
}

RepRecord run_one_rep(const ExperimentSpec& spec, const CellPlan& plan, int rep, int B_eff) {
    RepRecord rec;
    const DesignSpec& design = spec.designs[static_cast<std::size_t>(plan.design)];
    const auto key = [&](std::uint64_t purpose) {
        return RngStream::derive_seed(spec.root_seed,
                                      {static_cast<std::uint64_t>(plan.ordinal),
                                       static_cast<std::uint64_t>(rep), purpose});
    };
    try {
        RngStream sim_rng{key(1)};
        TimeSeries y;
        if (design.family == "ar1") {
            y = simulate_ar1(design.ar1, plan.T, sim_rng);
            rec.truth = true_irf(design.ar1, plan.h).values[static_cast<std::size_t>(plan.h)];
        } else if (design.family == "arp") {
            RngStream coef_rng{key(0)};
            const ArpSpec drawn = draw_arp_coefficients(design.arp_order, design.arp_band_lo,
                                                        design.arp_band_hi, coef_rng);
            y = simulate_arp(drawn, plan.T, sim_rng);
            rec.truth = true_irf(drawn, plan.h).values[static_cast<std::size_t>(plan.h)];
        } else {
            y = simulate_ma_gbf(design.gbf, plan.T, sim_rng);
            rec.truth = true_irf(design.gbf, plan.h).values[static_cast<std::size_t>(plan.h)];
        }

        const LagRule& rule = spec.lag_rules[static_cast<std::size_t>(plan.rule)];
        rec.p = resolve_lag_order(spec, design, rule, y);

        const EstimatorKind est = spec.estimators[static_cast<std::size_t>(plan.estimator)];
        BootPipelineConfig cfg;
        cfg.B = B_eff;
        cfg.alpha = spec.alpha;
        cfg.n_threads = 1;
        const bool lp_estimator =
            est == EstimatorKind::LpMethod1 || est == EstimatorKind::LpMethod2;
        if (lp_estimator) {
            cfg.scheme = ResampleScheme{spec.scheme_kind,
                                        default_block_length(plan.h, spec.block_rule),
                                        spec.weight_law};
            cfg.method = est == EstimatorKind::LpMethod2 ? 2 : 1;
        } else {
            cfg.scheme = ResampleScheme{SchemeKind::Iid, 1, spec.weight_law};
        }

        const std::uint64_t boot_root = key(2);
        BootstrapResult rb;
        if (lp_estimator) {
            rb = run_lp_bootstrap(y, rec.p, plan.h, cfg, boot_root);
        } else if (est == EstimatorKind::VarMa) {
            rb = run_var_ma_bootstrap(y, rec.p, plan.h, cfg, boot_root);
        } else {
            rb = run_ar_benchmark(y, rec.p, plan.h, cfg, boot_root);
        }

        const HorizonSummary& hs = rb.horizons[static_cast<std::size_t>(plan.h) - 1];
        rec.point = hs.point;
        rec.lo_t = hs.lo_t;
        rec.hi_t = hs.hi_t;
        rec.lo_efron = hs.lo_efron;
        rec.hi_efron = hs.hi_efron;
        rec.boot_mean = hs.boot_mean;
        rec.covered = Interval{hs.lo_t, hs.hi_t}.covers(rec.truth);
        rec.n_boot_failures = rb.n_failures;
        rec.n_explosive = rb.n_explosive;
        rec.fallback = rb.method2_fallback;

        rec.irf.reserve(static_cast<std::size_t>(plan.h) + 1);
        rec.irf.push_back(1.0);
        for (const HorizonSummary& s : rb.horizons) rec.irf.push_back(s.point);
        const auto [mn, mx] = std::minmax_element(rec.irf.begin(), rec.irf.end());
        const double range = *mx - *mn;
        if (range > 0.0) {
            rec.rel_length = (rec.hi_t - rec.lo_t) / range;
        } else {
            rec.degenerate = true;
        }
    } catch (const Error& e) {
        rec.failed = true;
        rec.error = error_code_name(e.code());
    } catch (const std::exception&) {
        rec.failed = true;
        rec.error = error_code_name(ErrorCode::PipelineFailure);
    }
    return rec;
}

void write_raw_records(std::ostream& os, const ExperimentSpec& spec,
                       const std::vector<CellPlan>& cells,
                       const std::vector<RepRecord>& records) {
    os << "design,dgp,T,lag_rule,method,scheme,h,rep,p,failed,error,truth,point,"
          "lo_t,hi_t,lo_efron,hi_efron,boot_mean,covered,rel_length,degenerate,"
          "n_boot_failures,n_explosive,method2_fallback\n";
    for (const CellPlan& plan : cells) {
        const DesignSpec& design = spec.designs[static_cast<std::size_t>(plan.design)];
        const EstimatorKind est = spec.estimators[static_cast<std::size_t>(plan.estimator)];
        const bool lp_estimator =
            est == EstimatorKind::LpMethod1 || est == EstimatorKind::LpMethod2;
        const char* scheme =
            lp_estimator ? scheme_kind_name(spec.scheme_kind) : scheme_kind_name(SchemeKind::Iid);
        const std::string rule =
            lag_rule_name(spec.lag_rules[static_cast<std::size_t>(plan.rule)]);
        for (int rep = 0; rep < spec.mc_reps; ++rep) {
            const RepRecord& rec =
                records[static_cast<std::size_t>(plan.ordinal) *
                            static_cast<std::size_t>(spec.mc_reps) +
                        static_cast<std::size_t>(rep)];
            os << design.label << ',' << design.family << ',' << plan.T << ',' << rule << ','
               << estimator_name(est) << ',' << scheme << ',' << plan.h << ',' << rep << ','
               << rec.p << ',' << (rec.failed ? 1 : 0) << ',' << rec.error << ',';
            if (rec.failed) {
                os << ",,,,,,,0,,0,0,0,0\n";
                continue;
            }
            os << format_g6(rec.truth) << ',' << format_g6(rec.point) << ','
               << format_g6(rec.lo_t) << ',' << format_g6(rec.hi_t) << ','
               << format_g6(rec.lo_efron) << ',' << format_g6(rec.hi_efron) << ','
               << format_g6(rec.boot_mean) << ',' << (rec.covered ? 1 : 0) << ','
               << (rec.degenerate ? std::string() : format_g6(rec.rel_length)) << ','
               << (rec.degenerate ? 1 : 0) << ',' << rec.n_boot_failures << ','
               << rec.n_explosive << ',' << (rec.fallback ? 1 : 0) << "\n";
        }
    }
}

}  // namespace

RunReport run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                         const RunOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const int B_eff = opts.paper_scale ? std::max(spec.B, 999) : spec.B;
    const int workers = resolve_workers(opts.workers);

    std::vector<CellPlan> cells;
    for (int d = 0; d < static_cast<int>(spec.designs.size()); ++d) {
        for (int T : spec.sample_sizes) {
            for (int r = 0; r < static_cast<int>(spec.lag_rules.size()); ++r) {
                for (int e = 0; e < static_cast<int>(spec.estimators.size()); ++e) {
                    for (int h : spec.horizons) {
                        CellPlan plan;
                        plan.ordinal = static_cast<int>(cells.size());
                        plan.design = d;
                        plan.T = T;
                        plan.rule = r;
                        plan.estimator = e;
                        plan.h = h;
                        cells.push_back(plan);
                    }
                }
            }
        }
    }

    const std::size_t total =
        cells.size() * static_cast<std::size_t>(spec.mc_reps);
    std::vector<RepRecord> records(total);
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) break;
            const std::size_t cell = i / static_cast<std::size_t>(spec.mc_reps);
            const int rep = static_cast<int>(i % static_cast<std::size_t>(spec.mc_reps));
            records[i] = run_one_rep(spec, cells[cell], rep, B_eff);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    RunReport report;
    report.cells_total = static_cast<int>(cells.size());

    std::vector<McCell> table;
    table.reserve(cells.size());
    for (const CellPlan& plan : cells) {
        const DesignSpec& design = spec.designs[static_cast<std::size_t>(plan.design)];
        const EstimatorKind est = spec.estimators[static_cast<std::size_t>(plan.estimator)];
        const bool lp_estimator =
            est == EstimatorKind::LpMethod1 || est == EstimatorKind::LpMethod2;
        McCell cell;
        cell.design = design.label;
        cell.dgp = design.family;
        cell.T = plan.T;
        cell.lag_rule = lag_rule_name(spec.lag_rules[static_cast<std::size_t>(plan.rule)]);
        cell.method = estimator_name(est);
        cell.scheme = lp_estimator ? scheme_kind_name(spec.scheme_kind)
                                   : scheme_kind_name(SchemeKind::Iid);
        cell.h = plan.h;

        std::vector<Interval> intervals;
        std::vector<double> truths;
        std::vector<double> boot_means;
        std::vector<std::vector<double>> irfs;
        for (int rep = 0; rep < spec.mc_reps; ++rep) {
            const RepRecord& rec =
                records[static_cast<std::size_t>(plan.ordinal) *
                            static_cast<std::size_t>(spec.mc_reps) +
                        static_cast<std::size_t>(rep)];
            if (rec.failed) {
                ++report.records_failed;
                continue;
            }
            intervals.push_back(Interval{rec.lo_t, rec.hi_t});
            truths.push_back(rec.truth);
            boot_means.push_back(rec.boot_mean);
            irfs.push_back(rec.irf);
        }
        cell.n_reps = static_cast<int>(intervals.size());
        if (intervals.empty()) {
            ++report.cells_failed;
        } else {
            cell.coverage = coverage(intervals, truths);
            int n_degenerate = 0;
            cell.median_rel_length = median_rel_length(intervals, irfs, &n_degenerate);
            cell.n_degenerate = n_degenerate;
            cell.mean_abs_bias = mean_abs_bias(boot_means, truths);
        }
        table.push_back(std::move(cell));
    }
    report.cells = assemble_table(std::move(table));

    std::filesystem::create_directories(out_dir);
    const auto open_out = [&](const char* leaf) {
        std::ofstream os(out_dir / leaf);
        if (!os) {
            throw Error(ErrorCode::IoFailure,
                        "cannot write " + (out_dir / leaf).string());
        }
        return os;
    };
    {
        std::ofstream os = open_out("metrics.csv");
        write_metrics_csv(os, report.cells);
    }
    {
        std::ofstream os = open_out("metrics.json");
        os << metrics_to_json(report.cells, 2) << "\n";
    }
    {
        std::ofstream os = open_out("raw_records.csv");
        write_raw_records(os, spec, cells, records);
    }

    const auto t1 = std::chrono::steady_clock::now();
    report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    report.out_dir = out_dir;

    {
        nlohmann::ordered_json manifest;
        manifest["name"] = spec.name;
        manifest["tool_version"] = kVersion;
        manifest["root_seed"] = spec.root_seed;
        manifest["workers"] = workers;
        manifest["B"] = B_eff;
        manifest["mc_reps"] = spec.mc_reps;
        manifest["alpha"] = spec.alpha;
        manifest["n_designs"] = spec.designs.size();
        manifest["n_cells"] = report.cells_total;
        manifest["n_records"] = total;
        manifest["records_failed"] = report.records_failed;
        manifest["cells_failed"] = report.cells_failed;
        manifest["seed_scheme"] = "splitmix64 chain over (root_seed, cell, rep, purpose)";
        manifest["outputs"] = {"metrics.csv", "metrics.json", "raw_records.csv"};
        manifest["wall_clock_seconds"] = report.wall_seconds;
        std::ofstream os = open_out("run_manifest.json");
        os << manifest.dump(2) << "\n";
    }
    return report;
}

InferReport run_infer(const InferRequest& req) {
    if (req.H < 0) throw Error(ErrorCode::InvalidInput, "H must be non-negative");
    if (req.method != 1 && req.method != 2) {
        throw Error(ErrorCode::InvalidSpec, "method must be 1 or 2",
                    static_cast<double>(req.method));
    }
    const int T = static_cast<int>(req.y.size());

    int p = 0;
    switch (req.rule.kind) {
        case LagRule::Kind::Fixed:
            p = req.rule.fixed_p;
            break;
        case LagRule::Kind::Sbic:
            p = select_lag_sbic(req.y, default_sbic_p_max(T));
            break;
        case LagRule::Kind::TrueOrder:
            throw Error(ErrorCode::InvalidSpec,
                        "true-order lag rule needs a known generating process");
    }
    if (T <= p + req.H + 10) {
        throw Error(ErrorCode::InsufficientSample,
                    "need more than p + H + 10 observations", static_cast<double>(T));
    }

    InferReport report;
    report.p = p;
    if (req.H == 0) {
        report.result.estimator = req.method == 2 ? "lp-method2" : "lp-method1";
        report.result.p = p;
        report.result.H = 0;
        report.result.alpha = req.alpha;
        return report;
    }

    BootPipelineConfig cfg;
    cfg.B = req.B;
    cfg.alpha = req.alpha;
    cfg.method = req.method;
    cfg.n_threads = req.threads;
    cfg.scheme = ResampleScheme{req.scheme_kind,
                                default_block_length(req.H, req.block_rule),
                                req.weight_law};
    report.result = run_lp_bootstrap(req.y, p, req.H, cfg, req.seed);
    return report;
}

std::vector<double> read_csv_column(const std::filesystem::path& file,
                                    const std::string& column) {
    std::ifstream is(file);
    if (!is) throw Error(ErrorCode::IoFailure, "cannot read " + file.string());
    std::string line;
    if (!std::getline(is, line)) {
        throw Error(ErrorCode::InvalidInput, "empty CSV file " + file.string());
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto split = [](const std::string& row) {
        std::vector<std::string> out;
        std::string field;
        std::stringstream ss(row);
        while (std::getline(ss, field, ',')) out.push_back(field);
        if (!row.empty() && row.back() == ',') out.emplace_back();
        return out;
    };
    const std::vector<std::string> header = split(line);
    const auto col_it = std::find(header.begin(), header.end(), column);
    if (col_it == header.end()) {
        throw Error(ErrorCode::InvalidInput, "column '" + column + "' not found");
    }
    const std::size_t idx = static_cast<std::size_t>(col_it - header.begin());

    std::vector<double> values;
    int row_no = 1;
    while (std::getline(is, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line);
        if (idx >= fields.size()) {
            throw Error(ErrorCode::InvalidInput,
                        "row " + std::to_string(row_no) + " lacks column '" + column + "'");
        }
        const std::string& cell = fields[idx];
        try {
            std::size_t pos = 0;
            const double v = std::stod(cell, &pos);
            if (pos != cell.size()) throw std::invalid_argument(cell);
            values.push_back(v);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidInput, "non-numeric value '" + cell + "' in row " +
                                                     std::to_string(row_no));
        }
    }
    return values;
}

std::string plot_data_irf_band(const std::string& result_json) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(result_json);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("bad result JSON: ") + e.what());
    }
    if (!j.contains("records") || !j["records"].is_array()) {
        throw Error(ErrorCode::InvalidInput, "result JSON lacks a records array");
    }
    std::ostringstream os;
    os << "horizon,point,lo,hi\n";
    try {
        for (const auto& r : j["records"]) {
            os << r.at("horizon").get<int>() << ',' << format_g6(r.at("point").get<double>())
               << ',' << format_g6(r.at("lo_t").get<double>()) << ','
               << format_g6(r.at("hi_t").get<double>()) << "\n";
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("bad result record: ") + e.what());
    }
    return os.str();
}

std::string plot_data_coverage_bars(const std::string& metrics_json) {
    const std::vector<McCell> cells = metrics_from_json(metrics_json);
    if (cells.empty()) throw Error(ErrorCode::InvalidInput, "metrics JSON has no cells");

    using Key = std::tuple<std::string, std::string, int, std::string, std::string>;
    std::vector<Key> order;
    std::map<Key, const McCell*> best;
    for (const McCell& c : cells) {
        const Key key{c.design, c.dgp, c.T, c.lag_rule, c.method};
        const auto it = best.find(key);
        if (it == best.end()) {
            order.push_back(key);
            best[key] = &c;
        } else if (c.h > it->second->h) {
            it->second = &c;
        }
    }
    std::ostringstream os;
    os << "design,dgp,T,lag_rule,method,h,coverage\n";
    for (const Key& key : order) {
        const McCell& c = *best.at(key);
        os << c.design << ',' << c.dgp << ',' << c.T << ',' << c.lag_rule << ',' << c.method
           << ',' << c.h << ',' << format_g6(c.coverage) << "\n";
    }
    return os.str();
}

}  // namespace lpma
