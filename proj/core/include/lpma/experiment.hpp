#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lpma/dgp.hpp"
#include "lpma/mabootstrap.hpp"
#include "lpma/metrics.hpp"
#include "lpma/resample.hpp"

namespace lpma {

/// Interval estimator run per table cell.
enum class EstimatorKind { LpMethod1, LpMethod2, VarMa, ArBenchmark };

[[nodiscard]] const char* estimator_name(EstimatorKind kind);

/// Lag-order rule: SBIC selection, a fixed order, or the generating order.
struct LagRule {
    enum class Kind { Sbic, Fixed, TrueOrder };
    Kind kind = Kind::Sbic;
    int fixed_p = 0;
};

[[nodiscard]] std::string lag_rule_name(const LagRule& rule);

/// @brief Parse "sbic", "true-order", or "fixed:K".
/// @throws Error{InvalidSpec} otherwise.
[[nodiscard]] LagRule parse_lag_rule(const std::string& text);

/// One concrete data-generating design of an experiment.
struct DesignSpec {
    std::string label;
    std::string family;  ///< "ar1" | "arp" | "ma-gbf"
    Ar1Spec ar1{};
    int arp_order = 0;   ///< AR(p) designs draw coefficients per replication
    double arp_band_lo = 0.0;
    double arp_band_hi = 0.0;
    GbfSpec gbf{};
};

/// Parsed and validated experiment configuration.
struct ExperimentSpec {
    std::string name;
    std::uint64_t root_seed = 1;
    std::vector<DesignSpec> designs;
    std::vector<int> sample_sizes;
    int H = 0;                      ///< cap; every reported horizon is <= H
    std::vector<int> horizons;
    std::vector<LagRule> lag_rules;
    std::vector<EstimatorKind> estimators;
    SchemeKind scheme_kind = SchemeKind::BlockWild;
    WeightLaw weight_law = WeightLaw::Rademacher;
    BlockRule block_rule = BlockRule::FullH;
    int B = 199;
    int mc_reps = 100;
    double alpha = 0.10;
    int sbic_p_max = 0;             ///< 0 resolves to floor(12 (T/100)^(1/4))
};

/// @brief Parse an experiment spec from TOML text; unknown fields are rejected.
/// @throws Error{InvalidSpec} naming the offending field or line.
[[nodiscard]] ExperimentSpec parse_experiment_spec(const std::string& text);

/// @brief Load and parse a spec file. @throws Error{IoFailure} when unreadable.
[[nodiscard]] ExperimentSpec load_experiment_spec(const std::filesystem::path& file);

/// Execution options of a Monte Carlo run.
struct RunOptions {
    int workers = 0;          ///< 0: LPMA_WORKERS env var, then hardware concurrency
    bool paper_scale = false; ///< raise B to at least 999
};

/// Outcome of a Monte Carlo run.
struct RunReport {
    int cells_total = 0;
    int cells_failed = 0;     ///< cells with zero surviving replications
    int records_failed = 0;
    double wall_seconds = 0.0;
    std::filesystem::path out_dir;
    std::vector<McCell> cells;
};

/// @brief Run the full Monte Carlo grid and write metrics.csv, metrics.json,
/// raw_records.csv, and run_manifest.json into out_dir.
///
/// Each (cell, replication) simulates its own series and runs its own bootstrap
/// with the cap set to the cell's reported horizon; seeds derive from
/// (root_seed, cell ordinal, replication, purpose), so every output except the
/// timing fields of the manifest is byte-identical for any worker count.
RunReport run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                         const RunOptions& opts);

/// One-shot inference request on observed data.
struct InferRequest {
    std::vector<double> y;
    LagRule rule{};
    int H = 12;
    int method = 1;
    SchemeKind scheme_kind = SchemeKind::BlockWild;
    BlockRule block_rule = BlockRule::FullH;
    WeightLaw weight_law = WeightLaw::Rademacher;
    int B = 999;
    double alpha = 0.10;
    int threads = 1;
    std::uint64_t seed = 1;
};

/// Inference outcome: the resolved lag order and the bootstrap result.
struct InferReport {
    int p = 0;
    BootstrapResult result;
};

/// @brief Run LP bootstrap inference on observed data.
///
/// H = 0 short-circuits to the trivial horizon-0 record.
/// @throws Error{InsufficientSample} unless y.size() > p + H + 10.
[[nodiscard]] InferReport run_infer(const InferRequest& req);

/// @brief Read one numeric column from a CSV file with a header row.
/// @throws Error{IoFailure} on unreadable files, Error{InvalidInput} on a missing
/// column or non-numeric cell.
[[nodiscard]] std::vector<double> read_csv_column(const std::filesystem::path& file,
                                                  const std::string& column);

/// @brief Plot-ready band data from an inference result JSON:
/// "horizon,point,lo,hi" rows for h = 0..H.
[[nodiscard]] std::string plot_data_irf_band(const std::string& result_json);

/// @brief Plot-ready coverage bars from a metrics JSON: one row per
/// (design, T, lag rule, method) at its largest reported horizon.
[[nodiscard]] std::string plot_data_coverage_bars(const std::string& metrics_json);

}  // namespace lpma
