#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lpma/mabootstrap.hpp"

namespace lpma {

/// One aggregated Monte Carlo table cell.
struct McCell {
    std::string design;    ///< design label, e.g. "ar1-phi0.95"
    std::string dgp;       ///< family name: "ar1" | "arp" | "ma-gbf"
    int T = 0;
    std::string lag_rule;  ///< "sbic" | "fixed:K" | "true-order"
    std::string method;    ///< "lp-method1" | "lp-method2" | "var-ma" | "ar-benchmark"
    std::string scheme;    ///< "iid" | "wild" | "bwb" | "bb"
    int h = 0;
    double coverage = 0.0;
    double median_rel_length = 0.0;
    double mean_abs_bias = 0.0;
    int n_reps = 0;
    int n_degenerate = 0;
};

/// @brief Share of closed intervals covering the truth (scalar or per-rep truths).
[[nodiscard]] double coverage(std::span<const Interval> intervals, double truth);
[[nodiscard]] double coverage(std::span<const Interval> intervals,
                              std::span<const double> truths);

/// @brief Median over reps of interval width divided by the range of that rep's
/// estimated impulse response; reps whose response has zero range are excluded
/// and counted into n_degenerate when given.
[[nodiscard]] double median_rel_length(std::span<const Interval> intervals,
                                       std::span<const std::vector<double>> irf_estimates,
                                       int* n_degenerate = nullptr);

/// @brief Mean absolute deviation of the bootstrap means from the truth.
[[nodiscard]] double mean_abs_bias(std::span<const double> boot_means, double truth);
[[nodiscard]] double mean_abs_bias(std::span<const double> boot_means,
                                   std::span<const double> truths);

/// @brief Validate cell-grid completeness and return the cells in canonical order.
///
/// Every combination of (design, T, lag rule, method) must report the same
/// horizon set.
/// @throws Error{IncompleteGrid} naming a missing combination otherwise.
[[nodiscard]] std::vector<McCell> assemble_table(std::vector<McCell> cells);

/// @brief Write cells as CSV with a fixed header; floats use "%.6g".
void write_metrics_csv(std::ostream& os, std::span<const McCell> cells);

/// @brief Parse CSV produced by write_metrics_csv.
/// @throws Error{InvalidInput} on malformed rows or a wrong header.
[[nodiscard]] std::vector<McCell> read_metrics_csv(std::istream& is);

/// @brief JSON mirror of the CSV table.
[[nodiscard]] std::string metrics_to_json(std::span<const McCell> cells, int indent = 2);
[[nodiscard]] std::vector<McCell> metrics_from_json(const std::string& text);

/// @brief Render a double with "%.6g", the float format of every CSV emitter.
[[nodiscard]] std::string format_g6(double v);

}  // namespace lpma
