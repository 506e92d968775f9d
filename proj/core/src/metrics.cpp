#include "lpma/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "lpma/errors.hpp"

namespace lpma {

double coverage(std::span<const Interval> intervals, double truth) {
    if (intervals.empty()) throw Error(ErrorCode::InvalidInput, "no intervals");
    int hits = 0;
    for (const Interval& iv : intervals) hits += iv.covers(truth) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(intervals.size());
}

double coverage(std::span<const Interval> intervals, std::span<const double> truths) {
    if (intervals.empty()) throw Error(ErrorCode::InvalidInput, "no intervals");
    if (intervals.size() != truths.size()) {
        throw Error(ErrorCode::InvalidInput, "interval and truth counts differ");
    }
    int hits = 0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        hits += intervals[i].covers(truths[i]) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(intervals.size());
}

double median_rel_length(std::span<const Interval> intervals,
                         std::span<const std::vector<double>> irf_estimates,
                         int* n_degenerate) {
    if (intervals.size() != irf_estimates.size()) {
        throw Error(ErrorCode::InvalidInput, "interval and response counts differ");
    }
    std::vector<double> ratios;
    ratios.reserve(intervals.size());
    int degenerate = 0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const std::vector<double>& irf = irf_estimates[i];
        if (irf.empty()) {
            ++degenerate;
            continue;
        }
        const auto [mn, mx] = std::minmax_element(irf.begin(), irf.end());
        const double range = *mx - *mn;
        if (!(range > 0.0)) {
            ++degenerate;
            continue;
        }
        ratios.push_back(intervals[i].width() / range);
    }
    if (n_degenerate != nullptr) *n_degenerate = degenerate;
    if (ratios.empty()) return 0.0;
    std::sort(ratios.begin(), ratios.end());
    const std::size_t n = ratios.size();
    if (n % 2 == 1) return ratios[n / 2];
    return 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
}

double mean_abs_bias(std::span<const double> boot_means, double truth) {
    if (boot_means.empty()) throw Error(ErrorCode::InvalidInput, "no bootstrap means");
    double acc = 0.0;
    for (double m : boot_means) acc += std::abs(truth - m);
    return acc / static_cast<double>(boot_means.size());
}

double mean_abs_bias(std::span<const double> boot_means, std::span<const double> truths) {
    if (boot_means.empty()) throw Error(ErrorCode::InvalidInput, "no bootstrap means");
    if (boot_means.size() != truths.size()) {
        throw Error(ErrorCode::InvalidInput, "mean and truth counts differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < boot_means.size(); ++i) acc += std::abs(truths[i] - boot_means[i]);
    return acc / static_cast<double>(boot_means.size());
}

namespace {

using CellKey = std::tuple<std::string, std::string, int, std::string, std::string, std::string>;

CellKey group_key(const McCell& c) {
    return {c.design, c.dgp, c.T, c.lag_rule, c.method, c.scheme};
}

}  // namespace

std::vector<McCell> assemble_table(std::vector<McCell> cells) {
    if (cells.empty()) throw Error(ErrorCode::IncompleteGrid, "empty metrics table");

    std::map<CellKey, std::set<int>> horizons_by_group;
    std::set<int> all_horizons;
    for (const McCell& c : cells) {
        auto [it, inserted] = horizons_by_group[group_key(c)].insert(c.h);
        if (!inserted) {
            throw Error(ErrorCode::IncompleteGrid,
                        "duplicate cell for " + c.design + " T=" + std::to_string(c.T) +
                            " " + c.lag_rule + " " + c.method + " h=" + std::to_string(c.h));
        }
        all_horizons.insert(c.h);
    }
    for (const auto& [key, hs] : horizons_by_group) {
        if (hs != all_horizons) {
            for (int h : all_horizons) {
                if (!hs.contains(h)) {
                    throw Error(ErrorCode::IncompleteGrid,
                                "missing horizon " + std::to_string(h) + " for " +
                                    std::get<0>(key) + " T=" + std::to_string(std::get<2>(key)) +
                                    " " + std::get<3>(key) + " " + std::get<4>(key));
                }
            }
        }
    }

    std::sort(cells.begin(), cells.end(), [](const McCell& a, const McCell& b) {
        return std::tie(a.design, a.dgp, a.T, a.lag_rule, a.method, a.scheme, a.h) <
               std::tie(b.design, b.dgp, b.T, b.lag_rule, b.method, b.scheme, b.h);
    });
    return cells;
}

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

namespace {

constexpr const char* kMetricsHeader =
    "design,dgp,T,lag_rule,method,scheme,h,coverage,median_rel_length,mean_abs_bias,"
    "n_reps,n_degenerate";

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw Error(ErrorCode::InvalidInput, "malformed number: " + s);
    return v;
}

int parse_int(const std::string& s) {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw Error(ErrorCode::InvalidInput, "malformed integer: " + s);
    return v;
}

}  // namespace

void write_metrics_csv(std::ostream& os, std::span<const McCell> cells) {
    os << kMetricsHeader << "\n";
    for (const McCell& c : cells) {
        os << c.design << ',' << c.dgp << ',' << c.T << ',' << c.lag_rule << ',' << c.method
           << ',' << c.scheme << ',' << c.h << ',' << format_g6(c.coverage) << ','
           << format_g6(c.median_rel_length) << ',' << format_g6(c.mean_abs_bias) << ','
           << c.n_reps << ',' << c.n_degenerate << "\n";
    }
}

std::vector<McCell> read_metrics_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::InvalidInput, "empty metrics CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kMetricsHeader) {
        throw Error(ErrorCode::InvalidInput, "unexpected metrics CSV header: " + line);
    }
    std::vector<McCell> cells;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_row(line);
        if (f.size() != 12) {
            throw Error(ErrorCode::InvalidInput, "metrics CSV row has wrong arity: " + line);
        }
        McCell c;
        c.design = f[0];
        c.dgp = f[1];
        c.T = parse_int(f[2]);
        c.lag_rule = f[3];
        c.method = f[4];
        c.scheme = f[5];
        c.h = parse_int(f[6]);
        c.coverage = parse_double(f[7]);
        c.median_rel_length = parse_double(f[8]);
        c.mean_abs_bias = parse_double(f[9]);
        c.n_reps = parse_int(f[10]);
        c.n_degenerate = parse_int(f[11]);
        cells.push_back(std::move(c));
    }
    return cells;
}

std::string metrics_to_json(std::span<const McCell> cells, int indent) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const McCell& c : cells) {
        nlohmann::ordered_json j;
        j["design"] = c.design;
        j["dgp"] = c.dgp;
        j["T"] = c.T;
        j["lag_rule"] = c.lag_rule;
        j["method"] = c.method;
        j["scheme"] = c.scheme;
        j["h"] = c.h;
        j["coverage"] = c.coverage;
        j["median_rel_length"] = c.median_rel_length;
        j["mean_abs_bias"] = c.mean_abs_bias;
        j["n_reps"] = c.n_reps;
        j["n_degenerate"] = c.n_degenerate;
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json root;
    root["cells"] = std::move(arr);
    return root.dump(indent);
}

std::vector<McCell> metrics_from_json(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("bad metrics JSON: ") + e.what());
    }
    if (!root.contains("cells") || !root["cells"].is_array()) {
        throw Error(ErrorCode::InvalidInput, "metrics JSON lacks a cells array");
    }
    std::vector<McCell> cells;
    for (const auto& j : root["cells"]) {
        try {
            McCell c;
            c.design = j.at("design").get<std::string>();
            c.dgp = j.at("dgp").get<std::string>();
            c.T = j.at("T").get<int>();
            c.lag_rule = j.at("lag_rule").get<std::string>();
            c.method = j.at("method").get<std::string>();
            c.scheme = j.at("scheme").get<std::string>();
            c.h = j.at("h").get<int>();
            c.coverage = j.at("coverage").get<double>();
            c.median_rel_length = j.at("median_rel_length").get<double>();
            c.mean_abs_bias = j.at("mean_abs_bias").get<double>();
            c.n_reps = j.at("n_reps").get<int>();
            c.n_degenerate = j.at("n_degenerate").get<int>();
            cells.push_back(std::move(c));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidInput, std::string("bad metrics cell: ") + e.what());
        }
    }
    return cells;
}

}  // namespace lpma
