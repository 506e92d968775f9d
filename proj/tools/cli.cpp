#include "cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "lpma/errors.hpp"
#include "lpma/experiment.hpp"
#include "lpma/mabootstrap.hpp"
#include "lpma/metrics.hpp"
#include "lpma/version.hpp"

namespace lpma::cli {

namespace {

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidSpec:
        case ErrorCode::InvalidInput:
        case ErrorCode::InsufficientSample:
        case ErrorCode::SingularDesign:
        case ErrorCode::InfeasibleBand:
        case ErrorCode::IoFailure:
            return 2;
        case ErrorCode::DegenerateExtension:
        case ErrorCode::NumericalCovariance:
        case ErrorCode::PipelineFailure:
        case ErrorCode::IncompleteGrid:
            return 3;
    }
    return 3;
}

struct RunArgs {
    std::string spec_path;
    std::string out_dir;
    int workers = 0;
    bool paper_scale = false;
};

struct InferArgs {
    std::string csv_path;
    std::string column;
    std::string p_rule = "sbic";
    int H = 12;
    int method = 1;
    std::string scheme = "bwb";
    std::string block_rule = "H";
    std::string weight_law = "rademacher";
    int B = 999;
    double alpha = 0.10;
    int threads = 1;
    std::uint64_t seed = 1;
    std::string out_path;
};

struct PlotArgs {
    std::string input_path;
    std::string kind;
    std::string out_path;
};

int do_run(const RunArgs& a) {
    const ExperimentSpec spec = load_experiment_spec(a.spec_path);
    RunOptions opts;
    opts.workers = a.workers;
    opts.paper_scale = a.paper_scale;
    const RunReport report = run_experiment(spec, a.out_dir, opts);
    std::cout << "experiment " << spec.name << ": " << report.cells_total << " cells, "
              << report.records_failed << " failed replications, " << report.cells_failed
              << " failed cells, " << format_g6(report.wall_seconds) << "s\n";
    std::cout << "wrote " << (report.out_dir / "metrics.csv").string() << "\n";
    return report.cells_failed > 0 ? 3 : 0;
}

int do_infer(const InferArgs& a) {
    InferRequest req;
    req.y = read_csv_column(a.csv_path, a.column);
    if (a.p_rule == "sbic") {
        req.rule = LagRule{LagRule::Kind::Sbic, 0};
    } else {
        int p = 0;
        try {
            std::size_t pos = 0;
            p = std::stoi(a.p_rule, &pos);
            if (pos != a.p_rule.size()) p = 0;
        } catch (const std::exception&) {
            p = 0;
        }
        if (p < 1) {
            throw Error(ErrorCode::InvalidSpec,
                        "--p expects 'sbic' or a positive lag order, got '" + a.p_rule + "'");
        }
        req.rule = LagRule{LagRule::Kind::Fixed, p};
    }
    if (a.H < 0) throw Error(ErrorCode::InvalidSpec, "--H must be non-negative");
    req.H = a.H;
    req.method = a.method;
    req.scheme_kind = [&] {
        if (a.scheme == "iid") return SchemeKind::Iid;
        if (a.scheme == "wild") return SchemeKind::Wild;
        if (a.scheme == "bwb") return SchemeKind::BlockWild;
        if (a.scheme == "bb") return SchemeKind::Block;
        throw Error(ErrorCode::InvalidSpec, "unknown scheme '" + a.scheme + "'");
    }();
    req.block_rule = [&] {
        if (a.block_rule == "H") return BlockRule::FullH;
        if (a.block_rule == "1.5H") return BlockRule::OneAndHalfH;
        throw Error(ErrorCode::InvalidSpec, "unknown block rule '" + a.block_rule + "'");
    }();
    req.weight_law = [&] {
        if (a.weight_law == "rademacher") return WeightLaw::Rademacher;
        if (a.weight_law == "normal") return WeightLaw::StandardNormal;
        throw Error(ErrorCode::InvalidSpec, "unknown weight law '" + a.weight_law + "'");
    }();
    req.B = a.B;
    req.alpha = a.alpha;
    req.threads = a.threads;
    req.seed = a.seed;

    const InferReport report = run_infer(req);
    const std::string json = to_json(report.result, 2);
    if (a.out_path.empty()) {
        std::cout << json << "\n";
    } else {
        std::ofstream os(a.out_path);
        if (!os) throw Error(ErrorCode::IoFailure, "cannot write " + a.out_path);
        os << json << "\n";
        std::cout << "wrote " << a.out_path << " (p = " << report.p << ")\n";
    }
    return 0;
}

int do_plot_data(const PlotArgs& a) {
    std::ifstream is(a.input_path);
    if (!is) throw Error(ErrorCode::IoFailure, "cannot read " + a.input_path);
    std::stringstream buf;
    buf << is.rdbuf();

    std::string csv;
    if (a.kind == "irf-band") {
        csv = plot_data_irf_band(buf.str());
    } else if (a.kind == "coverage-bars") {
        csv = plot_data_coverage_bars(buf.str());
    } else {
        throw Error(ErrorCode::InvalidSpec, "unknown plot kind '" + a.kind + "'");
    }

    const std::string out = a.out_path.empty() ? a.kind + ".csv" : a.out_path;
    std::ofstream os(out);
    if (!os) throw Error(ErrorCode::IoFailure, "cannot write " + out);
    os << csv;
    std::cout << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int run_main(const std::vector<std::string>& args) {
    CLI::App app{"Local-projection impulse response bootstrap toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run a Monte Carlo experiment spec");
    run->add_option("spec", run_args.spec_path, "Experiment spec file (TOML)")->required();
    run->add_option("--out", run_args.out_dir, "Output directory")->required();
    run->add_option("--workers", run_args.workers,
                    "Worker threads (0: LPMA_WORKERS env, then hardware)");
    run->add_flag("--paper-scale", run_args.paper_scale,
                  "Raise the replicate count to at least 999");

    InferArgs infer_args;
    CLI::App* infer = app.add_subcommand("infer", "Bootstrap inference on observed data");
    infer->add_option("csv", infer_args.csv_path, "Input CSV file")->required();
    infer->add_option("--column", infer_args.column, "Column to analyze")->required();
    infer->add_option("--p", infer_args.p_rule, "Lag order: 'sbic' or a fixed integer");
    infer->add_option("--H", infer_args.H, "Largest horizon")->required();
    infer->add_option("--method", infer_args.method, "1 (truncate) or 2 (extend)");
    infer->add_option("--scheme", infer_args.scheme, "iid | wild | bwb | bb");
    infer->add_option("--block-rule", infer_args.block_rule, "H | 1.5H");
    infer->add_option("--weight-law", infer_args.weight_law, "rademacher | normal");
    infer->add_option("--B", infer_args.B, "Bootstrap replicates");
    infer->add_option("--alpha", infer_args.alpha, "Interval level alpha");
    infer->add_option("--threads", infer_args.threads, "Replicate threads");
    infer->add_option("--seed", infer_args.seed, "Root seed");
    infer->add_option("--out", infer_args.out_path, "Result JSON path (default: stdout)");

    PlotArgs plot_args;
    CLI::App* plot = app.add_subcommand("plot-data", "Flatten results into plot-ready CSV");
    plot->add_option("result", plot_args.input_path, "Result JSON file")->required();
    plot->add_option("--kind", plot_args.kind, "irf-band | coverage-bars")->required();
    plot->add_option("--out", plot_args.out_path, "Output CSV path (default: <kind>.csv)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return do_run(run_args);
        if (infer->parsed()) return do_infer(infer_args);
        if (plot->parsed()) return do_plot_data(plot_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace lpma::cli
