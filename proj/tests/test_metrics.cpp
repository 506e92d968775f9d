#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include <lpma/errors.hpp>
#include <lpma/metrics.hpp>

using namespace lpma;

namespace {

McCell make_cell(const std::string& design, int T, const std::string& rule,
                 const std::string& method, int h) {
    McCell c;
    c.design = design;
    c.dgp = "ar1";
    c.T = T;
    c.lag_rule = rule;
    c.method = method;
    c.scheme = "bwb";
    c.h = h;
    c.coverage = 0.9;
    c.median_rel_length = 1.25;
    c.mean_abs_bias = 0.04;
    c.n_reps = 100;
    c.n_degenerate = 0;
    return c;
}

}  // namespace

TEST_CASE("coverage counts closed-interval hits") {
    const std::vector<Interval> iv{{0.0, 1.0}, {2.0, 3.0}, {0.5, 2.5}, {1.0, 1.0}};
    CHECK(coverage(iv, 1.0) == 0.75);
    CHECK(coverage(iv, 2.5) == 0.5);
    CHECK(coverage(iv, -1.0) == 0.0);

    const std::vector<double> truths{0.0, 3.0, 2.5, 1.0};
    CHECK(coverage(iv, truths) == 1.0);

    const std::vector<double> wrong{1.0, 2.0};
    CHECK_THROWS_AS((void)coverage(iv, wrong), Error);
    const std::vector<Interval> none;
    CHECK_THROWS_AS((void)coverage(none, 0.0), Error);
}

TEST_CASE("median relative length with planted widths") {
    // Ranges are all 2, widths 1/2/4 give relative lengths 0.5/1/2.
    const std::vector<Interval> iv{{0.0, 1.0}, {0.0, 2.0}, {0.0, 4.0}};
    const std::vector<std::vector<double>> irfs{
        {1.0, 0.0, -1.0}, {1.0, -1.0, 0.0}, {1.0, 0.5, -1.0}};
    CHECK(median_rel_length(iv, irfs) == 1.0);

    // Even count: the rule averages the two middle order statistics.
    const std::vector<Interval> iv4{{0.0, 1.0}, {0.0, 2.0}, {0.0, 4.0}, {0.0, 8.0}};
    const std::vector<std::vector<double>> irfs4{
        {1.0, -1.0}, {1.0, -1.0}, {1.0, -1.0}, {1.0, -1.0}};
    CHECK(median_rel_length(iv4, irfs4) == 1.5);
}

TEST_CASE("degenerate responses are excluded from the median and counted") {
    const std::vector<Interval> iv{{0.0, 1.0}, {0.0, 100.0}, {0.0, 3.0}};
    const std::vector<std::vector<double>> irfs{
        {1.0, 0.0}, {2.0, 2.0}, {1.0, -1.0}};
    int n_deg = -1;
    const double med = median_rel_length(iv, irfs, &n_deg);
    CHECK(n_deg == 1);
    // Survivors have relative lengths 1.0 and 1.5.
    CHECK(med == 1.25);
}

TEST_CASE("mean absolute bias against scalar and per-rep truths") {
    const std::vector<double> means{1.0, 2.0, 3.0};
    CHECK(mean_abs_bias(means, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    const std::vector<double> truths{1.0, 2.0, 2.0};
    CHECK(mean_abs_bias(means, truths) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("assemble_table accepts complete grids and rejects holes") {
    std::vector<McCell> cells;
    for (const char* d : {"a", "b"}) {
        for (int h : {5, 10}) {
            cells.push_back(make_cell(d, 200, "sbic", "lp-method1", h));
        }
    }
    const auto ordered = assemble_table(cells);
    CHECK(ordered.size() == 4);

    std::vector<McCell> holed = cells;
    holed.pop_back();
    try {
        (void)assemble_table(holed);
        FAIL("expected IncompleteGrid");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncompleteGrid);
    }

    std::vector<McCell> duped = cells;
    duped.push_back(cells.front());
    CHECK_THROWS_AS((void)assemble_table(duped), Error);

    std::vector<McCell> empty;
    CHECK_THROWS_AS((void)assemble_table(empty), Error);
}

TEST_CASE("metrics CSV write-read-write is byte idempotent") {
    std::vector<McCell> cells{make_cell("ar1-phi0.5", 200, "sbic", "lp-method1", 5),
                              make_cell("ar1-phi0.5", 200, "sbic", "lp-method1", 10)};
    cells[1].coverage = 0.876543;
    cells[1].median_rel_length = 2.000001;
    cells[1].mean_abs_bias = 1e-7;
    cells[1].n_degenerate = 3;

    std::ostringstream first;
    write_metrics_csv(first, cells);
    std::istringstream back(first.str());
    const auto parsed = read_metrics_csv(back);
    REQUIRE(parsed.size() == cells.size());
    std::ostringstream second;
    write_metrics_csv(second, parsed);
    CHECK(first.str() == second.str());

    CHECK(parsed[1].coverage == doctest::Approx(0.876543).epsilon(1e-9));
    CHECK(parsed[1].n_degenerate == 3);
    CHECK(parsed[0].design == "ar1-phi0.5");
    CHECK(parsed[0].scheme == "bwb");
}

TEST_CASE("malformed metrics CSV inputs are rejected") {
    std::istringstream bad_header("design,dgp\nx,y\n");
    CHECK_THROWS_AS((void)read_metrics_csv(bad_header), Error);

    std::vector<McCell> cells{make_cell("d", 100, "sbic", "lp-method1", 1)};
    std::ostringstream os;
    write_metrics_csv(os, cells);
    std::string text = os.str();
    text += "only,three,fields\n";
    std::istringstream short_row(text);
    try {
        (void)read_metrics_csv(short_row);
        FAIL("expected InvalidInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidInput);
    }
}

TEST_CASE("metrics JSON round trip preserves every field") {
    std::vector<McCell> cells{make_cell("ma24-fair1", 1000, "fixed:20", "lp-method2", 40)};
    cells[0].coverage = 0.86;
    cells[0].n_reps = 250;
    const std::string text = metrics_to_json(cells);
    const auto parsed = metrics_from_json(text);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].design == "ma24-fair1");
    CHECK(parsed[0].dgp == "ar1");
    CHECK(parsed[0].T == 1000);
    CHECK(parsed[0].lag_rule == "fixed:20");
    CHECK(parsed[0].method == "lp-method2");
    CHECK(parsed[0].scheme == "bwb");
    CHECK(parsed[0].h == 40);
    CHECK(parsed[0].coverage == doctest::Approx(0.86).epsilon(1e-12));
    CHECK(parsed[0].n_reps == 250);

    CHECK_THROWS_AS((void)metrics_from_json("not json"), Error);
}

TEST_CASE("g6 float rendering") {
    CHECK(format_g6(0.5) == "0.5");
    CHECK(format_g6(0.876543) == "0.876543");
    CHECK(format_g6(1e-7) == "1e-07");
    CHECK(format_g6(0.0) == "0");
}
