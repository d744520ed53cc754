#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "prunelab/errors.hpp"
#include "prunelab/harness/config.hpp"
#include "prunelab/harness/csv.hpp"
#include "prunelab/harness/plot.hpp"
#include "prunelab/harness/report.hpp"
#include "prunelab/harness/sweep.hpp"

using namespace prunelab;
using namespace prunelab::harness;

namespace {

const char* kSpecText = R"(# small grid
[sweep]
name = unit
empirics = false
workers = 2
csv = unit.csv

[base]
d = 50
n = 100
lambda = 0.01
strategy = kh:xi=1
rho = 0.8
trials = 4
seed = 9

[axes]
xi = 0.5, 2
n = 60, 200
)";

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

Table table_of(const std::vector<SweepRow>& rows) {
    std::istringstream in(sweep_csv_string(rows));
    return read_table(in);
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config grammar") {
    const auto doc = parse_config("# c\n; c\n[a]\n  k =  v w  \n[b]\nlist = 1, 2 ,3\n");
    REQUIRE(doc.sections.size() == 2);
    CHECK(doc.sections[0].get("k") == "v w");
    CHECK(split_list(*doc.find("b")->get("list")) == std::vector<std::string>{"1", "2", "3"});
    CHECK(serialize_config(doc) == "[a]\nk = v w\n\n[b]\nlist = 1, 2 ,3\n");
    const auto trailing = parse_config("[a]  ; header note\nk = 1 # note\nj = x;y\n");
    CHECK(trailing.sections[0].get("k") == "1");
    CHECK(trailing.sections[0].get("j") == "x;y");
}

TEST_CASE("config parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_config("x = 1\n"), "config line 1: key outside of any section",
                         InvalidArgument);
    CHECK_THROWS_WITH_AS(parse_config("[a]\n\nnovalue\n"), "config line 3: expected 'key = value'",
                         InvalidArgument);
    CHECK_THROWS_AS(parse_config("[a\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[a]\nk = 1\nk = 2\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[a]\n[a]\n"), InvalidArgument);
}

TEST_CASE("config documents and sweep specs round-trip") {
    const auto doc = parse_config(kSpecText);
    CHECK(parse_config(serialize_config(doc)) == doc);
    const SweepSpec spec = parse_sweep(kSpecText);
    CHECK(spec.name == "unit");
    CHECK(spec.workers == 2);
    CHECK(spec.base.rho == 0.8);
    CHECK(spec.base.strategy == SelectionStrategy::keep_hard(1.0));
    REQUIRE(spec.axes.size() == 2);
    CHECK(spec.axes[1].values == std::vector<std::string>{"60", "200"});
    const std::string text = serialize_sweep(spec);
    CHECK(parse_sweep(text) == spec);
    CHECK(serialize_sweep(parse_sweep(text)) == text);
    for (const auto& name : preset_names()) {
        const SweepSpec p = preset(name);
        CHECK(parse_sweep(serialize_sweep(p)) == p);
    }
}

TEST_CASE("sweep spec validation") {
    CHECK_THROWS_AS(parse_sweep("[axes]\nbogus = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_sweep("[axes]\nn = 1,,2\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_sweep("[axes]\nn = abc\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_sweep("[base]\nfoo = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_sweep("[other]\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_sweep("[sweep]\nworkers = 0\n"), InvalidArgument);
    CHECK_THROWS_AS(preset("nope"), InvalidArgument);
}

TEST_CASE("cells are the cross product in axis order") {
    const SweepSpec spec = parse_sweep(kSpecText);
    CHECK(spec.cell_count() == 4);
    CHECK(cell_config(spec, 0).strategy.threshold() == 0.5);
    CHECK(cell_config(spec, 0).n == 60);
    CHECK(cell_config(spec, 1).n == 200);
    CHECK(cell_config(spec, 2).strategy.threshold() == 2.0);
    CHECK(cell_config(spec, 0).seed != cell_config(spec, 1).seed);
    CHECK(cell_config(spec, 3).seed == cell_config(spec, 3).seed);
    CHECK_THROWS_AS(cell_config(spec, 4), InvalidArgument);
}

TEST_CASE("keep probability, ratio and kept axes") {
    SweepSpec s;
    s.base.strategy = SelectionStrategy::keep_hard(1.0);
    s.base.d = 100;
    s.axes = {{"kept", {"200"}}, {"p", {"0.5", "1"}}};
    const auto c0 = cell_config(s, 0);
    CHECK(compute_scalars(c0.strategy, 0.0).p == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c0.n == 400);  // kept is applied after p regardless of axis order
    CHECK(cell_config(s, 1).n == 200);
    s.axes = {{"ratio", {"4"}}, {"kept", {"100"}}};
    CHECK(cell_config(s, 0).n == 400);
    s.base.strategy = SelectionStrategy::keep_all();
    s.axes = {{"p", {"0.5"}}};
    CHECK_THROWS_AS(cell_config(s, 0), InvalidArgument);
    // A sweep turns such a cell into an error row instead of aborting.
    s.csv_path = "x.csv";
    const auto rows = run_sweep(s);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].error_code == "invalid_argument");
}

TEST_CASE("theory-only sweep rows") {
    const SweepSpec spec = parse_sweep(kSpecText);
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        CHECK(r.cell_id == static_cast<long>(i));
        CHECK(r.error_code == "ok");
        CHECK(r.theory_error.has_value());
        CHECK(r.m.has_value());
        CHECK(!r.empirical_mean.has_value());
        CHECK(!r.empirical_std.has_value());
        CHECK(!r.trials.has_value());
        CHECK(r.phi == doctest::Approx(50.0 / r.n));
    }
    const std::string csv = sweep_csv_string(rows);
    // Empirical columns are blank: "...,theory_error,,,,seed,ok".
    CHECK(count(csv, ",,,,") == 4);
}

TEST_CASE("ridgeless cells at the threshold become error rows") {
    SweepSpec s;
    s.base.d = 100;
    s.base.lambda = 0.0;
    s.base.strategy = SelectionStrategy::keep_all();
    s.base.rho = 1.0;
    s.axes = {{"n", {"50", "100", "200"}}};
    const auto rows = run_sweep(s);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].error_code == "ok");
    CHECK(rows[1].error_code == "interpolation_threshold");
    CHECK(!rows[1].theory_error.has_value());
    CHECK(rows[2].error_code == "ok");
    CHECK(!rows[0].m.has_value());  // no Stieltjes value on the ridgeless path
    CHECK(rows[0].m0.has_value());
}

TEST_CASE("csv schema round-trips") {
    SweepSpec spec = parse_sweep(kSpecText);
    spec.empirics = true;
    spec.axes.push_back({"strategy", {"kh:xi=1", "sig:w=2", "all"}});
    spec.axes.erase(spec.axes.begin());
    auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 6);
    const std::string csv = sweep_csv_string(rows);
    std::istringstream in(csv);
    const auto back = read_sweep_csv(in);
    CHECK(back == rows);
    CHECK(sweep_csv_string(back) == csv);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "schema_version,cell_id,strategy,xi,exponent,d,n,phi,p,lambda,rho,gamma,beta,beta_tilde,"
          "m,m_prime,m_tilde,m0,nu0,theory_error,empirical_mean,empirical_std,trials,seed,error_code");
    CHECK(rows[1].exponent == 2.0);
    CHECK(!rows[1].xi.has_value());

    std::istringstream bad("schema_version,cell_id\n1,0\n");
    try {
        read_sweep_csv(bad);
        FAIL("expected a schema error");
    } catch (const InvalidArgument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("missing columns") != std::string::npos);
        CHECK(msg.find("theory_error") != std::string::npos);
    }
}

TEST_CASE("sweep output does not depend on the worker count") {
    SweepSpec spec = parse_sweep(kSpecText);
    spec.empirics = true;
    spec.workers = 1;
    const std::string a = sweep_csv_string(run_sweep(spec));
    spec.workers = 3;
    CHECK(sweep_csv_string(run_sweep(spec)) == a);
    spec.workers = 8;
    CHECK(sweep_csv_string(run_sweep(spec)) == a);
}

TEST_CASE("comparison report summary is recomputable") {
    SweepSpec spec = parse_sweep(kSpecText);
    spec.empirics = true;
    spec.base.trials = 30;
    const auto rows = run_sweep(spec);
    const auto rep = compare_rows(rows);
    CHECK(rep.rows.size() == 4);
    CHECK(rep.summary.skipped == 0);
    const auto again = summarize(rep.rows, rep.summary.skipped, 3.0);
    CHECK(again.max_abs_deviation == rep.summary.max_abs_deviation);
    CHECK(again.fraction_within == rep.summary.fraction_within);
    for (const auto& r : rep.rows) {
        CHECK(r.abs_deviation == doctest::Approx(std::abs(r.empirical_mean - r.theory_error)));
        CHECK(r.z_score == doctest::Approx((r.empirical_mean - r.theory_error) /
                                           (r.empirical_std / std::sqrt(30.0))));
    }
    std::vector<SweepRow> partial = rows;
    partial[0].empirical_mean.reset();
    CHECK(compare_rows(partial).summary.skipped == 1);
}

TEST_CASE("plot: markers, legend entries, determinism") {
    SweepSpec spec = parse_sweep(kSpecText);
    spec.axes = {{"n", {"100"}}};
    const auto one = table_of(run_sweep(spec));
    PlotSpec ps;
    ps.x = "n";
    ps.y = "theory_error";
    ps.series = "";
    const std::string svg1 = emit_plot(one, ps);
    CHECK(svg1.find("<svg") != std::string::npos);
    CHECK(count(svg1, "<circle") == 1);
    CHECK(count(svg1, "<polyline") == 0);

    spec = parse_sweep(kSpecText);
    const auto two = table_of(run_sweep(spec));
    ps.series = "xi";
    const std::string svg2 = emit_plot(two, ps);
    CHECK(count(svg2, "class=\"legend\"") == 2);
    CHECK(count(svg2, "<polyline") == 2);
    CHECK(emit_plot(two, ps) == svg2);
    CHECK(svg2.find("width=\"800\" height=\"600\"") != std::string::npos);

    ps.log_x = true;
    ps.accuracy = true;
    CHECK(emit_plot(two, ps) != svg2);
}

TEST_CASE("plot reports missing columns by name") {
    const auto t = table_of(run_sweep(parse_sweep(kSpecText)));
    PlotSpec ps;
    ps.x = "nope_x";
    ps.y = "theory_error";
    ps.series = "xi, nope_s";
    try {
        emit_plot(t, ps);
        FAIL("expected a missing-column error");
    } catch (const InvalidArgument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("nope_x") != std::string::npos);
        CHECK(msg.find("nope_s") != std::string::npos);
        CHECK(msg.find("theory_error") == std::string::npos);
    }
}

TEST_CASE("derived kept and ratio columns") {
    SweepSpec s;
    s.base.strategy = SelectionStrategy::keep_hard(1.0);
    s.base.d = 64;
    s.axes = {{"p", {"0.5"}}, {"kept", {"128"}}};
    const auto t = with_derived_columns(table_of(run_sweep(s)));
    REQUIRE(t.column("kept") >= 0);
    REQUIRE(t.column("ratio") >= 0);
    CHECK(parse_real(t.rows[0][t.column("kept")], "kept") == doctest::Approx(128.0).epsilon(1e-9));
    CHECK(parse_real(t.rows[0][t.column("ratio")], "ratio") == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("dp history csv") {
    DPConfig c;
    c.d = 16;
    c.initial_size = 32;
    c.batch_size = 16;
    c.total_steps = 6;
    c.validation_size = 256;
    const auto h = run_dp(c);
    std::ostringstream os;
    write_dp_csv(os, h);
    std::istringstream in(os.str());
    const Table t = read_table(in);
    CHECK(t.rows.size() == h.events.size());
    CHECK(t.column("pool_size") == 2);
    CHECK(t.rows.front()[1] == "warmup");
    CHECK(t.rows.back()[1] == "cooldown");
}

TEST_CASE("presets describe the intended grids") {
    const auto fig = preset("figcool");
    CHECK(fig.base.d == 350);
    CHECK(fig.base.trials >= 200);
    CHECK(fig.empirics);
    const auto ts = preset("theory-scaling");
    CHECK(ts.base.d == 512);
    CHECK(!ts.empirics);
    for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name).validate());
}

}  // TEST_SUITE
