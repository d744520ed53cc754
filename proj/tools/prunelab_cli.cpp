// prunelab: command-line front end.
//
// Exit status: 0 ok, 1 usage / invalid input, 2 numerically invalid result,
// 3 I/O failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "prunelab/errors.hpp"
#include "prunelab/harness/csv.hpp"
#include "prunelab/harness/plot.hpp"
#include "prunelab/harness/report.hpp"
#include "prunelab/harness/sweep.hpp"
#include "prunelab/practice.hpp"
#include "prunelab/simulate.hpp"
#include "prunelab/spectral.hpp"

namespace fs = std::filesystem;
using namespace prunelab;
using namespace prunelab::harness;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

std::string output_dir(const std::string& flag) {
    std::string dir = flag;
    if (dir.empty()) {
        const char* env = std::getenv("PRUNELAB_OUT_DIR");
        dir = env && *env ? env : ".";
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

std::string in_dir(const std::string& dir, const std::string& name) {
    const fs::path p(name);
    return p.is_absolute() ? name : (fs::path(dir) / p).string();
}

void kv(const char* key, double v) { std::printf("%-20s %.12g\n", key, v); }
void kv(const char* key, const std::string& v) { std::printf("%-20s %s\n", key, v.c_str()); }

// Accepts bare `kh` / `ke` when a keep probability is supplied.
SelectionStrategy strategy_from(const std::string& text, std::optional<double> p) {
    if (p && (text == "kh" || text == "ke")) {
        const auto kind = text == "kh" ? StrategyKind::KeepHard : StrategyKind::KeepEasy;
        const double xi = threshold_for_keep_probability(kind, *p);
        return kind == StrategyKind::KeepHard ? SelectionStrategy::keep_hard(xi)
                                              : SelectionStrategy::keep_easy(xi);
    }
    return SelectionStrategy::parse(text);
}

struct TheoryArgs {
    std::string strategy = "all";
    double rho = 1.0;
    double lambda = 1e-2;
    std::optional<double> phi, p;
    std::optional<int> d, n;
};

int cmd_theory(const TheoryArgs& a) {
    const SelectionStrategy s = strategy_from(a.strategy, a.p);
    double phi = 0.0;
    if (a.phi) {
        phi = *a.phi;
    } else if (a.d && a.n) {
        phi = static_cast<double>(*a.d) / *a.n;
    } else {
        throw InvalidArgument("give --phi or both --d and --n");
    }
    const StrategyScalars sc = compute_scalars(s, a.rho);
    if (a.p && std::abs(*a.p - sc.p) > 1e-9)
        throw InvalidArgument("--p " + format_real(*a.p) + " does not match strategy " +
                              s.to_string() + " (p = " + format_real(sc.p) + ")");
    kv("strategy", s.to_string());
    kv("phi", phi);
    kv("lambda", a.lambda);
    kv("rho", a.rho);
    kv("p", sc.p);
    kv("gamma", sc.gamma);
    kv("beta", sc.beta);
    kv("beta_tilde", sc.beta_tilde);
    TheoryPrediction pred;
    if (a.lambda > 0.0) {
        const TheoryReport rep = theory_report({phi, a.lambda, sc.p}, sc);
        kv("m", rep.state.m);
        kv("m_prime", rep.state.m_prime);
        kv("m_tilde", rep.state.m_tilde);
        kv("m_tilde_prime", rep.state.m_tilde_prime);
        kv("t", fixed_point_t({phi, a.lambda, sc.p}));
        pred = rep.prediction;
    } else {
        const RidgelessReport rep = ridgeless_report(sc, phi, sc.p);
        pred = rep.limit;
        if (pred.regime == Regime::RidgelessOver) kv("c0", rep.c0);
        if (rep.stated) kv("test_error_stated", rep.stated->test_error);
    }
    kv("regime", std::string(regime_name(pred.regime)));
    kv("m0", pred.m0);
    kv("nu0", pred.nu0);
    kv("cosine", pred.cosine);
    kv("test_error", pred.test_error);
    kv("test_error_gaussian", pred.test_error_gaussian);
    return kOk;
}

struct SimArgs {
    ExperimentConfig cfg;
    std::string strategy = "all";
    int workers = 1;
};

int cmd_simulate(SimArgs a) {
    a.cfg.strategy = SelectionStrategy::parse(a.strategy);
    a.cfg.validate();
    const CellAggregate agg = run_cell(a.cfg, a.workers);
    kv("strategy", a.cfg.strategy.to_string());
    kv("d", a.cfg.d);
    kv("n", a.cfg.n);
    kv("lambda", a.cfg.lambda);
    kv("rho", a.cfg.rho);
    kv("trials", agg.trials);
    kv("failures", agg.failures);
    kv("kept_mean", agg.kept_mean);
    kv("empirical_mean", agg.mean_error);
    kv("empirical_std", agg.std_error);
    const SweepRow th = evaluate_cell(a.cfg, 0, false);
    if (th.theory_error) kv("theory_error", *th.theory_error);
    kv("theory_status", th.error_code);
    return kOk;
}

struct SweepArgs {
    std::string config, preset, out;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    bool empirics = false;
    bool theory_only = false;
    std::optional<int> trials;
};

SweepSpec load_spec(const SweepArgs& a) {
    if (a.config.empty() == a.preset.empty())
        throw InvalidArgument("give exactly one of --config or --preset");
    SweepSpec spec = a.preset.empty() ? sweep_from_config(read_config_file(a.config)) : preset(a.preset);
    if (a.workers) spec.workers = *a.workers;
    if (a.seed) spec.base.seed = *a.seed;
    if (a.trials) spec.base.trials = *a.trials;
    if (a.empirics) spec.empirics = true;
    if (a.theory_only) spec.empirics = false;
    spec.validate();
    return spec;
}

std::vector<SweepRow> sweep_and_write(const SweepSpec& spec, const std::string& dir) {
    const auto rows = run_sweep(spec);
    const std::string csv = in_dir(dir, spec.csv_path);
    write_text_file(csv, sweep_csv_string(rows));
    std::cerr << "wrote " << csv << " (" << rows.size() << " rows)\n";
    if (!spec.svg_path.empty()) {
        std::istringstream in(sweep_csv_string(rows));
        const std::string svg = in_dir(dir, spec.svg_path);
        write_text_file(svg, emit_plot(with_derived_columns(read_table(in)), default_plot(spec)));
        std::cerr << "wrote " << svg << '\n';
    }
    return rows;
}

int cmd_sweep(const SweepArgs& a) {
    const SweepSpec spec = load_spec(a);
    const auto rows = sweep_and_write(spec, output_dir(a.out));
    int failed = 0;
    for (const auto& r : rows) failed += r.error_code != "ok";
    std::printf("cells=%zu errors=%d\n", rows.size(), failed);
    return kOk;
}

int cmd_compare(SweepArgs a) {
    a.empirics = true;
    a.theory_only = false;
    const SweepSpec spec = load_spec(a);
    const std::string dir = output_dir(a.out);
    const auto rows = sweep_and_write(spec, dir);
    const ComparisonReport rep = compare_rows(rows);
    std::ostringstream os;
    write_report(os, rep);
    const std::string path = in_dir(dir, spec.name + "_report.csv");
    write_text_file(path, os.str());
    std::cerr << "wrote " << path << '\n';
    write_summary_line(std::cout, rep.summary);
    return kOk;
}

struct DpArgs {
    DPConfig cfg;
    std::string strategy = "kh:xi=0.5";
    std::string patience = "1";
    bool incremental = false;
    bool frozen = false;
    int paired = 0;
    std::string out;
};

int cmd_dp(DpArgs a) {
    a.cfg.selection = SelectionStrategy::parse(a.strategy);
    a.cfg.patience = a.patience == "inf" ? kInfinitePatience
                                         : static_cast<int>(parse_integer(a.patience, "patience"));
    a.cfg.patience_mode = a.incremental ? PatienceMode::Incremental : PatienceMode::Fixed;
    a.cfg.refresh_direction = !a.frozen;
    a.cfg.validate();
    if (a.paired > 0) {
        const PairedReport rep = compare_adaptive_static(a.cfg, a.paired);
        kv("seeds", a.paired);
        kv("mean_adaptive", rep.mean_adaptive);
        kv("mean_static", rep.mean_static);
        kv("mean_delta", rep.mean_delta);
        kv("delta_se", rep.delta_standard_error);
        kv("win_rate", rep.win_rate);
        kv("win_rate_lo", rep.win_rate_lo);
        kv("win_rate_hi", rep.win_rate_hi);
        return kOk;
    }
    const DPHistory h = run_dp(a.cfg);
    std::ostringstream os;
    write_dp_csv(os, h);
    const std::string path = in_dir(output_dir(a.out), "dp_history.csv");
    write_text_file(path, os.str());
    std::cerr << "wrote " << path << '\n';
    kv("augmentations", h.augmentations);
    kv("final_pool", h.events.empty() ? 0 : h.events.back().pool_size);
    kv("final_test_error", h.final_test_error);
    kv("initial_mean_margin", h.initial_mean_margin);
    kv("added_mean_margin", h.added_mean_margin);
    if (h.static_after_exhaustion) kv("note", std::string("static_after_exhaustion"));
    return kOk;
}

struct PlotArgs {
    std::string csv, out, name = "plot.svg";
    PlotSpec spec;
};

int cmd_plot(const PlotArgs& a) {
    const Table t = with_derived_columns(read_table_file(a.csv));
    const std::string svg = emit_plot(t, a.spec);
    const std::string path = in_dir(output_dir(a.out), a.name);
    write_text_file(path, svg);
    std::cerr << "wrote " << path << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Selective-sampling ridge classifier laboratory"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    TheoryArgs th;
    auto* c_th = app.add_subcommand("theory", "Asymptotic prediction for one cell");
    c_th->add_option("--strategy", th.strategy, "all | kh:xi=X | ke:xi=X | sig:w=W (kh/ke with --p)");
    c_th->add_option("--rho", th.rho, "Alignment of pruning and labeling directions");
    c_th->add_option("--lambda", th.lambda, "Ridge penalty (0: ridgeless limit)");
    c_th->add_option("--phi", th.phi, "d / n");
    c_th->add_option("--d", th.d);
    c_th->add_option("--n", th.n);
    c_th->add_option("--p", th.p, "Keep probability (sets or checks the threshold)");

    SimArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo estimate for one cell");
    c_sim->add_option("--d", sim.cfg.d)->required();
    c_sim->add_option("--n", sim.cfg.n)->required();
    c_sim->add_option("--lambda", sim.cfg.lambda);
    c_sim->add_option("--strategy", sim.strategy);
    c_sim->add_option("--rho", sim.cfg.rho);
    c_sim->add_option("--trials", sim.cfg.trials);
    c_sim->add_option("--seed", sim.cfg.seed);
    c_sim->add_option("--workers", sim.workers)->check(CLI::PositiveNumber);
    c_sim->add_option("--mc-test-points", sim.cfg.mc_test_points);

    SweepArgs sw;
    auto add_sweep_opts = [](CLI::App* c, SweepArgs& s) {
        c->add_option("--config", s.config, "Sweep config file");
        c->add_option("--preset", s.preset, "theory-scaling | figcool | figcool-small | oversample-curve");
        c->add_option("--out", s.out, "Output directory (default: $PRUNELAB_OUT_DIR or .)");
        c->add_option("--workers", s.workers)->check(CLI::PositiveNumber);
        c->add_option("--seed", s.seed);
        c->add_option("--trials", s.trials)->check(CLI::PositiveNumber);
    };
    auto* c_sw = app.add_subcommand("sweep", "Run a parameter grid and write CSV (and SVG)");
    add_sweep_opts(c_sw, sw);
    c_sw->add_flag("--empirics", sw.empirics, "Force Monte Carlo columns on");
    c_sw->add_flag("--theory-only", sw.theory_only, "Force Monte Carlo columns off");

    SweepArgs cmp;
    auto* c_cmp = app.add_subcommand("compare", "Theory vs Monte Carlo report for a grid");
    add_sweep_opts(c_cmp, cmp);

    DpArgs dp;
    auto* c_dp = app.add_subcommand("dp", "Adaptive pool-growth loop");
    c_dp->add_option("--d", dp.cfg.d);
    c_dp->add_option("--initial-size,-N", dp.cfg.initial_size);
    c_dp->add_option("--batch-size,-P", dp.cfg.batch_size);
    c_dp->add_option("--eval-interval", dp.cfg.eval_interval);
    c_dp->add_option("--patience", dp.patience, "Integer or 'inf'");
    c_dp->add_flag("--incremental", dp.incremental, "Grow patience by one per augmentation");
    c_dp->add_option("--steps", dp.cfg.total_steps);
    c_dp->add_option("--strategy", dp.strategy);
    c_dp->add_option("--lambda", dp.cfg.lambda);
    c_dp->add_option("--validation-size", dp.cfg.validation_size);
    c_dp->add_flag("--frozen", dp.frozen, "Keep the initial selection direction");
    c_dp->add_option("--paired", dp.paired, "Compare adaptive vs frozen over this many seeds");
    c_dp->add_option("--seed", dp.cfg.seed);
    c_dp->add_option("--out", dp.out, "Output directory");

    PlotArgs pl;
    auto* c_pl = app.add_subcommand("plot", "SVG line chart from a sweep CSV");
    c_pl->add_option("--csv", pl.csv)->required();
    c_pl->add_option("--x", pl.spec.x);
    c_pl->add_option("--y", pl.spec.y);
    c_pl->add_option("--series", pl.spec.series, "Comma-separated grouping columns");
    c_pl->add_option("--overlay", pl.spec.overlay, "Column drawn as hollow markers");
    c_pl->add_flag("--log-x", pl.spec.log_x);
    c_pl->add_flag("--log-y", pl.spec.log_y);
    c_pl->add_flag("--accuracy", pl.spec.accuracy, "Plot 1 - y");
    c_pl->add_option("--title", pl.spec.title);
    c_pl->add_option("--name", pl.name, "SVG file name");
    c_pl->add_option("--out", pl.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        if (e.get_exit_code() != 0) std::cerr << app.help();
        return kUsage;
    }

    try {
        if (*c_th) return cmd_theory(th);
        if (*c_sim) return cmd_simulate(sim);
        if (*c_sw) return cmd_sweep(sw);
        if (*c_cmp) return cmd_compare(cmp);
        if (*c_dp) return cmd_dp(dp);
        if (*c_pl) return cmd_plot(pl);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
