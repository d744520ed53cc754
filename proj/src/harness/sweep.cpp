#include "prunelab/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "prunelab/errors.hpp"
#include "prunelab/rng.hpp"
#include "prunelab/spectral.hpp"

namespace prunelab::harness {
namespace {

// Application order of axes within a cell; lower ranks first.
int axis_rank(std::string_view name) {
    if (name == "strategy") return 0;
    if (name == "xi" || name == "exponent" || name == "p" || name == "ratio") return 1;
    if (name == "kept") return 3;
    return 2;
}

SelectionStrategy with_threshold(const SelectionStrategy& s, double xi, std::string_view axis) {
    switch (s.kind()) {
        case StrategyKind::KeepHard: return SelectionStrategy::keep_hard(xi);
        case StrategyKind::KeepEasy: return SelectionStrategy::keep_easy(xi);
        default:
            throw InvalidArgument("axis '" + std::string(axis) + "' needs a kh or ke strategy, got " +
                                  s.to_string());
    }
}

SelectionStrategy with_keep_probability(const SelectionStrategy& s, double p,
                                        std::string_view axis) {
    if (!(p > 0.0 && p <= 1.0))
        throw InvalidArgument("axis '" + std::string(axis) + "': keep probability must be in (0, 1]");
    if (s.kind() == StrategyKind::KeepAll) {
        if (p == 1.0) return s;
        throw InvalidArgument("strategy 'all' only supports p = 1");
    }
    return with_threshold(s, threshold_for_keep_probability(s.kind(), p), axis);
}

int to_positive_int(double v, std::string_view what) {
    const double r = std::round(v);
    if (!(r >= 1.0 && r <= 2e9)) throw InvalidArgument(std::string(what) + " must be >= 1");
    return static_cast<int>(r);
}

void apply_axis(ExperimentConfig& c, std::string_view name, const std::string& value) {
    if (name == "strategy") {
        c.strategy = SelectionStrategy::parse(value);
    } else if (name == "xi") {
        c.strategy = with_threshold(c.strategy, parse_real(value, name), name);
    } else if (name == "exponent") {
        if (c.strategy.kind() != StrategyKind::SigmoidPower)
            throw InvalidArgument("axis 'exponent' needs a sig strategy, got " + c.strategy.to_string());
        c.strategy = SelectionStrategy::sigmoid_power(parse_real(value, name));
    } else if (name == "p") {
        c.strategy = with_keep_probability(c.strategy, parse_real(value, name), name);
    } else if (name == "ratio") {
        const double r = parse_real(value, name);
        if (!(r >= 1.0)) throw InvalidArgument("axis 'ratio' must be >= 1");
        c.strategy = with_keep_probability(c.strategy, 1.0 / r, name);
    } else if (name == "n") {
        c.n = to_positive_int(parse_real(value, name), "n");
    } else if (name == "d") {
        c.d = to_positive_int(parse_real(value, name), "d");
    } else if (name == "lambda") {
        c.lambda = parse_real(value, name);
    } else if (name == "rho") {
        c.rho = parse_real(value, name);
    } else if (name == "kept") {
        const double p = compute_scalars(c.strategy, 0.0).p;
        if (!(p > 0.0)) throw InvalidArgument("axis 'kept' needs a positive keep probability");
        c.n = to_positive_int(parse_real(value, name) / p, "n");
    } else {
        throw InvalidArgument("unknown axis '" + std::string(name) + "'");
    }
}

std::string error_code_for(const std::exception& e) {
    if (dynamic_cast<const InterpolationThreshold*>(&e)) return "interpolation_threshold";
    if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
    if (dynamic_cast<const InvalidArgument*>(&e)) return "invalid_argument";
    return "internal";
}

}  // namespace

bool is_axis_name(std::string_view name) {
    return std::any_of(std::begin(kAxisNames), std::end(kAxisNames),
                       [&](const char* a) { return name == a; });
}

void SweepSpec::validate() const {
    base.validate();
    if (workers < 1) throw InvalidArgument("workers must be >= 1");
    if (csv_path.empty()) throw InvalidArgument("sweep needs a csv output path");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const auto& a = axes[i];
        if (!is_axis_name(a.name)) throw InvalidArgument("unknown axis '" + a.name + "'");
        if (a.values.empty()) throw InvalidArgument("axis '" + a.name + "' has no values");
        for (std::size_t j = 0; j < i; ++j)
            if (axes[j].name == a.name) throw InvalidArgument("duplicate axis '" + a.name + "'");
        for (const auto& v : a.values) {
            if (a.name == "strategy")
                SelectionStrategy::parse(v);
            else
                parse_real(v, a.name);
        }
    }
}

long SweepSpec::cell_count() const {
    long count = 1;
    for (const auto& a : axes) count *= static_cast<long>(a.values.size());
    return count;
}

bool operator==(const SweepSpec& a, const SweepSpec& b) {
    const auto& x = a.base;
    const auto& y = b.base;
    return a.name == b.name && a.axes == b.axes && a.empirics == b.empirics &&
           a.csv_path == b.csv_path && a.svg_path == b.svg_path && a.workers == b.workers &&
           x.d == y.d && x.n == y.n && x.lambda == y.lambda && x.strategy == y.strategy &&
           x.rho == y.rho && x.trials == y.trials && x.seed == y.seed &&
           x.mc_test_points == y.mc_test_points;
}

SweepSpec sweep_from_config(const ConfigDocument& doc) {
    for (const auto& s : doc.sections)
        if (s.name != "sweep" && s.name != "base" && s.name != "axes")
            throw InvalidArgument("unknown config section [" + s.name + "]");
    SweepSpec spec;
    if (const auto* s = doc.find("sweep")) {
        for (const auto& [k, v] : s->entries) {
            if (k == "name") spec.name = v;
            else if (k == "empirics") spec.empirics = parse_bool(v, k);
            else if (k == "workers") spec.workers = static_cast<int>(parse_integer(v, k));
            else if (k == "csv") spec.csv_path = v;
            else if (k == "svg") spec.svg_path = v;
            else throw InvalidArgument("unknown key '" + k + "' in [sweep]");
        }
    }
    if (const auto* s = doc.find("base")) {
        auto& b = spec.base;
        for (const auto& [k, v] : s->entries) {
            if (k == "d") b.d = static_cast<int>(parse_integer(v, k));
            else if (k == "n") b.n = static_cast<int>(parse_integer(v, k));
            else if (k == "lambda") b.lambda = parse_real(v, k);
            else if (k == "strategy") b.strategy = SelectionStrategy::parse(v);
            else if (k == "rho") b.rho = parse_real(v, k);
            else if (k == "trials") b.trials = static_cast<int>(parse_integer(v, k));
            else if (k == "seed") {
                const long s64 = parse_integer(v, k);
                if (s64 < 0) throw InvalidArgument("seed must be >= 0");
                b.seed = static_cast<std::uint64_t>(s64);
            } else if (k == "mc_test_points") b.mc_test_points = static_cast<int>(parse_integer(v, k));
            else throw InvalidArgument("unknown key '" + k + "' in [base]");
        }
    }
    if (const auto* s = doc.find("axes"))
        for (const auto& [k, v] : s->entries) spec.axes.push_back({k, split_list(v)});
    spec.validate();
    return spec;
}

ConfigDocument sweep_to_config(const SweepSpec& spec) {
    ConfigDocument doc;
    auto& s = doc.section("sweep");
    s.set("name", spec.name);
    s.set("empirics", spec.empirics ? "true" : "false");
    s.set("workers", std::to_string(spec.workers));
    s.set("csv", spec.csv_path);
    if (!spec.svg_path.empty()) s.set("svg", spec.svg_path);
    auto& b = doc.section("base");
    b.set("d", std::to_string(spec.base.d));
    b.set("n", std::to_string(spec.base.n));
    b.set("lambda", format_real(spec.base.lambda));
    b.set("strategy", spec.base.strategy.to_string());
    b.set("rho", format_real(spec.base.rho));
    b.set("trials", std::to_string(spec.base.trials));
    b.set("seed", std::to_string(spec.base.seed));
    b.set("mc_test_points", std::to_string(spec.base.mc_test_points));
    if (!spec.axes.empty()) {
        auto& a = doc.section("axes");
        for (const auto& axis : spec.axes) a.set(axis.name, join_list(axis.values));
    }
    return doc;
}

SweepSpec parse_sweep(std::string_view text) { return sweep_from_config(parse_config(text)); }

std::string serialize_sweep(const SweepSpec& spec) { return serialize_config(sweep_to_config(spec)); }

ExperimentConfig cell_config(const SweepSpec& spec, long index) {
    if (index < 0 || index >= spec.cell_count()) throw InvalidArgument("cell index out of range");
    std::vector<std::size_t> pick(spec.axes.size());
    long rest = index;
    for (std::size_t i = spec.axes.size(); i-- > 0;) {
        const long len = static_cast<long>(spec.axes[i].values.size());
        pick[i] = static_cast<std::size_t>(rest % len);
        rest /= len;
    }
    ExperimentConfig c = spec.base;
    for (int rank = 0; rank <= 3; ++rank)
        for (std::size_t i = 0; i < spec.axes.size(); ++i)
            if (axis_rank(spec.axes[i].name) == rank)
                apply_axis(c, spec.axes[i].name, spec.axes[i].values[pick[i]]);
    c.seed = derive_seed(spec.base.seed, static_cast<std::uint64_t>(index), StreamPurpose::CellSeed);
    return c;
}

SweepRow evaluate_cell(const ExperimentConfig& config, long cell_id, bool empirics) {
    SweepRow row;
    row.cell_id = cell_id;
    row.strategy = config.strategy.to_string();
    const auto kind = config.strategy.kind();
    if (kind == StrategyKind::KeepHard || kind == StrategyKind::KeepEasy)
        row.xi = config.strategy.threshold();
    if (kind == StrategyKind::SigmoidPower) row.exponent = config.strategy.exponent();
    row.d = config.d;
    row.n = config.n;
    row.phi = static_cast<double>(config.d) / static_cast<double>(config.n);
    row.lambda = config.lambda;
    row.rho = config.rho;
    row.seed = config.seed;

    try {
        config.validate();
        const StrategyScalars sc = compute_scalars(config.strategy, config.rho);
        row.p = sc.p;
        row.gamma = sc.gamma;
        row.beta = sc.beta;
        row.beta_tilde = sc.beta_tilde;
        TheoryPrediction pred;
        if (config.lambda > 0.0) {
            const TheoryReport rep = theory_report({row.phi, config.lambda, sc.p}, sc);
            row.m = rep.state.m;
            row.m_prime = rep.state.m_prime;
            row.m_tilde = rep.state.m_tilde;
            pred = rep.prediction;
        } else {
            pred = ridgeless_test_error(sc, row.phi, sc.p);
        }
        row.m0 = pred.m0;
        row.nu0 = pred.nu0;
        row.theory_error = pred.test_error;
    } catch (const std::exception& e) {
        row.error_code = error_code_for(e);
    }

    if (empirics && row.error_code != "invalid_argument") {
        try {
            const CellAggregate agg = run_cell(config, 1);
            row.trials = agg.trials;
            if (agg.failures < agg.trials) {
                row.empirical_mean = agg.mean_error;
                row.empirical_std = agg.std_error;
            }
            if (agg.failures > 0 && row.error_code == "ok") row.error_code = "trial_failures";
        } catch (const std::exception& e) {
            if (row.error_code == "ok") row.error_code = error_code_for(e);
        }
    }
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const long cells = spec.cell_count();
    std::vector<SweepRow> rows(static_cast<std::size_t>(cells));
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long i = next++; i < cells; i = next++) {
            SweepRow& row = rows[static_cast<std::size_t>(i)];
            try {
                row = evaluate_cell(cell_config(spec, i), i, spec.empirics);
            } catch (const std::exception& e) {
                row = SweepRow{};
                row.cell_id = i;
                row.strategy = spec.base.strategy.to_string();
                row.error_code = error_code_for(e);
            }
        }
    };
    const int n_threads = static_cast<int>(std::min<long>(spec.workers, cells));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

std::vector<std::string> preset_names() {
    return {"theory-scaling", "figcool", "figcool-small", "oversample-curve"};
}

SweepSpec preset(std::string_view name) {
    SweepSpec s;
    s.name = std::string(name);
    s.csv_path = std::string(name) + ".csv";
    s.base.rho = 1.0;
    if (name == "theory-scaling") {
        // Accuracy vs kept count, one curve per keep probability (p = 1 is keep-all).
        s.base.d = 512;
        s.base.lambda = 1e-2;
        s.base.strategy = SelectionStrategy::keep_hard(1.0);
        s.axes = {{"p", {"1", "0.8", "0.5", "0.3", "0.1", "0.02"}},
                  {"kept", {"64", "128", "256", "384", "512", "768", "1024", "1536", "2048",
                            "3072", "4096", "6144", "8192", "16384"}}};
    } else if (name == "figcool") {
        s.base.d = 350;
        s.base.strategy = SelectionStrategy::keep_hard(1.0);
        s.base.trials = 200;
        s.empirics = true;
        s.axes = {{"lambda", {"1e-06", "0.01"}},
                  {"xi", {"0.5", "1", "2"}},
                  {"n", {"140", "210", "280", "420", "560", "700", "1050", "1400"}}};
    } else if (name == "figcool-small") {
        s.base.d = 100;
        s.base.strategy = SelectionStrategy::keep_hard(1.0);
        s.base.trials = 50;
        s.empirics = true;
        s.axes = {{"lambda", {"1e-06", "0.01"}},
                  {"xi", {"1"}},
                  {"n", {"60", "100", "200", "300", "400"}}};
    } else if (name == "oversample-curve") {
        // Fixed kept count, growing pool: p = 1 / ratio.
        s.base.d = 512;
        s.base.lambda = 1e-2;
        s.base.strategy = SelectionStrategy::keep_hard(1.0);
        s.axes = {{"kept", {"1024"}},
                  {"ratio", {"1", "1.25", "1.5", "2", "2.5", "3", "4", "6", "8", "12", "18",
                             "25", "35", "50"}}};
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw InvalidArgument("unknown preset '" + std::string(name) + "' (known: " + known + ")");
    }
    s.svg_path = std::string(name) + ".svg";
    return s;
}

}  // namespace prunelab::harness
