#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prunelab/errors.hpp"
#include "prunelab/harness/csv.hpp"
#include "prunelab/harness/sweep.hpp"
#include "prunelab/practice.hpp"
#include "prunelab/selection.hpp"
#include "prunelab/simulate.hpp"
#include "prunelab/spectral.hpp"

namespace py = pybind11;
using namespace prunelab;

namespace {

py::dict prediction_dict(const TheoryPrediction& p) {
    py::dict d;
    d["m0"] = p.m0;
    d["nu0"] = p.nu0;
    d["cosine"] = p.cosine;
    d["test_error"] = p.test_error;
    d["test_error_gaussian"] = p.test_error_gaussian;
    d["regime"] = std::string(regime_name(p.regime));
    return d;
}

py::dict scalars_dict(const StrategyScalars& s) {
    py::dict d;
    d["p"] = s.p;
    d["rho"] = s.rho;
    d["gamma"] = s.gamma;
    d["beta"] = s.beta;
    d["beta_tilde"] = s.beta_tilde;
    return d;
}

SelectionStrategy as_strategy(const py::object& o) {
    if (py::isinstance<py::str>(o)) return SelectionStrategy::parse(o.cast<std::string>());
    return o.cast<SelectionStrategy>();
}

}  // namespace

PYBIND11_MODULE(_prunelab, m) {
    m.doc() = "Native core of prunelab";

    // Translators run newest first, so subclasses are registered after their bases.
    auto& invalid = py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    auto& numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<RidgelessRequired>(m, "RidgelessRequired", invalid.ptr());
    py::register_exception<NoClosedForm>(m, "NoClosedForm", invalid.ptr());
    py::register_exception<InterpolationThreshold>(m, "InterpolationThreshold", numerical.ptr());

    py::class_<SelectionStrategy>(m, "SelectionStrategy")
        .def_static("keep_all", &SelectionStrategy::keep_all)
        .def_static("keep_hard", &SelectionStrategy::keep_hard, py::arg("xi"))
        .def_static("keep_easy", &SelectionStrategy::keep_easy, py::arg("xi"))
        .def_static("sigmoid_power", &SelectionStrategy::sigmoid_power, py::arg("exponent"))
        .def_static("parse", [](const std::string& s) { return SelectionStrategy::parse(s); })
        .def_property_readonly("kind", [](const SelectionStrategy& s) { return std::string(s.kind_name()); })
        .def("__call__", [](const SelectionStrategy& s, double t) { return s(t); })
        .def("__str__", &SelectionStrategy::to_string)
        .def("__repr__", [](const SelectionStrategy& s) { return "SelectionStrategy('" + s.to_string() + "')"; })
        .def(py::self == py::self);

    m.def("compute_scalars", [](const py::object& s, double rho) { return scalars_dict(compute_scalars(as_strategy(s), rho)); },
          py::arg("strategy"), py::arg("rho"));
    m.def("threshold_for_keep_probability",
          [](const std::string& kind, double p) {
              if (kind == "kh") return threshold_for_keep_probability(StrategyKind::KeepHard, p);
              if (kind == "ke") return threshold_for_keep_probability(StrategyKind::KeepEasy, p);
              throw InvalidArgument("kind must be 'kh' or 'ke'");
          },
          py::arg("kind"), py::arg("p"));

    m.def("stieltjes_m", [](double phi, double lambda, double p) { return stieltjes_m({phi, lambda, p}); },
          py::arg("phi"), py::arg("lambda_"), py::arg("p") = 1.0);
    m.def("spectral_state",
          [](const py::object& s, double rho, double phi, double lambda) {
              const auto sc = compute_scalars(as_strategy(s), rho);
              const auto st = spectral_state({phi, lambda, sc.p}, sc);
              py::dict d;
              d["m"] = st.m;
              d["m_prime"] = st.m_prime;
              d["m_tilde"] = st.m_tilde;
              d["m_tilde_prime"] = st.m_tilde_prime;
              d["s"] = st.s;
              return d;
          },
          py::arg("strategy"), py::arg("rho"), py::arg("phi"), py::arg("lambda_"));
    m.def("theory_test_error",
          [](const py::object& s, double rho, double phi, double lambda) {
              const auto sc = compute_scalars(as_strategy(s), rho);
              return prediction_dict(theory_test_error({phi, lambda, sc.p}, sc));
          },
          py::arg("strategy"), py::arg("rho"), py::arg("phi"), py::arg("lambda_"));
    m.def("ridgeless_test_error",
          [](const py::object& s, double rho, double phi) {
              const auto sc = compute_scalars(as_strategy(s), rho);
              return prediction_dict(ridgeless_test_error(sc, phi, sc.p));
          },
          py::arg("strategy"), py::arg("rho"), py::arg("phi"));

    m.def("run_cell",
          [](int d, int n, double lambda, const py::object& s, double rho, int trials, std::uint64_t seed,
             int workers) {
              ExperimentConfig c;
              c.d = d;
              c.n = n;
              c.lambda = lambda;
              c.strategy = as_strategy(s);
              c.rho = rho;
              c.trials = trials;
              c.seed = seed;
              CellAggregate a;
              {
                  py::gil_scoped_release release;
                  a = run_cell(c, workers);
              }
              py::dict out;
              out["mean_error"] = a.mean_error;
              out["std_error"] = a.std_error;
              out["kept_mean"] = a.kept_mean;
              out["trials"] = a.trials;
              out["failures"] = a.failures;
              return out;
          },
          py::arg("d"), py::arg("n"), py::arg("lambda_"), py::arg("strategy"), py::arg("rho") = 1.0,
          py::arg("trials") = 1, py::arg("seed") = 0, py::arg("workers") = 1);

    m.def("compare_adaptive_static",
          [](const py::object& s, int n_seeds, std::uint64_t seed) {
              DPConfig c;
              c.selection = as_strategy(s);
              c.seed = seed;
              PairedReport r;
              {
                  py::gil_scoped_release release;
                  r = compare_adaptive_static(c, n_seeds);
              }
              py::dict out;
              out["deltas"] = r.deltas;
              out["mean_delta"] = r.mean_delta;
              out["delta_standard_error"] = r.delta_standard_error;
              out["mean_adaptive"] = r.mean_adaptive;
              out["mean_static"] = r.mean_static;
              out["win_rate"] = r.win_rate;
              return out;
          },
          py::arg("strategy") = "kh:xi=0.5", py::arg("n_seeds") = 20, py::arg("seed") = 0);

    m.def("preset_names", &harness::preset_names);
    m.def("preset_config", [](const std::string& name) { return harness::serialize_sweep(harness::preset(name)); },
          py::arg("name"));
    m.def("run_sweep_csv",
          [](const std::string& config_text, int workers) {
              auto spec = harness::parse_sweep(config_text);
              if (workers > 0) spec.workers = workers;
              py::gil_scoped_release release;
              return harness::sweep_csv_string(harness::run_sweep(spec));
          },
          py::arg("config"), py::arg("workers") = 0);
}
