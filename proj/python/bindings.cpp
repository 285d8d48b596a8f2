#include <optional>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ebfission/aurora.hpp"
#include "ebfission/baselines.hpp"
#include "ebfission/config.hpp"
#include "ebfission/error.hpp"
#include "ebfission/fission.hpp"
#include "ebfission/harness.hpp"
#include "ebfission/isotonic.hpp"
#include "ebfission/model.hpp"

namespace py = pybind11;
using namespace ebfission;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) {
  if (a.ndim() != 1) throw InputError("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

FissionConfig make_fission(const std::string& scheme, std::optional<double> tau, std::optional<double> g_split,
                           double sigma2) {
  const auto s = parse_fission_scheme(scheme);
  if (tau.has_value() == g_split.has_value()) throw ConfigError("give exactly one of tau and g_split");
  FissionConfig cfg = tau ? (s == FissionScheme::GaussianAdditive ? FissionConfig::gaussian(*tau, sigma2)
                                                                 : FissionConfig::poisson(*tau))
                          : FissionConfig::from_info_split(s, *g_split, sigma2);
  cfg.validate();
  return cfg;
}

py::dict summary_dict(const SimulationReport& rep, const EstimatorSummary& e) {
  py::dict d;
  d["estimator"] = e.label;
  d["likelihood"] = std::string(rep.config.lik.name());
  d["mean_mse"] = e.mean_mse;
  d["se_mse"] = e.se_mse;
  d["per_rep_mse"] = to_array(e.per_rep_mse);
  d["unconverged"] = e.unconverged;
  d["n"] = rep.config.n;
  d["mc_reps"] = rep.config.mc_reps;
  d["seed"] = rep.config.base_seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Empirical Bayes on fissioned replicates";

  auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<RuntimeError>(m, "SimulationError", PyExc_RuntimeError);
  (void)config_error;

  py::class_<PriorSpec>(m, "PriorSpec")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("atoms"), py::arg("weights"))
      .def_static("uniform", &PriorSpec::uniform, py::arg("atoms"))
      .def_static("point_mass", &PriorSpec::point_mass, py::arg("atom"))
      .def_property_readonly("atoms", [](const PriorSpec& p) { return to_array(p.atoms()); })
      .def_property_readonly("weights", [](const PriorSpec& p) { return to_array(p.weights()); })
      .def("mean", &PriorSpec::mean)
      .def("variance", &PriorSpec::variance)
      .def("__eq__", [](const PriorSpec& a, const PriorSpec& b) { return a == b; })
      .def("__repr__", [](const PriorSpec& p) { return "PriorSpec(" + prior_to_toml(p) + ")"; });

  py::class_<LikelihoodModel>(m, "LikelihoodModel")
      .def_static("gaussian", &LikelihoodModel::gaussian, py::arg("variance") = 1.0)
      .def_static("poisson", &LikelihoodModel::poisson)
      .def_property_readonly("name", [](const LikelihoodModel& l) { return std::string(l.name()); })
      .def_property_readonly("variance", &LikelihoodModel::variance)
      .def("__eq__", [](const LikelihoodModel& a, const LikelihoodModel& b) { return a == b; })
      .def("__repr__", [](const LikelihoodModel& l) { return "LikelihoodModel." + std::string(l.name()) + "()"; });

  m.def(
      "sample_dataset",
      [](const PriorSpec& prior, const LikelihoodModel& lik, std::size_t n, std::uint64_t seed) {
        const auto d = sample_dataset(prior, lik, n, seed);
        return py::make_tuple(to_array(d.thetas), to_array(d.xs));
      },
      py::arg("prior"), py::arg("likelihood"), py::arg("n"), py::arg("seed"),
      "Draw (thetas, xs) from the hierarchical model.");

  m.def(
      "posterior_means",
      [](const PriorSpec& prior, const LikelihoodModel& lik, const Array& xs) {
        return to_array(posterior_means(prior, lik, to_vec(xs)));
      },
      py::arg("prior"), py::arg("likelihood"), py::arg("xs"), "Oracle Bayes rule E[theta | X = x].");

  m.def("tau_from_info_split",
        [](const std::string& scheme, double g) { return tau_from_info_split(parse_fission_scheme(scheme), g); },
        py::arg("scheme"), py::arg("g_split"));

  m.def(
      "fission",
      [](const Array& xs, const std::string& scheme, std::optional<double> tau, std::optional<double> g_split,
         std::uint64_t seed, double sigma2) {
        const auto cfg = make_fission(scheme, tau, g_split, sigma2);
        const auto samples = fission_dataset(to_vec(xs), cfg, seed);
        std::vector<double> f, g;
        f.reserve(samples.size());
        g.reserve(samples.size());
        for (const auto& s : samples) {
          f.push_back(s.f);
          g.push_back(s.g);
        }
        return py::make_tuple(to_array(f), to_array(g));
      },
      py::arg("xs"), py::arg("scheme"), py::kw_only(), py::arg("tau") = py::none(),
      py::arg("g_split") = py::none(), py::arg("seed") = 0, py::arg("sigma2") = 1.0,
      "Split each observation into (f, g). Give either tau or g_split.");

  py::class_<MonotoneStepFn>(m, "MonotoneStepFn")
      .def_property_readonly("knots", [](const MonotoneStepFn& fn) { return to_array(fn.knots()); })
      .def_property_readonly("levels", [](const MonotoneStepFn& fn) { return to_array(fn.levels()); })
      .def(
          "__call__",
          [](const MonotoneStepFn& fn, const Array& x, bool linear) {
            std::vector<double> out;
            for (double v : to_vec(x)) out.push_back(fn.predict(v, linear ? Interpolation::Linear : Interpolation::Step));
            return to_array(out);
          },
          py::arg("x"), py::arg("linear") = false);

  m.def(
      "fit_isotonic",
      [](const Array& x, const Array& y, std::optional<Array> w) {
        const auto xv = to_vec(x);
        const auto yv = to_vec(y);
        return w ? fit_isotonic(xv, yv, to_vec(*w)) : fit_isotonic(xv, yv);
      },
      py::arg("x"), py::arg("y"), py::arg("weights") = py::none(),
      "Weighted least-squares nondecreasing fit of y on x (PAVA).");

  m.def(
      "aurora_estimate",
      [](const Array& xs, const std::string& scheme, std::optional<double> tau, std::optional<double> g_split,
         std::size_t fission_reps, std::uint64_t seed, unsigned threads, double sigma2) {
        AuroraConfig cfg;
        cfg.fission = make_fission(scheme, tau, g_split, sigma2);
        cfg.fission_reps = fission_reps;
        cfg.base_seed = seed;
        cfg.threads = threads;
        const auto data = to_vec(xs);
        EstimateVector est;
        {
          py::gil_scoped_release release;
          est = aurora_estimate(data, cfg);
        }
        return to_array(est);
      },
      py::arg("xs"), py::arg("scheme"), py::kw_only(), py::arg("tau") = py::none(),
      py::arg("g_split") = py::none(), py::arg("fission_reps") = 100, py::arg("seed") = 0, py::arg("threads") = 1,
      py::arg("sigma2") = 1.0);

  py::class_<NpmleFit>(m, "NpmleFit")
      .def_property_readonly("grid", [](const NpmleFit& f) { return to_array(f.grid); })
      .def_property_readonly("weights", [](const NpmleFit& f) { return to_array(f.weights); })
      .def_property_readonly("loglik_trace", [](const NpmleFit& f) { return to_array(f.loglik_trace); })
      .def_readonly("loglik", &NpmleFit::loglik)
      .def_readonly("iterations", &NpmleFit::iterations)
      .def_readonly("converged", &NpmleFit::converged)
      .def("estimate", [](const NpmleFit& f, const Array& xs, const LikelihoodModel& lik) {
        return to_array(npmle_estimate(to_vec(xs), f, lik));
      });

  m.def(
      "fit_npmle",
      [](const Array& xs, const LikelihoodModel& lik, std::size_t grid_size, std::size_t max_iter, double tol) {
        NpmleOptions opts;
        opts.grid_size = grid_size;
        opts.max_iter = max_iter;
        opts.tol = tol;
        const auto data = to_vec(xs);
        py::gil_scoped_release release;
        return fit_npmle(data, lik, opts);
      },
      py::arg("xs"), py::arg("likelihood"), py::kw_only(), py::arg("grid_size") = 300, py::arg("max_iter") = 2000,
      py::arg("tol") = 1e-8, "Grid EM approximation of the nonparametric MLE of the prior.");

  m.def("mse", [](const Array& est, const Array& thetas) { return mse(to_vec(est), to_vec(thetas)); },
        py::arg("estimates"), py::arg("thetas"));

  m.def("benchmark_defaults_toml", &benchmark_defaults_toml, py::arg("seed") = 20231016,
        "TOML for the three-point-prior risk comparison under both likelihoods.");

  m.def(
      "simulate",
      [](const std::string& toml_text, std::optional<std::uint64_t> seed, std::optional<std::size_t> mc_reps,
         std::optional<unsigned> threads) {
        CliOverrides ov;
        ov.seed = seed;
        ov.mc_reps = mc_reps;
        ov.threads = threads;
        const auto cli = parse_cli_config(toml_text, ov, "<config>");
        std::vector<SimulationReport> reports;
        {
          py::gil_scoped_release release;
          for (const auto& exp : cli.experiments) reports.push_back(run_experiment(exp));
        }
        py::list rows;
        for (const auto& rep : reports) {
          for (const auto& e : rep.estimators) rows.append(summary_dict(rep, e));
        }
        return rows;
      },
      py::arg("config_toml"), py::kw_only(), py::arg("seed") = py::none(), py::arg("mc_reps") = py::none(),
      py::arg("threads") = py::none(), "Run the Monte Carlo comparison; one dict per (likelihood, estimator).");
}
