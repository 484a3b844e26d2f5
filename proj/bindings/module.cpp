#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jlcm/commands.hpp"
#include "jlcm/covariance.hpp"
#include "jlcm/data_io.hpp"
#include "jlcm/inference.hpp"
#include "jlcm/likelihood.hpp"
#include "jlcm/mcmc.hpp"
#include "jlcm/simulate.hpp"

namespace py = pybind11;
using namespace jlcm;

namespace {

SamplerConfig make_sampler(int iterations, int burn_in, int thinning, std::uint64_t seed,
                           bool prior_only) {
  SamplerConfig cfg;
  cfg.iterations = iterations;
  cfg.burn_in = burn_in;
  cfg.thinning = thinning;
  cfg.seed = seed;
  cfg.prior_only = prior_only;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_jlcm, m) {
  m.doc() = "Joint latent class model: simulation, MCMC fitting, and prediction";

  py::register_exception<Error>(m, "JlcmError");

  py::class_<Dims>(m, "Dims")
      .def_readonly("membership", &Dims::membership)
      .def_readonly("longitudinal", &Dims::longitudinal)
      .def_readonly("random", &Dims::random)
      .def_readonly("survival", &Dims::survival);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("n_subjects", &Dataset::n_subjects)
      .def_property_readonly("n_observations", &Dataset::n_observations)
      .def_property_readonly("dims", [](const Dataset& d) { return d.dims; })
      .def_property_readonly("has_truth", &Dataset::has_truth)
      .def("subject_ids",
           [](const Dataset& d) {
             std::vector<std::string> ids;
             for (const auto& s : d.subjects) ids.push_back(s.id);
             return ids;
           })
      .def("times", [](const Dataset& d, int i) { return d.subjects.at(i).times; })
      .def("outcomes", [](const Dataset& d, int i) { return d.subjects.at(i).y; })
      .def("event_time", [](const Dataset& d, int i) { return d.subjects.at(i).event_time; })
      .def("event", [](const Dataset& d, int i) { return d.subjects.at(i).event; })
      .def("true_classes", [](const Dataset& d, int i) { return d.true_classes.at(i); });

  py::class_<ParameterSet>(m, "ParameterSet")
      .def_readonly("xi", &ParameterSet::xi)
      .def_readonly("beta", &ParameterSet::beta)
      .def_readonly("omega", &ParameterSet::omega)
      .def_readonly("gamma", &ParameterSet::gamma)
      .def_readonly("tau", &ParameterSet::tau)
      .def_readonly("lambda0", &ParameterSet::lambda0)
      .def_readonly("alpha1", &ParameterSet::alpha1)
      .def_readonly("alpha2", &ParameterSet::alpha2)
      .def_property_readonly("n_classes", &ParameterSet::n_classes);

  py::class_<ChainOutput>(m, "FitResult")
      .def_property_readonly("n_draws", &ChainOutput::n_draws)
      .def_property_readonly("n_classes", [](const ChainOutput& c) { return c.n_classes; })
      .def_property_readonly("loglik_trace",
                             [](const ChainOutput& c) { return c.loglik_trace; })
      .def_property_readonly("draw_loglik", [](const ChainOutput& c) { return c.draw_loglik; })
      .def("posterior_mean", &posterior_mean_parameters)
      .def("acceptance", [](const ChainOutput& c) {
        std::vector<std::tuple<std::string, long, long>> out;
        for (const auto& a : c.acceptance) out.emplace_back(a.block, a.proposals, a.accepts);
        return out;
      });

  m.def(
      "simulate",
      [](std::uint64_t seed, int n_subjects) {
        SimulationScenario scenario = scenario_defaults();
        scenario.seed = seed;
        scenario.n_subjects = n_subjects;
        return simulate_dataset(scenario);
      },
      py::arg("seed") = 1, py::arg("n_subjects") = 200);

  m.def(
      "load_dataset",
      [](const std::string& path) { return load_dataset(path, SchemaConfig{}); },
      py::arg("path"));
  m.def(
      "write_dataset",
      [](const std::string& path, const Dataset& data) {
        write_dataset(path, data, SchemaConfig{});
      },
      py::arg("path"), py::arg("data"));
  m.def("write_truth", &write_truth, py::arg("path"), py::arg("data"));

  m.def(
      "fit",
      [](const Dataset& data, int k, int iterations, int burn_in, int thinning,
         std::uint64_t seed, bool prior_only) {
        const PriorConfig prior = PriorConfig::defaults(data.dims.longitudinal);
        return run_chain(data, k,  prior,
                         make_sampler(iterations, burn_in, thinning, seed, prior_only));
      },
      py::arg("data"), py::arg("k") = 2, py::arg("iterations") = 5000,
      py::arg("burn_in") = 2000, py::arg("thinning") = 1, py::arg("seed") = 1,
      py::arg("prior_only") = false);

  m.def(
      "summarize",
      [](const ChainOutput& chain, const Dataset& data) {
        std::vector<std::tuple<std::string, double, double, double, double>> out;
        for (const auto& row : summarize(chain, data))
          out.emplace_back(row.parameter, row.estimate, row.sd, row.ci_low, row.ci_high);
        return out;
      },
      py::arg("fit"), py::arg("data"));

  m.def(
      "posterior_membership",
      [](const ChainOutput& chain, const Dataset& data) {
        std::vector<std::tuple<std::string, int, VectorXd, int>> out;
        for (const auto& row : posterior_membership(chain, data))
          out.emplace_back(row.subject_id, row.visit, row.probs, row.modal_class);
        return out;
      },
      py::arg("fit"), py::arg("data"));

  m.def(
      "dic",
      [](const ChainOutput& chain, const Dataset& data) {
        const ModelScore score = compute_dic(chain, data);
        return py::make_tuple(score.mean_deviance, score.p_d, score.dic);
      },
      py::arg("fit"), py::arg("data"));

  m.def(
      "dynamic_survival",
      [](const ChainOutput& chain, const Dataset& data, double landmark,
         const std::vector<double>& horizons) {
        std::vector<std::tuple<std::string, double, double, double, bool>> out;
        for (const auto& row : dynamic_survival(chain, data, landmark, horizons))
          out.emplace_back(row.subject_id, row.landmark, row.horizon, row.value, row.ok);
        return out;
      },
      py::arg("fit"), py::arg("data"), py::arg("landmark"), py::arg("horizons"));

  m.def("error_rate", &error_rate, py::arg("estimated"), py::arg("truth"));
  m.def("ipcw_auc", &ipcw_auc, py::arg("marker"), py::arg("times"), py::arg("events"),
        py::arg("landmark"), py::arg("horizon"));

  m.def("membership_probabilities", &membership_probabilities, py::arg("xi"), py::arg("x1"));
  m.def(
      "covariance_matrix",
      [](const VectorXd& alpha1, const VectorXd& alpha2, const VectorXd& a_design,
         const VectorXd& b_design, int q) {
        return sigma_from_factors(build_factors(alpha1, alpha2, a_design, b_design, q));
      },
      py::arg("alpha1"), py::arg("alpha2"), py::arg("a_design"), py::arg("b_design"),
      py::arg("q"));
  m.def(
      "cumulative_hazard",
      [](double t, const VectorXd& x3, const VectorXd& omega, double gamma, double lambda0,
         double upsilon) {
        return cumulative_hazard(t, x3, omega, gamma, lambda0, upsilon);
      },
      py::arg("t"), py::arg("x3"), py::arg("omega"), py::arg("gamma"), py::arg("lambda0"),
      py::arg("upsilon"));
}
