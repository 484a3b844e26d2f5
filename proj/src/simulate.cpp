#include "jlcm/simulate.hpp"

#include "jlcm/covariance.hpp"
#include "jlcm/likelihood.hpp"
#include "jlcm/rng.hpp"

#include <cmath>
#include <limits>

namespace jlcm {

SimulationScenario scenario_defaults() {
  SimulationScenario sc;
  ParameterSet& p = sc.truth;
  p.xi.resize(2, 2);
  p.xi << 0.01, 0.2,  // class 1: 0.01 X1 + 0.2 t
      0.0, 1.0;       // class 2: t
  p.beta.resize(2, 2);
  p.beta << 2.0, 1.5,  // class 1: 2 X1 + 1.5 t
      4.0, 3.0;        // class 2: 4 X1 + 3 t
  p.tau.resize(2);
  p.tau << 0.1, 0.5;
  p.lambda0.resize(2);
  p.lambda0 << 0.2, 0.1;
  p.gamma.resize(2);
  p.gamma << 0.2, -0.2;
  p.omega.resize(2, 1);
  p.omega << 0.5, 0.8;
  p.alpha1.resize(2);
  p.alpha1 << -0.2, -0.5;
  p.alpha2.resize(2);
  p.alpha2 << 0.1, 0.3;
  return sc;
}

double invert_survival(double u, double lambda0, double gamma, double eta) {
  const double scale = lambda0 * std::exp(eta);
  if (std::abs(gamma) < kGammaEps) return -std::log(u) / scale;
  // log1p keeps the round trip H(T) = -log u exact near the gamma -> 0 switch
  const double x = -gamma * std::log(u) / scale;
  if (x <= -1.0) return std::numeric_limits<double>::infinity();
  return std::log1p(x) / gamma;
}

Dataset simulate_dataset(const SimulationScenario& scenario) {
  const ParameterSet& truth = scenario.truth;
  const int k_count = truth.n_classes();
  const int q = scenario.q;
  const int m = scenario.max_visits;

  if (scenario.n_subjects < 1 || m < 1 || scenario.visit_spacing <= 0.0 ||
      scenario.admin_censoring <= 0.0 || scenario.censor_lo <= 0.0 ||
      scenario.censor_hi < scenario.censor_lo)
    throw Error("config", "invalid simulation scenario");
  // the generating process is fixed to covariates (x1, t), hazard covariate
  // x3, random design (1, t), covariance designs (1, x3)
  if (q != 2 || truth.xi.cols() != 2 || truth.beta.cols() != 2 || truth.omega.cols() != 1 ||
      truth.alpha1.size() != 2 || truth.alpha2.size() != 2 || k_count < 1)
    throw Error("config", "simulation truth must follow the default design shapes");

  Dataset data;
  data.dims.membership = static_cast<int>(truth.xi.cols());
  data.dims.longitudinal = static_cast<int>(truth.beta.cols());
  data.dims.random = q;
  data.dims.survival = static_cast<int>(truth.omega.cols());
  data.dims.phi_design = static_cast<int>(truth.alpha1.size());
  data.dims.logd_design = static_cast<int>(truth.alpha2.size());
  data.membership_names = {"x1", "time"};
  data.longitudinal_names = {"x1", "time"};
  data.random_names = {"intercept", "time"};
  data.survival_names = {"x3"};
  data.phi_design_names = {"intercept", "x3"};
  data.logd_design_names = {"intercept", "x3"};
  data.true_k = k_count;

  for (int i = 0; i < scenario.n_subjects; ++i) {
    Rng rng(substream_seed(scenario.seed, static_cast<std::uint64_t>(i)));

    const double x1 = rng.normal();
    const double x3 = rng.bernoulli(0.5);
    VectorXd a(2), b(2);
    a << 1.0, x3;
    b << 1.0, x3;
    const CholeskyFactors f = build_factors(truth.alpha1, truth.alpha2, a, b, q);
    const VectorXd w = draw_effects(rng, f);
    const VectorXd u_eff = w.head(q);
    const double upsilon = w[q];

    // full schedule first so the draw sequence does not depend on follow-up
    VectorXi labels(m);
    VectorXd responses(m);
    for (int j = 0; j < m; ++j) {
      const double t = scenario.visit_spacing * j;
      VectorXd x1row(2);
      x1row << x1, t;
      labels[j] = rng.categorical_log(membership_log_probabilities(truth.xi, x1row));
    }
    for (int j = 0; j < m; ++j) {
      const double t = scenario.visit_spacing * j;
      VectorXd zrow(2);
      zrow << 1.0, t;
      const int k = labels[j];
      const double mean = truth.beta(k, 0) * x1 + truth.beta(k, 1) * t + zrow.dot(u_eff);
      responses[j] = mean + rng.normal() * std::sqrt(truth.tau[k]);
    }

    // event class is the one held at the last scheduled visit
    const int k_surv = labels[m - 1];
    const double eta = truth.omega(k_surv, 0) * x3 + upsilon;
    const double u_draw = rng.uniform();
    const double event_time =
        invert_survival(u_draw, truth.lambda0[k_surv], truth.gamma[k_surv], eta);
    const double censor_time =
        std::min(scenario.admin_censoring, rng.uniform(scenario.censor_lo, scenario.censor_hi));

    Subject s;
    s.id = std::to_string(i + 1);
    s.event = event_time <= censor_time ? 1 : 0;
    s.event_time = std::min(event_time, censor_time);

    int kept = 0;
    while (kept < m && scenario.visit_spacing * kept < s.event_time) ++kept;
    if (kept == 0) kept = 1;  // follow-up is positive, visit 0 always observed

    s.times.resize(kept);
    s.y.resize(kept);
    s.x1.resize(kept, 2);
    s.x2.resize(kept, 2);
    s.z.resize(kept, q);
    for (int j = 0; j < kept; ++j) {
      const double t = scenario.visit_spacing * j;
      s.times[j] = t;
      s.y[j] = responses[j];
      s.x1.row(j) << x1, t;
      s.x2.row(j) << x1, t;
      s.z.row(j) << 1.0, t;
    }
    s.x3 = VectorXd::Constant(1, x3);
    s.a_design = a;
    s.b_design = b;

    data.true_classes.push_back(labels.head(kept));
    data.true_effects.push_back(w);
    data.subjects.push_back(std::move(s));
  }
  return data;
}

}  // namespace jlcm
