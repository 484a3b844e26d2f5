#pragma once

#include "jlcm/types.hpp"

#include <cstdint>

namespace jlcm {

// Data-generating process: X1 ~ N(0,1), X3 ~ Bernoulli(0.5), W ~ N(0, Sigma_i)
// through the covariance regression with designs (1, X3), per-visit class via
// the membership softmax on (X1, t), response via the class of the visit, and
// a Gompertz event time inverted in closed form from the class held at the
// last scheduled visit. Follow-up is min(event, administrative, uniform
// censor); visits at or past follow-up are dropped.
struct SimulationScenario {
  int n_subjects = 200;
  int max_visits = 6;
  double visit_spacing = 0.2;
  double admin_censoring = 1.2;
  double censor_lo = 0.4;
  double censor_hi = 2.0;
  std::uint64_t seed = 1;
  int q = 2;
  ParameterSet truth;
};

// Two-class truth with covariates (X1, Time) in membership and response,
// random slope-intercept pair plus frailty, covariance designs (1, X3).
SimulationScenario scenario_defaults();

// Deterministic given the seed; per-subject substreams keep subjects
// independent of each other and of N.
Dataset simulate_dataset(const SimulationScenario& scenario);

// Closed-form inversion of the Gompertz cumulative hazard at -log(u).
// Returns +infinity when the total hazard mass is below -log(u) (gamma < 0
// leaves genuine never-event probability).
double invert_survival(double u, double lambda0, double gamma, double eta);

}  // namespace jlcm
