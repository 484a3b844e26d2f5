#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jlcm/covariance.hpp"
#include "jlcm/likelihood.hpp"
#include "jlcm/simulate.hpp"
#include "support.hpp"

#include <cmath>
#include <limits>

using namespace jlcm;
using namespace testsupport;

TEST_CASE("default scenario carries the reference two-class truth") {
  const SimulationScenario sc = scenario_defaults();
  CHECK(sc.n_subjects == 200);
  CHECK(sc.max_visits == 6);
  CHECK(sc.visit_spacing == 0.2);
  CHECK(sc.admin_censoring == 1.2);
  CHECK(sc.censor_lo == 0.4);
  CHECK(sc.censor_hi == 2.0);
  CHECK(sc.q == 2);

  const ParameterSet& p = sc.truth;
  REQUIRE(p.n_classes() == 2);
  CHECK(p.xi(0, 0) == 0.01);
  CHECK(p.xi(0, 1) == 0.2);
  CHECK(p.xi(1, 0) == 0.0);
  CHECK(p.xi(1, 1) == 1.0);
  CHECK(p.beta(0, 0) == 2.0);
  CHECK(p.beta(0, 1) == 1.5);
  CHECK(p.beta(1, 0) == 4.0);
  CHECK(p.beta(1, 1) == 3.0);
  CHECK(p.tau[0] == 0.1);
  CHECK(p.tau[1] == 0.5);
  CHECK(p.lambda0[0] == 0.2);
  CHECK(p.lambda0[1] == 0.1);
  CHECK(p.gamma[0] == 0.2);
  CHECK(p.gamma[1] == -0.2);
  CHECK(p.omega(0, 0) == 0.5);
  CHECK(p.omega(1, 0) == 0.8);
  CHECK(p.alpha1[0] == -0.2);
  CHECK(p.alpha1[1] == -0.5);
  CHECK(p.alpha2[0] == 0.1);
  CHECK(p.alpha2[1] == 0.3);
}

TEST_CASE("event-time inversion solves the cumulative hazard exactly") {
  for (double u : {0.9, 0.5, 0.11}) {
    for (double gamma : {0.2, -0.05, 0.7}) {
      const double lambda0 = 0.2, eta = 0.4;
      const double t = invert_survival(u, lambda0, gamma, eta);
      if (!std::isfinite(t)) continue;
      const double h = lambda0 * std::exp(eta) * std::expm1(gamma * t) / gamma;
      CHECK(h == doctest::Approx(-std::log(u)).epsilon(1e-10));
    }
  }
  // near-zero shape falls back to the exponential inverse
  const double t0 = invert_survival(0.3, 0.2, 0.0, 0.4);
  CHECK(t0 == doctest::Approx(-std::log(0.3) / (0.2 * std::exp(0.4))).epsilon(1e-12));
  CHECK(invert_survival(0.3, 0.2, 1e-12, 0.4) == doctest::Approx(t0).epsilon(1e-6));
}

TEST_CASE("negative shape leaves a never-event mass") {
  // total hazard mass lambda0 e^eta / |gamma| = 0.5, survival floor e^-0.5
  const double floor = std::exp(-0.5);
  CHECK(std::isinf(invert_survival(floor - 0.01, 0.1, -0.2, 0.0)));
  CHECK(std::isfinite(invert_survival(floor + 0.01, 0.1, -0.2, 0.0)));
}

TEST_CASE("simulation is deterministic in the seed") {
  SimulationScenario sc = scenario_defaults();
  sc.n_subjects = 40;
  sc.seed = 123;
  const Dataset a = simulate_dataset(sc);
  const Dataset b = simulate_dataset(sc);
  REQUIRE(a.n_subjects() == b.n_subjects());
  for (int i = 0; i < a.n_subjects(); ++i) {
    CHECK((a.subjects[i].y - b.subjects[i].y).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.subjects[i].event_time == b.subjects[i].event_time);
    CHECK((a.true_effects[i] - b.true_effects[i]).cwiseAbs().maxCoeff() == 0.0);
  }
  sc.seed = 124;
  const Dataset c = simulate_dataset(sc);
  bool any_diff = false;
  for (int i = 0; i < a.n_subjects() && !any_diff; ++i)
    any_diff = (a.subjects[i].y - c.subjects[i].y).cwiseAbs().maxCoeff() > 0.0;
  CHECK(any_diff);
}

TEST_CASE("per-subject substreams make subjects independent of the cohort size") {
  SimulationScenario small = scenario_defaults();
  small.n_subjects = 30;
  small.seed = 7;
  SimulationScenario large = small;
  large.n_subjects = 90;
  const Dataset a = simulate_dataset(small);
  const Dataset b = simulate_dataset(large);
  for (int i = 0; i < 30; ++i) {
    CHECK(a.subjects[i].n_visits() == b.subjects[i].n_visits());
    CHECK((a.subjects[i].y - b.subjects[i].y).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.subjects[i].event_time == b.subjects[i].event_time);
    CHECK(a.subjects[i].event == b.subjects[i].event);
  }
}

TEST_CASE("simulated datasets satisfy the structural invariants") {
  SimulationScenario sc = scenario_defaults();
  sc.n_subjects = 400;
  sc.seed = 11;
  const Dataset data = simulate_dataset(sc);
  REQUIRE(data.n_subjects() == 400);
  REQUIRE(data.has_truth());
  CHECK(data.true_k == 2);

  int events = 0;
  bool class_seen[2] = {false, false};
  for (int i = 0; i < 400; ++i) {
    const Subject& s = data.subjects[i];
    CHECK(s.id == std::to_string(i + 1));
    REQUIRE(s.n_visits() >= 1);
    REQUIRE(s.n_visits() <= 6);
    // every scheduled visit strictly before the terminal time is kept
    if (s.n_visits() < 6) CHECK(0.2 * s.n_visits() >= s.event_time);
    for (int j = 0; j < s.n_visits(); ++j) {
      CHECK(s.times[j] == doctest::Approx(0.2 * j).epsilon(1e-15));
      CHECK(s.times[j] < s.event_time);
      CHECK(s.x1(j, 0) == s.x1(0, 0));  // baseline covariate repeated
      CHECK(s.x1(j, 1) == s.times[j]);
      CHECK(s.z(j, 0) == 1.0);
    }
    CHECK((s.event == 0 || s.event == 1));
    CHECK(s.event_time > 0.0);
    CHECK(s.event_time <= sc.admin_censoring);
    if (s.event == 0) CHECK(s.event_time >= sc.censor_lo);
    CHECK((s.x3[0] == 0.0 || s.x3[0] == 1.0));
    CHECK(s.a_design[1] == s.x3[0]);
    events += s.event;

    REQUIRE(data.true_classes[i].size() == s.n_visits());
    for (int j = 0; j < s.n_visits(); ++j) {
      REQUIRE(data.true_classes[i][j] >= 0);
      REQUIRE(data.true_classes[i][j] <= 1);
      class_seen[data.true_classes[i][j]] = true;
    }
    CHECK(data.true_effects[i].size() == 3);
  }
  CHECK(events > 40);
  CHECK(events < 360);
  CHECK(class_seen[0]);
  CHECK(class_seen[1]);
}

TEST_CASE("baseline covariates follow their declared distributions") {
  SimulationScenario sc = scenario_defaults();
  sc.n_subjects = 400;
  sc.seed = 21;
  const Dataset data = simulate_dataset(sc);

  std::vector<double> x1;
  double x3_sum = 0.0;
  for (const auto& s : data.subjects) {
    x1.push_back(s.x1(0, 0));
    x3_sum += s.x3[0];
  }
  CHECK(ks_test_p(x1, [](double v) { return normal_cdf(v); }) > 1e-4);
  CHECK(x3_sum / 400.0 == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("responses are Gaussian around the class mean given the truth") {
  SimulationScenario sc = scenario_defaults();
  sc.n_subjects = 400;
  sc.seed = 31;
  const Dataset data = simulate_dataset(sc);
  const ParameterSet& p = sc.truth;

  std::vector<double> z_by_class[2];
  for (int i = 0; i < data.n_subjects(); ++i) {
    const Subject& s = data.subjects[i];
    const VectorXd& w = data.true_effects[i];
    for (int j = 0; j < s.n_visits(); ++j) {
      const int k = data.true_classes[i][j];
      const double mean =
          p.beta(k, 0) * s.x2(j, 0) + p.beta(k, 1) * s.x2(j, 1) + w[0] + w[1] * s.times[j];
      z_by_class[k].push_back((s.y[j] - mean) / std::sqrt(p.tau[k]));
    }
  }
  for (int k = 0; k < 2; ++k) {
    REQUIRE(z_by_class[k].size() > 200);
    CHECK(ks_test_p(z_by_class[k], [](double v) { return normal_cdf(v); }) > 1e-4);
  }
}

TEST_CASE("random effects match the x3-specific covariance") {
  SimulationScenario sc = scenario_defaults();
  sc.n_subjects = 4000;
  sc.seed = 41;
  const Dataset data = simulate_dataset(sc);

  for (double group : {0.0, 1.0}) {
    std::vector<VectorXd> ws;
    for (int i = 0; i < data.n_subjects(); ++i)
      if (data.subjects[i].x3[0] == group) ws.push_back(data.true_effects[i]);
    REQUIRE(ws.size() > 1000);

    VectorXd mean = VectorXd::Zero(3);
    for (const auto& w : ws) mean += w;
    mean /= double(ws.size());
    MatrixXd cov = MatrixXd::Zero(3, 3);
    for (const auto& w : ws) cov += (w - mean) * (w - mean).transpose();
    cov /= double(ws.size() - 1);

    VectorXd design(2);
    design << 1.0, group;
    const MatrixXd expected = sigma_from_factors(
        build_factors(sc.truth.alpha1, sc.truth.alpha2, design, design, 2));
    CHECK(mean.cwiseAbs().maxCoeff() < 0.1);
    CHECK((cov - expected).cwiseAbs().maxCoeff() < 0.15);
  }
}

TEST_CASE("very early censoring still keeps the baseline visit") {
  SimulationScenario sc = scenario_defaults();
  sc.n_subjects = 50;
  sc.seed = 5;
  sc.censor_lo = 0.001;
  sc.censor_hi = 0.05;
  const Dataset data = simulate_dataset(sc);
  for (const auto& s : data.subjects) {
    CHECK(s.n_visits() == 1);
    CHECK(s.times[0] == 0.0);
    CHECK(s.event_time > 0.0);
  }
}

TEST_CASE("invalid scenarios are rejected") {
  SimulationScenario sc = scenario_defaults();
  sc.n_subjects = 0;
  CHECK_THROWS_AS(simulate_dataset(sc), Error);
  sc = scenario_defaults();
  sc.visit_spacing = 0.0;
  CHECK_THROWS_AS(simulate_dataset(sc), Error);
  sc = scenario_defaults();
  sc.censor_hi = 0.1;  // below censor_lo
  CHECK_THROWS_AS(simulate_dataset(sc), Error);
  sc = scenario_defaults();
  sc.truth.alpha1.resize(3);
  sc.truth.alpha1.setZero();
  try {
    simulate_dataset(sc);
    FAIL_CHECK("non-canonical truth accepted");
  } catch (const Error& e) {
    CHECK(e.category() == "config");
  }
}
