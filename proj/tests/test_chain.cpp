#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jlcm/inference.hpp"
#include "jlcm/mcmc.hpp"
#include "jlcm/simulate.hpp"
#include "support.hpp"

#include <cmath>
#include <string>

using namespace jlcm;
using namespace testsupport;

namespace {

Dataset small_cohort(int n, std::uint64_t seed) {
  SimulationScenario sc = scenario_defaults();
  sc.n_subjects = n;
  sc.seed = seed;
  return simulate_dataset(sc);
}

}  // namespace

TEST_CASE("a short chain delivers the full output contract") {
  const Dataset data = small_cohort(60, 5);
  SamplerConfig config;
  config.iterations = 600;
  config.burn_in = 200;
  config.thinning = 2;
  config.seed = 7;
  const ChainOutput chain = run_chain(data, 2, PriorConfig::defaults(2), config);

  CHECK(chain.n_classes == 2);
  CHECK(chain.n_draws() == 200);  // (600 - 200) / 2
  CHECK(chain.states.size() == 200);
  CHECK(chain.draw_loglik.size() == 200);
  REQUIRE(chain.loglik_trace.size() == 600);
  for (double v : chain.loglik_trace) REQUIRE(std::isfinite(v));
  // stored draws line up with the trace at burn_in + d * thinning
  for (int d = 0; d < chain.n_draws(); ++d)
    CHECK(chain.draw_loglik[d] == chain.loglik_trace[200 + 2 * d]);

  // one acceptance record per Metropolis block, in declaration order
  REQUIRE(chain.acceptance.size() == 2 + 2 + 2 + 60);
  CHECK(chain.acceptance[0].block == "omega_gamma[1]");
  CHECK(chain.acceptance[1].block == "omega_gamma[2]");
  CHECK(chain.acceptance[2].block == "xi[1]");
  CHECK(chain.acceptance[3].block == "xi[2]");
  CHECK(chain.acceptance[4].block == "alpha1");
  CHECK(chain.acceptance[5].block == "alpha2");
  CHECK(chain.acceptance[6].block == "w[1]");
  CHECK(chain.acceptance.back().block == "w[60]");
  for (const auto& rec : chain.acceptance) {
    CHECK(rec.proposals == 600);
    CHECK(rec.accepts >= 0);
    CHECK(rec.accepts <= rec.proposals);
  }

  // relabeling holds in every stored draw
  for (const auto& p : chain.draws) {
    REQUIRE(p.beta.rows() == 2);
    CHECK(p.beta(0, 0) <= p.beta(1, 0));
    CHECK(p.tau.minCoeff() > 0.0);
    CHECK(p.lambda0.minCoeff() > 0.0);
  }
  for (const auto& st : chain.states) {
    REQUIRE(st.classes.size() == 60);
    for (size_t i = 0; i < st.classes.size(); ++i) {
      REQUIRE(st.classes[i].size() == data.subjects[i].n_visits());
      CHECK(st.classes[i].minCoeff() >= 0);
      CHECK(st.classes[i].maxCoeff() <= 1);
      CHECK(st.effects[i].size() == 3);
    }
  }
  CHECK(chain.config.iterations == 600);
}

TEST_CASE("chains are reproducible from the seed") {
  const Dataset data = small_cohort(30, 9);
  SamplerConfig config;
  config.iterations = 300;
  config.burn_in = 100;
  config.seed = 42;
  const ChainOutput a = run_chain(data, 2, PriorConfig::defaults(2), config);
  const ChainOutput b = run_chain(data, 2, PriorConfig::defaults(2), config);
  REQUIRE(a.loglik_trace.size() == b.loglik_trace.size());
  for (size_t t = 0; t < a.loglik_trace.size(); ++t)
    REQUIRE(a.loglik_trace[t] == b.loglik_trace[t]);
  CHECK(a.draws.back().beta == b.draws.back().beta);
  CHECK(a.draws.back().alpha1 == b.draws.back().alpha1);

  config.seed = 43;
  const ChainOutput c = run_chain(data, 2, PriorConfig::defaults(2), config);
  bool any_diff = false;
  for (size_t t = 0; t < a.loglik_trace.size() && !any_diff; ++t)
    any_diff = a.loglik_trace[t] != c.loglik_trace[t];
  CHECK(any_diff);
}

TEST_CASE("prior-only chains reproduce the prior moments") {
  const Dataset data = small_cohort(12, 3);
  PriorConfig prior = PriorConfig::defaults(2);
  prior.beta_mean << 0.5, -0.5;
  prior.beta_cov << 2.0, 0.0, 0.0, 0.5;
  prior.tau_shape = 3.0;  // IG mean 1
  prior.tau_scale = 2.0;
  prior.lambda_shape = 4.0;  // Gamma mean 2
  prior.lambda_rate = 2.0;

  SamplerConfig config;
  config.iterations = 4000;
  config.burn_in = 1000;
  config.seed = 11;
  config.prior_only = true;
  config.relabel = false;  // keep the raw prior marginals
  const ChainOutput chain = run_chain(data, 2, prior, config);
  REQUIRE(chain.n_draws() == 3000);

  std::vector<double> beta00, tau0, lambda1, xi01, gamma0, alpha10;
  double class0_count = 0.0, site_count = 0.0;
  for (int d = 0; d < chain.n_draws(); ++d) {
    const ParameterSet& p = chain.draws[d];
    beta00.push_back(p.beta(0, 0));
    tau0.push_back(p.tau[0]);
    lambda1.push_back(p.lambda0[1]);
    xi01.push_back(p.xi(0, 1));
    gamma0.push_back(p.gamma[0]);
    alpha10.push_back(p.alpha1[0]);
    for (const auto& labels : chain.states[d].classes)
      for (int j = 0; j < labels.size(); ++j) {
        site_count += 1.0;
        if (labels[j] == 0) class0_count += 1.0;
      }
  }
  // conjugate groups are exact prior draws
  CHECK(std::abs(mean_of(beta00) - 0.5) < 0.1);
  CHECK(variance_of(beta00) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(std::abs(mean_of(tau0) - 1.0) < 0.12);
  CHECK(std::abs(mean_of(lambda1) - 2.0) < 0.12);
  // Metropolis groups target the standard-normal prior (autocorrelated draws)
  CHECK(std::abs(mean_of(xi01)) < 0.3);
  CHECK(variance_of(xi01) > 0.5);
  CHECK(variance_of(xi01) < 1.7);
  CHECK(std::abs(mean_of(gamma0)) < 0.3);
  CHECK(std::abs(mean_of(alpha10)) < 0.3);
  // labels are uniform and subject effects are never updated
  CHECK(class0_count / site_count == doctest::Approx(0.5).epsilon(0.1));
  for (const auto& rec : chain.acceptance)
    if (rec.block.rfind("w[", 0) == 0) CHECK(rec.proposals == 0);
  for (const auto& st : chain.states)
    for (const auto& w : st.effects) CHECK(w.norm() == 0.0);
}

TEST_CASE("invalid sampler configurations are rejected") {
  const Dataset data = small_cohort(10, 4);
  const PriorConfig prior = PriorConfig::defaults(2);
  SamplerConfig config;
  config.iterations = 100;
  config.burn_in = 50;

  CHECK_THROWS_AS(run_chain(data, 0, prior, config), Error);

  SamplerConfig bad = config;
  bad.iterations = 0;
  CHECK_THROWS_AS(run_chain(data, 2, prior, bad), Error);
  bad = config;
  bad.burn_in = 100;  // must stay below iterations
  CHECK_THROWS_AS(run_chain(data, 2, prior, bad), Error);
  bad = config;
  bad.burn_in = -1;
  CHECK_THROWS_AS(run_chain(data, 2, prior, bad), Error);
  bad = config;
  bad.thinning = 0;
  CHECK_THROWS_AS(run_chain(data, 2, prior, bad), Error);
  bad = config;
  bad.am_mix_weight = 1.0;
  CHECK_THROWS_AS(run_chain(data, 2, prior, bad), Error);

  Dataset empty;
  empty.dims = data.dims;
  try {
    run_chain(empty, 2, prior, config);
    FAIL("empty dataset must throw");
  } catch (const Error& e) {
    CHECK(e.category() == "data");
  }

  PriorConfig mismatched = PriorConfig::defaults(3);  // design has 2 columns
  try {
    run_chain(data, 2, mismatched, config);
    FAIL("prior dimension mismatch must throw");
  } catch (const Error& e) {
    CHECK(e.category() == "config");
  }
}

TEST_CASE("a medium chain recovers the generating parameters") {
  const Dataset data = small_cohort(120, 21);
  SamplerConfig config;
  config.iterations = 1500;
  config.burn_in = 500;
  config.seed = 2;
  const ChainOutput chain = run_chain(data, 2, PriorConfig::defaults(2), config);

  const ParameterSet post = posterior_mean_parameters(chain);
  // generating values: beta rows (2, 1.5) and (4, 3), tau (0.1, 0.5)
  CHECK(post.beta(0, 0) == doctest::Approx(2.0).epsilon(0.2));
  CHECK(post.beta(0, 1) == doctest::Approx(1.5).epsilon(0.3));
  CHECK(post.beta(1, 0) == doctest::Approx(4.0).epsilon(0.2));
  CHECK(post.beta(1, 1) == doctest::Approx(3.0).epsilon(0.3));
  CHECK(post.tau[0] < post.tau[1]);

  const double rate = error_rate(modal_classes(chain), data.true_classes);
  CHECK(rate < 0.25);
}
