#include "jlcm/mcmc.hpp"

#include "jlcm/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace jlcm {

namespace {

double normal_logpdf(double x, double sd) {
  const double z = x / sd;
  return -0.5 * (std::log(2.0 * M_PI) + z * z) - std::log(sd);
}

double gamma_logpdf(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double inverse_gamma_logpdf(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

// exposure integral of the Gompertz hazard with lambda0 factored out
double unit_exposure(double t, double gamma_k) {
  if (std::abs(gamma_k) < kGammaEps) return t;
  return std::expm1(gamma_k * t) / gamma_k;
}

VectorXd draw_mvn(const VectorXd& mean, const MatrixXd& cov, Rng& rng) {
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw Error("numeric", "non-SPD covariance in normal draw");
  return mean + llt.matrixL() * rng.standard_normal_vector(static_cast<int>(mean.size()));
}

}  // namespace

PriorConfig PriorConfig::defaults(int longitudinal_dim) {
  PriorConfig p;
  p.beta_mean = VectorXd::Zero(longitudinal_dim);
  p.beta_cov = MatrixXd::Identity(longitudinal_dim, longitudinal_dim);
  return p;
}

AdaptiveBlock::AdaptiveBlock(std::string name, int dim, double sigma2, double mix_weight,
                             double safety_scale)
    : name_(std::move(name)),
      dim_(dim),
      sigma2_(sigma2),
      mix_weight_(mix_weight),
      safety_scale_(safety_scale),
      mean_(VectorXd::Zero(dim)),
      m2_(MatrixXd::Zero(dim, dim)) {}

MatrixXd AdaptiveBlock::proposal_covariance() const {
  const double safety_var = safety_scale_ * safety_scale_ / dim_;
  if (warming_up() || observed_ < 2) return safety_var * MatrixXd::Identity(dim_, dim_);
  return (sigma2_ / dim_) * (m2_ / double(observed_ - 1));
}

VectorXd AdaptiveBlock::propose(const VectorXd& current, Rng& rng) {
  const double safety_sd = safety_scale_ / std::sqrt(double(dim_));
  if (!warming_up() && observed_ >= 2 && rng.uniform() >= mix_weight_) {
    const MatrixXd cov = (sigma2_ / dim_) * (m2_ / double(observed_ - 1));
    Eigen::LLT<MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success)
      return current + llt.matrixL() * rng.standard_normal_vector(dim_);
    // degenerate history: fall through to the safety kernel
  }
  return current + safety_sd * rng.standard_normal_vector(dim_);
}

void AdaptiveBlock::observe(const VectorXd& value) {
  ++observed_;
  const VectorXd delta = value - mean_;
  mean_ += delta / double(observed_);
  m2_ += delta * (value - mean_).transpose();
}

VectorXd sample_beta_k(int k, const Dataset& data, const LatentState& state, double tau_k,
                       const PriorConfig& prior, Rng& rng) {
  const int p2 = static_cast<int>(prior.beta_mean.size());
  const MatrixXd prior_precision = prior.beta_cov.llt().solve(MatrixXd::Identity(p2, p2));
  MatrixXd a = prior_precision;
  VectorXd b = prior_precision * prior.beta_mean;

  bool any = false;
  for (int i = 0; i < data.n_subjects(); ++i) {
    const Subject& s = data.subjects[i];
    const VectorXd u = state.effects[i].head(data.dims.random);
    for (int j = 0; j < s.n_visits(); ++j) {
      if (state.classes[i][j] != k) continue;
      any = true;
      const VectorXd x2 = s.x2.row(j).transpose();
      a += x2 * x2.transpose() / tau_k;
      b += (s.y[j] - s.z.row(j).dot(u)) * x2 / tau_k;
    }
  }
  if (!any) return draw_mvn(prior.beta_mean, prior.beta_cov, rng);

  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw Error("numeric", "singular precision in beta update");
  const VectorXd mean = llt.solve(b);
  // C = L^-T satisfies C C' = A^-1
  VectorXd z = rng.standard_normal_vector(p2);
  MatrixXd l = llt.matrixL();
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(z);
  return mean + z;
}

double sample_lambda_k(int k, const Dataset& data, const LatentState& state, double gamma_k,
                       const VectorXd& omega_k, const PriorConfig& prior, Rng& rng) {
  double shape = prior.lambda_shape;
  double rate = prior.lambda_rate;
  bool any = false;
  for (int i = 0; i < data.n_subjects(); ++i) {
    const Subject& s = data.subjects[i];
    if (state.classes[i][s.n_visits() - 1] != k) continue;
    any = true;
    if (s.event) shape += 1.0;
    const double eta = s.x3.dot(omega_k) + state.effects[i][data.dims.random];
    rate += std::exp(eta) * unit_exposure(s.event_time, gamma_k);
  }
  if (!any) return rng.gamma(prior.lambda_shape, prior.lambda_rate);
  return rng.gamma(shape, rate);
}

double sample_tau_k(int k, const Dataset& data, const LatentState& state, const VectorXd& beta_k,
                    const PriorConfig& prior, Rng& rng) {
  double n_k = 0.0;
  double ss = 0.0;
  for (int i = 0; i < data.n_subjects(); ++i) {
    const Subject& s = data.subjects[i];
    const VectorXd u = state.effects[i].head(data.dims.random);
    for (int j = 0; j < s.n_visits(); ++j) {
      if (state.classes[i][j] != k) continue;
      const double r = s.y[j] - s.x2.row(j).dot(beta_k) - s.z.row(j).dot(u);
      n_k += 1.0;
      ss += r * r;
    }
  }
  if (n_k == 0.0) return rng.inverse_gamma(prior.tau_shape, prior.tau_scale);
  return rng.inverse_gamma(n_k / 2.0 + prior.tau_shape, ss / 2.0 + prior.tau_scale);
}

void sample_class_indicators(const Dataset& data, const ParameterSet& params, LatentState& state,
                             Rng& rng) {
  for (int i = 0; i < data.n_subjects(); ++i) {
    const Subject& s = data.subjects[i];
    for (int j = 0; j < s.n_visits(); ++j)
      state.classes[i][j] = rng.categorical_log(site_log_weights(s, j, params, state.effects[i]));
  }
}

namespace {

// prior log density of everything the prior-only mode samples; used as the
// recorded trace when the likelihood is disabled
double prior_log_density(const ParameterSet& params, const PriorConfig& prior) {
  double total = 0.0;
  auto add_normal = [&](double x) { total += normal_logpdf(x, prior.theta_sd); };
  for (int k = 0; k < params.n_classes(); ++k) {
    for (int p = 0; p < params.xi.cols(); ++p) add_normal(params.xi(k, p));
    for (int p = 0; p < params.omega.cols(); ++p) add_normal(params.omega(k, p));
    add_normal(params.gamma[k]);
    total += gamma_logpdf(params.lambda0[k], prior.lambda_shape, prior.lambda_rate);
    total += inverse_gamma_logpdf(params.tau[k], prior.tau_shape, prior.tau_scale);
    const VectorXd diff = params.beta.row(k).transpose() - prior.beta_mean;
    const MatrixXd prec = prior.beta_cov.llt().solve(
        MatrixXd::Identity(prior.beta_mean.size(), prior.beta_mean.size()));
    total += -0.5 * diff.dot(prec * diff);
  }
  for (int p = 0; p < params.alpha1.size(); ++p) add_normal(params.alpha1[p]);
  for (int p = 0; p < params.alpha2.size(); ++p) add_normal(params.alpha2[p]);
  return total;
}

}  // namespace

ChainOutput run_chain(const Dataset& data, int n_classes, const PriorConfig& prior,
                      const SamplerConfig& config) {
  if (n_classes < 1) throw Error("config", "class count must be >= 1");
  if (config.iterations <= 0 || config.burn_in < 0 || config.burn_in >= config.iterations)
    throw Error("config", "burn-in must be nonnegative and below the iteration count");
  if (config.thinning < 1) throw Error("config", "thinning must be >= 1");
  if (!(config.am_mix_weight > 0.0 && config.am_mix_weight < 1.0))
    throw Error("config", "safety-kernel weight must lie in (0,1)");
  if (data.n_subjects() == 0) throw Error("data", "empty dataset");
  if (prior.beta_mean.size() != data.dims.longitudinal ||
      prior.beta_cov.rows() != data.dims.longitudinal)
    throw Error("config", "beta prior dimensions differ from the longitudinal design");

  const int K = n_classes;
  const int q = data.dims.random;
  const int p3 = data.dims.survival;
  const int n = data.n_subjects();

  Rng rng(config.seed);
  ParameterSet params = ParameterSet::zeros(K, data.dims);
  LatentState state = LatentState::zeros(data);
  require_valid(params, data);

  // start labels from pooled response quantile bins so classes begin separated
  {
    std::vector<double> pooled;
    for (const auto& s : data.subjects)
      for (int j = 0; j < s.n_visits(); ++j) pooled.push_back(s.y[j]);
    std::sort(pooled.begin(), pooled.end());
    std::vector<double> cut;
    for (int k = 1; k < K; ++k) cut.push_back(quantile(pooled, double(k) / K));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < data.subjects[i].n_visits(); ++j) {
        int label = 0;
        while (label < K - 1 && data.subjects[i].y[j] > cut[label]) ++label;
        state.classes[i][j] = label;
      }
  }

  std::vector<CholeskyFactors> factors(n);
  auto rebuild_factors = [&] {
    for (int i = 0; i < n; ++i)
      factors[i] = build_factors(params.alpha1, params.alpha2, data.subjects[i].a_design,
                                 data.subjects[i].b_design, q);
  };
  rebuild_factors();

  if (!config.prior_only) {
    for (int k = 0; k < K; ++k) {
      params.beta.row(k) = sample_beta_k(k, data, state, params.tau[k], prior, rng).transpose();
      params.tau[k] =
          sample_tau_k(k, data, state, params.beta.row(k).transpose(), prior, rng);
      params.lambda0[k] = sample_lambda_k(k, data, state, params.gamma[k],
                                          params.omega.row(k).transpose(), prior, rng);
    }
  }

  auto theta_prior = [&](const VectorXd& v) {
    double total = 0.0;
    for (int p = 0; p < v.size(); ++p) total += normal_logpdf(v[p], prior.theta_sd);
    return total;
  };

  auto omega_gamma_target = [&](int k, const VectorXd& v) {
    double total = theta_prior(v);
    if (config.prior_only) return total;
    const VectorXd om = v.head(p3);
    const double gm = v[p3];
    for (int i = 0; i < n; ++i) {
      const Subject& s = data.subjects[i];
      if (state.classes[i][s.n_visits() - 1] != k) continue;
      total += survival_log_density(s.event_time, s.event, s.x3, om, gm, params.lambda0[k],
                                    state.effects[i][q]);
    }
    return total;
  };

  auto xi_target = [&](int k, const VectorXd& v) {
    double total = theta_prior(v);
    if (config.prior_only) return total;
    MatrixXd xi = params.xi;
    xi.row(k) = v.transpose();
    for (int i = 0; i < n; ++i) {
      const Subject& s = data.subjects[i];
      for (int j = 0; j < s.n_visits(); ++j)
        total += membership_log_probabilities(xi, s.x1.row(j).transpose())[state.classes[i][j]];
    }
    return total;
  };

  auto alpha_target = [&](bool is_alpha1, const VectorXd& v) {
    double total = theta_prior(v);
    if (config.prior_only) return total;
    for (int i = 0; i < n; ++i) {
      const Subject& s = data.subjects[i];
      const CholeskyFactors f = build_factors(is_alpha1 ? v : params.alpha1,
                                              is_alpha1 ? params.alpha2 : v, s.a_design,
                                              s.b_design, q);
      total += random_effects_log_density(state.effects[i], f);
    }
    return total;
  };

  auto w_target = [&](int i, const VectorXd& v) {
    const Subject& s = data.subjects[i];
    const VectorXd u = v.head(q);
    double total = random_effects_log_density(v, factors[i]);
    for (int j = 0; j < s.n_visits(); ++j) {
      const int k = state.classes[i][j];
      total += longitudinal_log_density(s.y[j], s.x2.row(j).transpose(), s.z.row(j).transpose(),
                                        params.beta.row(k).transpose(), u, params.tau[k]);
    }
    const int k_final = state.classes[i][s.n_visits() - 1];
    total += survival_log_density(s.event_time, s.event, s.x3,
                                  params.omega.row(k_final).transpose(), params.gamma[k_final],
                                  params.lambda0[k_final], v[q]);
    return total;
  };

  std::vector<AdaptiveBlock> omega_blocks, xi_blocks, w_blocks;
  for (int k = 0; k < K; ++k)
    omega_blocks.emplace_back("omega_gamma[" + std::to_string(k + 1) + "]", p3 + 1,
                              config.am_sigma2, config.am_mix_weight, config.am_safety_scale);
  for (int k = 0; k < K; ++k)
    xi_blocks.emplace_back("xi[" + std::to_string(k + 1) + "]", data.dims.membership,
                           config.am_sigma2, config.am_mix_weight, config.am_safety_scale);
  AdaptiveBlock alpha1_block("alpha1", data.dims.phi_design, config.am_sigma2,
                             config.am_mix_weight, config.am_safety_scale);
  AdaptiveBlock alpha2_block("alpha2", data.dims.logd_design, config.am_sigma2,
                             config.am_mix_weight, config.am_safety_scale);
  for (int i = 0; i < n; ++i)
    w_blocks.emplace_back("w[" + data.subjects[i].id + "]", q + 1, config.am_sigma2,
                          config.am_mix_weight, config.am_safety_scale);

  ChainOutput out;
  out.n_classes = K;
  out.dims = data.dims;
  out.config = config;

  for (int iter = 0; iter < config.iterations; ++iter) {
    // (1) discrete class labels
    if (config.prior_only) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < data.subjects[i].n_visits(); ++j)
          state.classes[i][j] = static_cast<int>(rng.uniform() * K) % K;
    } else {
      sample_class_indicators(data, params, state, rng);
    }

    // (2) conjugate blocks
    for (int k = 0; k < K; ++k) {
      if (config.prior_only) {
        params.beta.row(k) = draw_mvn(prior.beta_mean, prior.beta_cov, rng).transpose();
        params.tau[k] = rng.inverse_gamma(prior.tau_shape, prior.tau_scale);
        params.lambda0[k] = rng.gamma(prior.lambda_shape, prior.lambda_rate);
      } else {
        params.beta.row(k) = sample_beta_k(k, data, state, params.tau[k], prior, rng).transpose();
        params.tau[k] = sample_tau_k(k, data, state, params.beta.row(k).transpose(), prior, rng);
        params.lambda0[k] = sample_lambda_k(k, data, state, params.gamma[k],
                                            params.omega.row(k).transpose(), prior, rng);
      }
    }

    // (3) adaptive Metropolis blocks
    for (int k = 0; k < K; ++k) {
      VectorXd v(p3 + 1);
      v.head(p3) = params.omega.row(k).transpose();
      v[p3] = params.gamma[k];
      auto target = [&](const VectorXd& x) { return omega_gamma_target(k, x); };
      double cur = target(v);
      omega_blocks[k].step(v, cur, target, rng);
      params.omega.row(k) = v.head(p3).transpose();
      params.gamma[k] = v[p3];
    }
    for (int k = 0; k < K; ++k) {
      VectorXd v = params.xi.row(k).transpose();
      auto target = [&](const VectorXd& x) { return xi_target(k, x); };
      double cur = target(v);
      xi_blocks[k].step(v, cur, target, rng);
      params.xi.row(k) = v.transpose();
    }
    {
      VectorXd v = params.alpha1;
      auto target = [&](const VectorXd& x) { return alpha_target(true, x); };
      double cur = target(v);
      if (alpha1_block.step(v, cur, target, rng)) {
        params.alpha1 = v;
        rebuild_factors();
      }
    }
    {
      VectorXd v = params.alpha2;
      auto target = [&](const VectorXd& x) { return alpha_target(false, x); };
      double cur = target(v);
      if (alpha2_block.step(v, cur, target, rng)) {
        params.alpha2 = v;
        rebuild_factors();
      }
    }
    if (!config.prior_only) {
      for (int i = 0; i < n; ++i) {
        VectorXd v = state.effects[i];
        auto target = [&](const VectorXd& x) { return w_target(i, x); };
        double cur = target(v);
        w_blocks[i].step(v, cur, target, rng);
        state.effects[i] = v;
      }
    }

    // (4) trace + storage
    const double trace_value = config.prior_only ? prior_log_density(params, prior)
                                                 : joint_log_likelihood(params, data, state);
    if (!std::isfinite(trace_value))
      throw Error("numeric", "divergence at iteration " + std::to_string(iter + 1));
    out.loglik_trace.push_back(trace_value);

    if (iter >= config.burn_in && (iter - config.burn_in) % config.thinning == 0) {
      out.draws.push_back(params);
      out.states.push_back(state);
      out.draw_loglik.push_back(trace_value);
    }
  }

  for (const auto& b : omega_blocks)
    out.acceptance.push_back({b.name(), b.proposals(), b.accepts()});
  for (const auto& b : xi_blocks)
    out.acceptance.push_back({b.name(), b.proposals(), b.accepts()});
  out.acceptance.push_back({alpha1_block.name(), alpha1_block.proposals(), alpha1_block.accepts()});
  out.acceptance.push_back({alpha2_block.name(), alpha2_block.proposals(), alpha2_block.accepts()});
  for (const auto& b : w_blocks)
    out.acceptance.push_back({b.name(), b.proposals(), b.accepts()});

  if (config.relabel && K >= 2) relabel(out);
  return out;
}

void relabel(ChainOutput& chain) {
  const int K = chain.n_classes;
  if (K < 2) return;
  for (size_t d = 0; d < chain.draws.size(); ++d) {
    ParameterSet& p = chain.draws[d];
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return p.beta(a, 0) < p.beta(b, 0); });
    bool identity = true;
    for (int k = 0; k < K; ++k)
      if (order[k] != k) identity = false;
    if (identity) continue;

    ParameterSet relabeled = p;
    std::vector<int> new_of_old(K);
    for (int k = 0; k < K; ++k) {
      relabeled.xi.row(k) = p.xi.row(order[k]);
      relabeled.beta.row(k) = p.beta.row(order[k]);
      relabeled.omega.row(k) = p.omega.row(order[k]);
      relabeled.gamma[k] = p.gamma[order[k]];
      relabeled.tau[k] = p.tau[order[k]];
      relabeled.lambda0[k] = p.lambda0[order[k]];
      new_of_old[order[k]] = k;
    }
    p = std::move(relabeled);
    LatentState& s = chain.states[d];
    for (auto& labels : s.classes)
      for (int j = 0; j < labels.size(); ++j) labels[j] = new_of_old[labels[j]];
  }
}

std::vector<FlatParameter> parameter_layout(int n_classes, const Dataset& data) {
  std::vector<FlatParameter> layout;
  auto class_group = [&](const std::string& group, const std::vector<std::string>& names) {
    for (int k = 1; k <= n_classes; ++k)
      for (size_t p = 0; p < names.size(); ++p)
        layout.push_back({group, k, static_cast<int>(p),
                          group + "[" + std::to_string(k) + "]." + names[p]});
  };
  auto class_scalar = [&](const std::string& group) {
    for (int k = 1; k <= n_classes; ++k)
      layout.push_back({group, k, 0, group + "[" + std::to_string(k) + "]"});
  };
  auto shared_group = [&](const std::string& group, const std::vector<std::string>& names) {
    for (size_t p = 0; p < names.size(); ++p)
      layout.push_back({group, 0, static_cast<int>(p), group + "." + names[p]});
  };
  class_group("xi", data.membership_names);
  class_group("beta", data.longitudinal_names);
  class_group("omega", data.survival_names);
  class_scalar("gamma");
  class_scalar("tau");
  class_scalar("lambda0");
  shared_group("alpha1", data.phi_design_names);
  shared_group("alpha2", data.logd_design_names);
  return layout;
}

double get_flat(const ParameterSet& params, const FlatParameter& fp) {
  const int k = fp.class_index - 1;
  if (fp.group == "xi") return params.xi(k, fp.position);
  if (fp.group == "beta") return params.beta(k, fp.position);
  if (fp.group == "omega") return params.omega(k, fp.position);
  if (fp.group == "gamma") return params.gamma[k];
  if (fp.group == "tau") return params.tau[k];
  if (fp.group == "lambda0") return params.lambda0[k];
  if (fp.group == "alpha1") return params.alpha1[fp.position];
  if (fp.group == "alpha2") return params.alpha2[fp.position];
  throw Error("config", "unknown parameter group " + fp.group);
}

void set_flat(ParameterSet& params, const FlatParameter& fp, double value) {
  const int k = fp.class_index - 1;
  if (fp.group == "xi")
    params.xi(k, fp.position) = value;
  else if (fp.group == "beta")
    params.beta(k, fp.position) = value;
  else if (fp.group == "omega")
    params.omega(k, fp.position) = value;
  else if (fp.group == "gamma")
    params.gamma[k] = value;
  else if (fp.group == "tau")
    params.tau[k] = value;
  else if (fp.group == "lambda0")
    params.lambda0[k] = value;
  else if (fp.group == "alpha1")
    params.alpha1[fp.position] = value;
  else if (fp.group == "alpha2")
    params.alpha2[fp.position] = value;
  else
    throw Error("config", "unknown parameter group " + fp.group);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error("numeric", "quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const size_t lo = static_cast<size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<SummaryRow> summarize(const ChainOutput& chain, const Dataset& data) {
  if (chain.n_draws() < 1) throw Error("numeric", "summary of an empty chain");
  const auto layout = parameter_layout(chain.n_classes, data);
  std::vector<SummaryRow> rows;
  for (const auto& fp : layout) {
    std::vector<double> vals;
    vals.reserve(chain.n_draws());
    for (const auto& d : chain.draws) vals.push_back(get_flat(d, fp));
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    const double sd = vals.size() > 1 ? std::sqrt(ss / (vals.size() - 1)) : 0.0;
    rows.push_back({fp.label, mean, sd, quantile(vals, 0.055), quantile(vals, 0.945)});
  }
  return rows;
}

ParameterSet posterior_mean_parameters(const ChainOutput& chain) {
  if (chain.n_draws() < 1) throw Error("numeric", "empty chain");
  ParameterSet mean = chain.draws[0];
  for (int d = 1; d < chain.n_draws(); ++d) {
    const ParameterSet& p = chain.draws[d];
    mean.xi += p.xi;
    mean.beta += p.beta;
    mean.omega += p.omega;
    mean.gamma += p.gamma;
    mean.tau += p.tau;
    mean.lambda0 += p.lambda0;
    mean.alpha1 += p.alpha1;
    mean.alpha2 += p.alpha2;
  }
  const double inv = 1.0 / chain.n_draws();
  mean.xi *= inv;
  mean.beta *= inv;
  mean.omega *= inv;
  mean.gamma *= inv;
  mean.tau *= inv;
  mean.lambda0 *= inv;
  mean.alpha1 *= inv;
  mean.alpha2 *= inv;
  return mean;
}

std::vector<VectorXi> modal_classes(const ChainOutput& chain) {
  if (chain.states.empty()) throw Error("numeric", "empty chain");
  const int n = static_cast<int>(chain.states[0].classes.size());
  std::vector<VectorXi> modal(n);
  for (int i = 0; i < n; ++i) {
    const int m = static_cast<int>(chain.states[0].classes[i].size());
    modal[i] = VectorXi::Zero(m);
    for (int j = 0; j < m; ++j) {
      std::vector<int> counts(chain.n_classes, 0);
      for (const auto& st : chain.states) ++counts[st.classes[i][j]];
      modal[i][j] = static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                                     counts.begin());
    }
  }
  return modal;
}

std::vector<VectorXd> mean_effects(const ChainOutput& chain) {
  if (chain.states.empty()) throw Error("numeric", "empty chain");
  const int n = static_cast<int>(chain.states[0].effects.size());
  std::vector<VectorXd> mean(n);
  for (int i = 0; i < n; ++i) {
    mean[i] = VectorXd::Zero(chain.states[0].effects[i].size());
    for (const auto& st : chain.states) mean[i] += st.effects[i];
    mean[i] /= double(chain.states.size());
  }
  return mean;
}

}  // namespace jlcm
