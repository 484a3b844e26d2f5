#pragma once

#include "jlcm/covariance.hpp"
#include "jlcm/rng.hpp"
#include "jlcm/types.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace jlcm {

struct PriorConfig {
  VectorXd beta_mean;  // beta_0
  MatrixXd beta_cov;   // Sigma_beta, SPD
  double lambda_shape = 0.01;  // Gamma(shape, rate) on lambda0_k
  double lambda_rate = 0.01;
  double tau_shape = 0.01;  // IG(shape, scale) on tau_k
  double tau_scale = 0.01;
  double theta_sd = 1.0;  // N(0, theta_sd^2) per element of (omega, xi, alpha1, alpha2, gamma)

  static PriorConfig defaults(int longitudinal_dim);
};

struct SamplerConfig {
  int iterations = 5000;
  int burn_in = 2000;
  int thinning = 1;
  std::uint64_t seed = 1;
  double am_sigma2 = 2.38 * 2.38;  // scaled empirical-covariance factor
  double am_mix_weight = 0.05;     // probability of the safety kernel after warm-up
  double am_safety_scale = 0.1;    // safety/warm-up proposal sd before the 1/sqrt(dim) factor
  bool relabel = true;             // order classes by ascending beta intercept
  bool prior_only = false;         // drop the likelihood: samples the prior (diagnostics)
};

struct AcceptanceRecord {
  std::string block;
  long proposals = 0;
  long accepts = 0;

  double rate() const { return proposals > 0 ? double(accepts) / double(proposals) : 0.0; }
};

struct ChainOutput {
  int n_classes = 0;
  Dims dims;
  std::vector<ParameterSet> draws;
  std::vector<LatentState> states;
  std::vector<double> draw_loglik;   // joint log-likelihood at each stored draw
  std::vector<double> loglik_trace;  // one entry per iteration
  std::vector<AcceptanceRecord> acceptance;
  SamplerConfig config;

  int n_draws() const { return static_cast<int>(draws.size()); }
};

// Random-walk Metropolis block with the two-stage proposal schedule: a fixed
// spherical kernel for the first 2*dim steps, then a mixture of the scaled
// running empirical covariance and the same spherical safety kernel. The
// empirical covariance accumulates every chain state (accepted or not).
class AdaptiveBlock {
 public:
  AdaptiveBlock(std::string name, int dim, double sigma2, double mix_weight, double safety_scale);

  // covariance of the non-safety proposal component for the NEXT step
  MatrixXd proposal_covariance() const;

  VectorXd propose(const VectorXd& current, Rng& rng);

  // One Metropolis step; log_value holds the target at `theta` and is updated
  // on acceptance. A non-finite target at the proposal is an automatic reject.
  template <class LogTarget>
  bool step(VectorXd& theta, double& log_value, LogTarget&& target, Rng& rng) {
    if (observed_ == 0) observe(theta);  // include the initial state
    const VectorXd proposal = propose(theta, rng);
    const double lp = target(proposal);
    ++proposals_;
    bool accepted = false;
    if (std::isfinite(lp)) {
      const double log_ratio = lp - log_value;
      if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) accepted = true;
    }
    if (accepted) {
      theta = proposal;
      log_value = lp;
      ++accepts_;
    }
    observe(theta);
    return accepted;
  }

  void observe(const VectorXd& value);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  long proposals() const { return proposals_; }
  long accepts() const { return accepts_; }
  double acceptance_rate() const {
    return proposals_ > 0 ? double(accepts_) / double(proposals_) : 0.0;
  }

 private:
  bool warming_up() const { return proposals_ < 2 * dim_; }

  std::string name_;
  int dim_;
  double sigma2_, mix_weight_, safety_scale_;
  long proposals_ = 0, accepts_ = 0;
  long observed_ = 0;
  VectorXd mean_;
  MatrixXd m2_;  // sum of outer products of deviations (Welford)
};

// Conjugate draws (exact full conditionals); every one falls back to its
// prior when the class is empty.
VectorXd sample_beta_k(int k, const Dataset& data, const LatentState& state, double tau_k,
                       const PriorConfig& prior, Rng& rng);
double sample_lambda_k(int k, const Dataset& data, const LatentState& state, double gamma_k,
                       const VectorXd& omega_k, const PriorConfig& prior, Rng& rng);
double sample_tau_k(int k, const Dataset& data, const LatentState& state, const VectorXd& beta_k,
                    const PriorConfig& prior, Rng& rng);

// Per-site draw of R_ij from its discrete conditional; the survival factor
// enters only at the final visit.
void sample_class_indicators(const Dataset& data, const ParameterSet& params, LatentState& state,
                             Rng& rng);

ChainOutput run_chain(const Dataset& data, int n_classes, const PriorConfig& prior,
                      const SamplerConfig& config);

// Per-draw class reordering by ascending response intercept beta_k[0];
// class-indexed parameters and stored labels are permuted consistently.
void relabel(ChainOutput& chain);

// Flattened parameter layout shared by summaries, draw files, and model
// reload. Classes are 1-based in labels; shared groups use class_index 0.
struct FlatParameter {
  std::string group;
  int class_index;  // 1-based; 0 for shared parameters
  int position;     // 0-based within the group row
  std::string label;
};
std::vector<FlatParameter> parameter_layout(int n_classes, const Dataset& data);
double get_flat(const ParameterSet& params, const FlatParameter& fp);
void set_flat(ParameterSet& params, const FlatParameter& fp, double value);

struct SummaryRow {
  std::string parameter;
  double estimate, sd, ci_low, ci_high;
};
// Posterior mean, sd, and 89% equal-tailed interval per flattened parameter.
std::vector<SummaryRow> summarize(const ChainOutput& chain, const Dataset& data);

// type-7 interpolated quantile of an unsorted sample
double quantile(std::vector<double> values, double p);

ParameterSet posterior_mean_parameters(const ChainOutput& chain);
// per-site most frequent label across draws (ties -> smaller label)
std::vector<VectorXi> modal_classes(const ChainOutput& chain);
std::vector<VectorXd> mean_effects(const ChainOutput& chain);

}  // namespace jlcm
