#include "jlcm/likelihood.hpp"

#include <cmath>

namespace jlcm {

VectorXd membership_log_probabilities(const MatrixXd& xi, const VectorXd& x1) {
  VectorXd lp = xi * x1;
  const double shift = lp.maxCoeff();
  const double lse = shift + std::log((lp.array() - shift).exp().sum());
  return lp.array() - lse;
}

VectorXd membership_probabilities(const MatrixXd& xi, const VectorXd& x1) {
  return membership_log_probabilities(xi, x1).array().exp();
}

double longitudinal_log_density(double y, const VectorXd& x2, const VectorXd& z,
                                const VectorXd& beta_k, const VectorXd& u, double tau_k) {
  const double r = y - x2.dot(beta_k) - z.dot(u);
  return -0.5 * (std::log(2.0 * M_PI * tau_k) + r * r / tau_k);
}

double hazard(double t, const VectorXd& x3, const VectorXd& omega_k, double gamma_k,
              double lambda0_k, double upsilon) {
  return lambda0_k * std::exp(gamma_k * t + x3.dot(omega_k) + upsilon);
}

double cumulative_hazard(double t, const VectorXd& x3, const VectorXd& omega_k,
                         double gamma_k, double lambda0_k, double upsilon) {
  const double scale = lambda0_k * std::exp(x3.dot(omega_k) + upsilon);
  if (std::abs(gamma_k) < kGammaEps) return scale * t;
  return scale * std::expm1(gamma_k * t) / gamma_k;
}

double survival_log_density(double t, int event, const VectorXd& x3, const VectorXd& omega_k,
                            double gamma_k, double lambda0_k, double upsilon) {
  double value = -cumulative_hazard(t, x3, omega_k, gamma_k, lambda0_k, upsilon);
  if (event)
    value += std::log(lambda0_k) + gamma_k * t + x3.dot(omega_k) + upsilon;
  return value;
}

VectorXd site_log_weights(const Subject& s, int j, const ParameterSet& params,
                          const VectorXd& effects) {
  const int k_count = params.n_classes();
  const int q = static_cast<int>(s.z.cols());
  const VectorXd u = effects.head(q);
  const double upsilon = effects[q];
  const bool final_visit = (j == s.n_visits() - 1);

  VectorXd logw = membership_log_probabilities(params.xi, s.x1.row(j).transpose());
  for (int k = 0; k < k_count; ++k) {
    logw[k] += longitudinal_log_density(s.y[j], s.x2.row(j).transpose(), s.z.row(j).transpose(),
                                        params.beta.row(k).transpose(), u, params.tau[k]);
    if (final_visit)
      logw[k] += survival_log_density(s.event_time, s.event, s.x3,
                                      params.omega.row(k).transpose(), params.gamma[k],
                                      params.lambda0[k], upsilon);
  }
  return logw;
}

double subject_log_likelihood(const Subject& s, const ParameterSet& params,
                              const VectorXi& classes, const VectorXd& effects,
                              const CholeskyFactors& f) {
  const int q = static_cast<int>(s.z.cols());
  const VectorXd u = effects.head(q);
  const double upsilon = effects[q];

  double total = random_effects_log_density(effects, f);
  for (int j = 0; j < s.n_visits(); ++j) {
    const int k = classes[j];
    total += membership_log_probabilities(params.xi, s.x1.row(j).transpose())[k];
    total += longitudinal_log_density(s.y[j], s.x2.row(j).transpose(), s.z.row(j).transpose(),
                                      params.beta.row(k).transpose(), u, params.tau[k]);
  }
  const int k_final = classes[s.n_visits() - 1];
  total += survival_log_density(s.event_time, s.event, s.x3,
                                params.omega.row(k_final).transpose(), params.gamma[k_final],
                                params.lambda0[k_final], upsilon);
  return total;
}

double joint_log_likelihood(const ParameterSet& params, const Dataset& data,
                            const LatentState& state) {
  double total = 0.0;
  for (int i = 0; i < data.n_subjects(); ++i) {
    const Subject& s = data.subjects[i];
    const CholeskyFactors f =
        build_factors(params.alpha1, params.alpha2, s.a_design, s.b_design, data.dims.random);
    total += subject_log_likelihood(s, params, state.classes[i], state.effects[i], f);
  }
  return total;
}

double class_marginal_log_likelihood(const ParameterSet& params, const Dataset& data,
                                     const std::vector<VectorXd>& effects) {
  double total = 0.0;
  for (int i = 0; i < data.n_subjects(); ++i) {
    const Subject& s = data.subjects[i];
    const CholeskyFactors f =
        build_factors(params.alpha1, params.alpha2, s.a_design, s.b_design, data.dims.random);
    total += random_effects_log_density(effects[i], f);
    for (int j = 0; j < s.n_visits(); ++j) {
      const VectorXd logw = site_log_weights(s, j, params, effects[i]);
      const double shift = logw.maxCoeff();
      total += shift + std::log((logw.array() - shift).exp().sum());
    }
  }
  return total;
}

}  // namespace jlcm
