#pragma once

#include "jlcm/covariance.hpp"
#include "jlcm/types.hpp"

namespace jlcm {

// Below this |gamma| the cumulative hazard switches to its gamma->0 limit to
// avoid cancellation in expm1(gamma t)/gamma.
inline constexpr double kGammaEps = 1e-8;

// Softmax of x1'xi_k over classes, log-sum-exp shifted.
VectorXd membership_log_probabilities(const MatrixXd& xi, const VectorXd& x1);
VectorXd membership_probabilities(const MatrixXd& xi, const VectorXd& x1);

// Gaussian log density of y at mean x2'beta_k + z'u with variance tau_k.
// u is the random-effect part of W (frailty excluded).
double longitudinal_log_density(double y, const VectorXd& x2, const VectorXd& z,
                                const VectorXd& beta_k, const VectorXd& u, double tau_k);

// Gompertz-baseline hazard lambda0 e^{gamma t} e^{x3'omega + upsilon}.
double hazard(double t, const VectorXd& x3, const VectorXd& omega_k, double gamma_k,
              double lambda0_k, double upsilon);

// Closed form lambda0 e^{eta} (e^{gamma t} - 1)/gamma; limit lambda0 e^{eta} t
// within kGammaEps of gamma = 0.
double cumulative_hazard(double t, const VectorXd& x3, const VectorXd& omega_k,
                         double gamma_k, double lambda0_k, double upsilon);

// delta log lambda(T) - H(T); the censored case is the log survivor function.
double survival_log_density(double t, int event, const VectorXd& x3, const VectorXd& omega_k,
                            double gamma_k, double lambda0_k, double upsilon);

// Per-class log[pi_ijk f(y_ij|k)], plus the survival factor when j is the
// subject's final visit. These are the discrete-posterior site weights.
VectorXd site_log_weights(const Subject& s, int j, const ParameterSet& params,
                          const VectorXd& effects);

// Random-effects density + per-visit membership/response terms + survival term
// at the final visit, all at the given latent state.
double subject_log_likelihood(const Subject& s, const ParameterSet& params,
                              const VectorXi& classes, const VectorXd& effects,
                              const CholeskyFactors& f);

double joint_log_likelihood(const ParameterSet& params, const Dataset& data,
                            const LatentState& state);

// Likelihood with the discrete class indicators summed out per site (still
// conditional on the random effects): the per-visit factor becomes
// log sum_k pi_ijk f(y_ij|k), the survival factor mixing over the final
// visit's classes. This is the deviance scale used for model comparison;
// keeping the labels in would charge K>1 models their label entropy.
double class_marginal_log_likelihood(const ParameterSet& params, const Dataset& data,
                                     const std::vector<VectorXd>& effects);

}  // namespace jlcm
