#include "jlcm/covariance.hpp"

#include <cmath>

namespace jlcm {

CholeskyFactors build_factors(const VectorXd& alpha1, const VectorXd& alpha2,
                              const VectorXd& a_design, const VectorXd& b_design, int q) {
  if (a_design.size() != alpha1.size())
    throw Error("validate", "autoregressive design length " + std::to_string(a_design.size()) +
                                " does not match alpha1 length " + std::to_string(alpha1.size()));
  if (b_design.size() != alpha2.size())
    throw Error("validate", "innovation design length " + std::to_string(b_design.size()) +
                                " does not match alpha2 length " + std::to_string(alpha2.size()));
  const int dim = q + 1;
  const double phi = a_design.dot(alpha1);
  const double log_d2 = b_design.dot(alpha2);

  CholeskyFactors f;
  f.t = MatrixXd::Identity(dim, dim);
  for (int g = 1; g < dim; ++g)
    for (int l = 0; l < g; ++l) f.t(g, l) = -phi;
  f.log_d2 = VectorXd::Constant(dim, log_d2);
  return f;
}

MatrixXd sigma_from_factors(const CholeskyFactors& f) {
  const int dim = f.dim();
  // L = T^-1 diag(d) gives Sigma = L L'
  MatrixXd l = MatrixXd::Zero(dim, dim);
  l.diagonal() = (0.5 * f.log_d2.array()).exp();
  f.t.triangularView<Eigen::Lower>().solveInPlace(l);
  MatrixXd sigma = l * l.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

double random_effects_log_density(const VectorXd& w, const CholeskyFactors& f) {
  const int dim = f.dim();
  const VectorXd e = f.t.triangularView<Eigen::Lower>() * w;
  double quad = 0.0;
  for (int g = 0; g < dim; ++g)
    quad += f.log_d2[g] + e[g] * e[g] * std::exp(-f.log_d2[g]);
  return -0.5 * (dim * std::log(2.0 * M_PI) + quad);
}

VectorXd draw_effects(Rng& rng, const CholeskyFactors& f) {
  const int dim = f.dim();
  VectorXd e(dim);
  for (int g = 0; g < dim; ++g) e[g] = rng.normal() * std::exp(0.5 * f.log_d2[g]);
  f.t.triangularView<Eigen::Lower>().solveInPlace(e);
  return e;
}

}  // namespace jlcm
