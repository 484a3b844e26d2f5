#pragma once

#include "jlcm/rng.hpp"
#include "jlcm/types.hpp"

namespace jlcm {

// Modified Cholesky pair realizing T Sigma T' = D: T is unit lower triangular
// with (g,l) entry -phi for l<g, D = diag(exp(log_d2)). Any real (phi, log d2)
// yields a positive-definite Sigma.
struct CholeskyFactors {
  MatrixXd t;       // (q+1) x (q+1)
  VectorXd log_d2;  // q+1

  int dim() const { return static_cast<int>(log_d2.size()); }
};

// phi = a'alpha1 shared across all (g,l) pairs; log d^2 = b'alpha2 shared
// across all g. Subject-level designs, one factor pair per subject.
CholeskyFactors build_factors(const VectorXd& alpha1, const VectorXd& alpha2,
                              const VectorXd& a_design, const VectorXd& b_design, int q);

// Sigma = T^-1 D T^-T via triangular solves; symmetric positive definite.
MatrixXd sigma_from_factors(const CholeskyFactors& f);

// Gaussian log density of w under sigma_from_factors(f), evaluated through the
// factors: -(q+1)/2 log 2pi - 1/2 sum_g [log d_g^2 + e_g^2 / d_g^2], e = T w.
double random_effects_log_density(const VectorXd& w, const CholeskyFactors& f);

// Draw W ~ N(0, Sigma): e_g ~ N(0, d_g^2) independently, then solve T w = e.
VectorXd draw_effects(Rng& rng, const CholeskyFactors& f);

}  // namespace jlcm
