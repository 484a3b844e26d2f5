#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace jlcm {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// All failures surface as Error with a stable machine-parsable category
// ("config", "data", "validate", "io", "usage", "numeric", "predict", "auc").
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& msg)
      : std::runtime_error(msg), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

// One subject: visit rows (sorted by time), one survival outcome, and the
// subject-level designs for the covariance regression. Row g of x1/x2/z
// belongs to visit g. x3 and the covariance designs are baseline values.
struct Subject {
  std::string id;
  VectorXd times;     // m_i, strictly increasing
  VectorXd y;         // m_i
  MatrixXd x1;        // m_i x p1, membership covariates
  MatrixXd x2;        // m_i x p2, fixed-effect covariates
  MatrixXd z;         // m_i x q, random-effect design
  VectorXd x3;        // p3, hazard covariates
  VectorXd a_design;  // n_a1, autoregressive-coefficient covariates
  VectorXd b_design;  // n_a2, log-innovation-variance covariates
  double event_time = 0.0;
  int event = 0;  // 1 observed, 0 censored

  int n_visits() const { return static_cast<int>(times.size()); }
};

struct Dims {
  int membership = 0;    // p1
  int longitudinal = 0;  // p2
  int random = 0;        // q
  int survival = 0;      // p3
  int phi_design = 0;    // n_a1
  int logd_design = 0;   // n_a2

  int effect() const { return random + 1; }  // W_i = (U_i, upsilon_i)
};

struct Dataset {
  std::vector<Subject> subjects;
  Dims dims;

  // covariate names in design order, used to label outputs
  std::vector<std::string> membership_names, longitudinal_names, random_names,
      survival_names, phi_design_names, logd_design_names;

  // ground truth carried by simulated datasets; empty otherwise
  std::vector<VectorXi> true_classes;  // per subject, m_i labels in 0..K-1
  std::vector<VectorXd> true_effects;  // per subject, q+1
  int true_k = 0;

  int n_subjects() const { return static_cast<int>(subjects.size()); }
  int n_observations() const {
    int n = 0;
    for (const auto& s : subjects) n += s.n_visits();
    return n;
  }
  bool has_truth() const { return !true_classes.empty(); }
};

// Class-indexed parameters are stored one row per class; alpha1/alpha2 are
// shared across classes. tau entries are error variances, not sds.
struct ParameterSet {
  MatrixXd xi;       // K x p1
  MatrixXd beta;     // K x p2
  MatrixXd omega;    // K x p3
  VectorXd gamma;    // K, Gompertz shapes
  VectorXd tau;      // K, error variances
  VectorXd lambda0;  // K, baseline hazard scales
  VectorXd alpha1;   // n_a1
  VectorXd alpha2;   // n_a2

  int n_classes() const { return static_cast<int>(tau.size()); }
  static ParameterSet zeros(int k, const Dims& d);
};

// Latent quantities: per-visit class labels (0-based internally, 1-based in
// every file) and per-subject random effects with the frailty in the last slot.
struct LatentState {
  std::vector<VectorXi> classes;
  std::vector<VectorXd> effects;

  static LatentState zeros(const Dataset& data);
};

// Returns human-readable problems; empty means consistent.
std::vector<std::string> validate(const ParameterSet& params, const Dataset& data);
// Throws Error("validate", ...) listing every problem found.
void require_valid(const ParameterSet& params, const Dataset& data);

}  // namespace jlcm
