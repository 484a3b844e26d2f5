#pragma once

#include "jlcm/mcmc.hpp"
#include "jlcm/types.hpp"

#include <string>
#include <vector>

namespace jlcm {

// Output-facing row: visit and modal class are 1-based, probs is K-long.
struct MembershipRow {
  std::string subject_id;
  int visit;
  VectorXd probs;
  int modal_class;
};

// Membership probabilities at point estimates: prior softmax composed with
// the site likelihood factor (and the random-effects density, which is
// class-constant and cancels in the normalization).
std::vector<MembershipRow> membership_from_estimates(const ParameterSet& params,
                                                     const Dataset& data,
                                                     const std::vector<VectorXd>& effects);
std::vector<MembershipRow> posterior_membership(const ChainOutput& chain, const Dataset& data);

// Mixture survival S(t) = sum_k weight_k exp(-H_k(t)) for one subject.
double mixture_survival(const ParameterSet& params, const VectorXd& weights, const VectorXd& x3,
                        double upsilon, double t);
// S(t + dt) / S(t); throws Error("predict") when the landmark mixture is 0.
double conditional_survival(const ParameterSet& params, const VectorXd& weights,
                            const VectorXd& x3, double upsilon, double t, double dt);

struct PredictionRow {
  std::string subject_id;
  double landmark;
  double horizon;
  double value;  // NaN when not ok
  bool ok;
};

// Batch prediction over all subjects; class weights are the membership
// probabilities at each subject's final observed visit. Degenerate landmarks
// yield ok=false rows instead of aborting.
std::vector<PredictionRow> dynamic_survival(const ChainOutput& chain, const Dataset& data,
                                            double landmark, const std::vector<double>& horizons);
std::vector<PredictionRow> dynamic_survival_from_estimates(
    const ParameterSet& params, const Dataset& data, const std::vector<VectorXd>& effects,
    const std::vector<VectorXd>& final_visit_weights, double landmark,
    const std::vector<double>& horizons);

struct JumpingSummary {
  VectorXi stayers;           // subjects with a constant modal label, per class
  VectorXi jumpers_by_final;  // label-changing subjects, tallied by final label
  int total = 0;
};
JumpingSummary jumping_summary(const std::vector<VectorXi>& modal_labels, int n_classes);

struct ModelScore {
  double mean_deviance = 0.0;
  double p_d = 0.0;
  double dic = 0.0;
};
// DIC on the class-marginalized likelihood (classes summed out per site,
// still conditional on the random effects), with the plug-in deviance at
// posterior-mean parameters and mean random effects. p_d may be negative
// and is reported as-is.
ModelScore compute_dic(const ChainOutput& chain, const Dataset& data);

// Misclassification fraction over all sites, minimized over label
// permutations (injections when the label counts differ). More than 6
// classes is rejected (factorial search guard).
double error_rate(const std::vector<VectorXi>& estimated, const std::vector<VectorXi>& truth);

// Time-dependent AUC at (landmark, landmark+horizon] with inverse
// probability of censoring weights from the Kaplan-Meier estimator of the
// censoring distribution. Cases: events inside the window, weighted by
// 1/G(T-); controls: subjects past the window, weighted by 1/G(t+dt).
double ipcw_auc(const std::vector<double>& marker, const std::vector<double>& times,
                const std::vector<int>& events, double landmark, double horizon);

}  // namespace jlcm
