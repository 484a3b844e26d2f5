#include "jlcm/inference.hpp"

#include "jlcm/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace jlcm {

std::vector<MembershipRow> membership_from_estimates(const ParameterSet& params,
                                                     const Dataset& data,
                                                     const std::vector<VectorXd>& effects) {
  if (static_cast<int>(effects.size()) != data.n_subjects())
    throw Error("validate", "random-effect estimates do not cover every subject");
  std::vector<MembershipRow> rows;
  for (int i = 0; i < data.n_subjects(); ++i) {
    const Subject& s = data.subjects[i];
    const CholeskyFactors f =
        build_factors(params.alpha1, params.alpha2, s.a_design, s.b_design, data.dims.random);
    const double w_density = random_effects_log_density(effects[i], f);
    for (int j = 0; j < s.n_visits(); ++j) {
      VectorXd logw = site_log_weights(s, j, params, effects[i]);
      logw.array() += w_density;  // class-constant, kept for the stated formula
      const double shift = logw.maxCoeff();
      VectorXd probs = (logw.array() - shift).exp();
      probs /= probs.sum();
      int modal = 0;
      for (int k = 1; k < probs.size(); ++k)
        if (probs[k] > probs[modal]) modal = k;
      rows.push_back({s.id, j + 1, probs, modal + 1});
    }
  }
  return rows;
}

std::vector<MembershipRow> posterior_membership(const ChainOutput& chain, const Dataset& data) {
  return membership_from_estimates(posterior_mean_parameters(chain), data, mean_effects(chain));
}

double mixture_survival(const ParameterSet& params, const VectorXd& weights, const VectorXd& x3,
                        double upsilon, double t) {
  double s = 0.0;
  for (int k = 0; k < params.n_classes(); ++k)
    s += weights[k] * std::exp(-cumulative_hazard(t, x3, params.omega.row(k).transpose(),
                                                  params.gamma[k], params.lambda0[k], upsilon));
  return s;
}

double conditional_survival(const ParameterSet& params, const VectorXd& weights,
                            const VectorXd& x3, double upsilon, double t, double dt) {
  if (t < 0.0 || dt < 0.0) throw Error("predict", "landmark and horizon must be nonnegative");
  const double denom = mixture_survival(params, weights, x3, upsilon, t);
  if (!(denom > 0.0)) throw Error("predict", "mixture survival underflows at the landmark");
  return mixture_survival(params, weights, x3, upsilon, t + dt) / denom;
}

std::vector<PredictionRow> dynamic_survival_from_estimates(
    const ParameterSet& params, const Dataset& data, const std::vector<VectorXd>& effects,
    const std::vector<VectorXd>& final_visit_weights, double landmark,
    const std::vector<double>& horizons) {
  std::vector<PredictionRow> rows;
  for (int i = 0; i < data.n_subjects(); ++i) {
    const Subject& s = data.subjects[i];
    const double upsilon = effects[i][data.dims.random];
    for (double dt : horizons) {
      PredictionRow row{s.id, landmark, dt, std::numeric_limits<double>::quiet_NaN(), false};
      try {
        row.value =
            conditional_survival(params, final_visit_weights[i], s.x3, upsilon, landmark, dt);
        row.ok = true;
      } catch (const Error&) {
        // degenerate landmark for this subject; keep the batch going
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<PredictionRow> dynamic_survival(const ChainOutput& chain, const Dataset& data,
                                            double landmark, const std::vector<double>& horizons) {
  const ParameterSet params = posterior_mean_parameters(chain);
  const std::vector<VectorXd> effects = mean_effects(chain);
  const auto membership = membership_from_estimates(params, data, effects);

  std::vector<VectorXd> weights(data.n_subjects());
  size_t r = 0;
  for (int i = 0; i < data.n_subjects(); ++i) {
    const int m = data.subjects[i].n_visits();
    weights[i] = membership[r + m - 1].probs;
    r += m;
  }
  return dynamic_survival_from_estimates(params, data, effects, weights, landmark, horizons);
}

JumpingSummary jumping_summary(const std::vector<VectorXi>& modal_labels, int n_classes) {
  JumpingSummary js;
  js.stayers = VectorXi::Zero(n_classes);
  js.jumpers_by_final = VectorXi::Zero(n_classes);
  js.total = static_cast<int>(modal_labels.size());
  for (const auto& labels : modal_labels) {
    if (labels.size() == 0) throw Error("validate", "subject without modal labels");
    const int final_label = labels[labels.size() - 1];
    const bool constant = (labels.array() == labels[0]).all();
    if (constant)
      ++js.stayers[final_label];
    else
      ++js.jumpers_by_final[final_label];
  }
  return js;
}

ModelScore compute_dic(const ChainOutput& chain, const Dataset& data) {
  if (chain.n_draws() < 1) throw Error("numeric", "DIC of an empty chain");
  double mean_dev = 0.0;
  for (int d = 0; d < chain.n_draws(); ++d)
    mean_dev +=
        -2.0 * class_marginal_log_likelihood(chain.draws[d], data, chain.states[d].effects);
  mean_dev /= chain.n_draws();

  const double dev_hat = -2.0 * class_marginal_log_likelihood(posterior_mean_parameters(chain),
                                                              data, mean_effects(chain));

  ModelScore score;
  score.mean_deviance = mean_dev;
  score.p_d = mean_dev - dev_hat;
  score.dic = mean_dev + score.p_d;
  return score;
}

double error_rate(const std::vector<VectorXi>& estimated, const std::vector<VectorXi>& truth) {
  if (estimated.size() != truth.size())
    throw Error("validate", "label sets cover different subject counts");
  int k_max = 0;
  long total = 0;
  for (size_t i = 0; i < estimated.size(); ++i) {
    if (estimated[i].size() != truth[i].size())
      throw Error("validate", "label sets cover different visit counts");
    for (int j = 0; j < estimated[i].size(); ++j) {
      k_max = std::max({k_max, estimated[i][j] + 1, truth[i][j] + 1});
      ++total;
    }
  }
  if (total == 0) throw Error("validate", "no labelled sites");
  if (k_max > 6) throw Error("config", "label permutation search supports at most 6 classes");

  MatrixXd confusion = MatrixXd::Zero(k_max, k_max);
  for (size_t i = 0; i < estimated.size(); ++i)
    for (int j = 0; j < estimated[i].size(); ++j)
      confusion(estimated[i][j], truth[i][j]) += 1.0;

  std::vector<int> perm(k_max);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double matched = 0.0;
    for (int e = 0; e < k_max; ++e) matched += confusion(e, perm[e]);
    best = std::max(best, matched);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return 1.0 - best / double(total);
}

double ipcw_auc(const std::vector<double>& marker, const std::vector<double>& times,
                const std::vector<int>& events, double landmark, double horizon) {
  const size_t n = marker.size();
  if (times.size() != n || events.size() != n)
    throw Error("validate", "marker, time, and event vectors differ in length");
  if (horizon <= 0.0) throw Error("auc", "horizon must be positive");
  const double window_end = landmark + horizon;

  // Kaplan-Meier estimator of the censoring distribution G
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return times[a] < times[b]; });
  // unique censoring times with factors (1 - d_c / at_risk)
  std::vector<double> g_times;
  std::vector<double> g_factors;
  size_t pos = 0;
  while (pos < n) {
    const double t = times[order[pos]];
    size_t at_risk = n - pos;
    int censored_here = 0;
    while (pos < n && times[order[pos]] == t) {
      if (events[order[pos]] == 0) ++censored_here;
      ++pos;
    }
    if (censored_here > 0) {
      g_times.push_back(t);
      g_factors.push_back(1.0 - double(censored_here) / double(at_risk));
    }
  }
  auto g_left = [&](double t) {  // G(t-): censorings strictly before t
    double g = 1.0;
    for (size_t s = 0; s < g_times.size() && g_times[s] < t; ++s) g *= g_factors[s];
    return g;
  };
  auto g_at = [&](double t) {
    double g = 1.0;
    for (size_t s = 0; s < g_times.size() && g_times[s] <= t; ++s) g *= g_factors[s];
    return g;
  };

  std::vector<size_t> cases, controls;
  std::vector<double> case_w;
  for (size_t i = 0; i < n; ++i) {
    if (times[i] > landmark && times[i] <= window_end && events[i] == 1) {
      const double g = g_left(times[i]);
      if (g > 0.0) {
        cases.push_back(i);
        case_w.push_back(1.0 / g);
      }
    } else if (times[i] > window_end) {
      controls.push_back(i);
    }
  }
  const double g_ctrl = g_at(window_end);
  if (cases.empty() || controls.empty() || !(g_ctrl > 0.0))
    throw Error("auc", "undefined AUC: no cases or controls in the window");
  const double control_w = 1.0 / g_ctrl;

  double numer = 0.0, case_total = 0.0;
  for (size_t a = 0; a < cases.size(); ++a) {
    case_total += case_w[a];
    for (size_t b : controls) {
      if (marker[cases[a]] > marker[b])
        numer += case_w[a] * control_w;
      else if (marker[cases[a]] == marker[b])
        numer += 0.5 * case_w[a] * control_w;
    }
  }
  return numer / (case_total * control_w * double(controls.size()));
}

}  // namespace jlcm
