#pragma once

#include "jlcm/config.hpp"
#include "jlcm/inference.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jlcm {

// Parsed CLI surface; every field overrides the matching config entry.
struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> k;
  std::optional<std::pair<int, int>> k_range;
  std::optional<double> landmark;
  std::optional<std::vector<double>> horizons;
  std::optional<std::string> covariance_design;
  std::string dataset, fit_dir, truth;
};

RunConfig resolve_options(const CommandOptions& opt);

int cmd_simulate(const CommandOptions& opt);
int cmd_fit(const CommandOptions& opt);
int cmd_select(const CommandOptions& opt);
int cmd_predict(const CommandOptions& opt);
int cmd_evaluate(const CommandOptions& opt);

// Writes the complete fit directory: per-group draw files, acceptance and
// log-likelihood traces, summary, membership, random-effect means, the
// flattened posterior-mean model, and the fit's DIC row.
void write_fit_outputs(const std::string& dir, const ChainOutput& chain, const Dataset& data);

// Reload of fit artifacts for predict/evaluate.
ParameterSet load_model(const std::string& fit_dir);
std::vector<VectorXd> load_weffects(const std::string& fit_dir, const Dataset& data);

struct LoadedMembership {
  std::vector<MatrixXd> probs;   // per subject, m_i x K
  std::vector<VectorXi> modal;   // per subject, 0-based labels
  int n_classes = 0;
};
LoadedMembership load_membership(const std::string& fit_dir, const Dataset& data);

}  // namespace jlcm
