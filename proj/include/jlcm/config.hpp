#pragma once

#include "jlcm/data_io.hpp"
#include "jlcm/mcmc.hpp"
#include "jlcm/simulate.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace jlcm {

// Flat "key = value" file with [model] / [priors] / [sampler] / [io]
// sections; keys are exposed as "section.key". Full-line comments start
// with '#' or ';'.
struct ConfigFile {
  std::map<std::string, std::string> values;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
};

// Everything a command needs, resolved from config defaults; CLI flags are
// applied on top by the command layer.
struct RunConfig {
  SchemaConfig schema;
  SimulationScenario scenario;
  SamplerConfig sampler;

  // scalar prior settings; the beta prior is expanded to N(mean 1, var I)
  // of the longitudinal dimension once the data are loaded
  double prior_beta_mean = 0.0;
  double prior_beta_var = 1.0;
  double prior_lambda_shape = 0.01, prior_lambda_rate = 0.01;
  double prior_tau_shape = 0.01, prior_tau_scale = 0.01;
  double prior_theta_sd = 1.0;

  std::string dataset, truth, fit_dir, out;
  int k = 2;
  std::optional<std::pair<int, int>> k_range;
  std::optional<double> landmark;
  std::vector<double> horizons;
  bool intercept_only_covariance = false;
  long replicate = 1;
};

RunConfig resolve_run_config(const ConfigFile& file);
PriorConfig build_prior(const RunConfig& cfg, int longitudinal_dim);

}  // namespace jlcm
