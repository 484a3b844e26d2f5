#include "jlcm/config.hpp"

#include "jlcm/csv.hpp"

#include <fstream>
#include <sstream>

namespace jlcm {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw Error("config", origin + ":" + std::to_string(line_no) + ": malformed section");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw Error("config", origin + ":" + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw Error("config", origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw Error("config", origin + ":" + std::to_string(line_no) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    cfg.values[full] = trim(t.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open config " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_text(content, path);
}

std::string ConfigFile::get(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  return parse_double(it->second, "config key " + key);
}

long ConfigFile::get_long(const std::string& key, long fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  return parse_long(it->second, "config key " + key);
}

std::uint64_t ConfigFile::get_seed(const std::string& key, std::uint64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw Error("config", "config key " + key + ": invalid seed '" + it->second + "'");
  }
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config", "config key " + key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> ConfigFile::get_list(const std::string& key,
                                              const std::vector<std::string>& fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  return split_list(it->second);
}

std::vector<double> ConfigFile::get_double_list(const std::string& key,
                                                const std::vector<double>& fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second))
    out.push_back(parse_double(item, "config key " + key));
  return out;
}

RunConfig resolve_run_config(const ConfigFile& file) {
  RunConfig cfg;

  SchemaConfig& schema = cfg.schema;
  schema.subject_col = file.get("model.subject", schema.subject_col);
  schema.time_col = file.get("model.time", schema.time_col);
  schema.outcome_col = file.get("model.outcome", schema.outcome_col);
  schema.event_time_col = file.get("model.event_time", schema.event_time_col);
  schema.event_col = file.get("model.event", schema.event_col);
  schema.membership_cols = file.get_list("model.membership", schema.membership_cols);
  schema.longitudinal_cols = file.get_list("model.longitudinal", schema.longitudinal_cols);
  schema.random_effect_cols = file.get_list("model.random", schema.random_effect_cols);
  schema.survival_cols = file.get_list("model.survival", schema.survival_cols);
  schema.phi_design_cols = file.get_list("model.phi_design", schema.phi_design_cols);
  schema.logd_design_cols = file.get_list("model.logd_design", schema.logd_design_cols);
  for (const auto& [key, value] : file.values) {
    const std::string prefix = "model.coding.";
    if (key.rfind(prefix, 0) != 0) continue;
    const std::string column = key.substr(prefix.size());
    if (column.empty()) throw Error("config", "coding key without a column name");
    std::map<std::string, double> levels;
    for (const auto& pair : split_list(value)) {
      const size_t eq = pair.find('=');
      if (eq == std::string::npos)
        throw Error("config", "coding for " + column + " must be level=value pairs");
      levels[trim(pair.substr(0, eq))] =
          parse_double(pair.substr(eq + 1), "coding for " + column);
    }
    if (levels.empty()) throw Error("config", "empty coding for column " + column);
    schema.codings[column] = levels;
  }

  cfg.scenario = scenario_defaults();
  cfg.scenario.n_subjects = static_cast<int>(file.get_long("model.n_subjects", cfg.scenario.n_subjects));
  cfg.scenario.max_visits = static_cast<int>(file.get_long("model.max_visits", cfg.scenario.max_visits));
  cfg.scenario.visit_spacing = file.get_double("model.visit_spacing", cfg.scenario.visit_spacing);
  cfg.scenario.admin_censoring =
      file.get_double("model.admin_censoring", cfg.scenario.admin_censoring);
  cfg.scenario.censor_lo = file.get_double("model.censor_lo", cfg.scenario.censor_lo);
  cfg.scenario.censor_hi = file.get_double("model.censor_hi", cfg.scenario.censor_hi);

  cfg.k = static_cast<int>(file.get_long("model.k", cfg.k));
  if (file.has("model.k_range")) {
    const std::string spec = file.get("model.k_range", "");
    const size_t dots = spec.find("..");
    if (dots == std::string::npos)
      throw Error("config", "model.k_range must look like A..B");
    const int lo = static_cast<int>(parse_long(spec.substr(0, dots), "model.k_range"));
    const int hi = static_cast<int>(parse_long(spec.substr(dots + 2), "model.k_range"));
    cfg.k_range = {lo, hi};
  }
  const std::string design = file.get("model.covariance_design", "regression");
  if (design == "intercept-only")
    cfg.intercept_only_covariance = true;
  else if (design != "regression")
    throw Error("config", "model.covariance_design must be regression or intercept-only");

  cfg.prior_beta_mean = file.get_double("priors.beta_mean", cfg.prior_beta_mean);
  cfg.prior_beta_var = file.get_double("priors.beta_var", cfg.prior_beta_var);
  cfg.prior_lambda_shape = file.get_double("priors.lambda_shape", cfg.prior_lambda_shape);
  cfg.prior_lambda_rate = file.get_double("priors.lambda_rate", cfg.prior_lambda_rate);
  cfg.prior_tau_shape = file.get_double("priors.tau_shape", cfg.prior_tau_shape);
  cfg.prior_tau_scale = file.get_double("priors.tau_scale", cfg.prior_tau_scale);
  cfg.prior_theta_sd = file.get_double("priors.theta_sd", cfg.prior_theta_sd);
  if (cfg.prior_beta_var <= 0.0 || cfg.prior_lambda_shape <= 0.0 ||
      cfg.prior_lambda_rate <= 0.0 || cfg.prior_tau_shape <= 0.0 ||
      cfg.prior_tau_scale <= 0.0 || cfg.prior_theta_sd <= 0.0)
    throw Error("config", "prior shapes, rates, and variances must be positive");

  cfg.sampler.iterations = static_cast<int>(file.get_long("sampler.iterations", cfg.sampler.iterations));
  cfg.sampler.burn_in = static_cast<int>(file.get_long("sampler.burn_in", cfg.sampler.burn_in));
  cfg.sampler.thinning = static_cast<int>(file.get_long("sampler.thinning", cfg.sampler.thinning));
  cfg.sampler.seed = file.get_seed("sampler.seed", cfg.sampler.seed);
  cfg.sampler.am_sigma2 = file.get_double("sampler.sigma2", cfg.sampler.am_sigma2);
  cfg.sampler.am_mix_weight = file.get_double("sampler.mix_weight", cfg.sampler.am_mix_weight);
  cfg.sampler.am_safety_scale =
      file.get_double("sampler.safety_scale", cfg.sampler.am_safety_scale);
  cfg.sampler.relabel = file.get_bool("sampler.relabel", cfg.sampler.relabel);
  cfg.sampler.prior_only = file.get_bool("sampler.prior_only", cfg.sampler.prior_only);
  cfg.scenario.seed = cfg.sampler.seed;

  cfg.dataset = file.get("io.dataset", "");
  cfg.truth = file.get("io.truth", "");
  cfg.fit_dir = file.get("io.fit_dir", "");
  cfg.out = file.get("io.out", "");
  cfg.replicate = file.get_long("io.replicate", cfg.replicate);
  if (file.has("io.landmark")) cfg.landmark = file.get_double("io.landmark", 0.0);
  cfg.horizons = file.get_double_list("io.horizons", cfg.horizons);

  return cfg;
}

PriorConfig build_prior(const RunConfig& cfg, int longitudinal_dim) {
  PriorConfig prior = PriorConfig::defaults(longitudinal_dim);
  prior.beta_mean = VectorXd::Constant(longitudinal_dim, cfg.prior_beta_mean);
  prior.beta_cov =
      cfg.prior_beta_var * MatrixXd::Identity(longitudinal_dim, longitudinal_dim);
  prior.lambda_shape = cfg.prior_lambda_shape;
  prior.lambda_rate = cfg.prior_lambda_rate;
  prior.tau_shape = cfg.prior_tau_shape;
  prior.tau_scale = cfg.prior_tau_scale;
  prior.theta_sd = cfg.prior_theta_sd;
  return prior;
}

}  // namespace jlcm
