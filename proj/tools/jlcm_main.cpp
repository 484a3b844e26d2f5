#include "jlcm/commands.hpp"
#include "jlcm/csv.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RawOptions {
  std::string config, out, k_range, horizons, covariance_design, dataset, fit_dir, truth;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int k = 0;
  bool has_k = false;
  double landmark = 0.0;
  bool has_landmark = false;
};

void add_common(CLI::App* sub, RawOptions& raw) {
  sub->add_option("--config", raw.config, "config file (flat key=value with sections)");
  sub->add_option("--seed", raw.seed, "RNG seed override")->each([&](const std::string&) {
    raw.has_seed = true;
  });
  sub->add_option("--out", raw.out, "output directory");
  sub->add_option("--k", raw.k, "class count")->each([&](const std::string&) {
    raw.has_k = true;
  });
  sub->add_option("--k-range", raw.k_range, "class range A..B");
  sub->add_option("--landmark", raw.landmark, "landmark time")->each([&](const std::string&) {
    raw.has_landmark = true;
  });
  sub->add_option("--horizons", raw.horizons, "comma-separated horizon offsets");
  sub->add_option("--covariance-design", raw.covariance_design,
                  "regression (default) or intercept-only");
  sub->add_option("--data", raw.dataset, "dataset CSV path");
  sub->add_option("--fit-dir", raw.fit_dir, "directory of a previous fit");
  sub->add_option("--truth", raw.truth, "ground-truth CSV (simulated data)");
}

jlcm::CommandOptions build_options(const RawOptions& raw) {
  jlcm::CommandOptions opt;
  opt.config_path = raw.config;
  opt.out_dir = raw.out;
  opt.dataset = raw.dataset;
  opt.fit_dir = raw.fit_dir;
  opt.truth = raw.truth;
  if (raw.has_seed) opt.seed = raw.seed;
  if (raw.has_k) opt.k = raw.k;
  if (raw.has_landmark) opt.landmark = raw.landmark;
  if (!raw.k_range.empty()) {
    const size_t dots = raw.k_range.find("..");
    if (dots == std::string::npos)
      throw jlcm::Error("usage", "--k-range must look like A..B");
    opt.k_range = {static_cast<int>(jlcm::parse_long(raw.k_range.substr(0, dots), "--k-range")),
                   static_cast<int>(jlcm::parse_long(raw.k_range.substr(dots + 2), "--k-range"))};
  }
  if (!raw.horizons.empty()) {
    std::vector<double> hs;
    std::string item;
    std::istringstream in(raw.horizons);
    while (std::getline(in, item, ','))
      if (!item.empty()) hs.push_back(jlcm::parse_double(item, "--horizons"));
    if (hs.empty()) throw jlcm::Error("usage", "--horizons needs at least one value");
    opt.horizons = hs;
  }
  if (!raw.covariance_design.empty()) opt.covariance_design = raw.covariance_design;
  return opt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian joint latent class model for longitudinal and survival data"};
  app.require_subcommand(1);

  RawOptions raw;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a dataset with ground truth");
  CLI::App* fit = app.add_subcommand("fit", "run the MCMC sampler and write fit files");
  CLI::App* select = app.add_subcommand("select", "fit a range of class counts, rank by DIC");
  CLI::App* predict = app.add_subcommand("predict", "conditional survival from a stored fit");
  CLI::App* evaluate = app.add_subcommand("evaluate", "AUC and error-rate metrics for a fit");
  for (CLI::App* sub : {simulate, fit, select, predict, evaluate}) add_common(sub, raw);

  CLI11_PARSE(app, argc, argv);

  try {
    const jlcm::CommandOptions opt = build_options(raw);
    if (simulate->parsed()) return jlcm::cmd_simulate(opt);
    if (fit->parsed()) return jlcm::cmd_fit(opt);
    if (select->parsed()) return jlcm::cmd_select(opt);
    if (predict->parsed()) return jlcm::cmd_predict(opt);
    if (evaluate->parsed()) return jlcm::cmd_evaluate(opt);
    std::fprintf(stderr, "error: usage: no subcommand given\n");
    return 2;
  } catch (const jlcm::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", e.category().c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 2;
  }
}
