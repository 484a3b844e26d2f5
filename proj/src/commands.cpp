#include "jlcm/commands.hpp"

#include "jlcm/data_io.hpp"
#include "jlcm/likelihood.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <thread>

namespace fs = std::filesystem;

namespace jlcm {

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("io", "cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void require_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw Error("usage", "an output directory is required (--out or io.out)");
}

std::string require_dataset(const RunConfig& cfg) {
  if (cfg.dataset.empty())
    throw Error("usage", "a dataset path is required (--data or io.dataset)");
  return cfg.dataset;
}

std::string require_fit_dir(const RunConfig& cfg) {
  if (cfg.fit_dir.empty())
    throw Error("usage", "a fit directory is required (--fit-dir or io.fit_dir)");
  return cfg.fit_dir;
}

double require_landmark(const RunConfig& cfg) {
  if (!cfg.landmark) throw Error("usage", "a landmark time is required (--landmark or io.landmark)");
  if (*cfg.landmark < 0.0) throw Error("usage", "landmark must be nonnegative");
  return *cfg.landmark;
}

std::vector<double> require_horizons(const RunConfig& cfg) {
  if (cfg.horizons.empty())
    throw Error("usage", "at least one horizon is required (--horizons or io.horizons)");
  for (double h : cfg.horizons)
    if (h < 0.0) throw Error("usage", "horizons must be nonnegative");
  return cfg.horizons;
}

int fit_threads(size_t n_fits) {
  size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("JLCM_THREADS")) {
    const long cap = parse_long(env, "JLCM_THREADS");
    if (cap < 1) throw Error("config", "JLCM_THREADS must be >= 1");
    threads = std::min(threads, static_cast<size_t>(cap));
  }
  return static_cast<int>(std::min(threads, n_fits));
}

}  // namespace

RunConfig resolve_options(const CommandOptions& opt) {
  ConfigFile file;
  if (!opt.config_path.empty()) file = ConfigFile::parse_file(opt.config_path);
  RunConfig cfg = resolve_run_config(file);

  if (opt.seed) {
    cfg.sampler.seed = *opt.seed;
    cfg.scenario.seed = *opt.seed;
  }
  if (!opt.out_dir.empty()) cfg.out = opt.out_dir;
  if (opt.k) cfg.k = *opt.k;
  if (opt.k_range) cfg.k_range = opt.k_range;
  if (opt.landmark) cfg.landmark = opt.landmark;
  if (opt.horizons) cfg.horizons = *opt.horizons;
  if (opt.covariance_design) {
    if (*opt.covariance_design == "intercept-only")
      cfg.intercept_only_covariance = true;
    else if (*opt.covariance_design == "regression")
      cfg.intercept_only_covariance = false;
    else
      throw Error("usage", "--covariance-design must be regression or intercept-only");
  }
  if (!opt.dataset.empty()) cfg.dataset = opt.dataset;
  if (!opt.fit_dir.empty()) cfg.fit_dir = opt.fit_dir;
  if (!opt.truth.empty()) cfg.truth = opt.truth;

  if (cfg.intercept_only_covariance) {
    cfg.schema.phi_design_cols = {"1"};
    cfg.schema.logd_design_cols = {"1"};
  }
  if (cfg.k < 1) throw Error("config", "class count must be >= 1");
  if (cfg.k_range && (cfg.k_range->first < 1 || cfg.k_range->second < cfg.k_range->first))
    throw Error("config", "class range must satisfy 1 <= A <= B");
  return cfg;
}

int cmd_simulate(const CommandOptions& opt) {
  RunConfig cfg = resolve_options(opt);
  require_out(cfg);
  const Dataset data = simulate_dataset(cfg.scenario);
  ensure_dir(cfg.out);
  // simulated files always use the canonical column names
  write_dataset(join(cfg.out, "dataset.csv"), data, SchemaConfig{});
  write_truth(join(cfg.out, "truth.csv"), data);
  return 0;
}

void write_fit_outputs(const std::string& dir, const ChainOutput& chain, const Dataset& data) {
  ensure_dir(dir);
  const auto layout = parameter_layout(chain.n_classes, data);

  const std::vector<std::string> groups = {"xi",  "beta",    "omega",  "gamma",
                                           "tau", "lambda0", "alpha1", "alpha2"};
  for (const auto& group : groups) {
    std::vector<const FlatParameter*> members;
    for (const auto& fp : layout)
      if (fp.group == group) members.push_back(&fp);
    std::vector<std::string> header = {"iteration"};
    for (const auto* fp : members) header.push_back(fp->label);
    std::vector<std::vector<std::string>> rows;
    for (int d = 0; d < chain.n_draws(); ++d) {
      const long iteration = chain.config.burn_in + long(d) * chain.config.thinning + 1;
      std::vector<std::string> row = {std::to_string(iteration)};
      for (const auto* fp : members) row.push_back(format_double(get_flat(chain.draws[d], *fp)));
      rows.push_back(std::move(row));
    }
    write_csv(join(dir, "draws_" + group + ".csv"), header, rows);
  }

  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& rec : chain.acceptance)
      rows.push_back({rec.block, std::to_string(rec.proposals), std::to_string(rec.accepts),
                      format_double(rec.rate())});
    write_csv(join(dir, "acceptance.csv"), {"block", "proposals", "accepts", "rate"}, rows);
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < chain.loglik_trace.size(); ++i)
      rows.push_back({std::to_string(i + 1), format_double(chain.loglik_trace[i])});
    write_csv(join(dir, "loglik.csv"), {"iteration", "log_likelihood"}, rows);
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : summarize(chain, data))
      rows.push_back({s.parameter, format_double(s.estimate), format_double(s.sd),
                      format_double(s.ci_low), format_double(s.ci_high)});
    write_csv(join(dir, "summary.csv"), {"parameter", "estimate", "sd", "ci_low", "ci_high"},
              rows);
  }
  {
    std::vector<std::string> header = {"subject_id", "visit"};
    for (int k = 1; k <= chain.n_classes; ++k) header.push_back("prob_" + std::to_string(k));
    header.push_back("modal");
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : posterior_membership(chain, data)) {
      std::vector<std::string> row = {r.subject_id, std::to_string(r.visit)};
      for (int k = 0; k < r.probs.size(); ++k) row.push_back(format_double(r.probs[k]));
      row.push_back(std::to_string(r.modal_class));
      rows.push_back(std::move(row));
    }
    write_csv(join(dir, "membership.csv"), header, rows);
  }
  {
    const auto effects = mean_effects(chain);
    std::vector<std::string> header = {"subject_id"};
    for (int g = 0; g < data.dims.effect(); ++g) header.push_back("w" + std::to_string(g + 1));
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < data.n_subjects(); ++i) {
      std::vector<std::string> row = {data.subjects[i].id};
      for (int g = 0; g < effects[i].size(); ++g) row.push_back(format_double(effects[i][g]));
      rows.push_back(std::move(row));
    }
    write_csv(join(dir, "weffects.csv"), header, rows);
  }
  {
    const ParameterSet mean = posterior_mean_parameters(chain);
    std::vector<std::vector<std::string>> rows;
    for (const auto& fp : layout)
      rows.push_back({fp.group, std::to_string(fp.class_index), std::to_string(fp.position),
                      format_double(get_flat(mean, fp))});
    write_csv(join(dir, "model.csv"), {"group", "class", "index", "value"}, rows);
  }
  {
    const ModelScore score = compute_dic(chain, data);
    write_csv(join(dir, "score.csv"), {"K", "D_bar", "p_D", "DIC"},
              {{std::to_string(chain.n_classes), format_double(score.mean_deviance),
                format_double(score.p_d), format_double(score.dic)}});
  }
}

int cmd_fit(const CommandOptions& opt) {
  RunConfig cfg = resolve_options(opt);
  require_out(cfg);
  const Dataset data = load_dataset(require_dataset(cfg), cfg.schema);
  const PriorConfig prior = build_prior(cfg, data.dims.longitudinal);
  const ChainOutput chain = run_chain(data, cfg.k, prior, cfg.sampler);
  write_fit_outputs(cfg.out, chain, data);
  return 0;
}

int cmd_select(const CommandOptions& opt) {
  RunConfig cfg = resolve_options(opt);
  require_out(cfg);
  if (!cfg.k_range) throw Error("usage", "select requires --k-range A..B (or model.k_range)");
  const Dataset data = load_dataset(require_dataset(cfg), cfg.schema);
  const PriorConfig prior = build_prior(cfg, data.dims.longitudinal);
  ensure_dir(cfg.out);

  std::vector<int> ks;
  for (int k = cfg.k_range->first; k <= cfg.k_range->second; ++k) ks.push_back(k);
  std::vector<ModelScore> scores(ks.size());
  std::vector<std::string> failures(ks.size());

  auto fit_one = [&](size_t slot) {
    const int k = ks[slot];
    try {
      SamplerConfig sampler = cfg.sampler;
      sampler.seed = substream_seed(cfg.sampler.seed, static_cast<std::uint64_t>(k));
      const ChainOutput chain = run_chain(data, k, prior, sampler);
      const std::string sub = join(cfg.out, "K" + std::to_string(k));
      write_fit_outputs(sub, chain, data);
      scores[slot] = compute_dic(chain, data);
    } catch (const Error& e) {
      failures[slot] = std::string(e.category()) + ": fit for K=" + std::to_string(k) +
                       " failed: " + e.what();
    } catch (const std::exception& e) {
      failures[slot] =
          "internal: fit for K=" + std::to_string(k) + " failed: " + e.what();
    }
  };

  const int threads = fit_threads(ks.size());
  if (threads <= 1) {
    for (size_t slot = 0; slot < ks.size(); ++slot) fit_one(slot);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (size_t slot = next.fetch_add(1); slot < ks.size(); slot = next.fetch_add(1))
          fit_one(slot);
      });
    for (auto& th : pool) th.join();
  }

  for (const auto& failure : failures)
    if (!failure.empty()) {
      const size_t colon = failure.find(':');
      throw Error(failure.substr(0, colon), failure.substr(colon + 2));
    }

  size_t best = 0;
  for (size_t slot = 1; slot < ks.size(); ++slot)
    if (scores[slot].dic < scores[best].dic) best = slot;
  std::vector<std::vector<std::string>> rows;
  for (size_t slot = 0; slot < ks.size(); ++slot)
    rows.push_back({std::to_string(ks[slot]), format_double(scores[slot].mean_deviance),
                    format_double(scores[slot].p_d), format_double(scores[slot].dic),
                    slot == best ? "1" : "0"});
  write_csv(join(cfg.out, "dic.csv"), {"K", "D_bar", "p_D", "DIC", "selected"}, rows);
  return 0;
}

ParameterSet load_model(const std::string& fit_dir) {
  const std::string path = join(fit_dir, "model.csv");
  const CsvTable table = read_csv(path);
  const int g_idx = table.require_column("group", path);
  const int c_idx = table.require_column("class", path);
  const int i_idx = table.require_column("index", path);
  const int v_idx = table.require_column("value", path);

  struct Entry {
    int class_index, position;
    double value;
  };
  std::map<std::string, std::vector<Entry>> entries;
  int n_classes = 0;
  for (const auto& row : table.rows) {
    Entry e;
    e.class_index = static_cast<int>(parse_long(row[c_idx], path + " class"));
    e.position = static_cast<int>(parse_long(row[i_idx], path + " index"));
    e.value = parse_double(row[v_idx], path + " value");
    entries[row[g_idx]].push_back(e);
    n_classes = std::max(n_classes, e.class_index);
  }
  for (const char* group : {"xi", "beta", "omega", "gamma", "tau", "lambda0", "alpha1", "alpha2"})
    if (entries.find(group) == entries.end())
      throw Error("data", path + ": missing parameter group " + group);
  if (n_classes < 1) throw Error("data", path + ": no class-indexed parameters");

  auto width = [&](const std::string& group) {
    int w = 0;
    for (const auto& e : entries[group]) w = std::max(w, e.position + 1);
    return w;
  };
  ParameterSet p;
  p.xi = MatrixXd::Zero(n_classes, width("xi"));
  p.beta = MatrixXd::Zero(n_classes, width("beta"));
  p.omega = MatrixXd::Zero(n_classes, width("omega"));
  p.gamma = VectorXd::Zero(n_classes);
  p.tau = VectorXd::Zero(n_classes);
  p.lambda0 = VectorXd::Zero(n_classes);
  p.alpha1 = VectorXd::Zero(width("alpha1"));
  p.alpha2 = VectorXd::Zero(width("alpha2"));
  for (const auto& [group, list] : entries) {
    for (const auto& e : list) {
      FlatParameter fp{group, e.class_index, e.position, ""};
      set_flat(p, fp, e.value);
    }
  }
  return p;
}

std::vector<VectorXd> load_weffects(const std::string& fit_dir, const Dataset& data) {
  const std::string path = join(fit_dir, "weffects.csv");
  const CsvTable table = read_csv(path);
  const int id_idx = table.require_column("subject_id", path);
  const int dim = data.dims.effect();
  std::vector<int> w_idx;
  for (int g = 0; g < dim; ++g)
    w_idx.push_back(table.require_column("w" + std::to_string(g + 1), path));

  std::map<std::string, VectorXd> by_id;
  for (const auto& row : table.rows) {
    VectorXd w(dim);
    for (int g = 0; g < dim; ++g) w[g] = parse_double(row[w_idx[g]], path + " w");
    by_id[row[id_idx]] = w;
  }
  std::vector<VectorXd> out;
  for (const auto& s : data.subjects) {
    auto it = by_id.find(s.id);
    if (it == by_id.end())
      throw Error("data", path + ": no random-effect row for subject " + s.id);
    out.push_back(it->second);
  }
  return out;
}

LoadedMembership load_membership(const std::string& fit_dir, const Dataset& data) {
  const std::string path = join(fit_dir, "membership.csv");
  const CsvTable table = read_csv(path);
  const int id_idx = table.require_column("subject_id", path);
  const int visit_idx = table.require_column("visit", path);
  const int modal_idx = table.require_column("modal", path);
  std::vector<int> prob_idx;
  for (int k = 1;; ++k) {
    const int idx = table.column_index("prob_" + std::to_string(k));
    if (idx < 0) break;
    prob_idx.push_back(idx);
  }
  if (prob_idx.empty()) throw Error("data", path + ": no probability columns");
  const int K = static_cast<int>(prob_idx.size());

  std::map<std::string, int> slot;
  for (int i = 0; i < data.n_subjects(); ++i) slot[data.subjects[i].id] = i;

  LoadedMembership lm;
  lm.n_classes = K;
  lm.probs.resize(data.n_subjects());
  lm.modal.resize(data.n_subjects());
  for (int i = 0; i < data.n_subjects(); ++i) {
    lm.probs[i] = MatrixXd::Constant(data.subjects[i].n_visits(), K, -1.0);
    lm.modal[i] = VectorXi::Constant(data.subjects[i].n_visits(), -1);
  }
  for (const auto& row : table.rows) {
    auto it = slot.find(row[id_idx]);
    if (it == slot.end())
      throw Error("data", path + ": membership subject '" + row[id_idx] + "' not in dataset");
    const int i = it->second;
    const long visit = parse_long(row[visit_idx], path + " visit");
    if (visit < 1 || visit > data.subjects[i].n_visits())
      throw Error("data", path + ": subject " + row[id_idx] + " visit " +
                              std::to_string(visit) + " outside observed range");
    for (int k = 0; k < K; ++k)
      lm.probs[i](visit - 1, k) = parse_double(row[prob_idx[k]], path + " prob");
    const long modal = parse_long(row[modal_idx], path + " modal");
    if (modal < 1 || modal > K) throw Error("data", path + ": modal class outside 1..K");
    lm.modal[i][visit - 1] = static_cast<int>(modal - 1);
  }
  for (int i = 0; i < data.n_subjects(); ++i)
    if ((lm.modal[i].array() < 0).any())
      throw Error("data",
                  path + ": subject " + data.subjects[i].id + " has visits without membership");
  return lm;
}

int cmd_predict(const CommandOptions& opt) {
  RunConfig cfg = resolve_options(opt);
  require_out(cfg);
  const double landmark = require_landmark(cfg);
  const std::vector<double> horizons = require_horizons(cfg);
  const Dataset data = load_dataset(require_dataset(cfg), cfg.schema);
  const std::string fit_dir = require_fit_dir(cfg);

  const ParameterSet params = load_model(fit_dir);
  require_valid(params, data);
  const std::vector<VectorXd> effects = load_weffects(fit_dir, data);
  const LoadedMembership membership = load_membership(fit_dir, data);
  if (membership.n_classes != params.n_classes())
    throw Error("data", "membership and model disagree on the class count");

  std::vector<VectorXd> weights(data.n_subjects());
  for (int i = 0; i < data.n_subjects(); ++i)
    weights[i] = membership.probs[i].row(data.subjects[i].n_visits() - 1).transpose();

  const auto predictions =
      dynamic_survival_from_estimates(params, data, effects, weights, landmark, horizons);
  ensure_dir(cfg.out);
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : predictions)
      rows.push_back({p.subject_id, format_double(p.landmark), format_double(p.horizon),
                      p.ok ? format_double(p.value) : "NA"});
    write_csv(join(cfg.out, "predictions.csv"),
              {"subject_id", "landmark", "horizon", "conditional_survival"}, rows);
  }
  {
    const int K = params.n_classes();
    const double t_max = landmark + *std::max_element(horizons.begin(), horizons.end());
    const int grid_points = 50;
    const auto x2_time = time_positions(cfg.schema.longitudinal_cols, cfg.schema);
    const auto z_time = time_positions(cfg.schema.random_effect_cols, cfg.schema);

    std::vector<std::string> header = {"subject_id", "time"};
    for (int k = 1; k <= K; ++k) header.push_back("fitted_" + std::to_string(k));
    header.push_back("survival");
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < data.n_subjects(); ++i) {
      const Subject& s = data.subjects[i];
      const int last = s.n_visits() - 1;
      const VectorXd u = effects[i].head(data.dims.random);
      const double upsilon = effects[i][data.dims.random];
      for (int g = 0; g <= grid_points; ++g) {
        const double t = t_max * double(g) / grid_points;
        std::vector<std::string> row = {s.id, format_double(t)};
        const VectorXd zrow = design_row_at_time(s, s.z, z_time, last, t);
        const VectorXd x2row = design_row_at_time(s, s.x2, x2_time, last, t);
        for (int k = 0; k < K; ++k)
          row.push_back(format_double(x2row.dot(params.beta.row(k).transpose()) + zrow.dot(u)));
        row.push_back(format_double(mixture_survival(params, weights[i], s.x3, upsilon, t)));
        rows.push_back(std::move(row));
      }
    }
    write_csv(join(cfg.out, "plotdata.csv"), header, rows);
  }
  return 0;
}

int cmd_evaluate(const CommandOptions& opt) {
  RunConfig cfg = resolve_options(opt);
  require_out(cfg);
  const double landmark = require_landmark(cfg);
  const double horizon = require_horizons(cfg).front();
  Dataset data = load_dataset(require_dataset(cfg), cfg.schema);
  const std::string fit_dir = require_fit_dir(cfg);

  const ParameterSet params = load_model(fit_dir);
  require_valid(params, data);
  const std::vector<VectorXd> effects = load_weffects(fit_dir, data);
  const LoadedMembership membership = load_membership(fit_dir, data);

  std::vector<VectorXd> weights(data.n_subjects());
  for (int i = 0; i < data.n_subjects(); ++i)
    weights[i] = membership.probs[i].row(data.subjects[i].n_visits() - 1).transpose();
  const auto predictions =
      dynamic_survival_from_estimates(params, data, effects, weights, landmark, {horizon});

  std::vector<double> marker, times;
  std::vector<int> events;
  for (int i = 0; i < data.n_subjects(); ++i) {
    if (!predictions[i].ok) continue;  // degenerate landmark: excluded from the AUC
    marker.push_back(1.0 - predictions[i].value);
    times.push_back(data.subjects[i].event_time);
    events.push_back(data.subjects[i].event);
  }
  std::string auc_value = "NA";
  try {
    auc_value = format_double(ipcw_auc(marker, times, events, landmark, horizon));
  } catch (const Error& e) {
    if (e.category() != "auc") throw;
  }

  std::string error_value = "NA";
  if (!cfg.truth.empty()) {
    load_truth(cfg.truth, data);
    error_value = format_double(error_rate(membership.modal, data.true_classes));
  }

  ensure_dir(cfg.out);
  write_csv(join(cfg.out, "metrics.csv"), {"replicate", "auc", "error_rate"},
            {{std::to_string(cfg.replicate), auc_value, error_value}});
  return 0;
}

}  // namespace jlcm
