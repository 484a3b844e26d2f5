#include "jlcm/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace jlcm {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n") != std::string::npos;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

int CsvTable::require_column(const std::string& name, const std::string& path) const {
  int idx = column_index(name);
  if (idx < 0) throw Error("data", path + ": missing column '" + name + "'");
  return idx;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any_field = false;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    any_field = false;
  };
  auto end_record = [&] {
    end_field();
    if (table.columns.empty())
      table.columns = record;
    else
      table.rows.push_back(record);
    record.clear();
  };

  for (size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        any_field = true;
        break;
      case ',':
        end_field();
        any_field = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        any_field = true;
    }
  }
  if (in_quotes) throw Error("data", path + ": unterminated quoted field");
  if (any_field || !record.empty()) end_record();

  for (size_t r = 0; r < table.rows.size(); ++r)
    if (table.rows[r].size() != table.columns.size())
      throw Error("data", path + ": row " + std::to_string(r + 2) + " has " +
                              std::to_string(table.rows[r].size()) + " fields, expected " +
                              std::to_string(table.columns.size()));
  return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path);
  auto emit = [&](const std::vector<std::string>& rec) {
    for (size_t i = 0; i < rec.size(); ++i) {
      if (i) out << ',';
      out << (needs_quoting(rec[i]) ? quote(rec[i]) : rec[i]);
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  if (!out) throw Error("io", "write failed for " + path);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& context) {
  const std::string t = trim(s);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw Error("data", context + ": non-numeric value '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& context) {
  const std::string t = trim(s);
  long v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw Error("data", context + ": non-integer value '" + s + "'");
  return v;
}

ParameterSet ParameterSet::zeros(int k, const Dims& d) {
  ParameterSet p;
  p.xi = MatrixXd::Zero(k, d.membership);
  p.beta = MatrixXd::Zero(k, d.longitudinal);
  p.omega = MatrixXd::Zero(k, d.survival);
  p.gamma = VectorXd::Zero(k);
  p.tau = VectorXd::Ones(k);
  p.lambda0 = VectorXd::Ones(k);
  p.alpha1 = VectorXd::Zero(d.phi_design);
  p.alpha2 = VectorXd::Zero(d.logd_design);
  return p;
}

LatentState LatentState::zeros(const Dataset& data) {
  LatentState state;
  state.classes.reserve(data.n_subjects());
  state.effects.reserve(data.n_subjects());
  for (const auto& s : data.subjects) {
    state.classes.push_back(VectorXi::Zero(s.n_visits()));
    state.effects.push_back(VectorXd::Zero(data.dims.effect()));
  }
  return state;
}

std::vector<std::string> validate(const ParameterSet& params, const Dataset& data) {
  std::vector<std::string> problems;
  const int k = params.n_classes();
  const Dims& d = data.dims;

  if (k < 1) problems.push_back("class count must be >= 1");
  auto check_rows = [&](const MatrixXd& m, const char* name) {
    if (m.rows() != k)
      problems.push_back(std::string(name) + " has " + std::to_string(m.rows()) +
                         " class rows, expected " + std::to_string(k));
  };
  check_rows(params.xi, "xi");
  check_rows(params.beta, "beta");
  check_rows(params.omega, "omega");
  if (params.gamma.size() != k) problems.push_back("gamma length differs from class count");
  if (params.lambda0.size() != k) problems.push_back("lambda0 length differs from class count");

  if (params.xi.cols() != d.membership)
    problems.push_back("xi has " + std::to_string(params.xi.cols()) +
                       " columns, membership design has " + std::to_string(d.membership));
  if (params.beta.cols() != d.longitudinal)
    problems.push_back("beta has " + std::to_string(params.beta.cols()) +
                       " columns, longitudinal design has " + std::to_string(d.longitudinal));
  if (params.omega.cols() != d.survival)
    problems.push_back("omega has " + std::to_string(params.omega.cols()) +
                       " columns, hazard design has " + std::to_string(d.survival));
  if (params.alpha1.size() != d.phi_design)
    problems.push_back("alpha1 length differs from autoregressive design");
  if (params.alpha2.size() != d.logd_design)
    problems.push_back("alpha2 length differs from innovation design");

  for (int i = 0; i < params.tau.size(); ++i)
    if (!(params.tau[i] > 0.0)) problems.push_back("nonpositive variance tau[" + std::to_string(i + 1) + "]");
  for (int i = 0; i < params.lambda0.size(); ++i)
    if (!(params.lambda0[i] > 0.0))
      problems.push_back("nonpositive baseline scale lambda0[" + std::to_string(i + 1) + "]");

  auto finite = [](const auto& m) { return m.array().isFinite().all(); };
  if (!finite(params.xi) || !finite(params.beta) || !finite(params.omega) ||
      !finite(params.gamma) || !finite(params.tau) || !finite(params.lambda0) ||
      !finite(params.alpha1) || !finite(params.alpha2))
    problems.push_back("non-finite parameter value");

  for (const auto& s : data.subjects) {
    if (s.n_visits() < 1) problems.push_back("subject " + s.id + " has no observations");
    for (int j = 1; j < s.n_visits(); ++j)
      if (!(s.times[j] > s.times[j - 1]))
        problems.push_back("subject " + s.id + " has non-increasing observation times");
    if (s.n_visits() >= 1 && s.event_time < s.times[s.n_visits() - 1])
      problems.push_back("subject " + s.id + " has follow-up time before last observation");
    if (s.event != 0 && s.event != 1)
      problems.push_back("subject " + s.id + " has event indicator outside {0,1}");
    if (s.x1.cols() != d.membership || s.x2.cols() != d.longitudinal || s.z.cols() != d.random ||
        s.x3.size() != d.survival || s.a_design.size() != d.phi_design ||
        s.b_design.size() != d.logd_design)
      problems.push_back("subject " + s.id + " has design dimensions differing from the dataset");
  }
  return problems;
}

void require_valid(const ParameterSet& params, const Dataset& data) {
  auto problems = validate(params, data);
  if (problems.empty()) return;
  std::string msg;
  for (size_t i = 0; i < problems.size(); ++i) {
    if (i) msg += "; ";
    msg += problems[i];
  }
  throw Error("validate", msg);
}

namespace {

struct ColumnResolver {
  const CsvTable& table;
  const SchemaConfig& schema;
  const std::string& path;

  double cell(int row, const std::string& col) const {
    if (col == "1") return 1.0;
    int idx = table.column_index(col);
    if (idx < 0) throw Error("data", path + ": missing column '" + col + "'");
    const std::string& raw = table.rows[row][idx];
    auto coding = schema.codings.find(col);
    if (coding != schema.codings.end()) {
      auto level = coding->second.find(trim(raw));
      if (level == coding->second.end())
        throw Error("data", path + ": unknown level '" + raw + "' in column '" + col +
                              "' (row " + std::to_string(row + 2) + ")");
      return level->second;
    }
    return parse_double(raw, path + " column '" + col + "' row " + std::to_string(row + 2));
  }

  VectorXd row_vector(int row, const std::vector<std::string>& cols) const {
    VectorXd v(cols.size());
    for (size_t c = 0; c < cols.size(); ++c) v[c] = cell(row, cols[c]);
    return v;
  }
};

std::vector<std::string> display_names(const std::vector<std::string>& cols) {
  std::vector<std::string> names;
  for (const auto& c : cols) names.push_back(c == "1" ? "intercept" : c);
  return names;
}

}  // namespace

std::vector<int> time_positions(const std::vector<std::string>& cols, const SchemaConfig& schema) {
  std::vector<int> pos;
  for (size_t c = 0; c < cols.size(); ++c)
    if (cols[c] == schema.time_col) pos.push_back(static_cast<int>(c));
  return pos;
}

VectorXd design_row_at_time(const Subject& s, const MatrixXd& design,
                            const std::vector<int>& positions, int ref_row, double t) {
  (void)s;
  VectorXd v = design.row(ref_row).transpose();
  for (int p : positions) v[p] = t;
  return v;
}

Dataset load_dataset(const std::string& path, const SchemaConfig& schema) {
  const CsvTable table = read_csv(path);
  const int id_idx = table.require_column(schema.subject_col, path);
  table.require_column(schema.time_col, path);
  table.require_column(schema.outcome_col, path);
  table.require_column(schema.event_time_col, path);
  table.require_column(schema.event_col, path);
  for (const auto* cols : {&schema.membership_cols, &schema.longitudinal_cols,
                           &schema.random_effect_cols, &schema.survival_cols,
                           &schema.phi_design_cols, &schema.logd_design_cols})
    for (const auto& c : *cols)
      if (c != "1") table.require_column(c, path);

  ColumnResolver resolve{table, schema, path};

  // group row indices by subject in order of first appearance
  std::vector<std::string> order;
  std::map<std::string, std::vector<int>> groups;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const std::string id = trim(table.rows[r][id_idx]);
    if (id.empty()) throw Error("data", path + ": empty subject id at row " + std::to_string(r + 2));
    if (groups.find(id) == groups.end()) order.push_back(id);
    groups[id].push_back(static_cast<int>(r));
  }
  if (order.empty()) throw Error("data", path + ": no data rows");

  Dataset data;
  data.membership_names = display_names(schema.membership_cols);
  data.longitudinal_names = display_names(schema.longitudinal_cols);
  data.random_names = display_names(schema.random_effect_cols);
  data.survival_names = display_names(schema.survival_cols);
  data.phi_design_names = display_names(schema.phi_design_cols);
  data.logd_design_names = display_names(schema.logd_design_cols);
  data.dims.membership = static_cast<int>(schema.membership_cols.size());
  data.dims.longitudinal = static_cast<int>(schema.longitudinal_cols.size());
  data.dims.random = static_cast<int>(schema.random_effect_cols.size());
  data.dims.survival = static_cast<int>(schema.survival_cols.size());
  data.dims.phi_design = static_cast<int>(schema.phi_design_cols.size());
  data.dims.logd_design = static_cast<int>(schema.logd_design_cols.size());

  for (const auto& id : order) {
    std::vector<int>& rows = groups[id];
    std::stable_sort(rows.begin(), rows.end(), [&](int a, int b) {
      return resolve.cell(a, schema.time_col) < resolve.cell(b, schema.time_col);
    });
    const int m = static_cast<int>(rows.size());

    Subject s;
    s.id = id;
    s.times.resize(m);
    s.y.resize(m);
    s.x1.resize(m, data.dims.membership);
    s.x2.resize(m, data.dims.longitudinal);
    s.z.resize(m, data.dims.random);
    for (int j = 0; j < m; ++j) {
      s.times[j] = resolve.cell(rows[j], schema.time_col);
      s.y[j] = resolve.cell(rows[j], schema.outcome_col);
      s.x1.row(j) = resolve.row_vector(rows[j], schema.membership_cols).transpose();
      s.x2.row(j) = resolve.row_vector(rows[j], schema.longitudinal_cols).transpose();
      s.z.row(j) = resolve.row_vector(rows[j], schema.random_effect_cols).transpose();
      if (j > 0 && !(s.times[j] > s.times[j - 1]))
        throw Error("data", path + ": subject " + id + " has duplicate or unordered times");
    }
    s.x3 = resolve.row_vector(rows[0], schema.survival_cols);
    s.a_design = resolve.row_vector(rows[0], schema.phi_design_cols);
    s.b_design = resolve.row_vector(rows[0], schema.logd_design_cols);
    s.event_time = resolve.cell(rows[0], schema.event_time_col);
    s.event = static_cast<int>(resolve.cell(rows[0], schema.event_col));
    for (int j = 1; j < m; ++j) {
      if (resolve.cell(rows[j], schema.event_time_col) != s.event_time ||
          static_cast<int>(resolve.cell(rows[j], schema.event_col)) != s.event)
        throw Error("data", path + ": subject " + id + " has inconsistent survival rows");
    }
    if (s.event != 0 && s.event != 1)
      throw Error("data", path + ": subject " + id + " has event indicator outside {0,1}");
    if (s.event_time < s.times[m - 1])
      throw Error("data", path + ": subject " + id + " has follow-up time " +
                              format_double(s.event_time) + " before last observation time " +
                              format_double(s.times[m - 1]));
    data.subjects.push_back(std::move(s));
  }
  return data;
}

void write_dataset(const std::string& path, const Dataset& data, const SchemaConfig& schema) {
  // output columns: id, time, outcome, every distinct covariate column, survival pair
  std::vector<std::string> covariate_cols;
  auto add_cols = [&](const std::vector<std::string>& cols) {
    for (const auto& c : cols) {
      if (c == "1" || c == schema.time_col || c == schema.outcome_col ||
          c == schema.subject_col || c == schema.event_time_col || c == schema.event_col)
        continue;
      if (std::find(covariate_cols.begin(), covariate_cols.end(), c) == covariate_cols.end())
        covariate_cols.push_back(c);
    }
  };
  add_cols(schema.membership_cols);
  add_cols(schema.longitudinal_cols);
  add_cols(schema.random_effect_cols);
  add_cols(schema.survival_cols);
  add_cols(schema.phi_design_cols);
  add_cols(schema.logd_design_cols);

  // locate each covariate column in some stored design
  struct Source {
    int role;  // 0:x1 1:x2 2:z 3:x3 4:a 5:b
    int pos;
  };
  std::map<std::string, Source> sources;
  auto register_cols = [&](const std::vector<std::string>& cols, int role) {
    for (size_t c = 0; c < cols.size(); ++c)
      if (sources.find(cols[c]) == sources.end() && cols[c] != "1")
        sources[cols[c]] = Source{role, static_cast<int>(c)};
  };
  register_cols(schema.membership_cols, 0);
  register_cols(schema.longitudinal_cols, 1);
  register_cols(schema.random_effect_cols, 2);
  register_cols(schema.survival_cols, 3);
  register_cols(schema.phi_design_cols, 4);
  register_cols(schema.logd_design_cols, 5);

  std::vector<std::string> header = {schema.subject_col, schema.time_col, schema.outcome_col};
  for (const auto& c : covariate_cols) header.push_back(c);
  header.push_back(schema.event_time_col);
  header.push_back(schema.event_col);

  std::vector<std::vector<std::string>> rows;
  for (const auto& s : data.subjects) {
    for (int j = 0; j < s.n_visits(); ++j) {
      std::vector<std::string> row = {s.id, format_double(s.times[j]), format_double(s.y[j])};
      for (const auto& c : covariate_cols) {
        const Source& src = sources.at(c);
        double v = 0.0;
        switch (src.role) {
          case 0: v = s.x1(j, src.pos); break;
          case 1: v = s.x2(j, src.pos); break;
          case 2: v = s.z(j, src.pos); break;
          case 3: v = s.x3[src.pos]; break;
          case 4: v = s.a_design[src.pos]; break;
          case 5: v = s.b_design[src.pos]; break;
        }
        row.push_back(format_double(v));
      }
      row.push_back(format_double(s.event_time));
      row.push_back(std::to_string(s.event));
      rows.push_back(std::move(row));
    }
  }
  write_csv(path, header, rows);
}

void write_truth(const std::string& path, const Dataset& data) {
  if (!data.has_truth()) throw Error("io", "dataset carries no ground truth");
  const int dim = data.dims.effect();
  std::vector<std::string> header = {"subject", "visit", "true_class"};
  for (int g = 0; g < dim; ++g) header.push_back("w" + std::to_string(g + 1));

  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < data.n_subjects(); ++i) {
    const Subject& s = data.subjects[i];
    for (int j = 0; j < s.n_visits(); ++j) {
      std::vector<std::string> row = {s.id, std::to_string(j + 1),
                                      std::to_string(data.true_classes[i][j] + 1)};
      for (int g = 0; g < dim; ++g) row.push_back(format_double(data.true_effects[i][g]));
      rows.push_back(std::move(row));
    }
  }
  write_csv(path, header, rows);
}

void load_truth(const std::string& path, Dataset& data) {
  const CsvTable table = read_csv(path);
  const int id_idx = table.require_column("subject", path);
  const int visit_idx = table.require_column("visit", path);
  const int class_idx = table.require_column("true_class", path);
  const int dim = data.dims.effect();
  std::vector<int> w_idx;
  for (int g = 0; g < dim; ++g)
    w_idx.push_back(table.require_column("w" + std::to_string(g + 1), path));

  std::map<std::string, int> subject_slot;
  for (int i = 0; i < data.n_subjects(); ++i) subject_slot[data.subjects[i].id] = i;

  data.true_classes.assign(data.n_subjects(), VectorXi());
  data.true_effects.assign(data.n_subjects(), VectorXd::Zero(dim));
  for (int i = 0; i < data.n_subjects(); ++i)
    data.true_classes[i] = VectorXi::Constant(data.subjects[i].n_visits(), -1);

  int max_label = 0;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const std::string id = trim(table.rows[r][id_idx]);
    auto slot = subject_slot.find(id);
    if (slot == subject_slot.end())
      throw Error("data", path + ": truth subject '" + id + "' not present in dataset");
    const int i = slot->second;
    const long visit = parse_long(table.rows[r][visit_idx], path + " visit");
    if (visit < 1 || visit > data.subjects[i].n_visits())
      throw Error("data", path + ": subject " + id + " visit " + std::to_string(visit) +
                              " outside observed range");
    const long label = parse_long(table.rows[r][class_idx], path + " true_class");
    if (label < 1) throw Error("data", path + ": class labels are 1-based");
    data.true_classes[i][visit - 1] = static_cast<int>(label - 1);
    max_label = std::max(max_label, static_cast<int>(label));
    for (int g = 0; g < dim; ++g)
      data.true_effects[i][g] = parse_double(table.rows[r][w_idx[g]], path + " w");
  }
  for (int i = 0; i < data.n_subjects(); ++i)
    if ((data.true_classes[i].array() < 0).any())
      throw Error("data", path + ": subject " + data.subjects[i].id + " has visits without truth rows");
  data.true_k = max_label;
}

}  // namespace jlcm
