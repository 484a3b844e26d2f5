#pragma once

#include "jlcm/csv.hpp"
#include "jlcm/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace jlcm {

// Maps logical roles to CSV columns. Covariate lists may contain the literal
// token "1" (intercept) and may reference the time column, which lets design
// rows be re-evaluated on a time grid for fitted-curve output. Categorical
// columns must declare an explicit level -> value coding; an unknown level is
// a load error, never a silent zero.
struct SchemaConfig {
  std::string subject_col = "subject";
  std::string time_col = "time";
  std::string outcome_col = "y";
  std::string event_time_col = "event_time";
  std::string event_col = "event";
  std::vector<std::string> membership_cols = {"x1", "time"};
  std::vector<std::string> longitudinal_cols = {"x1", "time"};
  std::vector<std::string> random_effect_cols = {"1", "time"};
  std::vector<std::string> survival_cols = {"x3"};
  std::vector<std::string> phi_design_cols = {"1", "x3"};
  std::vector<std::string> logd_design_cols = {"1", "x3"};
  std::map<std::string, std::map<std::string, double>> codings;
};

Dataset load_dataset(const std::string& path, const SchemaConfig& schema);

// Long-format writer matching what load_dataset consumes: one row per visit
// with the raw covariate columns, survival columns repeated per row.
void write_dataset(const std::string& path, const Dataset& data, const SchemaConfig& schema);

// Ground-truth files for simulated data: one row per kept visit with the
// 1-based true class and the subject's random effects (frailty last).
void write_truth(const std::string& path, const Dataset& data);
void load_truth(const std::string& path, Dataset& data);

// Re-evaluates a design row at time t: positions bound to the time column get
// t, everything else keeps the values from the subject's row `ref_row`.
VectorXd design_row_at_time(const Subject& s, const MatrixXd& design,
                            const std::vector<int>& time_positions, int ref_row, double t);
// Index positions of the time column within a covariate list.
std::vector<int> time_positions(const std::vector<std::string>& cols, const SchemaConfig& schema);

}  // namespace jlcm
