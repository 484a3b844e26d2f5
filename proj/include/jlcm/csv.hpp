#pragma once

#include <string>
#include <vector>

namespace jlcm {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // -1 when absent
  int column_index(const std::string& name) const;
  int require_column(const std::string& name, const std::string& path) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Shortest round-trip decimal form, so identical doubles always print
// identically (reruns must produce byte-identical files).
std::string format_double(double v);
double parse_double(const std::string& s, const std::string& context);
long parse_long(const std::string& s, const std::string& context);

}  // namespace jlcm
