#pragma once

#include "fdpboot/model.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fdpboot {

// Parse failure with 1-based line/column and the offending file.
struct CsvParseError : std::runtime_error {
  CsvParseError(std::string file_, int line_, int column_, const std::string& what_);
  std::string file;
  int line;
  int column;
};

struct CsvMatrix {
  Matrix values;
  std::vector<std::string> header;  // empty when the file had none
};

// Comma-separated numeric matrix, '.' decimal, UTF-8. A single header row
// is auto-detected by a non-numeric first cell. Non-finite cells are
// rejected. transpose flips the parsed matrix (genomics orientation).
CsvMatrix read_matrix_csv(const std::string& path, bool transpose = false);

// Subset file: one `label,id,id,...` line per set; ids are hypothesis ids
// or point labels (a point label selects that point under every contrast).
struct NamedIdSet {
  std::string label;
  std::vector<int> ids;
};
std::vector<NamedIdSet> read_subsets_file(const std::string& path,
                                          const std::vector<std::string>& point_labels,
                                          int n_contrasts, int m_pts);

// Write-to-temp-then-rename so readers never observe partial output.
void write_text_atomic(const std::string& path, const std::string& content);

// Shortest decimal string that round-trips to x ("NA" for NaN); keeps CSV
// and JSON output stable across runs.
std::string format_double(double x);

}  // namespace fdpboot
