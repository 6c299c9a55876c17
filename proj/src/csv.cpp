#include "fdpboot/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fdpboot {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool parse_cell(const std::string& cell, double* out) {
  if (cell.empty()) return false;
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + cell.size()) return false;
  *out = value;
  return true;
}

std::string position_message(const std::string& what, const std::string& file, int line,
                             int column) {
  std::ostringstream os;
  os << file << ":" << line << ":" << column << ": " << what;
  return os.str();
}

}  // namespace

CsvParseError::CsvParseError(std::string file_, int line_, int column_,
                             const std::string& what_)
    : std::runtime_error(position_message(what_, file_, line_, column_)),
      file(std::move(file_)),
      line(line_),
      column(column_) {}

CsvMatrix read_matrix_csv(const std::string& path, bool transpose) {
  std::ifstream in(path);
  if (!in) throw CsvParseError(path, 0, 0, "cannot open file");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_cell(cells[c], &row[c])) {
        numeric = false;
        bad_col = c;
        break;
      }
      if (!std::isfinite(row[c])) {
        throw CsvParseError(path, line_no, static_cast<int>(c) + 1, "non-finite value");
      }
    }
    if (!numeric) {
      if (rows.empty() && header.empty()) {
        header = cells;  // single header row, detected by a non-numeric cell
        width = cells.size();
        continue;
      }
      throw CsvParseError(path, line_no, static_cast<int>(bad_col) + 1,
                          "expected a number, got '" + cells[bad_col] + "'");
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw CsvParseError(path, line_no, static_cast<int>(row.size()) + 1,
                          "expected " + std::to_string(width) + " columns, got " +
                              std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvParseError(path, line_no, 1, "no data rows");

  CsvMatrix out;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  if (transpose) {
    out.values.transposeInPlace();
    // header labelled the pre-transpose columns; it does not survive
  } else {
    out.header = std::move(header);
  }
  return out;
}

std::vector<NamedIdSet> read_subsets_file(const std::string& path,
                                          const std::vector<std::string>& point_labels,
                                          int n_contrasts, int m_pts) {
  std::ifstream in(path);
  if (!in) throw CsvParseError(path, 0, 0, "cannot open file");

  std::vector<NamedIdSet> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() < 2) {
      throw CsvParseError(path, line_no, 1, "expected `label,id,...`");
    }
    NamedIdSet set;
    set.label = cells[0];
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double value = 0.0;
      if (parse_cell(cells[c], &value)) {
        const int id = static_cast<int>(value);
        if (value != static_cast<double>(id) || id < 0 || id >= n_contrasts * m_pts) {
          throw CsvParseError(path, line_no, static_cast<int>(c) + 1,
                              "hypothesis id out of range");
        }
        set.ids.push_back(id);
        continue;
      }
      // fall back to a point label: select it under every contrast
      const auto found = std::find(point_labels.begin(), point_labels.end(), cells[c]);
      if (found == point_labels.end()) {
        throw CsvParseError(path, line_no, static_cast<int>(c) + 1,
                            "unknown point label '" + cells[c] + "'");
      }
      const int v = static_cast<int>(found - point_labels.begin());
      for (int l = 0; l < n_contrasts; ++l) set.ids.push_back(l * m_pts + v);
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  for (int prec = 1; prec < 17; ++prec) {
    std::ostringstream trial;
    trial.precision(prec);
    trial << x;
    if (std::stod(trial.str()) == x) return trial.str();
  }
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp);
    os << content;
    if (!os) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

}  // namespace fdpboot
