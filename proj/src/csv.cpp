#include "extcausal/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "extcausal/errors.hpp"

namespace extcausal {

namespace {

std::string trim(const std::string& s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_number(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && !cell.empty();
}

}  // namespace

Sample parse_csv(std::istream& in, const std::string& origin) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_cells(line));
  }
  if (rows.empty()) throw DataError(origin + ": no data rows");

  // Header detection: if any first-row cell is non-numeric, it is a header.
  bool has_header = false;
  for (const auto& cell : rows.front()) {
    double x;
    if (!parse_number(cell, x)) {
      has_header = true;
      break;
    }
  }

  Sample sample;
  std::size_t first_data = has_header ? 1 : 0;
  if (has_header) sample.names = rows.front();
  if (rows.size() <= first_data) throw DataError(origin + ": no data rows");
  sample.cols = rows[first_data].size();
  sample.rows = rows.size() - first_data;
  sample.values.reserve(sample.rows * sample.cols);
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    std::size_t data_row = r - first_data + 1;  // 1-based, excluding header
    if (rows[r].size() != sample.cols)
      throw DataError(origin + ": row " + std::to_string(data_row) + " has " +
                      std::to_string(rows[r].size()) + " cells, expected " +
                      std::to_string(sample.cols));
    for (std::size_t c = 0; c < sample.cols; ++c) {
      double x;
      if (!parse_number(rows[r][c], x))
        throw DataError(origin + ": row " + std::to_string(data_row) +
                        ", column " + std::to_string(c + 1) + ": cell '" +
                        rows[r][c] + "' is not numeric");
      if (!std::isfinite(x))
        throw DataError(origin + ": row " + std::to_string(data_row) +
                        ", column " + std::to_string(c + 1) +
                        ": non-finite value");
      sample.values.push_back(x);
    }
  }
  return sample;
}

Sample load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file: " + path);
  return parse_csv(in, path);
}

void write_csv(const Sample& sample, std::ostream& out) {
  for (std::size_t j = 0; j < sample.cols; ++j) {
    if (j) out << ",";
    if (j < sample.names.size() && !sample.names[j].empty())
      out << sample.names[j];
    else
      out << "col" << (j + 1);
  }
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < sample.rows; ++i) {
    for (std::size_t j = 0; j < sample.cols; ++j) {
      if (j) out << ",";
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, sample.at(i, j));
      out.write(buf, ptr - buf);
      (void)ec;
    }
    out << "\n";
  }
}

void save_csv(const Sample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write CSV file: " + path);
  write_csv(sample, out);
  if (!out) throw DataError("failed while writing CSV file: " + path);
}

}  // namespace extcausal
