#include "extcausal/margins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "extcausal/errors.hpp"

namespace extcausal {

std::vector<double> Sample::column(std::size_t j) const {
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = at(i, j);
  return out;
}

Sample Sample::zeros(std::size_t rows, std::size_t cols) {
  Sample s;
  s.rows = rows;
  s.cols = cols;
  s.values.assign(rows * cols, 0.0);
  return s;
}

Sample Sample::from_columns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) throw ParameterError("from_columns: no columns");
  Sample s = zeros(columns.front().size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != s.rows)
      throw ParameterError("from_columns: ragged column lengths");
    for (std::size_t i = 0; i < s.rows; ++i) s.at(i, j) = columns[j][i];
  }
  return s;
}

TransformResult pareto_transform(const Sample& sample, double alpha) {
  if (!(alpha > 0.0))
    throw ParameterError("pareto_transform: alpha must be positive");
  if (sample.rows < 2)
    throw ParameterError("pareto_transform: need at least 2 rows");
  for (double v : sample.values)
    if (!std::isfinite(v))
      throw DataError("pareto_transform: sample contains a non-finite value");

  TransformResult result;
  result.sample = Sample::zeros(sample.rows, sample.cols);
  result.sample.names = sample.names;
  const double n1 = static_cast<double>(sample.rows) + 1.0;

  std::vector<std::size_t> idx(sample.rows);
  for (std::size_t j = 0; j < sample.cols; ++j) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return sample.at(a, j) < sample.at(b, j);
    });
    // Walk tie groups; each member gets the average rank of the group.
    std::size_t start = 0;
    while (start < sample.rows) {
      std::size_t end = start + 1;
      while (end < sample.rows &&
             sample.at(idx[end], j) == sample.at(idx[start], j))
        ++end;
      // Ranks are 1-based: group covers ranks start+1 .. end.
      double avg_rank =
          (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
      double transformed = std::pow(n1 / (n1 - avg_rank), 1.0 / alpha);
      for (std::size_t t = start; t < end; ++t)
        result.sample.at(idx[t], j) = transformed;
      start = end;
    }
    if (sample.rows >= 2 &&
        sample.at(idx[0], j) == sample.at(idx[sample.rows - 1], j))
      result.degenerate_columns.push_back(j);
  }
  return result;
}

std::array<Sample, 4> orientations(const Sample& pair) {
  if (pair.cols != 2)
    throw ParameterError("orientations: sample must have exactly 2 columns");
  std::array<Sample, 4> out;
  const double sx[4] = {1.0, -1.0, 1.0, -1.0};
  const double sy[4] = {1.0, 1.0, -1.0, -1.0};
  for (int o = 0; o < 4; ++o) {
    out[static_cast<std::size_t>(o)] = pair;
    Sample& s = out[static_cast<std::size_t>(o)];
    for (std::size_t i = 0; i < s.rows; ++i) {
      s.at(i, 0) = sx[o] * pair.at(i, 0);
      s.at(i, 1) = sy[o] * pair.at(i, 1);
    }
  }
  return out;
}

}  // namespace extcausal
