#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace extcausal {

// Row-major numeric matrix: n observations of d variables.
struct Sample {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;         // rows * cols, row-major
  std::vector<std::string> names;     // empty, or one label per column

  double at(std::size_t i, std::size_t j) const {
    return values[i * cols + j];
  }
  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  std::vector<double> column(std::size_t j) const;

  static Sample zeros(std::size_t rows, std::size_t cols);
  static Sample from_columns(const std::vector<std::vector<double>>& columns);
};

struct TransformResult {
  Sample sample;
  // Columns (0-based) whose values were all tied; the transform is still
  // defined there (every output equal) but carries no rank information.
  std::vector<std::size_t> degenerate_columns;
};

// Column-wise empirical transform to the standard alpha-Pareto scale: a
// value of average rank r (ties share the mean of their rank range) maps to
// ((n+1)/(n+1-r))^{1/alpha}. Output is strictly positive and rank-preserving
// within each column.
TransformResult pareto_transform(const Sample& sample, double alpha);

// The four sign-flip orientations of a two-column sample, in the order
// (+x1,+x2), (-x1,+x2), (+x1,-x2), (-x1,-x2).
std::array<Sample, 4> orientations(const Sample& pair);

}  // namespace extcausal
