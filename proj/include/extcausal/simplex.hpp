#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

namespace extcausal {

struct OptimizerReport {
  int iterations = 0;   // Nelder-Mead iterations summed over all restarts
  int restarts = 0;     // number of start points run
  bool converged = false;  // did the restart that won reach the tolerance
};

struct SimplexResult {
  double s = 0.0;
  double t = 1.0;
  double value = 0.0;
  OptimizerReport report;
};

// Default start grid for support estimation: corners, halves, and the
// centered interval of the feasible triangle.
inline constexpr std::array<std::pair<double, double>, 6> kSupportStartGrid{
    {{0.0, 1.0},
     {0.0, 0.5},
     {0.5, 1.0},
     {0.25, 0.75},
     {0.0, 0.25},
     {0.75, 1.0}}};

// Nelder-Mead minimization of f over the triangle {0 <= s <= t <= 1},
// restarted independently from each start point. Infeasible trial points are
// charged an additive barrier of 1e6 times the constraint violation and f is
// evaluated at the projection (coordinates clamped to [0,1], endpoints
// swapped if s > t), so f itself only ever sees feasible arguments. The
// result is the feasible point with the lowest f seen across all restarts;
// exact ties (within 1e-12) are broken by smaller interval length t - s,
// then smaller s. Convergence means the simplex diameter fell below tol
// within max_iter iterations for the restart that produced the winner.
SimplexResult minimize_simplex(
    const std::function<double(double, double)>& f,
    const std::vector<std::pair<double, double>>& starts, double tol = 1e-6,
    int max_iter = 500);

}  // namespace extcausal
