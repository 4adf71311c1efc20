#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "extcausal/margins.hpp"
#include "extcausal/simplex.hpp"

namespace extcausal {

// L1 polar decomposition of a nonnegative bivariate sample: w = x1/(x1+x2),
// r = x1+x2, sorted by r descending (ties keep original row order).
struct PolarSeries {
  struct Entry {
    double w;
    double r;
  };
  std::vector<Entry> entries;
  std::size_t source_n = 0;
  std::size_t dropped_zero_rows = 0;

  std::size_t size() const { return entries.size(); }
};

struct AacConfig {
  // Extremal subsample size. 0 means "use the default": round(1.5 * sqrt(n))
  // with n the source sample size, the middle of the usual k sweep.
  std::size_t k = 0;
  double lambda = 2.0;
  double gamma = 0.5;   // penalty exponent; 1/2 gives the lambda*sqrt(k) form
  double alpha = 2.0;   // tail index used by upstream marginal transforms
};

// Estimated angular support [a_hat, b_hat] with the angular asymmetry
// coefficient tau = 1 - b_hat - a_hat.
struct SupportInterval {
  double a_hat = 0.0;
  double b_hat = 1.0;
  double tau = 0.0;
  double objective_value = 0.0;
  OptimizerReport report;
};

struct AacPair {
  double tau_uv = 0.0;
  double tau_vu = 0.0;  // exactly -tau_uv
  SupportInterval interval;
  std::size_t dropped_zero_rows = 0;
};

std::size_t default_k(std::size_t n);

PolarSeries polarize(const Sample& pair);

// Distance from the angle w to the interval [s,t]: max(s-w, w-t, 0).
double interval_distance(double w, double s, double t);

// Radial weight L(r) = r log r, defined for r >= 1.
double radial_weight(double r);

// Weighted mean distance over the k radially largest entries:
// (1/k) sum_i d(w_i, s, t) * L(r_i / r_k).
double d_k(const PolarSeries& series, const AacConfig& cfg, double s,
           double t);

// Penalized support objective: (t - s) + lambda * k^gamma * d_k(s, t).
double objective(const PolarSeries& series, const AacConfig& cfg, double s,
                 double t);

// Minimizes the objective over {0 <= s <= t <= 1} from the 6-point start
// grid; ties broken by smaller interval length, then smaller s.
SupportInterval estimate_support(const PolarSeries& series,
                                 const AacConfig& cfg);

// Estimates the support once on the (u, v) orientation and fills
// tau_vu = -tau_uv, so the skew symmetry of the coefficient is exact.
AacPair aac_pair(const std::vector<double>& u_col,
                 const std::vector<double>& v_col, const AacConfig& cfg);

// Closed-form limit of d_k for a discrete angular measure with atoms
// (w_j, p_j) and a standard alpha-Pareto radial law:
// sum_j p_j d(w_j, s, t) * alpha / (alpha - 1)^2. Requires alpha > 1.
double dk_limit_oracle(const std::vector<std::pair<double, double>>& atoms,
                       double alpha, double s, double t);

}  // namespace extcausal
