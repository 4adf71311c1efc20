#include "extcausal/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "extcausal/errors.hpp"

namespace extcausal {

std::size_t default_k(std::size_t n) {
  auto k = static_cast<std::size_t>(
      std::llround(1.5 * std::sqrt(static_cast<double>(n))));
  return std::max<std::size_t>(k, 2);
}

PolarSeries polarize(const Sample& pair) {
  if (pair.cols != 2)
    throw ParameterError("polarize: sample must have exactly 2 columns");
  PolarSeries series;
  series.source_n = pair.rows;
  series.entries.reserve(pair.rows);
  for (std::size_t i = 0; i < pair.rows; ++i) {
    double x1 = pair.at(i, 0);
    double x2 = pair.at(i, 1);
    if (!(x1 >= 0.0) || !(x2 >= 0.0))
      throw DataError("polarize: negative or non-finite value at row " +
                      std::to_string(i + 1) +
                      " (polar angles need nonnegative data; transform "
                      "first)");
    double r = x1 + x2;
    if (r == 0.0) {
      ++series.dropped_zero_rows;
      continue;
    }
    series.entries.push_back({x1 / r, r});
  }
  if (series.entries.size() < 2)
    throw DataError("polarize: fewer than 2 rows with positive radius");
  std::stable_sort(
      series.entries.begin(), series.entries.end(),
      [](const PolarSeries::Entry& a, const PolarSeries::Entry& b) {
        return a.r > b.r;
      });
  return series;
}

double interval_distance(double w, double s, double t) {
  if (!(s >= 0.0) || !(t <= 1.0) || !(s <= t))
    throw ParameterError("interval_distance: need 0 <= s <= t <= 1");
  return std::max({s - w, w - t, 0.0});
}

double radial_weight(double r) {
  if (!(r >= 1.0)) throw ParameterError("radial_weight: r must be >= 1");
  return r * std::log(r);
}

namespace {

std::size_t resolve_k(const PolarSeries& series, const AacConfig& cfg) {
  std::size_t k = cfg.k == 0 ? default_k(series.source_n) : cfg.k;
  if (k < 1 || k > series.size())
    throw ParameterError("k = " + std::to_string(k) +
                         " is outside 1..series length (" +
                         std::to_string(series.size()) + ")");
  if (!(cfg.lambda > 0.0))
    throw ParameterError("lambda must be positive");
  if (!(cfg.gamma > 0.0)) throw ParameterError("gamma must be positive");
  return k;
}

// Angles and radial weights of the k largest entries; the shared core of
// d_k, objective and estimate_support.
struct TopK {
  std::vector<double> w;
  std::vector<double> weight;  // L(r_i / r_k)
  double penalty;              // lambda * k^gamma

  TopK(const PolarSeries& series, const AacConfig& cfg, std::size_t k) {
    w.resize(k);
    weight.resize(k);
    double rk = series.entries[k - 1].r;
    for (std::size_t i = 0; i < k; ++i) {
      w[i] = series.entries[i].w;
      double ratio = series.entries[i].r / rk;
      weight[i] = ratio * std::log(ratio);
    }
    penalty =
        cfg.lambda * std::pow(static_cast<double>(k), cfg.gamma);
  }

  double mean_distance(double s, double t) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      acc += std::max({s - w[i], w[i] - t, 0.0}) * weight[i];
    return acc / static_cast<double>(w.size());
  }

  double objective(double s, double t) const {
    return (t - s) + penalty * mean_distance(s, t);
  }
};

}  // namespace

double d_k(const PolarSeries& series, const AacConfig& cfg, double s,
           double t) {
  std::size_t k = resolve_k(series, cfg);
  if (!(s >= 0.0) || !(t <= 1.0) || !(s <= t))
    throw ParameterError("d_k: need 0 <= s <= t <= 1");
  return TopK(series, cfg, k).mean_distance(s, t);
}

double objective(const PolarSeries& series, const AacConfig& cfg, double s,
                 double t) {
  std::size_t k = resolve_k(series, cfg);
  if (!(s >= 0.0) || !(t <= 1.0) || !(s <= t))
    throw ParameterError("objective: need 0 <= s <= t <= 1");
  return TopK(series, cfg, k).objective(s, t);
}

SupportInterval estimate_support(const PolarSeries& series,
                                 const AacConfig& cfg) {
  std::size_t k = resolve_k(series, cfg);
  if (k < 2)
    throw ParameterError("estimate_support: k must be at least 2");
  TopK top(series, cfg, k);
  std::vector<std::pair<double, double>> starts(kSupportStartGrid.begin(),
                                                kSupportStartGrid.end());
  SimplexResult res = minimize_simplex(
      [&top](double s, double t) { return top.objective(s, t); }, starts);
  SupportInterval interval;
  interval.a_hat = res.s;
  interval.b_hat = res.t;
  interval.tau = 1.0 - res.t - res.s;
  interval.objective_value = res.value;
  interval.report = res.report;
  return interval;
}

AacPair aac_pair(const std::vector<double>& u_col,
                 const std::vector<double>& v_col, const AacConfig& cfg) {
  if (u_col.size() != v_col.size())
    throw ParameterError("aac_pair: columns differ in length");
  Sample pair = Sample::from_columns({u_col, v_col});
  PolarSeries series = polarize(pair);
  AacPair result;
  result.interval = estimate_support(series, cfg);
  result.tau_uv = result.interval.tau;
  result.tau_vu = -result.interval.tau;
  result.dropped_zero_rows = series.dropped_zero_rows;
  return result;
}

double dk_limit_oracle(const std::vector<std::pair<double, double>>& atoms,
                       double alpha, double s, double t) {
  if (!(alpha > 1.0))
    throw NumericError(
        "dk_limit_oracle: the radial integral of r log r diverges for "
        "alpha <= 1");
  if (atoms.empty()) throw ParameterError("dk_limit_oracle: no atoms");
  double mass = 0.0;
  for (const auto& [w, p] : atoms) {
    if (!(w >= 0.0) || !(w <= 1.0))
      throw ParameterError("dk_limit_oracle: atom angle outside [0,1]");
    if (!(p >= 0.0)) throw ParameterError("dk_limit_oracle: negative mass");
    mass += p;
  }
  if (std::fabs(mass - 1.0) > 1e-12)
    throw ParameterError("dk_limit_oracle: atom masses must sum to 1");
  double acc = 0.0;
  for (const auto& [w, p] : atoms) acc += p * interval_distance(w, s, t);
  return acc * alpha / ((alpha - 1.0) * (alpha - 1.0));
}

}  // namespace extcausal
