#include "extcausal/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "extcausal/errors.hpp"

namespace extcausal {

namespace {

struct Point {
  double s, t;
};

struct Projected {
  double s, t, violation;
};

Projected project(double s, double t) {
  double viol = std::max(0.0, -s) + std::max(0.0, s - 1.0) +
                std::max(0.0, -t) + std::max(0.0, t - 1.0) +
                std::max(0.0, s - t);
  double s2 = std::clamp(s, 0.0, 1.0);
  double t2 = std::clamp(t, 0.0, 1.0);
  if (s2 > t2) std::swap(s2, t2);
  return {s2, t2, viol};
}

struct Tracker {
  const std::function<double(double, double)>* f;
  double best_s = 0.0, best_t = 1.0;
  double best_f = std::numeric_limits<double>::infinity();

  double eval(const Point& p) {
    Projected pr = project(p.s, p.t);
    double fv = (*f)(pr.s, pr.t);
    if (!std::isfinite(fv))
      throw NumericError("objective is not finite at (s=" +
                         std::to_string(pr.s) + ", t=" + std::to_string(pr.t) +
                         ")");
    if (fv < best_f) {
      best_f = fv;
      best_s = pr.s;
      best_t = pr.t;
    }
    return fv + 1e6 * pr.violation;
  }
};

struct RunOutcome {
  double s, t, value;
  int iterations;
  bool converged;
};

RunOutcome run_from(const std::function<double(double, double)>& f,
                    Point start, double tol, int max_iter) {
  const double h = 0.1;
  Tracker tracker{&f};
  // Initial simplex: axis steps of h, reflected inward at the box boundary
  // so the vertices stay affinely independent inside [0,1]^2.
  std::array<Point, 3> v{
      start,
      Point{start.s + h <= 1.0 ? start.s + h : start.s - h, start.t},
      Point{start.s, start.t + h <= 1.0 ? start.t + h : start.t - h}};
  std::array<double, 3> fv{tracker.eval(v[0]), tracker.eval(v[1]),
                           tracker.eval(v[2])};

  auto sort_simplex = [&] {
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fv[a] < fv[b]; });
    std::array<Point, 3> v2;
    std::array<double, 3> f2;
    for (int i = 0; i < 3; ++i) {
      v2[i] = v[order[i]];
      f2[i] = fv[order[i]];
    }
    v = v2;
    fv = f2;
  };
  auto diameter = [&] {
    double diam = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        diam = std::max(diam, std::max(std::fabs(v[i].s - v[j].s),
                                       std::fabs(v[i].t - v[j].t)));
    return diam;
  };

  int it = 0;
  bool converged = false;
  while (it < max_iter) {
    sort_simplex();
    if (diameter() < tol) {
      converged = true;
      break;
    }
    ++it;
    Point c{(v[0].s + v[1].s) / 2.0, (v[0].t + v[1].t) / 2.0};
    Point xr{c.s + (c.s - v[2].s), c.t + (c.t - v[2].t)};
    double fr = tracker.eval(xr);
    if (fr < fv[0]) {
      Point xe{c.s + 2.0 * (c.s - v[2].s), c.t + 2.0 * (c.t - v[2].t)};
      double fe = tracker.eval(xe);
      if (fe < fr) {
        v[2] = xe;
        fv[2] = fe;
      } else {
        v[2] = xr;
        fv[2] = fr;
      }
    } else if (fr < fv[1]) {
      v[2] = xr;
      fv[2] = fr;
    } else {
      Point xc{c.s + 0.5 * (v[2].s - c.s), c.t + 0.5 * (v[2].t - c.t)};
      double fc = tracker.eval(xc);
      if (fc < fv[2]) {
        v[2] = xc;
        fv[2] = fc;
      } else {
        v[1] = Point{v[0].s + 0.5 * (v[1].s - v[0].s),
                     v[0].t + 0.5 * (v[1].t - v[0].t)};
        fv[1] = tracker.eval(v[1]);
        v[2] = Point{v[0].s + 0.5 * (v[2].s - v[0].s),
                     v[0].t + 0.5 * (v[2].t - v[0].t)};
        fv[2] = tracker.eval(v[2]);
      }
    }
  }
  return {tracker.best_s, tracker.best_t, tracker.best_f, it, converged};
}

}  // namespace

SimplexResult minimize_simplex(
    const std::function<double(double, double)>& f,
    const std::vector<std::pair<double, double>>& starts, double tol,
    int max_iter) {
  if (!(tol > 0.0)) throw ParameterError("minimize_simplex: tol must be > 0");
  if (starts.empty())
    throw ParameterError("minimize_simplex: need at least one start point");
  bool any_feasible = false;
  for (const auto& [s, t] : starts)
    if (s >= 0.0 && t <= 1.0 && s <= t) any_feasible = true;
  if (!any_feasible)
    throw ParameterError("minimize_simplex: no start point is feasible");

  SimplexResult result;
  bool have = false;
  for (const auto& [s0, t0] : starts) {
    RunOutcome out = run_from(f, {s0, t0}, tol, max_iter);
    ++result.report.restarts;
    result.report.iterations += out.iterations;
    bool take = false;
    if (!have || out.value < result.value - 1e-12) {
      take = true;
    } else if (std::fabs(out.value - result.value) <= 1e-12) {
      double len = out.t - out.s;
      double best_len = result.t - result.s;
      take = len < best_len || (len == best_len && out.s < result.s);
    }
    if (take) {
      result.s = out.s;
      result.t = out.t;
      result.value = out.value;
      result.report.converged = out.converged;
      have = true;
    }
  }
  return result;
}

}  // namespace extcausal
