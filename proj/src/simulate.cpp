#include "extcausal/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "extcausal/errors.hpp"

namespace extcausal {

namespace {

constexpr std::size_t kChunkRows = 8192;

// Runs fn(row_index, engine) for every row, in chunks of kChunkRows rows.
// Each chunk gets its own engine seeded by mix64(seed, 1 + chunk), so the
// output never depends on how chunks are distributed over workers. Substream
// index 0 is reserved for per-dataset draws (e.g. structural coefficients).
template <typename RowFn>
void generate_rows(std::size_t n, std::uint64_t seed, int workers,
                   const RowFn& fn) {
  if (workers < 1) throw ParameterError("workers must be positive");
  std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  auto run_chunk = [&](std::size_t c) {
    UniformSource engine(mix64(seed, 1 + c));
    std::size_t end = std::min(n, (c + 1) * kChunkRows);
    for (std::size_t i = c * kChunkRows; i < end; ++i) fn(i, engine);
  };
  if (workers == 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next.fetch_add(1); c < chunks;
         c = next.fetch_add(1))
      run_chunk(c);
  };
  std::vector<std::thread> pool;
  int nthreads = std::min<int>(workers, static_cast<int>(chunks));
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

std::string edge_name(int u, int v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

}  // namespace

CoeffLaw CoeffLaw::uniform(double l, double u) {
  if (!(0.0 < l && l < u))
    throw ParameterError("CoeffLaw::uniform: need 0 < l < u");
  CoeffLaw law;
  law.kind = Kind::Uniform;
  law.lower = l;
  law.upper = u;
  return law;
}

CoeffLaw CoeffLaw::lognormal_matched(double l, double u, double coverage) {
  if (!(0.0 < l && l < u))
    throw ParameterError("CoeffLaw::lognormal_matched: need 0 < l < u");
  if (!(coverage > 0.0 && coverage < 1.0))
    throw ParameterError(
        "CoeffLaw::lognormal_matched: coverage must lie in (0,1)");
  CoeffLaw law;
  law.kind = Kind::LognormalMatched;
  law.lower = l;
  law.upper = u;
  law.coverage = coverage;
  auto [log_median, sigma] = lognormal_matched_params(l, u, coverage);
  law.log_median = log_median;
  law.sigma = sigma;
  return law;
}

CoeffLaw CoeffLaw::constant(double c) {
  if (!(c > 0.0)) throw ParameterError("CoeffLaw::constant: need c > 0");
  CoeffLaw law;
  law.kind = Kind::Constant;
  law.value = c;
  return law;
}

double CoeffLaw::draw(UniformSource& rng) const {
  switch (kind) {
    case Kind::Uniform:
      return lower + (upper - lower) * rng.next_unit();
    case Kind::LognormalMatched:
      return std::exp(log_median + sigma * rng.normal());
    case Kind::Constant:
      return value;
  }
  return value;
}

std::pair<double, double> lognormal_matched_params(double l, double u,
                                                   double coverage) {
  if (!(0.0 < l && l < u))
    throw ParameterError("lognormal_matched_params: need 0 < l < u");
  if (!(coverage > 0.0 && coverage < 1.0))
    throw ParameterError(
        "lognormal_matched_params: coverage must lie in (0,1)");
  const double log_median = std::log((l + u) / 2.0);
  const double zu = std::log(u) - log_median;
  const double zl = std::log(l) - log_median;
  auto mass = [&](double sigma) {
    return normal_cdf(zu / sigma) - normal_cdf(zl / sigma);
  };
  // mass(sigma) decreases from 1 (point mass at the median, which lies
  // strictly inside (l,u)) toward 0; bisect on the bracket.
  double lo = 1e-8, hi = 10.0;
  if (!(mass(lo) > coverage && mass(hi) < coverage))
    throw ParameterError(
        "lognormal_matched_params: no sigma in (1e-8, 10) attains the "
        "requested coverage");
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    if (mass(mid) > coverage)
      lo = mid;
    else
      hi = mid;
  }
  return {log_median, 0.5 * (lo + hi)};
}

Sample simulate_scm(const ScmSpec& spec, std::size_t n, std::uint64_t seed,
                    int workers) {
  if (!(spec.noise_alpha0 > 0.0))
    throw ParameterError("simulate_scm: noise_alpha0 must be positive");
  if (n == 0) throw ParameterError("simulate_scm: n must be positive");
  const int d = spec.dag.node_count();

  // One coefficient per edge for the whole dataset, from the reserved
  // substream; every row then shares them.
  UniformSource coeff_rng(mix64(seed, 0));
  std::map<std::pair<int, int>, double> beta;
  for (const auto& e : spec.dag.edges()) beta[e] = spec.coeff.draw(coeff_rng);

  Sample out = Sample::zeros(n, static_cast<std::size_t>(d));
  const auto& topo = spec.dag.topological_order();
  const bool sum_linear = spec.model == ScmSpec::Model::SumLinear;

  generate_rows(n, seed, workers, [&](std::size_t i, UniformSource& rng) {
    std::vector<double> zeta(static_cast<std::size_t>(d));
    for (int v = 1; v <= d; ++v)
      zeta[static_cast<std::size_t>(v - 1)] = rng.pareto(spec.noise_alpha0);
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    for (int v : topo) {
      if (sum_linear) {
        double acc = 0.0;
        for (int u : spec.dag.parents(v))
          acc += beta.at({u, v}) * x[static_cast<std::size_t>(u - 1)];
        x[static_cast<std::size_t>(v - 1)] =
            acc + zeta[static_cast<std::size_t>(v - 1)];
      } else {
        double m = zeta[static_cast<std::size_t>(v - 1)];
        for (int u : spec.dag.parents(v))
          m = std::max(m,
                       beta.at({u, v}) * x[static_cast<std::size_t>(u - 1)]);
        x[static_cast<std::size_t>(v - 1)] = m;
      }
    }
    for (int v = 1; v <= d; ++v)
      out.at(i, static_cast<std::size_t>(v - 1)) =
          x[static_cast<std::size_t>(v - 1)];
  });
  return out;
}

EpsLaw EpsLaw::constant(double c) {
  if (!(c > 0.0)) throw ParameterError("EpsLaw::constant: need c > 0");
  EpsLaw law;
  law.kind = Kind::Constant;
  law.value = c;
  return law;
}

EpsLaw EpsLaw::lognormal(double mu, double sigma) {
  if (!(sigma >= 0.0)) throw ParameterError("EpsLaw::lognormal: sigma < 0");
  EpsLaw law;
  law.kind = Kind::Lognormal;
  law.mu = mu;
  law.sigma = sigma;
  return law;
}

EpsLaw EpsLaw::uniform(double l, double u) {
  if (!(0.0 < l && l < u))
    throw ParameterError("EpsLaw::uniform: need 0 < l < u");
  EpsLaw law;
  law.kind = Kind::Uniform;
  law.lower = l;
  law.upper = u;
  return law;
}

double EpsLaw::draw(UniformSource& rng) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Lognormal:
      return std::exp(mu + sigma * rng.normal());
    case Kind::Uniform:
      return lower + (upper - lower) * rng.next_unit();
  }
  return value;
}

void validate_escm(const EscmSpec& spec) {
  const int d = spec.dag.node_count();
  if (static_cast<int>(spec.activation.size()) != d)
    throw ParameterError("escm spec: activation vector must have one entry "
                         "per node");
  if (!(spec.alpha > 0.0))
    throw ParameterError("escm spec: alpha must be positive");
  bool any_positive = false;
  for (double a : spec.activation) {
    if (!(a >= 0.0))
      throw ParameterError("escm spec: activation coefficients must be >= 0");
    if (a > 0.0) any_positive = true;
  }
  if (!any_positive)
    throw ParameterError(
        "escm spec: at least one activation coefficient must be positive");
  for (const auto& e : spec.dag.edges()) {
    auto it = spec.edge_coeff.find(e);
    if (it == spec.edge_coeff.end())
      throw ParameterError("escm spec: missing coefficient for edge " +
                           edge_name(e.first, e.second));
  }
  for (const auto& [e, c] : spec.edge_coeff) {
    if (!spec.dag.has_edge(e.first, e.second))
      throw ParameterError("escm spec: coefficient for nonexistent edge " +
                           edge_name(e.first, e.second));
    if (spec.structural != EscmSpec::Structural::HuslerReiss && !(c > 0.0))
      throw ParameterError("escm spec: coefficient for edge " +
                           edge_name(e.first, e.second) +
                           " must be positive");
    if (spec.structural == EscmSpec::Structural::HuslerReiss && !(c >= 0.0))
      throw ParameterError("escm spec: coefficient for edge " +
                           edge_name(e.first, e.second) +
                           " must be nonnegative");
  }
  if (spec.structural == EscmSpec::Structural::HuslerReiss) {
    if (static_cast<int>(spec.mu.size()) != d ||
        static_cast<int>(spec.sigma.size()) != d)
      throw ParameterError(
          "escm spec: mu and sigma must have one entry per node");
    int root = 0, roots = 0;
    for (int v = 1; v <= d; ++v)
      if (spec.dag.parents(v).empty()) {
        root = v;
        ++roots;
      }
    if (roots != 1)
      throw ParameterError(
          "escm spec: the Husler-Reiss family needs exactly one root node");
    for (int v = 1; v <= d; ++v) {
      double a = spec.activation[static_cast<std::size_t>(v - 1)];
      if (v == root && !(a > 0.0))
        throw ParameterError(
            "escm spec: the Husler-Reiss root activation must be positive");
      if (v != root && a != 0.0)
        throw ParameterError("escm spec: Husler-Reiss non-root node " +
                             std::to_string(v) +
                             " must have zero activation");
      if (!(spec.sigma[static_cast<std::size_t>(v - 1)] >= 0.0))
        throw ParameterError("escm spec: sigma must be >= 0");
      if (v != root) {
        double sum = 0.0;
        for (int u : spec.dag.parents(v)) sum += spec.edge_coeff.at({u, v});
        if (std::fabs(sum - 1.0) > 1e-9)
          throw ParameterError(
              "escm spec: Husler-Reiss coefficients into node " +
              std::to_string(v) + " must sum to 1");
      }
    }
  }
}

Sample simulate_escm_prelimit(const EscmSpec& spec, std::size_t n,
                              std::uint64_t seed, int workers) {
  validate_escm(spec);
  if (n == 0)
    throw ParameterError("simulate_escm_prelimit: n must be positive");
  if (spec.structural != EscmSpec::Structural::MaxNoise &&
      spec.structural != EscmSpec::Structural::HuslerReiss)
    throw ParameterError(
        "simulate_escm_prelimit: only the MaxNoise and HuslerReiss families "
        "have a pre-limit sampler");
  const int d = spec.dag.node_count();
  const auto& topo = spec.dag.topological_order();
  Sample out = Sample::zeros(n, static_cast<std::size_t>(d));

  if (spec.structural == EscmSpec::Structural::MaxNoise) {
    generate_rows(n, seed, workers, [&](std::size_t i, UniformSource& rng) {
      std::vector<double> zeta(static_cast<std::size_t>(d));
      for (int v = 1; v <= d; ++v)
        zeta[static_cast<std::size_t>(v - 1)] = rng.pareto(spec.alpha);
      std::vector<double> eps(static_cast<std::size_t>(d));
      for (int v = 1; v <= d; ++v)
        eps[static_cast<std::size_t>(v - 1)] = spec.eps.draw(rng);
      std::vector<double> x(static_cast<std::size_t>(d), 0.0);
      for (int v : topo) {
        double inner = 0.0;
        for (int u : spec.dag.parents(v))
          inner = std::max(inner, spec.edge_coeff.at({u, v}) *
                                      x[static_cast<std::size_t>(u - 1)]);
        x[static_cast<std::size_t>(v - 1)] =
            std::max(spec.activation[static_cast<std::size_t>(v - 1)] *
                         zeta[static_cast<std::size_t>(v - 1)],
                     eps[static_cast<std::size_t>(v - 1)] * inner);
      }
      for (int v = 1; v <= d; ++v)
        out.at(i, static_cast<std::size_t>(v - 1)) =
            x[static_cast<std::size_t>(v - 1)];
    });
    return out;
  }

  // Husler-Reiss: Pareto root, log-linear recursion with Gaussian noise.
  int root = 0;
  for (int v = 1; v <= d; ++v)
    if (spec.dag.parents(v).empty()) root = v;
  generate_rows(n, seed, workers, [&](std::size_t i, UniformSource& rng) {
    std::vector<double> noise(static_cast<std::size_t>(d));
    for (int v = 1; v <= d; ++v) {
      if (v == root)
        noise[static_cast<std::size_t>(v - 1)] = rng.pareto(spec.alpha);
      else
        noise[static_cast<std::size_t>(v - 1)] =
            spec.mu[static_cast<std::size_t>(v - 1)] +
            spec.sigma[static_cast<std::size_t>(v - 1)] * rng.normal();
    }
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    for (int v : topo) {
      if (v == root) {
        x[static_cast<std::size_t>(v - 1)] =
            spec.activation[static_cast<std::size_t>(v - 1)] *
            noise[static_cast<std::size_t>(v - 1)];
      } else {
        double prod = 1.0;
        for (int u : spec.dag.parents(v))
          prod *= std::pow(x[static_cast<std::size_t>(u - 1)],
                           spec.edge_coeff.at({u, v}));
        x[static_cast<std::size_t>(v - 1)] =
            prod * std::exp(noise[static_cast<std::size_t>(v - 1)]);
      }
    }
    for (int v = 1; v <= d; ++v)
      out.at(i, static_cast<std::size_t>(v - 1)) =
          x[static_cast<std::size_t>(v - 1)];
  });
  return out;
}

std::vector<double> propagate_activation(const EscmSpec& spec,
                                         int activated_node,
                                         double activated_value,
                                         UniformSource& rng) {
  const int d = spec.dag.node_count();
  if (activated_node < 1 || activated_node > d)
    throw ParameterError("propagate_activation: unknown node");
  if (!(activated_value > 0.0))
    throw ParameterError("propagate_activation: activated value must be > 0");
  std::vector<double> y(static_cast<std::size_t>(d), 0.0);
  y[static_cast<std::size_t>(activated_node - 1)] = activated_value;

  std::vector<bool> reachable(static_cast<std::size_t>(d), false);
  reachable[static_cast<std::size_t>(activated_node - 1)] = true;
  for (int v : spec.dag.topological_order()) {
    if (v == activated_node ||
        !std::any_of(spec.dag.parents(v).begin(), spec.dag.parents(v).end(),
                     [&](int u) {
                       return reachable[static_cast<std::size_t>(u - 1)];
                     }))
      continue;
    reachable[static_cast<std::size_t>(v - 1)] = true;
    double value = 0.0;
    switch (spec.structural) {
      case EscmSpec::Structural::SimpleSum: {
        for (int u : spec.dag.parents(v))
          value += spec.edge_coeff.at({u, v}) *
                   y[static_cast<std::size_t>(u - 1)];
        break;
      }
      case EscmSpec::Structural::SimpleMax: {
        for (int u : spec.dag.parents(v))
          value = std::max(value, spec.edge_coeff.at({u, v}) *
                                      y[static_cast<std::size_t>(u - 1)]);
        break;
      }
      case EscmSpec::Structural::MaxNoise: {
        double inner = 0.0;
        for (int u : spec.dag.parents(v))
          inner = std::max(inner, spec.edge_coeff.at({u, v}) *
                                      y[static_cast<std::size_t>(u - 1)]);
        value = spec.eps.draw(rng) * inner;
        break;
      }
      case EscmSpec::Structural::HuslerReiss:
        throw ParameterError(
            "propagate_activation: the Husler-Reiss family has no "
            "conditional propagation");
    }
    y[static_cast<std::size_t>(v - 1)] = value;
  }
  return y;
}

ConditionalSample sample_escm_conditional(const EscmSpec& spec, std::size_t n,
                                          std::uint64_t seed, int workers) {
  validate_escm(spec);
  if (n == 0)
    throw ParameterError("sample_escm_conditional: n must be positive");
  if (spec.structural == EscmSpec::Structural::HuslerReiss)
    throw ParameterError(
        "sample_escm_conditional: only the simple and MaxNoise families "
        "admit conditional sampling");
  const int d = spec.dag.node_count();

  // Activation is drawn with probability proportional to a_v^alpha.
  std::vector<double> cumulative(static_cast<std::size_t>(d), 0.0);
  double total = 0.0;
  for (int v = 1; v <= d; ++v) {
    double a = spec.activation[static_cast<std::size_t>(v - 1)];
    total += a > 0.0 ? std::pow(a, spec.alpha) : 0.0;
    cumulative[static_cast<std::size_t>(v - 1)] = total;
  }

  ConditionalSample result;
  result.values = Sample::zeros(n, static_cast<std::size_t>(d));
  result.activated.assign(n, 0);
  generate_rows(n, seed, workers, [&](std::size_t i, UniformSource& rng) {
    // The scan can only stop at a positive-mass node: zero-mass nodes share
    // their cumulative value with the previous node, so pick (strictly in
    // (0, total)) never lands on them first.
    double pick = rng.next_unit() * total;
    int v = 1;
    while (v < d && pick > cumulative[static_cast<std::size_t>(v - 1)]) ++v;
    double p = rng.pareto(spec.alpha);
    std::vector<double> y = propagate_activation(
        spec, v, spec.activation[static_cast<std::size_t>(v - 1)] * p, rng);
    for (int u = 1; u <= d; ++u)
      result.values.at(i, static_cast<std::size_t>(u - 1)) =
          y[static_cast<std::size_t>(u - 1)];
    result.activated[i] = v;
  });
  return result;
}

Sample sample_second_order_pair(const SecondOrderPairSpec& spec,
                                std::size_t n, std::uint64_t seed,
                                int workers) {
  if (!(0.0 <= spec.a && spec.a <= spec.b && spec.b <= 1.0))
    throw ParameterError(
        "second-order pair: need 0 <= a <= b <= 1 for the support");
  if (!(spec.alpha > 0.0))
    throw ParameterError("second-order pair: alpha must be positive");
  if (!(spec.rho > 0.0))
    throw ParameterError("second-order pair: rho must be positive");
  if (!(spec.off_mass >= 0.0 && spec.off_mass < 1.0))
    throw ParameterError("second-order pair: off_mass must lie in [0,1)");
  const double off_len = spec.a + (1.0 - spec.b);
  if (spec.off_mass > 0.0 && off_len == 0.0)
    throw ParameterError(
        "second-order pair: off_mass > 0 needs a nonempty off-cone region "
        "(a > 0 or b < 1)");
  double atom_total = 0.0;
  if (spec.angle_law.kind == SecondOrderPairSpec::AngleLaw::Kind::Atoms) {
    if (spec.angle_law.atoms.empty())
      throw ParameterError("second-order pair: atom angle law has no atoms");
    for (const auto& [w, p] : spec.angle_law.atoms) {
      if (!(w >= spec.a && w <= spec.b))
        throw ParameterError(
            "second-order pair: atom angle outside the support [a,b]");
      if (!(p >= 0.0))
        throw ParameterError("second-order pair: negative atom mass");
      atom_total += p;
    }
    if (std::fabs(atom_total - 1.0) > 1e-12)
      throw ParameterError(
          "second-order pair: atom masses must sum to 1");
  }
  if (n == 0)
    throw ParameterError("second-order pair: n must be positive");

  Sample out = Sample::zeros(n, 2);
  generate_rows(n, seed, workers, [&](std::size_t i, UniformSource& rng) {
    bool off_cone = rng.next_unit() < spec.off_mass;
    double w, r;
    if (off_cone) {
      double pos = rng.next_unit() * off_len;
      w = pos < spec.a ? pos : spec.b + (pos - spec.a);
      r = rng.pareto((1.0 + spec.rho) * spec.alpha);
    } else {
      if (spec.angle_law.kind ==
          SecondOrderPairSpec::AngleLaw::Kind::UniformCone) {
        w = spec.a + (spec.b - spec.a) * rng.next_unit();
      } else {
        double pick = rng.next_unit() * atom_total;
        double acc = 0.0;
        w = spec.angle_law.atoms.back().first;
        for (const auto& [angle, mass] : spec.angle_law.atoms) {
          acc += mass;
          if (pick <= acc) {
            w = angle;
            break;
          }
        }
      }
      r = rng.pareto(spec.alpha);
    }
    out.at(i, 0) = r * w;
    out.at(i, 1) = r * (1.0 - w);
  });
  return out;
}

}  // namespace extcausal
