#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "extcausal/errors.hpp"
#include "extcausal/graph.hpp"
#include "extcausal/rng.hpp"
#include "extcausal/simulate.hpp"
#include "testutil.hpp"

using namespace extcausal;

namespace {

EscmSpec make_escm(Dag dag, std::vector<double> act,
                   EscmSpec::Structural structural,
                   std::map<std::pair<int, int>, double> coeff,
                   EpsLaw eps = {}, std::vector<double> mu = {},
                   std::vector<double> sigma = {}, double alpha = 2.0) {
  const auto d = static_cast<std::size_t>(dag.node_count());
  if (mu.empty()) mu.assign(d, 0.0);
  if (sigma.empty()) sigma.assign(d, 0.0);
  return EscmSpec{std::move(dag), std::move(act),   structural,
                  std::move(coeff), eps,            std::move(mu),
                  std::move(sigma), alpha};
}

}  // namespace

// ---------------------------------------------------------------------------
// Seed derivation and the uniform source.

TEST_CASE("seed mixing matches the published finalizer") {
  // mix64(seed, index) is the splitmix64 finalizer of
  // seed + 0x9e3779b97f4a7c15 * (index + 1); mix64(0, 0) is therefore the
  // first output of a splitmix64 stream seeded with 0, a published vector.
  CHECK(mix64(0, 0) == 0xE220A8397B1DCDAFULL);
  CHECK(mix64(0, 1) != mix64(0, 0));
  CHECK(mix64(1, 0) != mix64(0, 0));
  CHECK(mix64(1, 0) != mix64(0, 1));
  CHECK(mix64(42, 7) == mix64(42, 7));
}

TEST_CASE("unit uniforms stay strictly inside (0,1)") {
  UniformSource rng(5);
  for (int i = 0; i < 100000; ++i) {
    double u = rng.next_unit();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("bounded integer draws are uniform") {
  UniformSource rng(6);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    std::uint64_t v = rng.next_below(7);
    REQUIRE(v < 7);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int c : counts) {
    CHECK(c > 850);
    CHECK(c < 1150);
  }
}

TEST_CASE("normal quantile function hits reference points") {
  CHECK(UniformSource::normal_icdf(0.5) == 0.0);
  CHECK(UniformSource::normal_icdf(0.975) ==
        doctest::Approx(1.959964).epsilon(1e-5));
  CHECK(UniformSource::normal_icdf(0.025) ==
        doctest::Approx(-1.959964).epsilon(1e-5));
  CHECK(UniformSource::normal_icdf(0.999) ==
        doctest::Approx(3.090232).epsilon(1e-5));
  // Round trip against the CDF.
  for (double x : {-3.0, -1.5, -0.1, 0.0, 0.7, 2.5}) {
    CHECK(UniformSource::normal_icdf(normal_cdf(x)) ==
          doctest::Approx(x).epsilon(1e-7));
  }
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021).epsilon(1e-6));
}

TEST_CASE("normal draws pass a Kolmogorov-Smirnov check") {
  UniformSource rng(8);
  std::vector<double> draws(10000);
  for (double& d : draws) d = rng.normal();
  double ks = testutil::ks_statistic(draws, normal_cdf);
  CHECK(ks < 0.02);
}

TEST_CASE("pareto draws have the right floor and tail") {
  UniformSource rng(9);
  int exceed = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double p = rng.pareto(2.0);
    REQUIRE(p >= 1.0);
    if (p > 10.0) ++exceed;  // P = 10^-2
  }
  double rate = static_cast<double>(exceed) / n;
  CHECK(rate > 0.008);
  CHECK(rate < 0.012);
}

// ---------------------------------------------------------------------------
// Structural coefficient laws.

TEST_CASE("uniform coefficient law draws inside its range") {
  CoeffLaw law = CoeffLaw::uniform(0.04, 0.4);
  UniformSource rng(10);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double b = law.draw(rng);
    REQUIRE(b >= 0.04);
    REQUIRE(b <= 0.4);
    sum += b;
  }
  CHECK(sum / n == doctest::Approx(0.22).epsilon(0.01));
  CHECK_THROWS_AS(CoeffLaw::uniform(0.0, 0.4), ParameterError);
  CHECK_THROWS_AS(CoeffLaw::uniform(0.4, 0.04), ParameterError);
}

TEST_CASE("constant coefficient law consumes no randomness") {
  CoeffLaw law = CoeffLaw::constant(0.7);
  UniformSource a(123), b(123);
  for (int i = 0; i < 5; ++i) CHECK(law.draw(a) == 0.7);
  CHECK(a.next_u64() == b.next_u64());  // stream untouched by the draws
  CHECK_THROWS_AS(CoeffLaw::constant(0.0), ParameterError);
  CHECK_THROWS_AS(CoeffLaw::constant(-1.0), ParameterError);
}

TEST_CASE("matched lognormal law centers its median and hits coverage") {
  auto [log_median, sigma] = lognormal_matched_params(0.04, 0.4, 0.95);
  CHECK(std::exp(log_median) == doctest::Approx(0.22).epsilon(1e-12));
  CHECK(sigma > 0.0);

  // Monte Carlo oracle: 1e6 draws, coverage within +-0.002 and the median
  // splits the draws in half.
  UniformSource rng(11);
  int inside = 0, below = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    double x = std::exp(log_median + sigma * rng.normal());
    if (x >= 0.04 && x <= 0.4) ++inside;
    if (x < 0.22) ++below;
  }
  CHECK(static_cast<double>(inside) / n ==
        doctest::Approx(0.95).epsilon(0.0021));
  CHECK(static_cast<double>(below) / n ==
        doctest::Approx(0.5).epsilon(0.004));
}

TEST_CASE("matched lognormal coverage is monotone in sigma") {
  auto tight = lognormal_matched_params(0.04, 0.4, 0.99);
  auto loose = lognormal_matched_params(0.04, 0.4, 0.60);
  CHECK(tight.second < loose.second);
}

TEST_CASE("matched lognormal parameter validation") {
  CHECK_THROWS_AS(lognormal_matched_params(0.4, 0.04, 0.95), ParameterError);
  CHECK_THROWS_AS(lognormal_matched_params(0.0, 0.4, 0.95), ParameterError);
  CHECK_THROWS_AS(lognormal_matched_params(0.04, 0.4, 0.0), ParameterError);
  CHECK_THROWS_AS(lognormal_matched_params(0.04, 0.4, 1.0), ParameterError);
  // Coverage below what the widest bracketed sigma can reach.
  CHECK_THROWS_AS(lognormal_matched_params(0.04, 0.4, 0.05), ParameterError);
}

TEST_CASE("matched lognormal draws mostly land in the target range") {
  CoeffLaw law = CoeffLaw::lognormal_matched(0.04, 0.4, 0.95);
  UniformSource rng(12);
  int inside = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    double b = law.draw(rng);
    REQUIRE(b > 0.0);
    if (b >= 0.04 && b <= 0.4) ++inside;
  }
  CHECK(static_cast<double>(inside) / n ==
        doctest::Approx(0.95).epsilon(0.03));
}

// ---------------------------------------------------------------------------
// Observational heavy-tailed SCM sampler.

TEST_CASE("noise margins of an edgeless model have the requested tail") {
  ScmSpec spec{Dag(1, {}), ScmSpec::Model::SumLinear, CoeffLaw::constant(0.1),
               1.0};
  Sample out = simulate_scm(spec, 100000, 303);
  int exceed = 0;
  for (std::size_t i = 0; i < out.rows; ++i)
    if (out.at(i, 0) > 10.0) ++exceed;  // Pareto(1): P(X > 10) = 0.1
  double rate = static_cast<double>(exceed) / static_cast<double>(out.rows);
  CHECK(rate > 0.09);
  CHECK(rate < 0.11);
}

TEST_CASE("sum-linear recursion composes noise exactly") {
  const std::uint64_t seed = 881;
  const double c = 0.7;
  ScmSpec edgeless{Dag(2, {}), ScmSpec::Model::SumLinear,
                   CoeffLaw::constant(c), 3.0};
  ScmSpec chained{Dag(2, {{1, 2}}), ScmSpec::Model::SumLinear,
                  CoeffLaw::constant(c), 3.0};
  Sample noise = simulate_scm(edgeless, 5000, seed);
  Sample data = simulate_scm(chained, 5000, seed);
  for (std::size_t i = 0; i < data.rows; ++i) {
    CHECK(data.at(i, 0) == noise.at(i, 0));
    const double prod = c * noise.at(i, 0);
    const double expect = prod + noise.at(i, 1);
    CHECK(data.at(i, 1) == expect);
  }
}

TEST_CASE("max-linear recursion composes noise exactly") {
  const std::uint64_t seed = 882;
  const double c = 0.9;
  ScmSpec edgeless{Dag(2, {}), ScmSpec::Model::MaxLinear,
                   CoeffLaw::constant(c), 2.0};
  ScmSpec chained{Dag(2, {{1, 2}}), ScmSpec::Model::MaxLinear,
                  CoeffLaw::constant(c), 2.0};
  Sample noise = simulate_scm(edgeless, 5000, seed);
  Sample data = simulate_scm(chained, 5000, seed);
  for (std::size_t i = 0; i < data.rows; ++i) {
    CHECK(data.at(i, 0) == noise.at(i, 0));
    CHECK(data.at(i, 1) == std::max(noise.at(i, 1), c * noise.at(i, 0)));
  }
}

TEST_CASE("the observational sampler is deterministic in the seed") {
  UniformSource dag_rng(41);
  Dag dag = random_dag(5, 2.0, dag_rng);
  ScmSpec spec{dag, ScmSpec::Model::SumLinear, CoeffLaw::uniform(0.04, 0.4),
               3.0};
  Sample a = simulate_scm(spec, 3000, 99);
  Sample b = simulate_scm(spec, 3000, 99);
  Sample c = simulate_scm(spec, 3000, 100);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
}

TEST_CASE("worker count never changes the observational sample") {
  UniformSource dag_rng(43);
  Dag dag = random_dag(4, 2.0, dag_rng);
  ScmSpec spec{dag, ScmSpec::Model::MaxLinear,
               CoeffLaw::lognormal_matched(0.04, 0.4, 0.95), 3.0};
  // Spans multiple generation chunks so the partition actually matters.
  Sample serial = simulate_scm(spec, 20000, 7, 1);
  Sample parallel = simulate_scm(spec, 20000, 7, 4);
  CHECK(serial.values == parallel.values);
}

TEST_CASE("independent noise columns have no joint extremes") {
  ScmSpec spec{Dag(2, {}), ScmSpec::Model::SumLinear, CoeffLaw::constant(0.1),
               2.0};
  const std::size_t n = 1000000;
  Sample out = simulate_scm(spec, n, 51);
  std::vector<double> c0 = out.column(0), c1 = out.column(1);
  std::vector<double> s0 = c0, s1 = c1;
  const auto cut = static_cast<std::size_t>(0.995 * static_cast<double>(n));
  std::nth_element(s0.begin(), s0.begin() + cut, s0.end());
  std::nth_element(s1.begin(), s1.begin() + cut, s1.end());
  double q0 = s0[cut], q1 = s1[cut];
  std::size_t both = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (c0[i] > q0 && c1[i] > q1) ++both;
  // Independent columns co-exceed with probability 0.005^2 = 2.5e-5.
  CHECK(static_cast<double>(both) / static_cast<double>(n) < 3e-4);
}

TEST_CASE("observational sampler validation") {
  ScmSpec spec{Dag(2, {}), ScmSpec::Model::SumLinear, CoeffLaw::constant(0.5),
               3.0};
  CHECK_THROWS_AS(simulate_scm(spec, 0, 1), ParameterError);
  CHECK_THROWS_AS(simulate_scm(spec, 10, 1, 0), ParameterError);
  ScmSpec bad_tail = spec;
  bad_tail.noise_alpha0 = 0.0;
  CHECK_THROWS_AS(simulate_scm(bad_tail, 10, 1), ParameterError);
}

// ---------------------------------------------------------------------------
// Pre-limit structural families.

TEST_CASE("a deterministic log-linear chain copies its root") {
  EscmSpec spec =
      make_escm(Dag(2, {{1, 2}}), {1.0, 0.0},
                EscmSpec::Structural::HuslerReiss, {{{1, 2}, 1.0}});
  Sample out = simulate_escm_prelimit(spec, 2000, 17);
  for (std::size_t i = 0; i < out.rows; ++i) {
    CHECK(out.at(i, 0) >= 1.0);  // Pareto root
    CHECK(out.at(i, 1) == out.at(i, 0));  // X^1 * exp(0), bit for bit
  }
}

TEST_CASE("log-linear noise has the specified Gaussian law") {
  EscmSpec spec = make_escm(Dag(2, {{1, 2}}), {1.0, 0.0},
                            EscmSpec::Structural::HuslerReiss,
                            {{{1, 2}, 1.0}}, {}, {0.0, 0.3}, {0.0, 0.5}, 1.0);
  Sample out = simulate_escm_prelimit(spec, 10000, 19);
  std::vector<double> z(out.rows);
  for (std::size_t i = 0; i < out.rows; ++i)
    z[i] = std::log(out.at(i, 1)) - std::log(out.at(i, 0));
  double ks = testutil::ks_statistic(
      z, [](double x) { return normal_cdf((x - 0.3) / 0.5); });
  CHECK(ks < 0.02);
}

TEST_CASE("max-noise with unit factors reduces to the max-linear model") {
  Dag dag(3, {{1, 2}, {2, 3}, {1, 3}});
  const std::uint64_t seed = 905;
  const double c = 0.8;
  EscmSpec escm = make_escm(dag, {1.0, 1.0, 1.0},
                            EscmSpec::Structural::MaxNoise,
                            {{{1, 2}, c}, {{2, 3}, c}, {{1, 3}, c}},
                            EpsLaw::constant(1.0), {}, {}, 3.0);
  ScmSpec scm{dag, ScmSpec::Model::MaxLinear, CoeffLaw::constant(c), 3.0};
  Sample a = simulate_escm_prelimit(escm, 4000, seed);
  Sample b = simulate_scm(scm, 4000, seed);
  CHECK(a.values == b.values);  // identical streams, identical recursion
}

TEST_CASE("max-noise factors rescale the propagated maxima") {
  EscmSpec spec = make_escm(Dag(2, {{1, 2}}), {1.0, 1.0},
                            EscmSpec::Structural::MaxNoise, {{{1, 2}, 0.9}},
                            EpsLaw::uniform(0.5, 1.5));
  Sample out = simulate_escm_prelimit(spec, 3000, 21);
  for (std::size_t i = 0; i < out.rows; ++i) {
    CHECK(out.at(i, 0) >= 1.0);
    CHECK(out.at(i, 1) > 0.0);
    CHECK(std::isfinite(out.at(i, 1)));
  }
}

TEST_CASE("pre-limit sampler validation") {
  EscmSpec sum_family =
      make_escm(Dag(2, {{1, 2}}), {1.0, 1.0}, EscmSpec::Structural::SimpleSum,
                {{{1, 2}, 0.5}});
  CHECK_THROWS_AS(simulate_escm_prelimit(sum_family, 100, 1), ParameterError);

  EscmSpec ok = make_escm(Dag(2, {{1, 2}}), {1.0, 1.0},
                          EscmSpec::Structural::MaxNoise, {{{1, 2}, 0.5}});
  CHECK_THROWS_AS(simulate_escm_prelimit(ok, 0, 1), ParameterError);
}

TEST_CASE("structural family validation") {
  // Missing coefficient for an edge.
  CHECK_THROWS_AS(
      simulate_escm_prelimit(make_escm(Dag(2, {{1, 2}}), {1.0, 1.0},
                                       EscmSpec::Structural::MaxNoise, {}),
                             10, 1),
      ParameterError);
  // Coefficient for a nonexistent edge.
  CHECK_THROWS_AS(
      simulate_escm_prelimit(
          make_escm(Dag(2, {{1, 2}}), {1.0, 1.0},
                    EscmSpec::Structural::MaxNoise,
                    {{{1, 2}, 0.5}, {{2, 1}, 0.5}}),
          10, 1),
      ParameterError);
  // Nonpositive coefficient outside the log-linear family.
  CHECK_THROWS_AS(
      simulate_escm_prelimit(make_escm(Dag(2, {{1, 2}}), {1.0, 1.0},
                                       EscmSpec::Structural::MaxNoise,
                                       {{{1, 2}, 0.0}}),
                             10, 1),
      ParameterError);
  // All-zero activation.
  CHECK_THROWS_AS(
      simulate_escm_prelimit(make_escm(Dag(2, {{1, 2}}), {0.0, 0.0},
                                       EscmSpec::Structural::MaxNoise,
                                       {{{1, 2}, 0.5}}),
                             10, 1),
      ParameterError);
  // Negative activation.
  CHECK_THROWS_AS(
      simulate_escm_prelimit(make_escm(Dag(2, {{1, 2}}), {1.0, -0.1},
                                       EscmSpec::Structural::MaxNoise,
                                       {{{1, 2}, 0.5}}),
                             10, 1),
      ParameterError);
  // Wrong activation length.
  CHECK_THROWS_AS(
      simulate_escm_prelimit(make_escm(Dag(2, {{1, 2}}), {1.0},
                                       EscmSpec::Structural::MaxNoise,
                                       {{{1, 2}, 0.5}}),
                             10, 1),
      ParameterError);
}

TEST_CASE("log-linear family validation") {
  // Two roots.
  CHECK_THROWS_AS(
      simulate_escm_prelimit(make_escm(Dag(2, {}), {1.0, 0.0},
                                       EscmSpec::Structural::HuslerReiss, {}),
                             10, 1),
      ParameterError);
  // Activation mass off the root.
  CHECK_THROWS_AS(
      simulate_escm_prelimit(
          make_escm(Dag(2, {{1, 2}}), {1.0, 0.5},
                    EscmSpec::Structural::HuslerReiss, {{{1, 2}, 1.0}}),
          10, 1),
      ParameterError);
  // Coefficient sums on parents must be exactly one.
  CHECK_THROWS_AS(
      simulate_escm_prelimit(
          make_escm(Dag(3, {{1, 2}, {1, 3}, {2, 3}}), {1.0, 0.0, 0.0},
                    EscmSpec::Structural::HuslerReiss,
                    {{{1, 2}, 1.0}, {{1, 3}, 0.6}, {{2, 3}, 0.3}}),
          10, 1),
      ParameterError);
  // Negative sigma.
  CHECK_THROWS_AS(
      simulate_escm_prelimit(
          make_escm(Dag(2, {{1, 2}}), {1.0, 0.0},
                    EscmSpec::Structural::HuslerReiss, {{{1, 2}, 1.0}}, {},
                    {0.0, 0.0}, {0.0, -0.5}),
          10, 1),
      ParameterError);
  // A proper weighted merge is accepted.
  Sample ok = simulate_escm_prelimit(
      make_escm(Dag(3, {{1, 2}, {1, 3}, {2, 3}}), {1.0, 0.0, 0.0},
                EscmSpec::Structural::HuslerReiss,
                {{{1, 2}, 1.0}, {{1, 3}, 0.4}, {{2, 3}, 0.6}}),
      100, 1);
  CHECK(ok.rows == 100);
}

TEST_CASE("pre-limit samplers are worker-invariant") {
  EscmSpec spec = make_escm(Dag(3, {{1, 2}, {2, 3}}), {1.0, 1.0, 1.0},
                            EscmSpec::Structural::MaxNoise,
                            {{{1, 2}, 0.7}, {{2, 3}, 0.6}},
                            EpsLaw::lognormal(0.0, 0.25));
  Sample serial = simulate_escm_prelimit(spec, 20000, 23, 1);
  Sample parallel = simulate_escm_prelimit(spec, 20000, 23, 3);
  CHECK(serial.values == parallel.values);
}

// ---------------------------------------------------------------------------
// Conditional (single-big-jump) sampler.

TEST_CASE("conditional two-node sums propagate exactly") {
  EscmSpec spec =
      make_escm(Dag(2, {{1, 2}}), {1.0, 1.0}, EscmSpec::Structural::SimpleSum,
                {{{1, 2}, 0.8}});
  ConditionalSample cs = sample_escm_conditional(spec, 5000, 25);
  REQUIRE(cs.activated.size() == cs.values.rows);
  int act1 = 0;
  for (std::size_t i = 0; i < cs.values.rows; ++i) {
    int a = cs.activated[i];
    REQUIRE((a == 1 || a == 2));
    if (a == 1) {
      ++act1;
      CHECK(cs.values.at(i, 0) >= 1.0);  // a_v * Pareto >= a_v
      CHECK(cs.values.at(i, 1) == 0.8 * cs.values.at(i, 0));
    } else {
      CHECK(cs.values.at(i, 0) == 0.0);  // non-descendant of the jump
      CHECK(cs.values.at(i, 1) >= 1.0);
    }
  }
  // Activation probabilities proportional to a_v^alpha: 50/50 here.
  double frac = static_cast<double>(act1) / 5000.0;
  CHECK(frac == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("activation frequencies follow the alpha-weighted masses") {
  // a = (1, 2), alpha = 2: probabilities 1/5 and 4/5.
  EscmSpec spec =
      make_escm(Dag(2, {}), {1.0, 2.0}, EscmSpec::Structural::SimpleMax, {});
  ConditionalSample cs = sample_escm_conditional(spec, 20000, 27);
  int act2 = 0;
  for (int a : cs.activated) act2 += a == 2 ? 1 : 0;
  CHECK(static_cast<double>(act2) / 20000.0 ==
        doctest::Approx(0.8).epsilon(0.015));
}

TEST_CASE("exactly the descendants of the jump are nonzero") {
  UniformSource rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    int d = 2 + static_cast<int>(rng.next_below(4));
    Dag dag = random_dag(d, std::min(2.0, static_cast<double>(d - 1)), rng);
    std::map<std::pair<int, int>, double> coeff;
    for (auto e : dag.edges()) coeff[e] = 0.3 + 1.7 * rng.next_unit();
    std::vector<double> act(static_cast<std::size_t>(d), 0.0);
    for (double& a : act)
      if (rng.next_unit() > 0.3) a = 0.5 + 1.5 * rng.next_unit();
    act[0] = 1.0;  // at least one positive mass
    EscmSpec::Structural structural =
        trial % 3 == 0   ? EscmSpec::Structural::SimpleSum
        : trial % 3 == 1 ? EscmSpec::Structural::SimpleMax
                         : EscmSpec::Structural::MaxNoise;
    EscmSpec spec = make_escm(dag, act, structural, std::move(coeff),
                              EpsLaw::uniform(0.5, 1.5));
    ConditionalSample cs = sample_escm_conditional(spec, 10000, mix64(31, trial));

    for (std::size_t i = 0; i < cs.values.rows; ++i) {
      int a = cs.activated[i];
      REQUIRE(a >= 1);
      REQUIRE(a <= d);
      CHECK(spec.activation[static_cast<std::size_t>(a - 1)] > 0.0);
      std::vector<bool> descendant(static_cast<std::size_t>(d), false);
      descendant[static_cast<std::size_t>(a - 1)] = true;
      for (int v : spec.dag.topological_order())
        for (int u : spec.dag.parents(v))
          if (descendant[static_cast<std::size_t>(u - 1)])
            descendant[static_cast<std::size_t>(v - 1)] = true;
      for (int v = 1; v <= d; ++v) {
        double x = cs.values.at(i, static_cast<std::size_t>(v - 1));
        if (descendant[static_cast<std::size_t>(v - 1)]) {
          CHECK(x > 0.0);
        } else {
          CHECK(x == 0.0);  // faces are exact, not merely small
        }
      }
    }
  }
}

TEST_CASE("the activated coordinate has the prescribed radial tail") {
  EscmSpec spec =
      make_escm(Dag(2, {{1, 2}}), {1.5, 0.5}, EscmSpec::Structural::SimpleSum,
                {{{1, 2}, 1.0}});
  ConditionalSample cs = sample_escm_conditional(spec, 100000, 33);
  int exceed = 0;
  for (std::size_t i = 0; i < cs.values.rows; ++i) {
    int a = cs.activated[i];
    double scaled =
        cs.values.at(i, static_cast<std::size_t>(a - 1)) /
        spec.activation[static_cast<std::size_t>(a - 1)];
    if (scaled > 4.0) ++exceed;  // Pareto(2): P = 1/16 = 0.0625
  }
  double rate = static_cast<double>(exceed) / 100000.0;
  CHECK(rate > 0.055);
  CHECK(rate < 0.070);
}

TEST_CASE("structural propagation is positively homogeneous") {
  UniformSource setup(35);
  for (int trial = 0; trial < 10; ++trial) {
    int d = 3 + static_cast<int>(setup.next_below(3));
    Dag dag = random_dag(d, 2.0, setup);
    std::map<std::pair<int, int>, double> coeff;
    for (auto e : dag.edges()) coeff[e] = 0.3 + 1.7 * setup.next_unit();
    EscmSpec::Structural structural =
        trial % 3 == 0   ? EscmSpec::Structural::SimpleSum
        : trial % 3 == 1 ? EscmSpec::Structural::SimpleMax
                         : EscmSpec::Structural::MaxNoise;
    EscmSpec spec = make_escm(
        dag, std::vector<double>(static_cast<std::size_t>(d), 1.0),
        structural, std::move(coeff), EpsLaw::uniform(0.5, 1.5));
    int node = 1 + static_cast<int>(setup.next_below(
                       static_cast<std::uint64_t>(d)));
    double y = 0.5 + 4.0 * setup.next_unit();

    // Doubling-halving scale: exact equality (power of two).
    UniformSource r1(777), r2(777);
    auto base = propagate_activation(spec, node, y, r1);
    auto half = propagate_activation(spec, node, 0.5 * y, r2);
    REQUIRE(base.size() == half.size());
    for (std::size_t v = 0; v < base.size(); ++v)
      CHECK(half[v] == 0.5 * base[v]);

    // General scale: tight relative tolerance.
    UniformSource r3(777);
    auto tripled = propagate_activation(spec, node, 3.0 * y, r3);
    for (std::size_t v = 0; v < base.size(); ++v)
      CHECK(tripled[v] ==
            doctest::Approx(3.0 * base[v]).epsilon(1e-13));
  }
}

TEST_CASE("conditional sampler validation") {
  EscmSpec hr =
      make_escm(Dag(2, {{1, 2}}), {1.0, 0.0},
                EscmSpec::Structural::HuslerReiss, {{{1, 2}, 1.0}});
  CHECK_THROWS_AS(sample_escm_conditional(hr, 10, 1), ParameterError);

  EscmSpec ok =
      make_escm(Dag(2, {{1, 2}}), {1.0, 1.0}, EscmSpec::Structural::SimpleSum,
                {{{1, 2}, 0.8}});
  CHECK_THROWS_AS(sample_escm_conditional(ok, 0, 1), ParameterError);
  UniformSource rng(1);
  CHECK_THROWS_AS(propagate_activation(ok, 0, 1.0, rng), ParameterError);
  CHECK_THROWS_AS(propagate_activation(ok, 3, 1.0, rng), ParameterError);
  CHECK_THROWS_AS(propagate_activation(ok, 1, -2.0, rng), ParameterError);
}

TEST_CASE("conditional sampler is worker-invariant and seeded") {
  EscmSpec spec = make_escm(Dag(3, {{1, 2}, {1, 3}}), {1.0, 0.5, 2.0},
                            EscmSpec::Structural::MaxNoise,
                            {{{1, 2}, 0.7}, {{1, 3}, 1.2}},
                            EpsLaw::lognormal(0.0, 0.3));
  ConditionalSample serial = sample_escm_conditional(spec, 20000, 37, 1);
  ConditionalSample parallel = sample_escm_conditional(spec, 20000, 37, 4);
  CHECK(serial.values.values == parallel.values.values);
  CHECK(serial.activated == parallel.activated);
  ConditionalSample other = sample_escm_conditional(spec, 20000, 38, 1);
  CHECK(serial.values.values != other.values.values);
}

// ---------------------------------------------------------------------------
// Second-order bivariate generator.

TEST_CASE("with no off-cone mass every angle lies in the support") {
  SecondOrderPairSpec spec;
  spec.a = 0.2;
  spec.b = 0.7;
  spec.alpha = 2.0;
  spec.off_mass = 0.0;
  Sample out = sample_second_order_pair(spec, 20000, 41);
  for (std::size_t i = 0; i < out.rows; ++i) {
    double x1 = out.at(i, 0), x2 = out.at(i, 1);
    double w = x1 / (x1 + x2);
    CHECK(w >= 0.2 - 1e-9);
    CHECK(w <= 0.7 + 1e-9);
  }
}

TEST_CASE("atom angle laws produce exactly the requested rays") {
  SecondOrderPairSpec spec;
  spec.a = 0.3;
  spec.b = 0.6;
  spec.off_mass = 0.0;
  spec.angle_law.kind = SecondOrderPairSpec::AngleLaw::Kind::Atoms;
  spec.angle_law.atoms = {{0.3, 0.5}, {0.6, 0.5}};
  Sample out = sample_second_order_pair(spec, 10000, 43);
  int low = 0, high = 0;
  for (std::size_t i = 0; i < out.rows; ++i) {
    double x1 = out.at(i, 0), x2 = out.at(i, 1);
    double w = x1 / (x1 + x2);
    if (std::abs(w - 0.3) < 1e-9)
      ++low;
    else if (std::abs(w - 0.6) < 1e-9)
      ++high;
  }
  CHECK(low + high == 10000);
  CHECK(static_cast<double>(low) / 10000.0 ==
        doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("off-cone rows carry the lighter radial tail") {
  SecondOrderPairSpec spec;
  spec.a = 0.2;
  spec.b = 0.7;
  spec.alpha = 2.0;
  spec.rho = 1.0;
  spec.off_mass = 0.5;
  const std::size_t n = 2000000;
  Sample out = sample_second_order_pair(spec, n, 47, 4);
  std::size_t off = 0, off_exceed = 0, in = 0, in_exceed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x1 = out.at(i, 0), x2 = out.at(i, 1);
    double r = x1 + x2;
    double w = x1 / r;
    if (w < 0.2 - 1e-9 || w > 0.7 + 1e-9) {
      ++off;
      if (r > 10.0) ++off_exceed;
    } else {
      ++in;
      if (r > 10.0) ++in_exceed;
    }
  }
  // Half the rows leave the cone.
  CHECK(static_cast<double>(off) / static_cast<double>(n) ==
        doctest::Approx(0.5).epsilon(0.01));
  // Off-cone radii are Pareto((1+rho) alpha) = Pareto(4): P(R>10) = 1e-4.
  double off_rate = static_cast<double>(off_exceed) / static_cast<double>(off);
  CHECK(off_rate > 5e-5);
  CHECK(off_rate < 2e-4);
  // In-cone radii keep the heavy Pareto(2) tail: P(R>10) = 1e-2.
  double in_rate = static_cast<double>(in_exceed) / static_cast<double>(in);
  CHECK(in_rate > 0.008);
  CHECK(in_rate < 0.012);
}

TEST_CASE("second-order generator validation") {
  SecondOrderPairSpec spec;

  SUBCASE("off-cone mass needs an off-cone region") {
    spec.a = 0.0;
    spec.b = 1.0;
    spec.off_mass = 0.1;
    CHECK_THROWS_AS(sample_second_order_pair(spec, 10, 1), ParameterError);
  }
  SUBCASE("support must be ordered inside the unit interval") {
    spec.a = 0.8;
    spec.b = 0.3;
    CHECK_THROWS_AS(sample_second_order_pair(spec, 10, 1), ParameterError);
    spec.a = -0.1;
    spec.b = 0.5;
    CHECK_THROWS_AS(sample_second_order_pair(spec, 10, 1), ParameterError);
  }
  SUBCASE("rho and off-mass ranges") {
    spec.a = 0.2;
    spec.b = 0.7;
    spec.rho = 0.0;
    CHECK_THROWS_AS(sample_second_order_pair(spec, 10, 1), ParameterError);
    spec.rho = 1.0;
    spec.off_mass = 1.0;
    CHECK_THROWS_AS(sample_second_order_pair(spec, 10, 1), ParameterError);
    spec.off_mass = -0.1;
    CHECK_THROWS_AS(sample_second_order_pair(spec, 10, 1), ParameterError);
  }
  SUBCASE("atoms must sit inside the cone and sum to one") {
    spec.a = 0.2;
    spec.b = 0.7;
    spec.angle_law.kind = SecondOrderPairSpec::AngleLaw::Kind::Atoms;
    spec.angle_law.atoms = {{0.1, 1.0}};  // outside [a, b]
    CHECK_THROWS_AS(sample_second_order_pair(spec, 10, 1), ParameterError);
    spec.angle_law.atoms = {{0.3, 0.5}, {0.5, 0.3}};  // sums to 0.8
    CHECK_THROWS_AS(sample_second_order_pair(spec, 10, 1), ParameterError);
    spec.angle_law.atoms = {};
    CHECK_THROWS_AS(sample_second_order_pair(spec, 10, 1), ParameterError);
  }
  SUBCASE("n must be positive") {
    spec.a = 0.2;
    spec.b = 0.7;
    CHECK_THROWS_AS(sample_second_order_pair(spec, 0, 1), ParameterError);
  }
}

TEST_CASE("second-order generator is worker-invariant") {
  SecondOrderPairSpec spec;
  spec.a = 0.1;
  spec.b = 0.9;
  spec.off_mass = 0.2;
  Sample serial = sample_second_order_pair(spec, 20000, 53, 1);
  Sample parallel = sample_second_order_pair(spec, 20000, 53, 3);
  CHECK(serial.values == parallel.values);
}
