#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "extcausal/graph.hpp"
#include "extcausal/margins.hpp"
#include "extcausal/rng.hpp"

namespace extcausal {

// Law of the structural coefficients beta_uv. The constant kind draws
// nothing from the stream, which keeps noise streams aligned between runs
// that differ only in the edge set (useful for exact identities in tests).
struct CoeffLaw {
  enum class Kind { Uniform, LognormalMatched, Constant };
  Kind kind = Kind::Constant;
  double lower = 0.0;
  double upper = 0.0;
  double coverage = 0.95;
  double value = 1.0;
  double log_median = 0.0;  // resolved at construction for LognormalMatched
  double sigma = 0.0;

  static CoeffLaw uniform(double l, double u);
  static CoeffLaw lognormal_matched(double l, double u, double coverage);
  static CoeffLaw constant(double c);

  double draw(UniformSource& rng) const;
};

// Log-location and sigma of the lognormal with median (l+u)/2 whose mass on
// [l,u] equals coverage; sigma solved by bisection on (1e-8, 10) to 1e-10.
std::pair<double, double> lognormal_matched_params(double l, double u,
                                                   double coverage);

struct ScmSpec {
  enum class Model { SumLinear, MaxLinear };
  Dag dag;
  Model model = Model::SumLinear;
  CoeffLaw coeff;
  double noise_alpha0 = 3.0;  // Pareto tail index of the additive noise
};

// Observational SCM sample: per row, i.i.d. Pareto(alpha0) noise per node
// and the sum-linear or max-linear recursion in topological order. The
// structural coefficients are drawn once per dataset (one beta per edge,
// shared by all rows) from a dedicated substream of the seed.
Sample simulate_scm(const ScmSpec& spec, std::size_t n, std::uint64_t seed,
                    int workers = 1);

// Law of the propagating noise factor eps_v in the max-linear-with-noise
// structural function.
struct EpsLaw {
  enum class Kind { Constant, Lognormal, Uniform };
  Kind kind = Kind::Constant;
  double value = 1.0;
  double mu = 0.0;
  double sigma = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  static EpsLaw constant(double c);
  static EpsLaw lognormal(double mu, double sigma);
  static EpsLaw uniform(double l, double u);

  double draw(UniformSource& rng) const;
};

struct EscmSpec {
  enum class Structural { SimpleSum, SimpleMax, MaxNoise, HuslerReiss };
  Dag dag;
  std::vector<double> activation;  // a_v per node, >= 0, at least one > 0
  Structural structural = Structural::SimpleSum;
  // beta_uv (SimpleSum/SimpleMax), a_uv (MaxNoise) or b_uv (HuslerReiss).
  std::map<std::pair<int, int>, double> edge_coeff;
  EpsLaw eps;                // MaxNoise only
  std::vector<double> mu;    // HuslerReiss: per-node Gaussian location
  std::vector<double> sigma; // HuslerReiss: per-node Gaussian scale, >= 0
  double alpha = 2.0;
};

// Checks the structural-family invariants (positive edge coefficients,
// activation pattern, Husler-Reiss single root and unit coefficient sums).
void validate_escm(const EscmSpec& spec);

// Pre-limit observational sample for the MaxNoise and HuslerReiss families:
//   MaxNoise:     X_v = max(a_v zeta_v, eps_v max_u a_uv X_u)
//   HuslerReiss:  X_root = a_root zeta_root,
//                 X_v = (prod_u X_u^{b_uv}) exp(Z_v), Z_v ~ N(mu_v, sigma_v^2)
// with zeta i.i.d. Pareto(alpha).
Sample simulate_escm_prelimit(const EscmSpec& spec, std::size_t n,
                              std::uint64_t seed, int workers = 1);

struct ConditionalSample {
  Sample values;
  std::vector<int> activated;  // activation label per row
};

// Samples the extremes directly from the single-big-jump mixture: per row,
// one node v activates (probability proportional to a_v^alpha), takes
// Y_v = a_v * Pareto(alpha), non-descendants of v are exactly 0, and
// descendants follow the structural recursion. Simple and MaxNoise families
// only.
ConditionalSample sample_escm_conditional(const EscmSpec& spec, std::size_t n,
                                          std::uint64_t seed, int workers = 1);

// Structural propagation used by the conditional sampler, exposed so its
// positive homogeneity (scaling activated_value scales every coordinate) can
// be asserted directly. Consumes eps draws from rng for MaxNoise.
std::vector<double> propagate_activation(const EscmSpec& spec,
                                         int activated_node,
                                         double activated_value,
                                         UniformSource& rng);

struct SecondOrderPairSpec {
  double a = 0.0;  // true angular support [a, b]
  double b = 1.0;
  double alpha = 2.0;
  double rho = 1.0;       // off-cone radial decay is (1+rho)*alpha
  double off_mass = 0.0;  // q, probability of an off-cone row
  struct AngleLaw {
    enum class Kind { UniformCone, Atoms };
    Kind kind = Kind::UniformCone;
    std::vector<std::pair<double, double>> atoms;  // (angle, mass), on [a,b]
  } angle_law;
};

// Bivariate sample with exact angular support [a,b]: in-cone rows pair an
// angle from the in-cone law with a Pareto(alpha) radius; off-cone rows
// (probability q) pair a uniform angle outside [a,b] with the lighter
// Pareto((1+rho)*alpha) radius. (w, r) maps to (r*w, r*(1-w)).
Sample sample_second_order_pair(const SecondOrderPairSpec& spec,
                                std::size_t n, std::uint64_t seed,
                                int workers = 1);

}  // namespace extcausal
