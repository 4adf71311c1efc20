#pragma once

#include <cstdint>
#include <random>

namespace extcausal {

// Stateless 64-bit mix used to derive independent seeds from a master seed
// and an index (per-rep seeds, per-chunk seeds, named substreams). This is
// the splitmix64 finalizer applied to seed + golden_ratio * (index + 1); the
// exact function is part of the reproducibility contract and is documented
// in the README.
std::uint64_t mix64(std::uint64_t seed, std::uint64_t index);

// Deterministic uniform source. Wraps std::mt19937_64 (whose output sequence
// is fully specified by the standard) and derives all variates by inverse
// CDF so that streams are bit-identical across platforms. None of the
// std::*_distribution adapters are used: their algorithms are
// implementation-defined.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1): 53-bit mantissa, offset by half an
  // ulp so 0 and 1 are unreachable (safe for logs and inverse CDFs).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Pareto(alpha) on [1, inf): U^{-1/alpha}.
  double pareto(double alpha) { return std::pow(next_unit(), -1.0 / alpha); }

  // Standard normal via the inverse CDF.
  double normal() { return normal_icdf(next_unit()); }

  // Uniform integer in [0, n); rejection sampling, exactly unbiased.
  std::uint64_t next_below(std::uint64_t n);

  // Inverse standard normal CDF (Wichura's AS241, double precision).
  static double normal_icdf(double p);

 private:
  std::mt19937_64 engine_;
};

// Standard normal CDF.
double normal_cdf(double x);

}  // namespace extcausal
