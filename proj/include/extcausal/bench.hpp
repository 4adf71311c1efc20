#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "extcausal/csv.hpp"
#include "extcausal/discovery.hpp"
#include "extcausal/margins.hpp"

namespace extcausal {

struct BenchConfig {
  std::string model = "sl0";  // one of sl0, sl1, ml0, ml1
  int d = 5;
  std::size_t n = 1000;
  int reps = 100;
  std::vector<int> k_list;  // empty means the default round(1.5*sqrt(n))
  double lambda = 2.0;
  double gamma = 0.5;
  double alpha = 2.0;    // marginal transform target
  double alpha0 = 3.0;   // simulator noise tail
  double avg_degree = 3.0;
  std::uint64_t seed = 1;
  bool transform = true;
  int workers = 1;

  bool operator==(const BenchConfig&) const = default;
};

// Parses line-oriented "key = value" text; unknown keys are errors, missing
// keys keep their defaults. Validates the invariants (reps >= 1, every k in
// 2..n, known model, positive parameters).
BenchConfig parse_bench_config(std::istream& in);
BenchConfig load_bench_config(const std::string& path);

// Canonical echo of a config; parse_bench_config(bench_config_text(cfg))
// round-trips to an equal config.
std::string bench_config_text(const BenchConfig& cfg);

struct RepOutcome {
  int rep = 0;
  std::uint64_t seed = 0;  // the derived per-rep seed
  bool ok = false;
  double rate = 0.0;
  bool no_ancestral_pairs = false;
  std::string error;  // set when ok is false
};

struct KAggregate {
  int k = 0;
  double mean = 0.0;
  double se = 0.0;
  int completed = 0;
};

struct BenchResult {
  BenchConfig config;
  std::vector<int> k_list;                     // ascending
  std::vector<std::vector<RepOutcome>> per_k;  // [k index][rep]
  std::vector<KAggregate> aggregates;          // one per k
  double elapsed_seconds = 0.0;
  bool partial = false;  // any rep failed

  std::string provenance() const { return bench_config_text(config); }
};

// The replication runner: per rep, draw a random DAG, simulate, optionally
// transform, build the AAC score matrix for every k, run the ordering, and
// score the ancestral violation rate against the true DAG. Reps are
// distributed over cfg.workers; per-rep seeds derive from (cfg.seed, rep),
// so aggregates do not depend on the worker count. Rep failures are recorded
// and skipped, never aborting the sweep.
BenchResult run_benchmark(const BenchConfig& cfg);

// Tab-separated table, header `model d n k mean_rate se reps seed`, one row
// per k ascending; rates fixed to 4 decimals. The reps column counts the
// reps that completed for that k.
void emit_table(const BenchResult& result, std::ostream& out);
void emit_table_file(const BenchResult& result, const std::string& path);

struct PairCase {
  std::string path;
  PairDirection truth = PairDirection::U_CAUSES_V;  // 1->2 or 2->1
  double weight = 1.0;
};

struct PairBenchConfig {
  std::size_t k = 0;  // 0 means per-file round(0.5 * sqrt(n))
  double lambda = 1.0;
  double gamma = 0.5;
  double alpha = 2.0;
  double threshold = 0.0;
  bool transform = true;
};

struct PairOrientationResult {
  double accuracy = 0.0;
  double half_width = 0.0;  // 1.96 * sqrt(acc*(1-acc)*sum w^2)
};

struct PairBenchResult {
  // Orientations in the order (+x1,+x2), (-x1,+x2), (+x1,-x2), (-x1,-x2).
  std::array<PairOrientationResult, 4> orientation;
  std::size_t cases_used = 0;
  std::size_t cases_failed = 0;
  bool renormalized = false;  // failures forced a weight renormalization
  std::vector<std::string> failures;
};

// Weighted pairwise direction benchmark over user-supplied two-column CSV
// files with truth labels: per file and sign-flip orientation, transform,
// estimate the AAC, decide by sign, and aggregate the weighted accuracy.
// Files that fail to process are excluded and the remaining weights
// renormalized to sum to 1.
PairBenchResult run_pair_benchmark(const std::vector<PairCase>& cases,
                                   const PairBenchConfig& cfg);

// Default extremal subsample size for the pair benchmark: round(0.5*sqrt(n)).
std::size_t pair_default_k(std::size_t n);

}  // namespace extcausal
