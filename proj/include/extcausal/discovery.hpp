#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "extcausal/angular.hpp"
#include "extcausal/graph.hpp"
#include "extcausal/margins.hpp"

namespace extcausal {

// Pairwise score matrix tau[u][v] over nodes 1..d with an undefined
// diagonal. When constructed as skew, writing (u,v) also writes the negated
// (v,u) entry, so the skew identity holds exactly.
class ScoreMatrix {
 public:
  ScoreMatrix(int node_count, bool skew);

  int node_count() const { return d_; }
  bool skew() const { return skew_; }
  double at(int u, int v) const;
  void set(int u, int v, double value);

 private:
  int d_;
  bool skew_;
  std::vector<double> tau_;
  std::size_t index(int u, int v) const;
};

// Extremal ancestral search: repeatedly remove the node whose largest
// incoming score from the still-present nodes is smallest (ties broken by
// smallest node id) and assign it the next rank. Likely roots leave first.
CausalOrder ease_order(const ScoreMatrix& scores);

enum class PairDirection { U_CAUSES_V, V_CAUSES_U, NO_DECISION };

std::string to_string(PairDirection dir);

// Sign rule with a symmetric dead band: positive scores past the threshold
// point u -> v, negative ones v -> u, anything else (including the exact
// boundary) is left undecided.
PairDirection pairwise_direction(double tau_uv, double threshold);

// Assembles the AAC score matrix over all unordered column pairs, running
// one support optimization per pair; optionally applies the marginal Pareto
// transform (cfg.alpha) first.
ScoreMatrix score_matrix_from_data(const Sample& sample, const AacConfig& cfg,
                                   bool transform);

// Pluggable scores for driving ease_order; "aac" is implemented, "ctc" is a
// reserved name for the causal tail coefficient baseline and reports itself
// as unimplemented when invoked.
using ScoreFunction = std::function<ScoreMatrix(
    const Sample& sample, const AacConfig& cfg, bool transform)>;
const std::map<std::string, ScoreFunction>& score_registry();

}  // namespace extcausal
