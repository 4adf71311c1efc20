#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "extcausal/rng.hpp"

namespace extcausal {

// Directed acyclic graph over nodes 1..d. Immutable after construction;
// acyclicity, node bounds, self-loops and duplicate edges are all checked by
// the constructor.
class Dag {
 public:
  Dag(int node_count, std::vector<std::pair<int, int>> edges);

  int node_count() const { return d_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& parents(int v) const;
  const std::vector<int>& children(int v) const;
  bool has_edge(int u, int v) const;
  // Canonical topological order: Kahn's algorithm, always removing the
  // smallest available node id. Deterministic for a given edge set.
  const std::vector<int>& topological_order() const { return topo_; }

 private:
  int d_;
  std::vector<std::pair<int, int>> edges_;       // sorted ascending
  std::vector<std::vector<int>> parents_;        // per node, sorted
  std::vector<std::vector<int>> children_;       // per node, sorted
  std::vector<int> topo_;
  void check_node(int v) const;
};

// A causal order: rank[v-1] is the position (1..d) node v receives.
struct CausalOrder {
  std::vector<int> rank;

  int node_count() const { return static_cast<int>(rank.size()); }
  int rank_of(int v) const { return rank.at(static_cast<std::size_t>(v - 1)); }
  // Nodes listed from first-ranked to last-ranked.
  std::vector<int> nodes_by_rank() const;
  bool is_permutation() const;
};

// Random DAG: draw a uniform node permutation, then include each admissible
// pair (edge from earlier to later in the permutation) independently with
// probability avg_degree/(d-1), so the expected total degree per node equals
// avg_degree.
Dag random_dag(int d, double avg_degree, UniformSource& rng);

// All nodes with a directed path to v, excluding v itself. Sorted ascending.
std::vector<int> ancestors(const Dag& dag, int v);

// True iff every ancestral pair (u, v) with u an ancestor of v satisfies
// rank(u) < rank(v).
bool is_valid_order(const Dag& dag, const CausalOrder& order);

struct ViolationRate {
  double rate = 0.0;
  // Set when the DAG has no ancestral pairs at all (edgeless); the rate is
  // then reported as 0 by convention.
  bool no_ancestral_pairs = false;
};

// Fraction of ancestral pairs (u, v), u in an(v), ranked in the wrong
// direction by the order.
ViolationRate ancestral_violation_rate(const Dag& dag,
                                       const CausalOrder& order);

// Every valid causal order, by exhaustive enumeration. Only for d <= 8.
std::vector<CausalOrder> valid_orders_bruteforce(const Dag& dag);

// Text format: one line "d=<int>", then one "u v" pair per edge line,
// whitespace separated, 1-based node ids.
Dag read_dag_text(std::istream& in);
Dag read_dag_file(const std::string& path);
void write_dag_text(const Dag& dag, std::ostream& out);
void write_dag_file(const Dag& dag, const std::string& path);

}  // namespace extcausal
