#include "extcausal/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include "extcausal/errors.hpp"

namespace extcausal {

Dag::Dag(int node_count, std::vector<std::pair<int, int>> edges)
    : d_(node_count), edges_(std::move(edges)) {
  if (d_ < 1) throw ParameterError("Dag: node count must be positive");
  std::sort(edges_.begin(), edges_.end());
  parents_.resize(static_cast<std::size_t>(d_));
  children_.resize(static_cast<std::size_t>(d_));
  std::pair<int, int> prev{0, 0};
  for (const auto& [u, v] : edges_) {
    if (u < 1 || u > d_ || v < 1 || v > d_)
      throw ParameterError("Dag: edge (" + std::to_string(u) + "," +
                           std::to_string(v) + ") references an unknown node");
    if (u == v)
      throw ParameterError("Dag: self-loop at node " + std::to_string(u));
    if (std::pair{u, v} == prev)
      throw ParameterError("Dag: duplicate edge (" + std::to_string(u) + "," +
                           std::to_string(v) + ")");
    prev = {u, v};
    parents_[static_cast<std::size_t>(v - 1)].push_back(u);
    children_[static_cast<std::size_t>(u - 1)].push_back(v);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
  for (auto& c : children_) std::sort(c.begin(), c.end());

  // Kahn's algorithm with a min-heap gives both the acyclicity check and a
  // canonical (smallest-id-first) topological order.
  std::vector<int> indeg(static_cast<std::size_t>(d_));
  for (int v = 1; v <= d_; ++v)
    indeg[static_cast<std::size_t>(v - 1)] =
        static_cast<int>(parents(v).size());
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int v = 1; v <= d_; ++v)
    if (indeg[static_cast<std::size_t>(v - 1)] == 0) ready.push(v);
  topo_.reserve(static_cast<std::size_t>(d_));
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    topo_.push_back(v);
    for (int c : children(v))
      if (--indeg[static_cast<std::size_t>(c - 1)] == 0) ready.push(c);
  }
  if (static_cast<int>(topo_.size()) != d_)
    throw ParameterError("Dag: edge set contains a directed cycle");
}

void Dag::check_node(int v) const {
  if (v < 1 || v > d_)
    throw ParameterError("unknown node " + std::to_string(v) + " (graph has " +
                         std::to_string(d_) + " nodes)");
}

const std::vector<int>& Dag::parents(int v) const {
  check_node(v);
  return parents_[static_cast<std::size_t>(v - 1)];
}

const std::vector<int>& Dag::children(int v) const {
  check_node(v);
  return children_[static_cast<std::size_t>(v - 1)];
}

bool Dag::has_edge(int u, int v) const {
  check_node(u);
  check_node(v);
  const auto& c = children_[static_cast<std::size_t>(u - 1)];
  return std::binary_search(c.begin(), c.end(), v);
}

std::vector<int> CausalOrder::nodes_by_rank() const {
  std::vector<int> nodes(rank.size());
  for (std::size_t i = 0; i < rank.size(); ++i) {
    int r = rank[i];
    if (r < 1 || r > static_cast<int>(rank.size()))
      throw ParameterError("CausalOrder: rank out of range");
    nodes[static_cast<std::size_t>(r - 1)] = static_cast<int>(i + 1);
  }
  return nodes;
}

bool CausalOrder::is_permutation() const {
  std::vector<bool> seen(rank.size(), false);
  for (int r : rank) {
    if (r < 1 || r > static_cast<int>(rank.size())) return false;
    if (seen[static_cast<std::size_t>(r - 1)]) return false;
    seen[static_cast<std::size_t>(r - 1)] = true;
  }
  return true;
}

Dag random_dag(int d, double avg_degree, UniformSource& rng) {
  if (d < 2) throw ParameterError("random_dag: d must be at least 2");
  if (!(avg_degree > 0.0) || avg_degree > static_cast<double>(d - 1))
    throw ParameterError("random_dag: avg_degree must lie in (0, d-1]");
  double p = avg_degree / static_cast<double>(d - 1);

  // Uniform permutation: perm[i] is the node at position i.
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 1);
  for (int i = d - 1; i > 0; --i) {
    auto j = rng.next_below(static_cast<std::uint64_t>(i) + 1);
    std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
  }

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (rng.next_unit() < p)
        edges.emplace_back(perm[static_cast<std::size_t>(i)],
                           perm[static_cast<std::size_t>(j)]);
  return Dag(d, std::move(edges));
}

std::vector<int> ancestors(const Dag& dag, int v) {
  dag.parents(v);  // node check
  std::vector<bool> seen(static_cast<std::size_t>(dag.node_count()), false);
  std::vector<int> stack{v};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    for (int p : dag.parents(cur))
      if (!seen[static_cast<std::size_t>(p - 1)]) {
        seen[static_cast<std::size_t>(p - 1)] = true;
        stack.push_back(p);
      }
  }
  seen[static_cast<std::size_t>(v - 1)] = false;
  std::vector<int> result;
  for (int u = 1; u <= dag.node_count(); ++u)
    if (seen[static_cast<std::size_t>(u - 1)]) result.push_back(u);
  return result;
}

namespace {

void check_order_size(const Dag& dag, const CausalOrder& order) {
  if (order.node_count() != dag.node_count())
    throw ParameterError("order has " + std::to_string(order.node_count()) +
                         " ranks but the graph has " +
                         std::to_string(dag.node_count()) + " nodes");
  if (!order.is_permutation())
    throw ParameterError("order ranks are not a permutation of 1..d");
}

}  // namespace

bool is_valid_order(const Dag& dag, const CausalOrder& order) {
  check_order_size(dag, order);
  for (int v = 1; v <= dag.node_count(); ++v)
    for (int u : ancestors(dag, v))
      if (order.rank_of(u) > order.rank_of(v)) return false;
  return true;
}

ViolationRate ancestral_violation_rate(const Dag& dag,
                                       const CausalOrder& order) {
  check_order_size(dag, order);
  long total = 0, violated = 0;
  for (int v = 1; v <= dag.node_count(); ++v)
    for (int u : ancestors(dag, v)) {
      ++total;
      if (order.rank_of(u) > order.rank_of(v)) ++violated;
    }
  if (total == 0) return {0.0, true};
  return {static_cast<double>(violated) / static_cast<double>(total), false};
}

std::vector<CausalOrder> valid_orders_bruteforce(const Dag& dag) {
  if (dag.node_count() > 8)
    throw ParameterError(
        "valid_orders_bruteforce: factorial enumeration limited to d <= 8");
  std::vector<int> rank(static_cast<std::size_t>(dag.node_count()));
  std::iota(rank.begin(), rank.end(), 1);
  std::vector<CausalOrder> result;
  do {
    CausalOrder order{rank};
    if (is_valid_order(dag, order)) result.push_back(order);
  } while (std::next_permutation(rank.begin(), rank.end()));
  return result;
}

Dag read_dag_text(std::istream& in) {
  std::string line;
  int d = -1;
  std::vector<std::pair<int, int>> edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = line;
    auto first = trimmed.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = trimmed.find_last_not_of(" \t\r");
    trimmed = trimmed.substr(first, last - first + 1);
    if (trimmed[0] == '#') continue;
    if (d < 0) {
      if (trimmed.rfind("d=", 0) != 0)
        throw DataError("DAG text: expected 'd=<int>' on line " +
                        std::to_string(lineno));
      try {
        d = std::stoi(trimmed.substr(2));
      } catch (const std::exception&) {
        throw DataError("DAG text: invalid node count on line " +
                        std::to_string(lineno));
      }
      continue;
    }
    std::istringstream es(trimmed);
    int u, v;
    if (!(es >> u >> v))
      throw DataError("DAG text: expected 'u v' edge on line " +
                      std::to_string(lineno));
    std::string extra;
    if (es >> extra)
      throw DataError("DAG text: trailing tokens on line " +
                      std::to_string(lineno));
    edges.emplace_back(u, v);
  }
  if (d < 0) throw DataError("DAG text: missing 'd=<int>' header line");
  return Dag(d, std::move(edges));
}

Dag read_dag_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open DAG file: " + path);
  return read_dag_text(in);
}

void write_dag_text(const Dag& dag, std::ostream& out) {
  out << "d=" << dag.node_count() << "\n";
  for (const auto& [u, v] : dag.edges()) out << u << " " << v << "\n";
}

void write_dag_file(const Dag& dag, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write DAG file: " + path);
  write_dag_text(dag, out);
}

}  // namespace extcausal
