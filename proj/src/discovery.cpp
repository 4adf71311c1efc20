#include "extcausal/discovery.hpp"

#include <cmath>
#include <limits>

#include "extcausal/errors.hpp"

namespace extcausal {

ScoreMatrix::ScoreMatrix(int node_count, bool skew)
    : d_(node_count), skew_(skew) {
  if (d_ < 1) throw ParameterError("ScoreMatrix: node count must be positive");
  tau_.assign(static_cast<std::size_t>(d_) * static_cast<std::size_t>(d_),
              std::numeric_limits<double>::quiet_NaN());
}

std::size_t ScoreMatrix::index(int u, int v) const {
  if (u < 1 || u > d_ || v < 1 || v > d_)
    throw ParameterError("ScoreMatrix: node out of range");
  if (u == v)
    throw ParameterError("ScoreMatrix: the diagonal is undefined");
  return static_cast<std::size_t>(u - 1) * static_cast<std::size_t>(d_) +
         static_cast<std::size_t>(v - 1);
}

double ScoreMatrix::at(int u, int v) const { return tau_[index(u, v)]; }

void ScoreMatrix::set(int u, int v, double value) {
  tau_[index(u, v)] = value;
  if (skew_) tau_[index(v, u)] = -value;
}

CausalOrder ease_order(const ScoreMatrix& scores) {
  const int d = scores.node_count();
  if (d < 2) throw ParameterError("ease_order: need at least 2 nodes");
  for (int u = 1; u <= d; ++u)
    for (int v = 1; v <= d; ++v)
      if (u != v && !std::isfinite(scores.at(u, v)))
        throw NumericError("ease_order: score tau(" + std::to_string(u) +
                           "," + std::to_string(v) + ") is not finite");

  std::vector<bool> present(static_cast<std::size_t>(d), true);
  // incoming_max[v-1] = max over present u != v of tau(u, v); recomputed for
  // a node only when the entry that attained its max leaves the pool.
  std::vector<double> incoming_max(static_cast<std::size_t>(d));
  auto recompute = [&](int v) {
    double m = -std::numeric_limits<double>::infinity();
    for (int u = 1; u <= d; ++u)
      if (u != v && present[static_cast<std::size_t>(u - 1)])
        m = std::max(m, scores.at(u, v));
    incoming_max[static_cast<std::size_t>(v - 1)] = m;
  };
  for (int v = 1; v <= d; ++v) recompute(v);

  CausalOrder order;
  order.rank.assign(static_cast<std::size_t>(d), 0);
  int remaining = d;
  for (int s = 1; s <= d; ++s) {
    int pick = -1;
    if (remaining == 1) {
      for (int v = 1; v <= d; ++v)
        if (present[static_cast<std::size_t>(v - 1)]) pick = v;
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (int v = 1; v <= d; ++v)
        if (present[static_cast<std::size_t>(v - 1)] &&
            incoming_max[static_cast<std::size_t>(v - 1)] < best) {
          best = incoming_max[static_cast<std::size_t>(v - 1)];
          pick = v;
        }
    }
    order.rank[static_cast<std::size_t>(pick - 1)] = s;
    present[static_cast<std::size_t>(pick - 1)] = false;
    --remaining;
    if (remaining > 1)
      for (int v = 1; v <= d; ++v)
        if (present[static_cast<std::size_t>(v - 1)] && v != pick &&
            scores.at(pick, v) >=
                incoming_max[static_cast<std::size_t>(v - 1)])
          recompute(v);
  }
  return order;
}

std::string to_string(PairDirection dir) {
  switch (dir) {
    case PairDirection::U_CAUSES_V:
      return "1->2";
    case PairDirection::V_CAUSES_U:
      return "2->1";
    case PairDirection::NO_DECISION:
      return "none";
  }
  return "none";
}

PairDirection pairwise_direction(double tau_uv, double threshold) {
  if (!std::isfinite(tau_uv))
    throw ParameterError("pairwise_direction: tau is not finite");
  if (!(threshold >= 0.0))
    throw ParameterError("pairwise_direction: threshold must be >= 0");
  if (tau_uv > threshold) return PairDirection::U_CAUSES_V;
  if (tau_uv < -threshold) return PairDirection::V_CAUSES_U;
  return PairDirection::NO_DECISION;
}

ScoreMatrix score_matrix_from_data(const Sample& sample, const AacConfig& cfg,
                                   bool transform) {
  if (sample.cols < 2)
    throw ParameterError("score_matrix_from_data: need at least 2 columns");
  TransformResult transformed;
  const Sample* data_ptr = &sample;
  if (transform) {
    transformed = pareto_transform(sample, cfg.alpha);
    data_ptr = &transformed.sample;
  }
  const Sample& data = *data_ptr;
  const int d = static_cast<int>(sample.cols);
  ScoreMatrix scores(d, true);
  for (int u = 1; u < d; ++u) {
    std::vector<double> ucol = data.column(static_cast<std::size_t>(u - 1));
    for (int v = u + 1; v <= d; ++v) {
      AacPair pair =
          aac_pair(ucol, data.column(static_cast<std::size_t>(v - 1)), cfg);
      scores.set(u, v, pair.tau_uv);
    }
  }
  return scores;
}

const std::map<std::string, ScoreFunction>& score_registry() {
  static const std::map<std::string, ScoreFunction> registry = [] {
    std::map<std::string, ScoreFunction> r;
    r["aac"] = [](const Sample& sample, const AacConfig& cfg,
                  bool transform) {
      return score_matrix_from_data(sample, cfg, transform);
    };
    r["ctc"] = [](const Sample&, const AacConfig&, bool) -> ScoreMatrix {
      throw ParameterError(
          "score 'ctc' (causal tail coefficient) is a reserved baseline "
          "slot with no implementation");
    };
    return r;
  }();
  return registry;
}

}  // namespace extcausal
