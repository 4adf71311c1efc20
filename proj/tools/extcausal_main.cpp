#include <CLI11.hpp>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "extcausal/angular.hpp"
#include "extcausal/bench.hpp"
#include "extcausal/csv.hpp"
#include "extcausal/discovery.hpp"
#include "extcausal/errors.hpp"
#include "extcausal/graph.hpp"
#include "extcausal/margins.hpp"
#include "extcausal/simulate.hpp"

namespace {

using namespace extcausal;

// Command-line level mistakes (bad flag values, malformed spec files) exit
// with code 1; library DataError/ParameterError/NumericError exit with 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOpts {
  std::uint64_t seed = 1;
  int workers = 1;
  bool quiet = false;
};

std::string fmt(double x, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

std::pair<std::size_t, std::size_t> parse_cols(const std::string& cols,
                                               std::size_t available) {
  std::istringstream in(cols);
  std::string a, b;
  if (!std::getline(in, a, ',') || !std::getline(in, b, ','))
    throw UsageError("--cols expects two comma-separated 1-based indices");
  std::size_t i, j;
  try {
    i = std::stoul(a);
    j = std::stoul(b);
  } catch (const std::exception&) {
    throw UsageError("--cols expects two comma-separated 1-based indices");
  }
  if (i < 1 || j < 1 || i > available || j > available || i == j)
    throw UsageError("--cols indices must be distinct and within 1.." +
                     std::to_string(available));
  return {i - 1, j - 1};
}

std::string trim(const std::string& s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// ---------------------------------------------------------------------------
// Model spec files (simulate --spec): line-oriented text. "key = value"
// scalars plus positional lines:
//   edge <u> <v> <coeff>
//   activation <v> <a>
//   mu <v> <x>        sigma <v> <x>        (Husler-Reiss)
//   eps = constant <c> | lognormal <mu> <sigma> | uniform <l> <u>
//   angle_law = uniform | atoms <w1> <p1> [<w2> <p2> ...]
// Unknown keys are errors.

struct SpecFile {
  int d = 0;
  double alpha = 2.0;
  std::string structural;
  std::vector<std::pair<std::pair<int, int>, double>> edges;
  std::vector<std::pair<int, double>> activations;
  std::vector<std::pair<int, double>> mus;
  std::vector<std::pair<int, double>> sigmas;
  EpsLaw eps;
  // second-order pair fields
  double a = 0.0, b = 1.0, rho = 1.0, q = 0.0;
  SecondOrderPairSpec::AngleLaw angle_law;
  std::set<std::string> keys_seen;
};

double to_real(const std::string& tok, const std::string& context) {
  try {
    std::size_t used = 0;
    double x = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return x;
  } catch (const std::exception&) {
    throw UsageError("spec file: '" + tok + "' in " + context +
                     " is not a number");
  }
}

int to_int(const std::string& tok, const std::string& context) {
  try {
    std::size_t used = 0;
    int x = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return x;
  } catch (const std::exception&) {
    throw UsageError("spec file: '" + tok + "' in " + context +
                     " is not an integer");
  }
}

SpecFile parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open spec file: " + path);
  SpecFile spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = "line " + std::to_string(lineno);
    std::istringstream tokens(t);
    std::string head;
    tokens >> head;
    if (head == "edge" || head == "activation" || head == "mu" ||
        head == "sigma") {
      std::vector<std::string> rest;
      std::string tok;
      while (tokens >> tok) rest.push_back(tok);
      if (head == "edge") {
        if (rest.size() != 3)
          throw UsageError("spec file: " + where +
                           ": edge lines are 'edge u v coeff'");
        spec.edges.push_back({{to_int(rest[0], where), to_int(rest[1], where)},
                              to_real(rest[2], where)});
      } else {
        if (rest.size() != 2)
          throw UsageError("spec file: " + where + ": " + head +
                           " lines are '" + head + " v value'");
        auto entry = std::pair{to_int(rest[0], where), to_real(rest[1], where)};
        if (head == "activation") spec.activations.push_back(entry);
        if (head == "mu") spec.mus.push_back(entry);
        if (head == "sigma") spec.sigmas.push_back(entry);
      }
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("spec file: " + where + " is not 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    spec.keys_seen.insert(key);
    if (key == "d") {
      spec.d = to_int(value, where);
    } else if (key == "alpha") {
      spec.alpha = to_real(value, where);
    } else if (key == "structural") {
      spec.structural = value;
    } else if (key == "a") {
      spec.a = to_real(value, where);
    } else if (key == "b") {
      spec.b = to_real(value, where);
    } else if (key == "rho") {
      spec.rho = to_real(value, where);
    } else if (key == "q") {
      spec.q = to_real(value, where);
    } else if (key == "eps") {
      std::istringstream ev(value);
      std::string kind;
      ev >> kind;
      std::vector<std::string> args;
      std::string tok;
      while (ev >> tok) args.push_back(tok);
      if (kind == "constant" && args.size() == 1)
        spec.eps = EpsLaw::constant(to_real(args[0], where));
      else if (kind == "lognormal" && args.size() == 2)
        spec.eps = EpsLaw::lognormal(to_real(args[0], where),
                                     to_real(args[1], where));
      else if (kind == "uniform" && args.size() == 2)
        spec.eps = EpsLaw::uniform(to_real(args[0], where),
                                   to_real(args[1], where));
      else
        throw UsageError("spec file: " + where +
                         ": eps must be 'constant c', 'lognormal mu sigma' "
                         "or 'uniform l u'");
    } else if (key == "angle_law") {
      std::istringstream av(value);
      std::string kind;
      av >> kind;
      if (kind == "uniform") {
        spec.angle_law.kind = SecondOrderPairSpec::AngleLaw::Kind::UniformCone;
      } else if (kind == "atoms") {
        spec.angle_law.kind = SecondOrderPairSpec::AngleLaw::Kind::Atoms;
        std::vector<double> nums;
        std::string tok;
        while (av >> tok) nums.push_back(to_real(tok, where));
        if (nums.empty() || nums.size() % 2 != 0)
          throw UsageError("spec file: " + where +
                           ": atoms need pairs 'w1 p1 w2 p2 ...'");
        for (std::size_t i = 0; i < nums.size(); i += 2)
          spec.angle_law.atoms.push_back({nums[i], nums[i + 1]});
      } else {
        throw UsageError("spec file: " + where +
                         ": angle_law must be 'uniform' or 'atoms ...'");
      }
    } else {
      throw UsageError("spec file: " + where + ": unknown key '" + key + "'");
    }
  }
  return spec;
}

EscmSpec build_escm_spec(const SpecFile& file,
                         EscmSpec::Structural structural) {
  if (file.d < 1)
    throw UsageError("spec file: missing or invalid 'd = <int>'");
  std::vector<std::pair<int, int>> edge_list;
  edge_list.reserve(file.edges.size());
  for (const auto& [e, c] : file.edges) edge_list.push_back(e);
  EscmSpec spec{Dag(file.d, std::move(edge_list)),
                std::vector<double>(static_cast<std::size_t>(file.d), 0.0),
                structural,
                {},
                file.eps,
                std::vector<double>(static_cast<std::size_t>(file.d), 0.0),
                std::vector<double>(static_cast<std::size_t>(file.d), 0.0),
                file.alpha};
  for (const auto& [e, c] : file.edges) spec.edge_coeff[e] = c;
  auto fill = [&](std::vector<double>& dest,
                  const std::vector<std::pair<int, double>>& src,
                  const std::string& what) {
    for (const auto& [v, x] : src) {
      if (v < 1 || v > file.d)
        throw UsageError("spec file: " + what + " names unknown node " +
                         std::to_string(v));
      dest[static_cast<std::size_t>(v - 1)] = x;
    }
  };
  fill(spec.activation, file.activations, "activation");
  fill(spec.mu, file.mus, "mu");
  fill(spec.sigma, file.sigmas, "sigma");
  return spec;
}

EscmSpec::Structural parse_structural(const std::string& name) {
  if (name == "simple_sum") return EscmSpec::Structural::SimpleSum;
  if (name == "simple_max") return EscmSpec::Structural::SimpleMax;
  if (name == "max_noise") return EscmSpec::Structural::MaxNoise;
  throw UsageError(
      "spec file: structural must be simple_sum, simple_max or max_noise");
}

// ---------------------------------------------------------------------------

void warn_degenerate(const TransformResult& tr, const GlobalOpts& global) {
  if (global.quiet) return;
  for (std::size_t j : tr.degenerate_columns)
    std::cerr << "warning: column " << (j + 1)
              << " is constant; its transform carries no rank information\n";
}

std::unique_ptr<std::ofstream> open_out(const std::string& path) {
  auto out = std::make_unique<std::ofstream>(path);
  if (!*out) throw DataError("cannot write output file: " + path);
  return out;
}

int run_transform(const std::string& in_path, const std::string& out_path,
                  double alpha, const GlobalOpts& global) {
  Sample sample = load_csv(in_path);
  TransformResult tr = pareto_transform(sample, alpha);
  warn_degenerate(tr, global);
  save_csv(tr.sample, out_path);
  return 0;
}

int run_aac(const std::string& in_path, const std::string& cols,
            std::size_t k, double lambda, double gamma, double alpha,
            bool no_transform, const std::string& dump_polar,
            const std::string& out_path, const GlobalOpts& global) {
  Sample sample = load_csv(in_path);
  auto [i, j] = parse_cols(cols, sample.cols);
  Sample pair = Sample::from_columns({sample.column(i), sample.column(j)});
  const Sample* working = &pair;
  TransformResult tr;
  if (!no_transform) {
    tr = pareto_transform(pair, alpha);
    warn_degenerate(tr, global);
    working = &tr.sample;
  }
  AacConfig cfg{k, lambda, gamma, alpha};
  if (!dump_polar.empty()) {
    PolarSeries series = polarize(*working);
    Sample polar = Sample::zeros(series.size(), 2);
    polar.names = {"w", "r"};
    for (std::size_t row = 0; row < series.size(); ++row) {
      polar.at(row, 0) = series.entries[row].w;
      polar.at(row, 1) = series.entries[row].r;
    }
    save_csv(polar, dump_polar);
  }
  AacPair result = aac_pair(working->column(0), working->column(1), cfg);
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;
  if (!out_path.empty()) {
    file = open_out(out_path);
    os = file.get();
  }
  *os << "a_hat\tb_hat\ttau\tobjective\tconverged\n"
      << fmt(result.interval.a_hat) << "\t" << fmt(result.interval.b_hat)
      << "\t" << fmt(result.interval.tau) << "\t"
      << fmt(result.interval.objective_value) << "\t"
      << (result.interval.report.converged ? "true" : "false") << "\n";
  return 0;
}

int run_order(const std::string& in_path, std::size_t k, double lambda,
              double gamma, double alpha, bool no_transform,
              const std::string& score_name, const std::string& scores_out,
              const std::string& dag_file, const std::string& out_path,
              const GlobalOpts& global) {
  Sample sample = load_csv(in_path);
  auto it = score_registry().find(score_name);
  if (it == score_registry().end())
    throw UsageError("unknown score '" + score_name + "'");
  AacConfig cfg{k, lambda, gamma, alpha};
  ScoreMatrix scores = it->second(sample, cfg, !no_transform);
  CausalOrder order = ease_order(scores);

  if (!scores_out.empty()) {
    Sample dump = Sample::zeros(static_cast<std::size_t>(scores.node_count()),
                                static_cast<std::size_t>(scores.node_count()));
    for (int u = 1; u <= scores.node_count(); ++u)
      for (int v = 1; v <= scores.node_count(); ++v)
        dump.at(static_cast<std::size_t>(u - 1),
                static_cast<std::size_t>(v - 1)) =
            u == v ? std::numeric_limits<double>::quiet_NaN()
                   : scores.at(u, v);
    save_csv(dump, scores_out);
  }

  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;
  if (!out_path.empty()) {
    file = open_out(out_path);
    os = file.get();
  }
  *os << "node\trank\n";
  for (int v = 1; v <= order.node_count(); ++v)
    *os << v << "\t" << order.rank_of(v) << "\n";
  if (!dag_file.empty()) {
    Dag truth = read_dag_file(dag_file);
    ViolationRate vr = ancestral_violation_rate(truth, order);
    *os << "violation_rate\t" << fmt(vr.rate, 4) << "\n";
    if (vr.no_ancestral_pairs && !global.quiet)
      std::cerr << "warning: the reference graph has no ancestral pairs; "
                   "the violation rate is 0 by convention\n";
  }
  return 0;
}

std::vector<PairCase> parse_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open manifest: " + path);
  std::vector<PairCase> cases;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream tokens(t);
    PairCase c;
    std::string label, weight;
    if (!(tokens >> c.path >> label >> weight))
      throw UsageError("manifest line " + std::to_string(lineno) +
                       ": expected '<csv-path> <1->2|2->1> <weight>'");
    if (label == "1->2")
      c.truth = PairDirection::U_CAUSES_V;
    else if (label == "2->1")
      c.truth = PairDirection::V_CAUSES_U;
    else
      throw UsageError("manifest line " + std::to_string(lineno) +
                       ": truth label must be 1->2 or 2->1");
    c.weight = to_real(weight, "manifest line " + std::to_string(lineno));
    cases.push_back(c);
  }
  return cases;
}

const char* kOrientationNames[4] = {"++", "-+", "+-", "--"};

int run_pairdir(const std::string& in_path, const std::string& manifest,
                const std::string& cols, bool all_orientations, std::size_t k,
                double lambda, double gamma, double alpha, double threshold,
                bool no_transform, const std::string& out_path,
                const GlobalOpts& global) {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;
  if (!out_path.empty()) {
    file = open_out(out_path);
    os = file.get();
  }
  if (!manifest.empty()) {
    PairBenchConfig cfg{k, lambda, gamma, alpha, threshold, !no_transform};
    PairBenchResult result = run_pair_benchmark(parse_manifest(manifest), cfg);
    *os << "orientation\taccuracy\thalf_width\tpairs\n";
    for (std::size_t o = 0; o < 4; ++o)
      *os << kOrientationNames[o] << "\t"
          << fmt(result.orientation[o].accuracy, 4) << "\t"
          << fmt(result.orientation[o].half_width, 4) << "\t"
          << result.cases_used << "\n";
    if (!global.quiet) {
      for (const std::string& failure : result.failures)
        std::cerr << "warning: skipped pair: " << failure << "\n";
      if (result.renormalized)
        std::cerr << "note: " << result.cases_failed
                  << " pair(s) failed; weights renormalized over the "
                  << result.cases_used << " remaining\n";
    }
    return result.cases_failed > 0 ? 3 : 0;
  }

  if (in_path.empty())
    throw UsageError("pairdir needs --in <csv> or --manifest <file>");
  Sample sample = load_csv(in_path);
  auto [i, j] = parse_cols(cols, sample.cols);
  Sample pair = Sample::from_columns({sample.column(i), sample.column(j)});
  AacConfig cfg{k == 0 ? pair_default_k(pair.rows) : k, lambda, gamma, alpha};
  std::array<Sample, 4> flips = orientations(pair);
  *os << "orientation\tdecision\ttau\n";
  std::size_t count = all_orientations ? 4 : 1;
  for (std::size_t o = 0; o < count; ++o) {
    const Sample* working = &flips[o];
    TransformResult tr;
    if (!no_transform) {
      tr = pareto_transform(flips[o], alpha);
      working = &tr.sample;
    }
    AacPair aac = aac_pair(working->column(0), working->column(1), cfg);
    PairDirection decision = pairwise_direction(aac.tau_uv, threshold);
    *os << kOrientationNames[o] << "\t" << to_string(decision) << "\t"
        << fmt(aac.tau_uv) << "\n";
  }
  return 0;
}

int run_simulate(const std::string& model, int d, long long n, double alpha0,
                 double avg_degree, const std::string& out_path,
                 const std::string& emit_dag, const std::string& spec_path,
                 const std::string& labels_out, const GlobalOpts& global) {
  if (n < 1) throw UsageError("--n must be positive");
  auto rows = static_cast<std::size_t>(n);
  const bool scm_family =
      model == "sl0" || model == "sl1" || model == "ml0" || model == "ml1";
  const bool spec_family = model == "mlnoise" || model == "hr" ||
                           model == "escm" || model == "so2pair";
  if (!scm_family && !spec_family)
    throw UsageError("unknown model '" + model + "'");
  if (scm_family && !spec_path.empty())
    throw UsageError("--spec applies only to mlnoise, hr, escm and so2pair");
  if (spec_family && spec_path.empty())
    throw UsageError("model '" + model + "' needs --spec <file>");
  if (!labels_out.empty() && model != "escm")
    throw UsageError("--labels-out applies only to the escm model");

  Sample data;
  if (scm_family) {
    if (d < 2) throw UsageError("--d must be at least 2");
    UniformSource dag_rng(mix64(global.seed, 1));
    Dag dag = random_dag(d, avg_degree, dag_rng);
    ScmSpec spec{dag,
                 model[0] == 's' ? ScmSpec::Model::SumLinear
                                 : ScmSpec::Model::MaxLinear,
                 model[2] == '0' ? CoeffLaw::uniform(0.04, 0.4)
                                 : CoeffLaw::lognormal_matched(0.04, 0.4, 0.95),
                 alpha0};
    data = simulate_scm(spec, rows, mix64(global.seed, 2), global.workers);
    if (!emit_dag.empty()) write_dag_file(dag, emit_dag);
  } else {
    SpecFile file = parse_spec_file(spec_path);
    if (model == "so2pair") {
      if (!emit_dag.empty())
        throw UsageError("so2pair has no graph to emit");
      SecondOrderPairSpec spec;
      spec.a = file.a;
      spec.b = file.b;
      spec.alpha = file.alpha;
      spec.rho = file.rho;
      spec.off_mass = file.q;
      spec.angle_law = file.angle_law;
      data = sample_second_order_pair(spec, rows, global.seed, global.workers);
    } else {
      EscmSpec::Structural structural;
      if (model == "mlnoise") {
        if (file.keys_seen.count("structural"))
          throw UsageError(
              "spec file: 'structural' is implied by the mlnoise model");
        structural = EscmSpec::Structural::MaxNoise;
      } else if (model == "hr") {
        if (file.keys_seen.count("structural"))
          throw UsageError(
              "spec file: 'structural' is implied by the hr model");
        structural = EscmSpec::Structural::HuslerReiss;
      } else {
        if (!file.keys_seen.count("structural"))
          throw UsageError(
              "spec file: the escm model needs 'structural = simple_sum "
              "| simple_max | max_noise'");
        structural = parse_structural(file.structural);
      }
      EscmSpec spec = build_escm_spec(file, structural);
      if (model == "escm") {
        ConditionalSample cs =
            sample_escm_conditional(spec, rows, global.seed, global.workers);
        data = std::move(cs.values);
        if (!labels_out.empty()) {
          auto out = open_out(labels_out);
          *out << "activated\n";
          for (int label : cs.activated) *out << label << "\n";
        }
      } else {
        data = simulate_escm_prelimit(spec, rows, global.seed,
                                      global.workers);
      }
      if (!emit_dag.empty()) write_dag_file(spec.dag, emit_dag);
    }
  }
  save_csv(data, out_path);
  return 0;
}

int run_bench(const std::string& config_path, const std::string& out_path,
              const std::string& k_list_override, const GlobalOpts& global,
              bool seed_given, bool workers_given) {
  BenchConfig cfg = load_bench_config(config_path);
  if (seed_given) cfg.seed = global.seed;
  if (workers_given) cfg.workers = global.workers;
  if (!k_list_override.empty()) {
    cfg.k_list.clear();
    std::istringstream ks(k_list_override);
    std::string item;
    while (std::getline(ks, item, ',')) {
      try {
        cfg.k_list.push_back(std::stoi(trim(item)));
      } catch (const std::exception&) {
        throw UsageError("--k-list expects comma-separated integers");
      }
    }
  }
  BenchResult result = run_benchmark(cfg);
  if (!global.quiet) std::cerr << result.provenance();
  if (out_path.empty())
    emit_table(result, std::cout);
  else
    emit_table_file(result, out_path);
  if (result.partial) {
    if (!global.quiet)
      for (const auto& per_k : result.per_k)
        for (const RepOutcome& o : per_k)
          if (!o.ok)
            std::cerr << "warning: rep " << o.rep << " (seed " << o.seed
                      << ") failed: " << o.error << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Causal direction and causal order from joint extremes: angular "
      "support estimation, pairwise direction decisions, order search, "
      "heavy-tailed simulators and replication benchmarks."};
  app.require_subcommand(1);

  GlobalOpts global;
  auto* seed_opt =
      app.add_option("--seed", global.seed, "Master random seed (default 1)");
  auto* workers_opt = app.add_option("--workers", global.workers,
                                     "Worker threads (default 1)");
  app.add_flag("--quiet", global.quiet, "Suppress warnings on stderr");

  // transform
  auto* transform = app.add_subcommand(
      "transform", "Rank-transform every column to the alpha-Pareto scale");
  transform->fallthrough();
  std::string tr_in, tr_out;
  double tr_alpha = 2.0;
  transform->add_option("--in", tr_in, "Input CSV")->required();
  transform->add_option("--out", tr_out, "Output CSV")->required();
  transform->add_option("--alpha", tr_alpha, "Target tail index (default 2)");

  // aac
  auto* aac = app.add_subcommand(
      "aac", "Estimate the angular support and asymmetry of one column pair");
  aac->fallthrough();
  std::string aac_in, aac_cols = "1,2", aac_dump, aac_out;
  std::size_t aac_k = 0;
  double aac_lambda = 2.0, aac_gamma = 0.5, aac_alpha = 2.0;
  bool aac_no_transform = false;
  aac->add_option("--in", aac_in, "Input CSV")->required();
  aac->add_option("--cols", aac_cols, "1-based column pair (default 1,2)");
  aac->add_option("--k", aac_k,
                  "Extremal subsample size (default round(1.5*sqrt(n)))");
  aac->add_option("--lambda", aac_lambda, "Penalty weight (default 2)");
  aac->add_option("--gamma", aac_gamma, "Penalty exponent (default 0.5)");
  aac->add_option("--alpha", aac_alpha, "Transform tail index (default 2)");
  aac->add_flag("--no-transform", aac_no_transform,
                "Use the raw nonnegative data without rank transform");
  aac->add_option("--dump-polar", aac_dump, "Write the (w,r) series as CSV");
  aac->add_option("--out", aac_out, "Write the result row here instead of "
                                    "stdout");

  // order
  auto* order = app.add_subcommand(
      "order", "Infer a causal order for all columns via extremal search");
  order->fallthrough();
  std::string order_in, order_scores, order_dag, order_out,
      order_score = "aac";
  std::size_t order_k = 0;
  double order_lambda = 2.0, order_gamma = 0.5, order_alpha = 2.0;
  bool order_no_transform = false;
  order->add_option("--in", order_in, "Input CSV")->required();
  order->add_option("--k", order_k,
                    "Extremal subsample size (default round(1.5*sqrt(n)))");
  order->add_option("--lambda", order_lambda, "Penalty weight (default 2)");
  order->add_option("--gamma", order_gamma, "Penalty exponent (default 0.5)");
  order->add_option("--alpha", order_alpha,
                    "Transform tail index (default 2)");
  order->add_flag("--no-transform", order_no_transform,
                  "Skip the marginal rank transform");
  order->add_option("--score", order_score,
                    "Pairwise score driving the search (default aac)");
  order->add_option("--scores-out", order_scores,
                    "Dump the pairwise score matrix as CSV");
  order->add_option("--dag-file", order_dag,
                    "Reference DAG; appends the ancestral violation rate");
  order->add_option("--out", order_out,
                    "Write the table here instead of stdout");

  // pairdir
  auto* pairdir = app.add_subcommand(
      "pairdir", "Decide the causal direction of a pair, or score a labeled "
                 "collection");
  pairdir->fallthrough();
  std::string pd_in, pd_manifest, pd_cols = "1,2", pd_out;
  bool pd_orientations = false, pd_no_transform = false;
  std::size_t pd_k = 0;
  double pd_lambda = 1.0, pd_gamma = 0.5, pd_alpha = 2.0, pd_threshold = 0.0;
  pairdir->add_option("--in", pd_in, "Input CSV with the pair");
  pairdir->add_option("--manifest", pd_manifest,
                      "Benchmark manifest: '<csv> <1->2|2->1> <weight>' "
                      "per line");
  pairdir->add_option("--cols", pd_cols, "1-based column pair (default 1,2)");
  pairdir->add_flag("--orientations", pd_orientations,
                    "Report all four sign-flip orientations");
  pairdir->add_option("--k", pd_k,
                      "Extremal subsample size (default round(0.5*sqrt(n)))");
  pairdir->add_option("--lambda", pd_lambda, "Penalty weight (default 1)");
  pairdir->add_option("--gamma", pd_gamma, "Penalty exponent (default 0.5)");
  pairdir->add_option("--alpha", pd_alpha,
                      "Transform tail index (default 2)");
  pairdir->add_option("--threshold", pd_threshold,
                      "Decision dead band (default 0)");
  pairdir->add_flag("--no-transform", pd_no_transform,
                    "Skip the marginal rank transform");
  pairdir->add_option("--out", pd_out,
                      "Write the table here instead of stdout");

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Generate data from the heavy-tailed model families");
  simulate->fallthrough();
  std::string sim_model, sim_out, sim_dag, sim_spec, sim_labels;
  int sim_d = 5;
  long long sim_n = 1000;
  double sim_alpha0 = 3.0, sim_avg_degree = 3.0;
  simulate
      ->add_option("--model", sim_model,
                   "sl0|sl1|ml0|ml1|mlnoise|hr|escm|so2pair")
      ->required();
  simulate->add_option("--d", sim_d, "Node count (sl/ml models, default 5)");
  simulate->add_option("--n", sim_n, "Rows to generate (default 1000)")
      ->required();
  simulate->add_option("--alpha0", sim_alpha0,
                       "Noise tail index (sl/ml models, default 3)");
  simulate->add_option("--avg-degree", sim_avg_degree,
                       "Expected node degree (sl/ml models, default 3)");
  simulate->add_option("--out", sim_out, "Output CSV")->required();
  simulate->add_option("--emit-dag", sim_dag, "Write the generating DAG");
  simulate->add_option("--spec", sim_spec,
                       "Model spec file (mlnoise, hr, escm, so2pair)");
  simulate->add_option("--labels-out", sim_labels,
                       "Write per-row activation labels (escm model)");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "Run the seeded replication benchmark described by a config");
  bench->fallthrough();
  std::string bench_config, bench_out, bench_klist;
  bench->add_option("--config", bench_config, "Config file (key = value)")
      ->required();
  bench->add_option("--out", bench_out,
                    "Write the table here instead of stdout");
  bench->add_option("--k-list", bench_klist,
                    "Override the config's k list (comma-separated)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (transform->parsed())
      return run_transform(tr_in, tr_out, tr_alpha, global);
    if (aac->parsed())
      return run_aac(aac_in, aac_cols, aac_k, aac_lambda, aac_gamma,
                     aac_alpha, aac_no_transform, aac_dump, aac_out, global);
    if (order->parsed())
      return run_order(order_in, order_k, order_lambda, order_gamma,
                       order_alpha, order_no_transform, order_score,
                       order_scores, order_dag, order_out, global);
    if (pairdir->parsed())
      return run_pairdir(pd_in, pd_manifest, pd_cols, pd_orientations, pd_k,
                         pd_lambda, pd_gamma, pd_alpha, pd_threshold,
                         pd_no_transform, pd_out, global);
    if (simulate->parsed())
      return run_simulate(sim_model, sim_d, sim_n, sim_alpha0, sim_avg_degree,
                          sim_out, sim_dag, sim_spec, sim_labels, global);
    if (bench->parsed())
      return run_bench(bench_config, bench_out, bench_klist, global,
                       seed_opt->count() > 0, workers_opt->count() > 0);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
