#include "extcausal/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "extcausal/errors.hpp"
#include "extcausal/graph.hpp"
#include "extcausal/simulate.hpp"

namespace extcausal {

namespace {

std::string trim(const std::string& s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& value, const std::string& key) {
  double x;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ParameterError("bench config: key '" + key + "' has non-numeric value '" +
                         value + "'");
  return x;
}

long long parse_int(const std::string& value, const std::string& key) {
  long long x;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ParameterError("bench config: key '" + key + "' has non-integer value '" +
                         value + "'");
  return x;
}

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_rate(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

void validate_config(const BenchConfig& cfg) {
  if (cfg.model != "sl0" && cfg.model != "sl1" && cfg.model != "ml0" &&
      cfg.model != "ml1")
    throw ParameterError("bench config: unknown model '" + cfg.model +
                         "' (expected sl0, sl1, ml0 or ml1)");
  if (cfg.d < 2) throw ParameterError("bench config: d must be at least 2");
  if (cfg.n < 2) throw ParameterError("bench config: n must be at least 2");
  if (cfg.reps < 1) throw ParameterError("bench config: reps must be >= 1");
  for (int k : cfg.k_list)
    if (k < 2 || static_cast<std::size_t>(k) > cfg.n)
      throw ParameterError("bench config: k = " + std::to_string(k) +
                           " is outside 2..n");
  if (!(cfg.lambda > 0.0))
    throw ParameterError("bench config: lambda must be positive");
  if (!(cfg.gamma > 0.0))
    throw ParameterError("bench config: gamma must be positive");
  if (!(cfg.alpha > 0.0))
    throw ParameterError("bench config: alpha must be positive");
  if (!(cfg.alpha0 > 0.0))
    throw ParameterError("bench config: alpha0 must be positive");
  if (!(cfg.avg_degree > 0.0) ||
      cfg.avg_degree > static_cast<double>(cfg.d - 1))
    throw ParameterError("bench config: avg_degree must lie in (0, d-1]");
  if (cfg.workers < 1)
    throw ParameterError("bench config: workers must be >= 1");
}

ScmSpec build_scm_spec(const BenchConfig& cfg, Dag dag) {
  ScmSpec spec{std::move(dag),
               cfg.model[0] == 's' ? ScmSpec::Model::SumLinear
                                   : ScmSpec::Model::MaxLinear,
               cfg.model[2] == '0'
                   ? CoeffLaw::uniform(0.04, 0.4)
                   : CoeffLaw::lognormal_matched(0.04, 0.4, 0.95),
               cfg.alpha0};
  return spec;
}

}  // namespace

BenchConfig parse_bench_config(std::istream& in) {
  BenchConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParameterError("bench config: line " + std::to_string(lineno) +
                           " is not 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key == "model") {
      cfg.model = value;
    } else if (key == "d") {
      cfg.d = static_cast<int>(parse_int(value, key));
    } else if (key == "n") {
      cfg.n = static_cast<std::size_t>(parse_int(value, key));
    } else if (key == "reps") {
      cfg.reps = static_cast<int>(parse_int(value, key));
    } else if (key == "k_list") {
      cfg.k_list.clear();
      std::istringstream ks(value);
      std::string item;
      while (std::getline(ks, item, ','))
        cfg.k_list.push_back(static_cast<int>(parse_int(trim(item), key)));
    } else if (key == "lambda") {
      cfg.lambda = parse_real(value, key);
    } else if (key == "gamma") {
      cfg.gamma = parse_real(value, key);
    } else if (key == "alpha") {
      cfg.alpha = parse_real(value, key);
    } else if (key == "alpha0") {
      cfg.alpha0 = parse_real(value, key);
    } else if (key == "avg_degree") {
      cfg.avg_degree = parse_real(value, key);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "transform") {
      if (value == "true")
        cfg.transform = true;
      else if (value == "false")
        cfg.transform = false;
      else
        throw ParameterError(
            "bench config: transform must be 'true' or 'false'");
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_int(value, key));
    } else {
      throw ParameterError("bench config: unknown key '" + key + "'");
    }
  }
  if (cfg.k_list.empty())
    cfg.k_list.push_back(static_cast<int>(default_k(cfg.n)));
  validate_config(cfg);
  return cfg;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open bench config: " + path);
  return parse_bench_config(in);
}

std::string bench_config_text(const BenchConfig& cfg) {
  std::ostringstream out;
  out << "model = " << cfg.model << "\n";
  out << "d = " << cfg.d << "\n";
  out << "n = " << cfg.n << "\n";
  out << "reps = " << cfg.reps << "\n";
  out << "k_list = ";
  for (std::size_t i = 0; i < cfg.k_list.size(); ++i) {
    if (i) out << ",";
    out << cfg.k_list[i];
  }
  out << "\n";
  out << "lambda = " << format_real(cfg.lambda) << "\n";
  out << "gamma = " << format_real(cfg.gamma) << "\n";
  out << "alpha = " << format_real(cfg.alpha) << "\n";
  out << "alpha0 = " << format_real(cfg.alpha0) << "\n";
  out << "avg_degree = " << format_real(cfg.avg_degree) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "transform = " << (cfg.transform ? "true" : "false") << "\n";
  out << "workers = " << cfg.workers << "\n";
  return out.str();
}

BenchResult run_benchmark(const BenchConfig& cfg_in) {
  BenchConfig cfg = cfg_in;
  if (cfg.k_list.empty())
    cfg.k_list.push_back(static_cast<int>(default_k(cfg.n)));
  validate_config(cfg);
  auto t0 = std::chrono::steady_clock::now();

  BenchResult result;
  result.config = cfg;
  result.k_list = cfg.k_list;
  std::sort(result.k_list.begin(), result.k_list.end());
  result.per_k.assign(result.k_list.size(),
                      std::vector<RepOutcome>(
                          static_cast<std::size_t>(cfg.reps)));

  auto run_rep = [&](int rep) {
    std::uint64_t rep_seed = mix64(cfg.seed, static_cast<std::uint64_t>(rep));
    auto fail_all = [&](const std::string& message) {
      for (std::size_t ki = 0; ki < result.k_list.size(); ++ki) {
        RepOutcome& o = result.per_k[ki][static_cast<std::size_t>(rep)];
        o.rep = rep;
        o.seed = rep_seed;
        o.ok = false;
        o.error = message;
      }
    };
    try {
      UniformSource dag_rng(mix64(rep_seed, 1));
      Dag dag = random_dag(cfg.d, cfg.avg_degree, dag_rng);
      Sample data =
          simulate_scm(build_scm_spec(cfg, dag), cfg.n, mix64(rep_seed, 2));
      TransformResult transformed;
      const Sample* working = &data;
      if (cfg.transform) {
        transformed = pareto_transform(data, cfg.alpha);
        working = &transformed.sample;
      }
      for (std::size_t ki = 0; ki < result.k_list.size(); ++ki) {
        RepOutcome& o = result.per_k[ki][static_cast<std::size_t>(rep)];
        o.rep = rep;
        o.seed = rep_seed;
        try {
          AacConfig acfg;
          acfg.k = static_cast<std::size_t>(result.k_list[ki]);
          acfg.lambda = cfg.lambda;
          acfg.gamma = cfg.gamma;
          acfg.alpha = cfg.alpha;
          ScoreMatrix scores =
              score_matrix_from_data(*working, acfg, /*transform=*/false);
          CausalOrder order = ease_order(scores);
          ViolationRate vr = ancestral_violation_rate(dag, order);
          o.ok = true;
          o.rate = vr.rate;
          o.no_ancestral_pairs = vr.no_ancestral_pairs;
        } catch (const std::exception& e) {
          o.ok = false;
          o.error = e.what();
        }
      }
    } catch (const std::exception& e) {
      fail_all(e.what());
    }
  };

  if (cfg.workers == 1 || cfg.reps == 1) {
    for (int rep = 0; rep < cfg.reps; ++rep) run_rep(rep);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int rep = next.fetch_add(1); rep < cfg.reps;
           rep = next.fetch_add(1))
        run_rep(rep);
    };
    std::vector<std::thread> pool;
    int nthreads = std::min(cfg.workers, cfg.reps);
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t ki = 0; ki < result.k_list.size(); ++ki) {
    KAggregate agg;
    agg.k = result.k_list[ki];
    double sum = 0.0;
    for (const RepOutcome& o : result.per_k[ki]) {
      if (o.ok) {
        sum += o.rate;
        ++agg.completed;
      } else {
        result.partial = true;
      }
    }
    if (agg.completed > 0) agg.mean = sum / agg.completed;
    if (agg.completed > 1) {
      double ss = 0.0;
      for (const RepOutcome& o : result.per_k[ki])
        if (o.ok) ss += (o.rate - agg.mean) * (o.rate - agg.mean);
      agg.se = std::sqrt(ss / (agg.completed - 1)) /
               std::sqrt(static_cast<double>(agg.completed));
    }
    result.aggregates.push_back(agg);
  }
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

void emit_table(const BenchResult& result, std::ostream& out) {
  out << "model\td\tn\tk\tmean_rate\tse\treps\tseed\n";
  for (const KAggregate& agg : result.aggregates)
    out << result.config.model << "\t" << result.config.d << "\t"
        << result.config.n << "\t" << agg.k << "\t" << format_rate(agg.mean)
        << "\t" << format_rate(agg.se) << "\t" << agg.completed << "\t"
        << result.config.seed << "\n";
}

void emit_table_file(const BenchResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write table: " + path);
  emit_table(result, out);
  if (!out) throw DataError("failed while writing table: " + path);
}

std::size_t pair_default_k(std::size_t n) {
  auto k = static_cast<std::size_t>(
      std::llround(0.5 * std::sqrt(static_cast<double>(n))));
  return std::max<std::size_t>(k, 2);
}

PairBenchResult run_pair_benchmark(const std::vector<PairCase>& cases,
                                   const PairBenchConfig& cfg) {
  if (cases.empty())
    throw ParameterError("pair benchmark: no input pairs given");
  for (const PairCase& c : cases) {
    if (c.truth == PairDirection::NO_DECISION)
      throw ParameterError("pair benchmark: truth label for " + c.path +
                           " must be 1->2 or 2->1");
    if (!(c.weight > 0.0))
      throw ParameterError("pair benchmark: weight for " + c.path +
                           " must be positive");
  }

  struct CaseOutcome {
    double weight = 0.0;
    std::array<bool, 4> correct{};
  };
  std::vector<CaseOutcome> outcomes;
  PairBenchResult result;

  for (const PairCase& c : cases) {
    try {
      Sample pair = load_csv(c.path);
      if (pair.cols != 2)
        throw DataError(c.path + ": expected 2 columns, found " +
                        std::to_string(pair.cols));
      AacConfig acfg;
      acfg.k = cfg.k == 0 ? pair_default_k(pair.rows) : cfg.k;
      acfg.lambda = cfg.lambda;
      acfg.gamma = cfg.gamma;
      acfg.alpha = cfg.alpha;
      CaseOutcome outcome;
      outcome.weight = c.weight;
      std::array<Sample, 4> flips = orientations(pair);
      for (std::size_t o = 0; o < 4; ++o) {
        const Sample* working = &flips[o];
        TransformResult transformed;
        if (cfg.transform) {
          transformed = pareto_transform(flips[o], cfg.alpha);
          working = &transformed.sample;
        }
        AacPair aac =
            aac_pair(working->column(0), working->column(1), acfg);
        PairDirection decision =
            pairwise_direction(aac.tau_uv, cfg.threshold);
        outcome.correct[o] = decision == c.truth;
      }
      outcomes.push_back(outcome);
    } catch (const std::exception& e) {
      ++result.cases_failed;
      result.failures.push_back(c.path + ": " + e.what());
    }
  }

  if (outcomes.empty())
    throw DataError("pair benchmark: every input pair failed to process");
  result.cases_used = outcomes.size();
  result.renormalized = result.cases_failed > 0;

  double total_weight = 0.0;
  for (const CaseOutcome& o : outcomes) total_weight += o.weight;
  double sum_w2 = 0.0;
  for (const CaseOutcome& o : outcomes) {
    double w = o.weight / total_weight;
    sum_w2 += w * w;
  }
  for (std::size_t orient = 0; orient < 4; ++orient) {
    double acc = 0.0;
    for (const CaseOutcome& o : outcomes)
      if (o.correct[orient]) acc += o.weight / total_weight;
    result.orientation[orient].accuracy = acc;
    result.orientation[orient].half_width =
        1.96 * std::sqrt(acc * (1.0 - acc) * sum_w2);
  }
  return result;
}

}  // namespace extcausal
