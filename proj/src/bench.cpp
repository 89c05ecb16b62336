#include "kor/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "json_io.hpp"
#include "kor/errors.hpp"
#include "kor/oracle.hpp"

namespace kor {

using nlohmann::json;

Algorithm parse_algorithm(const std::string& name) {
  if (name == "osscaling") return Algorithm::kOsScaling;
  if (name == "bucketbound") return Algorithm::kBucketBound;
  if (name == "greedy") return Algorithm::kGreedy;
  if (name == "oracle") return Algorithm::kOracle;
  throw ParameterError("unknown algorithm: " + name);
}

std::string algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::kOsScaling: return "osscaling";
    case Algorithm::kBucketBound: return "bucketbound";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kOracle: return "oracle";
  }
  return "unknown";
}

std::vector<RouteResult> run_algorithm(const AlgorithmSpec& spec, const Graph& graph,
                                       const PathTables& tables, const InvertedIndex& index,
                                       const Query& query, std::size_t k, SearchStats* stats) {
  auto one = [](std::optional<RouteResult> r) {
    return r ? std::vector<RouteResult>{std::move(*r)} : std::vector<RouteResult>{};
  };
  switch (spec.algorithm) {
    case Algorithm::kOsScaling:
      if (k == 1) return one(kor_osscaling(graph, tables, index, query, spec.osscaling, stats));
      return kkr_osscaling(graph, tables, index, query, k, spec.osscaling, stats);
    case Algorithm::kBucketBound:
      if (k == 1) {
        return one(kor_bucketbound(graph, tables, index, query, spec.bucketbound, stats));
      }
      return kkr_bucketbound(graph, tables, index, query, k, spec.bucketbound, stats);
    case Algorithm::kGreedy:
      if (k != 1) throw ParameterError("greedy has no top-k variant");
      return one(kor_greedy(graph, tables, index, query, spec.greedy, stats));
    case Algorithm::kOracle:
      if (k == 1) return one(kor_exact(graph, query));
      return kkr_exact(graph, query, k);
  }
  return {};
}

namespace {

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

GenSpec parse_gen(const json& j) {
  GenSpec g;
  g.nodes = value_or(j, "nodes", g.nodes);
  g.degree = value_or(j, "degree", g.degree);
  g.vocabulary = value_or(j, "vocab", g.vocabulary);
  g.min_keywords = value_or(j, "min_keywords", g.min_keywords);
  g.max_keywords = value_or(j, "max_keywords", g.max_keywords);
  g.zipf_exponent = value_or(j, "zipf", g.zipf_exponent);
  g.spacing = value_or(j, "spacing", g.spacing);
  g.objective_min = value_or(j, "objective_min", g.objective_min);
  g.objective_max = value_or(j, "objective_max", g.objective_max);
  g.seed = value_or(j, "seed", g.seed);
  const auto budget = value_or<std::string>(j, "budget_model", "planar");
  if (budget == "uniform") {
    g.budget_model = BudgetModel::kUniform;
  } else if (budget != "planar") {
    throw ParseError(0, "budget_model must be planar or uniform");
  }
  g.budget_min = value_or(j, "budget_min", g.budget_min);
  g.budget_max = value_or(j, "budget_max", g.budget_max);
  return g;
}

AlgorithmSpec parse_algo(const json& j) {
  AlgorithmSpec a;
  a.algorithm = parse_algorithm(j.at("algo").get<std::string>());
  a.osscaling.epsilon = a.bucketbound.epsilon = value_or(j, "epsilon", 0.5);
  a.osscaling.strategy1 = value_or(j, "opt1", true);
  a.osscaling.strategy2 = value_or(j, "opt2", true);
  a.bucketbound.beta = value_or(j, "beta", a.bucketbound.beta);
  a.greedy.alpha = value_or(j, "alpha", a.greedy.alpha);
  a.greedy.width = value_or(j, "width", a.greedy.width);
  const auto mode = value_or<std::string>(j, "mode", "keyword");
  if (mode == "budget") {
    a.greedy.mode = GreedyMode::kBudgetHard;
  } else if (mode != "keyword") {
    throw ParseError(0, "greedy mode must be keyword or budget");
  }
  a.label = value_or<std::string>(j, "name", algorithm_name(a.algorithm));
  return a;
}

std::map<std::string, double> params_of(const AlgorithmSpec& a) {
  switch (a.algorithm) {
    case Algorithm::kOsScaling:
      return {{"epsilon", a.osscaling.epsilon},
              {"opt1", a.osscaling.strategy1 ? 1.0 : 0.0},
              {"opt2", a.osscaling.strategy2 ? 1.0 : 0.0}};
    case Algorithm::kBucketBound:
      return {{"epsilon", a.bucketbound.epsilon}, {"beta", a.bucketbound.beta}};
    case Algorithm::kGreedy:
      return {{"alpha", a.greedy.alpha},
              {"width", double(a.greedy.width)},
              {"budget_hard", a.greedy.mode == GreedyMode::kBudgetHard ? 1.0 : 0.0}};
    case Algorithm::kOracle:
      return {};
  }
  return {};
}

struct Timed {
  std::optional<RouteResult> result;
  double runtime_ms = 0.0;
  SearchStats stats;
  std::string error;
};

class TableSource {
 public:
  TableSource(const Graph& graph, bool dense) : graph_(graph) {
    if (dense) dense_ = std::make_unique<PreprocessTables>(all_pairs_best(graph));
  }
  bool dense() const { return dense_ != nullptr; }

  // Lazy tables are rebuilt per run so that no run profits from another's
  // cached trees; the target column is built before the clock starts.
  const PathTables& for_run(NodeId target) {
    if (dense_) return *dense_;
    lazy_ = std::make_unique<LazyPathTables>(graph_);
    lazy_->warm_column(target);
    return *lazy_;
  }

 private:
  const Graph& graph_;
  std::unique_ptr<PreprocessTables> dense_;
  std::unique_ptr<LazyPathTables> lazy_;
};

Timed timed_run(const AlgorithmSpec& spec, const Graph& graph, TableSource& tables,
                const InvertedIndex& index, const Query& query) {
  Timed t;
  const PathTables& pt = tables.for_run(query.target);
  const auto start = std::chrono::steady_clock::now();
  try {
    auto results = run_algorithm(spec, graph, pt, index, query, 1, &t.stats);
    if (!results.empty()) t.result = std::move(results.front());
  } catch (const Error& e) {
    t.error = e.what();
  }
  const auto stop = std::chrono::steady_clock::now();
  t.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  if (t.result) {
    revalidate(*t.result, graph, query);
    if (spec.algorithm != Algorithm::kGreedy && !t.result->feasible) {
      throw InvalidRouteError(spec.label + " returned an infeasible route");
    }
  }
  return t;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

BenchConfig parse_bench_config(const std::string& json_text) {
  try {
    const json j = json::parse(json_text);
    BenchConfig c;
    if (j.contains("graph")) {
      const auto& g = j.at("graph");
      if (g.contains("file")) c.graph_file = g.at("file").get<std::string>();
      if (g.contains("generate")) c.generate = parse_gen(g.at("generate"));
    }
    const auto tables = value_or<std::string>(j, "tables", "auto");
    if (tables == "dense") {
      c.tables = TablesMode::kDense;
    } else if (tables == "lazy") {
      c.tables = TablesMode::kLazy;
    } else if (tables != "auto") {
      throw ParseError(0, "tables must be auto, dense or lazy");
    }
    if (j.contains("queries")) {
      const auto& q = j.at("queries");
      c.keyword_counts = value_or(q, "keyword_counts", c.keyword_counts);
      c.budget_limit = value_or(q, "delta", c.budget_limit);
      c.queries_per_set = value_or(q, "count", c.queries_per_set);
      c.query_seed = value_or(q, "seed", c.query_seed);
      c.reachable_queries = value_or(q, "reachable", c.reachable_queries);
    }
    if (j.contains("baseline")) {
      const auto& b = j.at("baseline");
      c.baseline = value_or(b, "enabled", c.baseline);
      c.baseline_epsilon = value_or(b, "epsilon", c.baseline_epsilon);
    }
    for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algo(a));
    return c;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("bench config: ") + e.what());
  } catch (const ParameterError& e) {
    throw ParseError(0, std::string("bench config: ") + e.what());
  }
}

void revalidate(const RouteResult& result, const Graph& graph, const Query& query) {
  const auto& nodes = result.route.nodes;
  if (nodes.empty() || nodes.front() != query.source || nodes.back() != query.target) {
    throw InvalidRouteError(result.algorithm + ": route does not join source and target");
  }
  const RouteScores s = route_scores(result.route, graph);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  if (!close(s.objective, result.objective) || !close(s.budget, result.budget)) {
    throw InvalidRouteError(result.algorithm + ": reported scores differ from the graph");
  }
  const bool feasible = covers(result.route, query.keywords, graph) && s.budget <= query.budget_limit;
  if (feasible != result.feasible) {
    throw InvalidRouteError(result.algorithm + ": reported feasibility is wrong");
  }
}

BenchReport run_benchmark(const BenchConfig& config, std::ostream* progress) {
  const Graph graph =
      config.graph_file ? load_graph_file(*config.graph_file) : generate_graph(config.generate);
  return run_benchmark(config, graph, progress);
}

BenchReport run_benchmark(const BenchConfig& config, const Graph& graph, std::ostream* progress) {
  BenchReport report;
  report.nodes = graph.node_count();
  report.edges = graph.edge_count();
  const bool dense = config.tables == TablesMode::kDense ||
                     (config.tables == TablesMode::kAuto && graph.node_count() <= kAutoDenseMaxNodes);
  TableSource tables(graph, dense);
  report.dense_tables = tables.dense();
  const InvertedIndex index = build_inverted_index(graph);
  LazyPathTables reach(graph);

  AlgorithmSpec baseline;
  baseline.label = "baseline";
  baseline.osscaling.epsilon = baseline.bucketbound.epsilon = config.baseline_epsilon;

  struct Acc {
    std::vector<double> runtimes, ratios;
    std::size_t feasible = 0;
    double labels = 0.0;
  };
  std::vector<Acc> acc(config.algorithms.size());
  std::size_t query_index = 0;
  for (std::size_t set = 0; set < config.keyword_counts.size(); ++set) {
    const auto m = config.keyword_counts[set];
    QueryGenOptions qopt;
    if (config.reachable_queries) qopt.reachability = &reach;
    const auto queries = generate_queries(graph, m, config.budget_limit, config.queries_per_set,
                                          config.query_seed + set, qopt);
    for (const auto& query : queries) {
      std::optional<double> reference;
      if (config.baseline) {
        auto b = timed_run(baseline, graph, tables, index, query);
        if (b.result) reference = b.result->objective;
      }
      for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
        const auto& spec = config.algorithms[a];
        auto t = timed_run(spec, graph, tables, index, query);
        BenchRow row;
        row.query_index = query_index;
        row.keyword_count = m;
        row.label = spec.label;
        row.query = query;
        row.runtime_ms = t.runtime_ms;
        row.stats = t.stats;
        row.error = t.error;
        row.result = t.result;
        const bool ok = t.result && t.result->feasible;
        if (ok && reference && *reference > 0.0) {
          row.ratio = t.result->objective / *reference;
          acc[a].ratios.push_back(*row.ratio);
        }
        acc[a].feasible += ok ? 1 : 0;
        acc[a].runtimes.push_back(t.runtime_ms);
        acc[a].labels += static_cast<double>(t.stats.labels_generated);
        if (progress) {
          const char* status = ok ? "ok" : t.result ? "infeasible" : "no route";
          *progress << "query " << query_index << " m=" << m << ' ' << spec.label << ": "
                    << (t.error.empty() ? status : t.error.c_str()) << ' '
                    << std::fixed << std::setprecision(2) << t.runtime_ms << " ms\n";
        }
        report.rows.push_back(std::move(row));
      }
      ++query_index;
    }
  }
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    const auto& spec = config.algorithms[a];
    AlgorithmSummary s;
    s.label = spec.label;
    s.algorithm = algorithm_name(spec.algorithm);
    s.params = params_of(spec);
    s.queries = acc[a].runtimes.size();
    s.feasible = acc[a].feasible;
    s.failure_percent =
        s.queries ? 100.0 * double(s.queries - s.feasible) / double(s.queries) : 0.0;
    s.mean_runtime_ms = mean(acc[a].runtimes);
    s.median_runtime_ms = median(acc[a].runtimes);
    if (!acc[a].ratios.empty()) s.mean_ratio = mean(acc[a].ratios);
    s.ratio_queries = acc[a].ratios.size();
    s.mean_labels_generated = s.queries ? acc[a].labels / double(s.queries) : 0.0;
    report.summaries.push_back(std::move(s));
  }
  return report;
}

std::string report_json(const BenchReport& report) {
  json j;
  j["graph"] = {{"nodes", report.nodes}, {"edges", report.edges},
                {"tables", report.dense_tables ? "dense" : "lazy"}};
  j["summaries"] = json::array();
  for (const auto& s : report.summaries) {
    j["summaries"].push_back({{"name", s.label},
                              {"algorithm", s.algorithm},
                              {"params", s.params},
                              {"queries", s.queries},
                              {"feasible", s.feasible},
                              {"failure_percent", s.failure_percent},
                              {"mean_runtime_ms", s.mean_runtime_ms},
                              {"median_runtime_ms", s.median_runtime_ms},
                              {"mean_ratio", s.mean_ratio ? json(*s.mean_ratio) : json(nullptr)},
                              {"ratio_queries", s.ratio_queries},
                              {"mean_labels_generated", s.mean_labels_generated}});
  }
  j["rows"] = json::array();
  for (const auto& r : report.rows) {
    auto row = detail::result_json(r.query, r.label, {}, r.result, r.runtime_ms,
                                   r.stats.labels_generated);
    row.erase("params");
    row["query_index"] = r.query_index;
    row["keyword_count"] = r.keyword_count;
    row["ratio"] = r.ratio ? json(*r.ratio) : json(nullptr);
    if (!r.error.empty()) row["error"] = r.error;
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2);
}

void print_report_table(const BenchReport& report, std::ostream& out) {
  out << report.nodes << " nodes, " << report.edges << " edges, "
      << (report.dense_tables ? "dense" : "lazy") << " tables\n";
  out << std::left << std::setw(16) << "algorithm" << std::right << std::setw(8) << "queries"
      << std::setw(10) << "fail %" << std::setw(12) << "mean ms" << std::setw(12) << "median ms"
      << std::setw(10) << "ratio" << std::setw(14) << "labels" << '\n';
  for (const auto& s : report.summaries) {
    std::ostringstream ratio;
    if (s.mean_ratio) {
      ratio << std::fixed << std::setprecision(4) << *s.mean_ratio;
    } else {
      ratio << '-';
    }
    out << std::left << std::setw(16) << s.label << std::right << std::setw(8) << s.queries
        << std::fixed << std::setprecision(1) << std::setw(10) << s.failure_percent
        << std::setprecision(3) << std::setw(12) << s.mean_runtime_ms << std::setw(12)
        << s.median_runtime_ms << std::setw(10) << ratio.str() << std::setprecision(0)
        << std::setw(14) << s.mean_labels_generated << '\n';
  }
}

}  // namespace kor
