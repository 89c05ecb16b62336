#include "kor/cli.hpp"

#include <chrono>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "json_io.hpp"
#include "kor/bench.hpp"
#include "kor/errors.hpp"
#include "kor/generate.hpp"
#include "kor/oracle.hpp"
#include "kor/preprocess.hpp"

namespace kor {
namespace {

struct QueryArgs {
  std::string graph;
  std::string pre;
  std::string algo = "osscaling";
  NodeId source = kNoNode;
  NodeId target = kNoNode;
  double delta = 0.0;
  std::string keywords;
  double epsilon = 0.5;
  double beta = 1.2;
  double alpha = 0.5;
  int width = 1;
  std::string mode = "keyword";
  std::size_t k = 1;
  bool no_opt1 = false;
  bool no_opt2 = false;
};

void add_query_flags(CLI::App* cmd, QueryArgs& a, bool with_algo) {
  cmd->add_option("--graph", a.graph, "Graph file (kor-graph v1)")->required();
  cmd->add_option("--pre", a.pre, "Preprocessed tables (kor-pre v1)");
  if (with_algo) {
    cmd->add_option("--algo", a.algo, "Algorithm")
        ->check(CLI::IsMember({"osscaling", "bucketbound", "greedy", "oracle"}));
  }
  cmd->add_option("--source", a.source, "Source node id")->required();
  cmd->add_option("--target", a.target, "Target node id")->required();
  cmd->add_option("--delta", a.delta, "Budget limit")->required();
  cmd->add_option("--keywords", a.keywords, "Comma-separated query keywords");
  cmd->add_option("--epsilon", a.epsilon, "Scaling parameter in (0,1)");
  cmd->add_option("--beta", a.beta, "Bucket ratio (> 1)");
  cmd->add_option("--alpha", a.alpha, "Greedy objective weight in [0,1]");
  cmd->add_option("--width", a.width, "Greedy width")->check(CLI::IsMember({1, 2}));
  cmd->add_option("--mode", a.mode, "Greedy mode")->check(CLI::IsMember({"keyword", "budget"}));
  cmd->add_option("--k", a.k, "Number of routes")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-opt1", a.no_opt1, "Disable the virtual-jump optimization");
  cmd->add_flag("--no-opt2", a.no_opt2, "Disable rare-keyword pruning");
}

std::vector<std::string> split_keywords(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::unique_ptr<PathTables> open_tables(const Graph& graph, const std::string& pre) {
  if (pre.empty()) {
    if (graph.node_count() <= kAutoDenseMaxNodes) {
      return std::make_unique<PreprocessTables>(all_pairs_best(graph));
    }
    return std::make_unique<LazyPathTables>(graph);
  }
  auto tables = std::make_unique<PreprocessTables>(load_tables_file(pre));
  if (tables->node_count() != graph.node_count()) {
    throw ParseError(0, "tables file " + pre + " does not match the graph");
  }
  return tables;
}

int run_query(const QueryArgs& a, std::ostream& out) {
  const Graph graph = load_graph_file(a.graph);
  Query query{a.source, a.target, split_keywords(a.keywords), a.delta};
  AlgorithmSpec spec;
  spec.algorithm = parse_algorithm(a.algo);
  spec.osscaling.epsilon = spec.bucketbound.epsilon = a.epsilon;
  spec.osscaling.strategy1 = !a.no_opt1;
  spec.osscaling.strategy2 = !a.no_opt2;
  spec.bucketbound.beta = a.beta;
  spec.greedy.alpha = a.alpha;
  spec.greedy.width = a.width;
  spec.greedy.mode = a.mode == "budget" ? GreedyMode::kBudgetHard : GreedyMode::kKeywordHard;
  validate_query(graph, query);

  std::unique_ptr<PathTables> tables;
  if (spec.algorithm != Algorithm::kOracle) tables = open_tables(graph, a.pre);
  const InvertedIndex index = build_inverted_index(graph);
  SearchStats stats;
  const auto start = std::chrono::steady_clock::now();
  const PreprocessTables none;
  const auto results =
      run_algorithm(spec, graph, tables ? *tables : static_cast<const PathTables&>(none), index,
                    query, a.k, &stats);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::map<std::string, double> params;
  switch (spec.algorithm) {
    case Algorithm::kOsScaling:
      params = {{"epsilon", a.epsilon},
                {"opt1", a.no_opt1 ? 0.0 : 1.0},
                {"opt2", a.no_opt2 ? 0.0 : 1.0}};
      break;
    case Algorithm::kBucketBound: params = {{"epsilon", a.epsilon}, {"beta", a.beta}}; break;
    case Algorithm::kGreedy:
      params = {{"alpha", a.alpha},
                {"width", double(a.width)},
                {"budget_hard", spec.greedy.mode == GreedyMode::kBudgetHard ? 1.0 : 0.0}};
      break;
    case Algorithm::kOracle: break;
  }
  if (a.k > 1) params["k"] = double(a.k);

  if (results.empty()) {
    auto line = detail::result_json(query, a.algo, params, std::nullopt, ms, stats.labels_generated);
    line["reason"] = "no feasible route";
    out << line.dump() << '\n';
    return kExitNoRoute;
  }
  bool any_feasible = false;
  for (const auto& r : results) {
    auto line = detail::result_json(query, a.algo, params, r, ms, stats.labels_generated);
    if (!r.feasible) line["reason"] = "route violates a constraint";
    any_feasible = any_feasible || r.feasible;
    out << line.dump() << '\n';
  }
  return any_feasible ? kExitOk : kExitNoRoute;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Keyword-aware optimal route search"};
  app.name("kor");
  app.require_subcommand(1);

  std::string graph_file, out_file, config_file;
  auto* pre = app.add_subcommand("preprocess", "Build all-pairs path tables");
  pre->add_option("--graph", graph_file, "Graph file")->required();
  pre->add_option("--out", out_file, "Output tables file")->required();

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "Answer one route query");
  add_query_flags(query, qa, true);

  QueryArgs oa;
  oa.algo = "oracle";
  auto* oracle = app.add_subcommand("oracle", "Exact answer by exhaustive search (small graphs)");
  add_query_flags(oracle, oa, false);

  GenSpec gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic graph");
  g->add_option("--nodes", gen.nodes, "Node count")->required();
  g->add_option("--degree", gen.degree, "Nearest neighbours linked per node")->required();
  g->add_option("--vocab", gen.vocabulary, "Vocabulary size")->required();
  g->add_option("--seed", gen.seed, "Random seed")->required();
  g->add_option("--spacing", gen.spacing, "Typical distance between neighbours");
  g->add_option("--out", out_file, "Output graph file")->required();

  auto* bench = app.add_subcommand("bench", "Run a benchmark grid");
  bench->add_option("--config", config_file, "JSON configuration")->required();
  bench->add_option("--out", out_file, "JSON report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*pre) {
      const Graph graph = load_graph_file(graph_file);
      if (graph.node_count() > kDenseTablesWarnNodes) {
        err << "warning: dense tables for " << graph.node_count()
            << " nodes need a lot of memory and time\n";
      }
      save_tables_file(all_pairs_best(graph), out_file);
      return kExitOk;
    }
    if (*query) return run_query(qa, out);
    if (*oracle) return run_query(oa, out);
    if (*g) {
      const Graph graph = generate_graph(gen);
      std::ofstream file(out_file);
      if (!file) throw Error("cannot write " + out_file);
      save_graph(graph, file);
      if (!file) throw Error("cannot write " + out_file);
      return kExitOk;
    }
    if (*bench) {
      std::ifstream in(config_file);
      if (!in) throw Error("cannot read " + config_file);
      std::stringstream text;
      text << in.rdbuf();
      const auto report = run_benchmark(parse_bench_config(text.str()), &err);
      std::ofstream file(out_file);
      if (!file) throw Error("cannot write " + out_file);
      file << report_json(report) << '\n';
      print_report_table(report, out);
      return kExitOk;
    }
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SizeGuardError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace kor
