#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kor/bucketbound.hpp"
#include "kor/generate.hpp"
#include "kor/graph.hpp"
#include "kor/greedy.hpp"
#include "kor/osscaling.hpp"

namespace kor {

enum class Algorithm { kOsScaling, kBucketBound, kGreedy, kOracle };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm algo);

/// One algorithm configuration in a benchmark grid.
struct AlgorithmSpec {
  std::string label;
  Algorithm algorithm = Algorithm::kOsScaling;
  OsScalingOptions osscaling;
  BucketBoundOptions bucketbound;
  GreedyOptions greedy;
};

/// Runs one configured algorithm. k > 1 selects the top-k variant, which
/// greedy does not have (ParameterError).
std::vector<RouteResult> run_algorithm(const AlgorithmSpec& spec, const Graph& graph,
                                       const PathTables& tables, const InvertedIndex& index,
                                       const Query& query, std::size_t k = 1,
                                       SearchStats* stats = nullptr);

enum class TablesMode { kAuto, kDense, kLazy };

/// Dense tables are used up to this many nodes in auto mode.
inline constexpr std::size_t kAutoDenseMaxNodes = 1500;

struct BenchConfig {
  std::optional<std::string> graph_file;
  GenSpec generate;
  TablesMode tables = TablesMode::kAuto;
  std::vector<std::size_t> keyword_counts{2, 4, 6, 8, 10};
  double budget_limit = 30.0;
  std::size_t queries_per_set = 50;
  std::uint64_t query_seed = 7;
  /// Keep only endpoint pairs whose min-budget path fits the budget limit.
  bool reachable_queries = true;
  /// Reference run for relative ratios: OSScaling with this epsilon.
  bool baseline = true;
  double baseline_epsilon = 0.1;
  std::vector<AlgorithmSpec> algorithms;
};

/// Parses the JSON benchmark configuration. Throws ParseError on bad input.
BenchConfig parse_bench_config(const std::string& json_text);

struct BenchRow {
  std::size_t query_index = 0;
  std::size_t keyword_count = 0;
  std::string label;
  Query query;
  std::optional<RouteResult> result;
  double runtime_ms = 0.0;
  SearchStats stats;
  /// Objective relative to the baseline, when both produced a feasible route.
  std::optional<double> ratio;
  std::string error;
};

struct AlgorithmSummary {
  std::string label;
  std::string algorithm;
  std::map<std::string, double> params;
  std::size_t queries = 0;
  std::size_t feasible = 0;
  /// Queries without a feasible result, in percent.
  double failure_percent = 0.0;
  double mean_runtime_ms = 0.0;
  double median_runtime_ms = 0.0;
  std::optional<double> mean_ratio;
  std::size_t ratio_queries = 0;
  double mean_labels_generated = 0.0;
};

struct BenchReport {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  bool dense_tables = false;
  std::vector<AlgorithmSummary> summaries;
  std::vector<BenchRow> rows;
};

/// Runs every algorithm on every generated query. Per-query errors are kept
/// in the rows; a result whose reported scores disagree with the graph aborts
/// the run with InvalidRouteError.
BenchReport run_benchmark(const BenchConfig& config, std::ostream* progress = nullptr);

/// Same, on an already loaded graph.
BenchReport run_benchmark(const BenchConfig& config, const Graph& graph,
                          std::ostream* progress = nullptr);

std::string report_json(const BenchReport& report);
void print_report_table(const BenchReport& report, std::ostream& out);

/// Throws InvalidRouteError unless `result` matches a fresh rescoring of its
/// route against `graph` and `query`.
void revalidate(const RouteResult& result, const Graph& graph, const Query& query);

}  // namespace kor
