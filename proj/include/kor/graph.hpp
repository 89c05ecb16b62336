#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kor {

using NodeId = std::int32_t;
using EdgeId = std::uint32_t;

inline constexpr NodeId kNoNode = -1;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Directed edge as it appears in a graph file or a builder.
struct Edge {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  double objective = 0.0;
  double budget = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Adjacency entry. `id` indexes per-edge caches such as scaled objectives.
struct Arc {
  NodeId dst = kNoNode;
  double objective = 0.0;
  double budget = 0.0;
  EdgeId id = 0;
};

/// Reverse adjacency entry: an edge `src -> (owner)`.
struct InArc {
  NodeId src = kNoNode;
  double objective = 0.0;
  double budget = 0.0;
  EdgeId id = 0;
};

struct GraphStats {
  double o_min = 0.0;
  double o_max = 0.0;
  double b_min = 0.0;
  std::size_t max_outdegree = 0;
};

/// Unvalidated graph content. `keywords[i]` belongs to node i.
struct GraphData {
  std::vector<std::vector<std::string>> keywords;
  std::vector<Edge> edges;
};

struct Violation {
  std::string message;
};

/// Empty iff the data satisfies every graph invariant.
using ValidationReport = std::vector<Violation>;

ValidationReport validate_graph(const GraphData& data);

class Graph;
ValidationReport validate_graph(const Graph& graph);

/// Immutable attributed directed graph. Node ids are dense, 0..N-1.
/// Keyword lists are stored sorted and duplicate-free.
class Graph {
 public:
  Graph() = default;

  /// Throws ConstraintError listing the first violation when `data` is invalid.
  explicit Graph(GraphData data);

  std::size_t node_count() const noexcept { return keywords_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  std::span<const std::string> keywords(NodeId v) const { return keywords_.at(v); }
  std::span<const Arc> out_arcs(NodeId v) const { return out_.at(v); }
  std::span<const InArc> in_arcs(NodeId v) const { return in_.at(v); }

  const Arc* find_arc(NodeId src, NodeId dst) const;
  bool contains(NodeId v) const noexcept {
    return v >= 0 && static_cast<std::size_t>(v) < keywords_.size();
  }
  bool has_keyword(NodeId v, const std::string& keyword) const;

  const GraphStats& stats() const noexcept { return stats_; }

  /// Edges in (src, dst) order; suitable for serialization.
  std::vector<Edge> edges() const;
  GraphData data() const;

 private:
  std::vector<std::vector<std::string>> keywords_;
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<InArc>> in_;
  std::size_t edge_count_ = 0;
  GraphStats stats_;
};

struct Route {
  std::vector<NodeId> nodes;

  bool empty() const noexcept { return nodes.empty(); }
  std::size_t size() const noexcept { return nodes.size(); }
  NodeId front() const { return nodes.front(); }
  NodeId back() const { return nodes.back(); }

  friend auto operator<=>(const Route&, const Route&) = default;
};

struct RouteScores {
  double objective = 0.0;
  double budget = 0.0;
};

/// Keyword-aware route query: start, end, required keywords, budget limit.
struct Query {
  NodeId source = kNoNode;
  NodeId target = kNoNode;
  std::vector<std::string> keywords;
  double budget_limit = 0.0;
};

/// Throws ParameterError when the query does not fit `graph`.
void validate_query(const Graph& graph, const Query& query);

/// Per-search instrumentation.
struct SearchStats {
  std::uint64_t labels_generated = 0;
  std::uint64_t labels_expanded = 0;
  std::uint64_t labels_dominated = 0;
  std::uint64_t labels_pruned = 0;
  std::uint64_t labels_pruned_rare = 0;
  std::uint64_t virtual_labels = 0;
  std::size_t max_labels_per_node = 0;
  /// Successive upper-bound values (OSScaling only).
  std::vector<double> upper_bounds;
};

struct RouteResult {
  Route route;
  double objective = 0.0;
  double budget = 0.0;
  bool feasible = false;
  std::string algorithm;
  std::map<std::string, double> params;
};

/// Sums of objective and budget values along consecutive edges.
/// Throws InvalidRouteError when an edge is missing.
RouteScores route_scores(const Route& route, const Graph& graph);

bool covers(const Route& route, std::span<const std::string> keywords, const Graph& graph);

/// Builds a RouteResult whose scores and feasibility are recomputed from the graph.
RouteResult make_result(Route route, const Graph& graph, const Query& query, std::string algorithm,
                        std::map<std::string, double> params = {});

Graph load_graph(std::istream& in);
Graph load_graph_file(const std::string& path);
void save_graph(const Graph& graph, std::ostream& out);

/// Observed trip volume between two nodes.
struct TripCount {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  std::uint64_t count = 0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Upper clamp for a visit probability so that log(1/Pr) stays positive.
inline constexpr double kMaxVisitProbability = 1.0 - 1e-9;

/// Popularity graph: objective = log(1/Pr) with Pr = count / total_trips,
/// budget = Euclidean distance between endpoint coordinates. Minimizing the
/// summed objective maximizes the product of visit probabilities.
Graph build_from_trajectories(std::span<const TripCount> trips, std::uint64_t total_trips,
                              std::span<const Point> coordinates,
                              std::vector<std::vector<std::string>> keywords);

}  // namespace kor
