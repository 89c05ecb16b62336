#pragma once

// Helpers shared by the label searches. Not part of the public interface.

#include <algorithm>
#include <iterator>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <utility>
#include <string>
#include <vector>

#include "kor/errors.hpp"
#include "kor/graph.hpp"
#include "kor/label.hpp"
#include "kor/preprocess.hpp"

namespace kor::detail {

inline void check_inputs(const Graph& graph, const PathTables& tables, const Query& query) {
  if (tables.node_count() != graph.node_count()) {
    throw ContractViolation("path tables were built for a different graph");
  }
  validate_query(graph, query);
}

/// Per-node scores of the stored paths into one target node.
struct TargetColumns {
  std::vector<double> os_tau, bs_tau, os_sigma, bs_sigma;

  TargetColumns(const PathTables& tables, NodeId target) {
    tables.warm_column(target);
    const auto n = tables.node_count();
    os_tau.resize(n);
    bs_tau.resize(n);
    os_sigma.resize(n);
    bs_sigma.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      const auto tau = tables.tau(static_cast<NodeId>(v), target);
      const auto sigma = tables.sigma(static_cast<NodeId>(v), target);
      os_tau[v] = tau.objective;
      bs_tau[v] = tau.budget;
      os_sigma[v] = sigma.objective;
      bs_sigma[v] = sigma.budget;
    }
  }
};

/// Label chain followed by the stored min-objective path to `target`.
inline Route complete_route(const LabelArena& arena, LabelId id, const PathTables& tables,
                            NodeId target) {
  Route route = arena.materialize(id, tables);
  const Route tail = tables.path(PathKind::kMinObjective, route.back(), target);
  route.nodes.insert(route.nodes.end(), tail.nodes.begin() + 1, tail.nodes.end());
  return route;
}

/// Min-queue of label ids under `precedes`.
class LabelQueue {
 public:
  explicit LabelQueue(const LabelArena& arena) : heap_(Later{&arena}) {}

  bool empty() const { return heap_.empty(); }
  void push(LabelId id) { heap_.push(id); }
  LabelId pop() {
    const LabelId id = heap_.top();
    heap_.pop();
    return id;
  }

 private:
  struct Later {
    const LabelArena* arena;
    bool operator()(LabelId a, LabelId b) const { return precedes((*arena)[b], (*arena)[a]); }
  };
  std::priority_queue<LabelId, std::vector<LabelId>, Later> heap_;
};

/// True when some query keyword is held by no node.
inline bool has_unheld_keyword(const QueryKeywords& keywords) {
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    if (keywords.holders(i).empty()) return true;
  }
  return false;
}

/// The k best distinct routes offered so far, by (objective, node sequence).
class TopRoutes {
 public:
  explicit TopRoutes(std::size_t k) : k_(k) {}

  bool full() const { return entries_.size() >= k_; }
  /// Objective of the k-th best route, +inf until k routes are held.
  double kth_objective() const { return full() ? std::prev(entries_.end())->first : kInfinity; }

  bool offer(double objective, Route route) {
    if (held_.contains(route)) return false;
    if (full() && !(objective < kth_objective())) return false;
    held_.insert(route);
    entries_.emplace(objective, std::move(route));
    if (entries_.size() > k_) {
      auto last = std::prev(entries_.end());
      held_.erase(last->second);
      entries_.erase(last);
    }
    return true;
  }

  std::vector<Route> routes() const {
    std::vector<Route> out;
    for (const auto& e : entries_) out.push_back(e.second);
    return out;
  }

 private:
  std::size_t k_;
  std::set<std::pair<double, Route>> entries_;
  std::set<Route> held_;
};

/// Results rescored from the graph, sorted by (objective, node sequence).
inline std::vector<RouteResult> sorted_results(const std::vector<Route>& routes,
                                               const Graph& graph, const Query& query,
                                               const std::string& algorithm,
                                               const std::map<std::string, double>& params) {
  std::vector<RouteResult> out;
  for (const auto& r : routes) out.push_back(make_result(r, graph, query, algorithm, params));
  std::sort(out.begin(), out.end(), [](const RouteResult& a, const RouteResult& b) {
    return std::tie(a.objective, a.route) < std::tie(b.objective, b.route);
  });
  return out;
}

}  // namespace kor::detail
