#include "kor/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "kor/errors.hpp"

namespace kor {
namespace {

// Distances into `target` along reversed edges, on one edge attribute.
std::vector<double> distances_to(const Graph& graph, NodeId target, bool budget) {
  std::vector<double> dist(graph.node_count(), kInfinity);
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[target] = 0.0;
  heap.emplace(0.0, target);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const InArc& in : graph.in_arcs(v)) {
      const double nd = d + (budget ? in.budget : in.objective);
      if (nd < dist[in.src]) {
        dist[in.src] = nd;
        heap.emplace(nd, in.src);
      }
    }
  }
  return dist;
}

class Enumerator {
 public:
  Enumerator(const Graph& graph, const Query& query, std::size_t k, const OracleLimits& limits)
      : graph_(graph), query_(query), k_(k) {
    validate_query(graph, query);
    if (graph.node_count() > limits.max_nodes) {
      throw SizeGuardError("oracle refuses graphs with more than " +
                           std::to_string(limits.max_nodes) + " nodes");
    }
    if (graph.edge_count() == 0) {
      max_depth_ = 0;
    } else if (std::isfinite(query.budget_limit)) {
      const double hops = std::floor(query.budget_limit / graph.stats().b_min);
      if (hops > static_cast<double>(limits.max_hops)) {
        throw SizeGuardError("oracle refuses budgets allowing more than " +
                             std::to_string(limits.max_hops) + " edges");
      }
      max_depth_ = static_cast<std::size_t>(hops);
    } else {
      max_depth_ = limits.max_hops;
    }
    for (std::size_t i = 0; i < query.keywords.size(); ++i) {
      bool dup = false;
      for (std::size_t j = 0; j < i; ++j) dup = dup || query.keywords[j] == query.keywords[i];
      if (!dup) wanted_.push_back(query.keywords[i]);
    }
    budget_to_ = distances_to(graph, query.target, true);
    objective_to_ = distances_to(graph, query.target, false);
  }

  std::vector<std::pair<double, Route>> run() {
    std::vector<bool> covered(wanted_.size(), false);
    walk_.nodes = {query_.source};
    visit(query_.source, 0.0, 0.0, mark(query_.source, covered));
    return {best_.begin(), best_.end()};
  }

 private:
  std::vector<bool> mark(NodeId v, std::vector<bool> covered) const {
    for (std::size_t i = 0; i < wanted_.size(); ++i) {
      covered[i] = covered[i] || graph_.has_keyword(v, wanted_[i]);
    }
    return covered;
  }

  double cutoff() const {
    return best_.size() < k_ ? kInfinity : std::prev(best_.end())->first;
  }

  void visit(NodeId v, double objective, double budget, const std::vector<bool>& covered) {
    if (budget + budget_to_[v] > query_.budget_limit) return;
    if (objective + objective_to_[v] > cutoff()) return;
    if (v == query_.target && std::find(covered.begin(), covered.end(), false) == covered.end()) {
      best_.emplace(objective, walk_);
      if (best_.size() > k_) best_.erase(std::prev(best_.end()));
    }
    if (walk_.size() - 1 >= max_depth_) return;
    for (const Arc& arc : graph_.out_arcs(v)) {
      walk_.nodes.push_back(arc.dst);
      visit(arc.dst, objective + arc.objective, budget + arc.budget, mark(arc.dst, covered));
      walk_.nodes.pop_back();
    }
  }

  const Graph& graph_;
  const Query& query_;
  std::size_t k_;
  std::size_t max_depth_ = 0;
  std::vector<std::string> wanted_;
  std::vector<double> budget_to_, objective_to_;
  Route walk_;
  std::set<std::pair<double, Route>> best_;
};

}  // namespace

std::optional<RouteResult> kor_exact(const Graph& graph, const Query& query,
                                     const OracleLimits& limits) {
  auto found = Enumerator(graph, query, 1, limits).run();
  if (found.empty()) return std::nullopt;
  return make_result(std::move(found.front().second), graph, query, "oracle");
}

std::vector<RouteResult> kkr_exact(const Graph& graph, const Query& query, std::size_t k,
                                   const OracleLimits& limits) {
  if (k < 1) throw ParameterError("k must be at least 1");
  std::vector<RouteResult> out;
  for (auto& [objective, route] : Enumerator(graph, query, k, limits).run()) {
    out.push_back(make_result(std::move(route), graph, query, "oracle", {{"k", double(k)}}));
  }
  return out;
}

bool feasible_exists(const Graph& graph, const Query& query, const OracleLimits& limits) {
  return kor_exact(graph, query, limits).has_value();
}

}  // namespace kor
