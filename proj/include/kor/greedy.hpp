#pragma once

#include <optional>

#include "kor/graph.hpp"
#include "kor/preprocess.hpp"

namespace kor {

enum class GreedyMode {
  kKeywordHard,  ///< always cover every query keyword; the budget may be exceeded
  kBudgetHard,   ///< never exceed the budget; keywords may stay uncovered
};

struct GreedyOptions {
  /// Weight of the objective term in the node score; 1 - alpha weighs the budget term.
  double alpha = 0.5;
  /// 1 follows the best node at each step; 2 branches on the best two.
  int width = 1;
  GreedyMode mode = GreedyMode::kKeywordHard;
};

/// alpha * (objective + tau objective cur->candidate + tau objective candidate->target)
/// + (1 - alpha) * (budget + tau budget cur->candidate + tau budget candidate->target).
/// +inf when either path is missing.
double node_score(NodeId candidate, NodeId current, double objective, double budget,
                  const PathTables& tables, NodeId target, double alpha);

/// Greedy route construction. nullopt reports a failure (no route could be built).
/// The result's `feasible` flag tells whether both constraints hold.
std::optional<RouteResult> kor_greedy(const Graph& graph, const PathTables& tables,
                                      const InvertedIndex& index, const Query& query,
                                      const GreedyOptions& options = {},
                                      SearchStats* stats = nullptr);

}  // namespace kor
