#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kor/graph.hpp"
#include "kor/label.hpp"
#include "kor/preprocess.hpp"

namespace kor {

struct OsScalingOptions {
  double epsilon = 0.5;
  /// Virtual jump to the budget-closest node holding an uncovered keyword.
  bool strategy1 = true;
  /// Prune labels that cannot reach any holder of the rarest query keyword.
  bool strategy2 = true;
  /// A keyword is rare when fewer than this fraction of nodes hold it.
  double rare_keyword_fraction = 0.01;
};

/// Label search on scaled objectives with upper-bound pruning. Returns a
/// feasible route whose objective is at most 1/(1-epsilon) times the optimum,
/// or nullopt when no feasible route exists.
std::optional<RouteResult> kor_osscaling(const Graph& graph, const PathTables& tables,
                                         const InvertedIndex& index, const Query& query,
                                         const OsScalingOptions& options = {},
                                         SearchStats* stats = nullptr);

/// Top-k variant: k-domination, and the upper bound is the k-th best objective
/// found so far. Up to k distinct feasible routes, ascending objective.
std::vector<RouteResult> kkr_osscaling(const Graph& graph, const PathTables& tables,
                                       const InvertedIndex& index, const Query& query,
                                       std::size_t k, const OsScalingOptions& options = {},
                                       SearchStats* stats = nullptr);

/// Virtual label reached from `parent` over the stored min-budget path to the
/// nearest (by budget, then id) node holding an uncovered query keyword, among
/// nodes from which the target stays within budget. nullopt if none qualifies.
std::optional<Label> strategy1_virtual_extend(const LabelArena& arena, LabelId parent,
                                              const Query& query, const PathTables& tables,
                                              const QueryKeywords& keywords,
                                              const ScalingContext& scaling);

/// Index of the query keyword with the smallest document frequency (first in
/// query order on ties) if that frequency is below fraction * |V|.
std::optional<std::size_t> rarest_keyword(const QueryKeywords& keywords, std::size_t node_count,
                                          double fraction);

/// Pruning test against the holders of one rare keyword. Caches the score
/// columns into every holder, so construction costs one column per holder.
class RareKeywordFilter {
 public:
  RareKeywordFilter(const PathTables& tables, std::span<const NodeId> holders, NodeId target,
                    KeywordMask keyword_bit);

  /// True iff `label` misses the keyword and every holder is either out of
  /// reach within the budget or cannot beat `upper_bound`.
  bool prunable(const Label& label, double upper_bound, double budget_limit) const;

 private:
  struct Holder {
    std::vector<double> objective_to;  // os_tau[v][holder]
    std::vector<double> budget_to;     // bs_sigma[v][holder]
    double objective_on;               // os_tau[holder][target]
    double budget_on;                  // bs_sigma[holder][target]
  };
  std::vector<Holder> holders_;
  KeywordMask bit_;
};

/// Convenience form of RareKeywordFilter::prunable for a label that does not
/// cover the rare keyword.
bool strategy2_prunable(const Label& label, std::span<const NodeId> rare_holders,
                        double upper_bound, double budget_limit, const PathTables& tables,
                        NodeId target);

}  // namespace kor
