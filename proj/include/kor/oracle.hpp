#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kor/graph.hpp"

namespace kor {

/// Instance-size guard for the exhaustive search.
struct OracleLimits {
  std::size_t max_nodes = 14;
  /// Bound on floor(budget_limit / b_min); also the depth cap for an infinite budget.
  std::size_t max_hops = 12;
};

/// Exact optimum over all walks (revisits allowed), ties broken by the
/// lexicographically smallest node sequence. Throws SizeGuardError when the
/// instance exceeds `limits`.
std::optional<RouteResult> kor_exact(const Graph& graph, const Query& query,
                                     const OracleLimits& limits = {});

/// The k distinct feasible walks with the smallest objectives, ascending, ties
/// by node sequence.
std::vector<RouteResult> kkr_exact(const Graph& graph, const Query& query, std::size_t k,
                                   const OracleLimits& limits = {});

bool feasible_exists(const Graph& graph, const Query& query, const OracleLimits& limits = {});

}  // namespace kor
