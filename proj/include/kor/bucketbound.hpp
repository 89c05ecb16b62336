#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kor/graph.hpp"
#include "kor/label.hpp"
#include "kor/preprocess.hpp"

namespace kor {

struct BucketBoundOptions {
  double epsilon = 0.5;
  double beta = 1.2;
};

/// Best objective any completion of `label` can reach: label.objective plus the
/// min-objective path score to `target` (+inf when unreachable).
double low_bound(const Label& label, const PathTables& tables, NodeId target);

/// The r >= 0 with beta^r * base <= low < beta^(r+1) * base. Throws
/// ContractViolation when low < base, base <= 0, beta <= 1 or low is not finite.
int bucket_index(double low, double base, double beta);

/// Label search over buckets of geometrically growing lower bounds. Stops at
/// the first complete, budget-feasible label in the lowest non-empty bucket.
std::optional<RouteResult> kor_bucketbound(const Graph& graph, const PathTables& tables,
                                           const InvertedIndex& index, const Query& query,
                                           const BucketBoundOptions& options = {},
                                           SearchStats* stats = nullptr);

/// Top-k variant with k-domination; stops after k distinct routes are found.
std::vector<RouteResult> kkr_bucketbound(const Graph& graph, const PathTables& tables,
                                         const InvertedIndex& index, const Query& query,
                                         std::size_t k, const BucketBoundOptions& options = {},
                                         SearchStats* stats = nullptr);

}  // namespace kor
