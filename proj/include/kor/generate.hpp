#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kor/graph.hpp"
#include "kor/preprocess.hpp"

namespace kor {

enum class BudgetModel {
  kPlanarDistance,  ///< Euclidean distance between the endpoints
  kUniform,         ///< uniform in [budget_min, budget_max]
};

/// Synthetic road-like graph: nodes scattered uniformly in a square, each
/// linked in both directions to its `degree` nearest neighbours.
struct GenSpec {
  std::size_t nodes = 1000;
  std::size_t degree = 4;
  std::size_t vocabulary = 1000;
  std::size_t min_keywords = 1;
  std::size_t max_keywords = 3;
  /// Keyword popularity follows a Zipf law with this exponent.
  double zipf_exponent = 1.0;
  /// Objectives are uniform in the open interval (objective_min, objective_max).
  double objective_min = 0.0;
  double objective_max = 1.0;
  BudgetModel budget_model = BudgetModel::kPlanarDistance;
  /// Mean distance between neighbouring points is about `spacing`.
  double spacing = 1.0;
  double budget_min = 1.0;
  double budget_max = 5.0;
  std::uint64_t seed = 1;
};

/// Deterministic for a given spec. Throws ParameterError for an invalid spec.
Graph generate_graph(const GenSpec& spec);

struct QueryGenOptions {
  /// When set, only (source, target) pairs whose min-budget path fits the
  /// budget limit are kept.
  const PathTables* reachability = nullptr;
  std::size_t max_attempts_per_query = 1000;
};

/// `count` queries with distinct random endpoints and `keyword_count`
/// distinct keywords drawn from node keyword lists (so popular keywords are
/// drawn more often). Throws ParameterError when the vocabulary is too small.
std::vector<Query> generate_queries(const Graph& graph, std::size_t keyword_count,
                                    double budget_limit, std::size_t count, std::uint64_t seed,
                                    const QueryGenOptions& options = {});

}  // namespace kor
