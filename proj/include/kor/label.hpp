#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kor/graph.hpp"
#include "kor/preprocess.hpp"

namespace kor {

/// Bit i set <=> the i-th query keyword is covered.
using KeywordMask = std::uint32_t;

/// Query keywords mapped onto bit positions, with per-node masks.
class QueryKeywords {
 public:
  QueryKeywords(const Graph& graph, const InvertedIndex& index,
                std::span<const std::string> keywords);

  std::size_t size() const noexcept { return keywords_.size(); }
  KeywordMask full() const noexcept { return full_; }
  KeywordMask node_mask(NodeId v) const { return node_masks_[v]; }
  const std::vector<std::string>& keywords() const noexcept { return keywords_; }
  /// Nodes holding keyword i, ascending.
  std::span<const NodeId> holders(std::size_t i) const { return holders_[i]; }

 private:
  std::vector<std::string> keywords_;  // deduplicated, in query order
  std::vector<KeywordMask> node_masks_;
  std::vector<std::span<const NodeId>> holders_;
  KeywordMask full_ = 0;
};

/// Objective scaling shared by the label searches: theta = eps * o_min * b_min / delta,
/// scaled edge objective = floor(o / theta).
class ScalingContext {
 public:
  ScalingContext(const Graph& graph, double budget_limit, std::size_t keyword_count,
                 double epsilon);

  double epsilon() const noexcept { return epsilon_; }
  double theta() const noexcept { return theta_; }
  /// Upper bound on live labels per node, as a double (it overflows integers quickly).
  double label_bound() const noexcept { return label_bound_; }

  std::int64_t scaled(EdgeId edge) const { return scaled_[edge]; }
  /// floor(value / theta), snapped so that theta*q <= value < theta*(q+1) holds in
  /// floating point.
  std::int64_t scale(double value) const;

 private:
  double epsilon_;
  double theta_;
  double label_bound_;
  std::vector<std::int64_t> scaled_;
};

ScalingContext scaling_factor(const Graph& graph, const Query& query, double epsilon);

using LabelId = std::uint32_t;
inline constexpr LabelId kNoLabel = 0xffffffffu;

/// How a label was reached from its parent.
enum class Hop : std::uint8_t {
  kEdge,        ///< a single graph edge
  kBudgetPath,  ///< a spliced minimum-budget path (virtual extension)
};

/// State of one partial route ending at `node`.
struct Label {
  NodeId node = kNoNode;
  KeywordMask covered = 0;
  std::int64_t scaled_objective = 0;
  double objective = 0.0;
  double budget = 0.0;
  LabelId parent = kNoLabel;
  /// Creation order; unique within a search, used for the order tie-break.
  std::uint32_t sequence = 0;
  Hop hop = Hop::kEdge;
  bool alive = true;
};

/// True iff `a` dominates `b`: covers a superset of keywords with no larger
/// scaled objective and budget. Labels with identical fields dominate each
/// other. Throws ContractViolation when the labels sit on different nodes.
bool dominates(const Label& a, const Label& b);

/// Strict total order used by the priority queues: more covered keywords first,
/// then smaller scaled objective, then smaller budget, then node id, then sequence.
bool precedes(const Label& a, const Label& b);

/// Arena owning every label created during one search.
class LabelArena {
 public:
  const Label& operator[](LabelId id) const { return labels_[id]; }
  Label& operator[](LabelId id) { return labels_[id]; }
  std::size_t size() const noexcept { return labels_.size(); }

  LabelId add(Label label);

  /// Label at the query source covering the source's query keywords.
  LabelId initial(NodeId source, const QueryKeywords& keywords);

  /// Label for `parent` followed by `arc`.
  Label extend(LabelId parent, const Arc& arc, const ScalingContext& scaling,
               const QueryKeywords& keywords) const;

  /// Node sequence represented by the parent chain, splicing stored
  /// minimum-budget paths for virtual hops.
  Route materialize(LabelId id, const PathTables& tables) const;

 private:
  std::vector<Label> labels_;
};

/// Per-node collections of live labels. In k-mode a label is rejected or
/// evicted only when at least k live labels dominate it.
class LabelStore {
 public:
  LabelStore(std::size_t node_count, std::size_t k = 1);

  std::size_t k() const noexcept { return k_; }
  std::span<const LabelId> live(NodeId v) const { return live_[v]; }
  std::size_t max_live() const noexcept { return max_live_; }

  /// Number of live labels at label.node that dominate `label`, stopping at `limit`.
  std::size_t dominators(const Label& label, const LabelArena& arena,
                         std::size_t limit = SIZE_MAX) const;
  bool k_dominated(const Label& label, const LabelArena& arena) const {
    return dominators(label, arena, k_) >= k_;
  }

  /// Inserts `id` and kills labels it (k-)dominates. Returns how many were killed.
  std::size_t insert(LabelId id, LabelArena& arena);

 private:
  std::size_t k_;
  std::vector<std::vector<LabelId>> live_;
  std::size_t max_live_ = 0;
};

/// Standalone k-domination test against an explicit label set (all at `label.node`).
bool k_dominated(const Label& label, std::span<const Label> others, std::size_t k);

}  // namespace kor
