#include "kor/label.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "kor/errors.hpp"

namespace kor {

QueryKeywords::QueryKeywords(const Graph& graph, const InvertedIndex& index,
                             std::span<const std::string> keywords)
    : node_masks_(graph.node_count(), 0) {
  for (const auto& kw : keywords) {
    if (std::find(keywords_.begin(), keywords_.end(), kw) == keywords_.end()) {
      keywords_.push_back(kw);
    }
  }
  if (keywords_.size() > 31) throw ParameterError("at most 31 query keywords are supported");
  for (std::size_t i = 0; i < keywords_.size(); ++i) {
    const KeywordMask bit = KeywordMask{1} << i;
    full_ |= bit;
    holders_.push_back(index.postings(keywords_[i]));
    for (NodeId v : holders_.back()) node_masks_[v] |= bit;
  }
}

ScalingContext::ScalingContext(const Graph& graph, double budget_limit,
                               std::size_t keyword_count, double epsilon)
    : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (!(budget_limit > 0.0)) throw ParameterError("budget limit must be positive");
  const auto& s = graph.stats();
  if (graph.edge_count() == 0) throw ParameterError("graph has no edges");
  theta_ = epsilon * s.o_min * s.b_min / budget_limit;
  if (!(theta_ > 0.0)) throw ParameterError("scaling factor underflows");
  if (s.o_max / theta_ > 4e18) throw ParameterError("scaled objectives overflow 64-bit integers");
  label_bound_ = std::ldexp(1.0, static_cast<int>(keyword_count)) *
                 std::floor(budget_limit / s.b_min) *
                 std::floor(s.o_max * budget_limit / (epsilon * s.o_min * s.b_min));
  scaled_.assign(graph.edge_count(), 0);
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    for (const auto& arc : graph.out_arcs(static_cast<NodeId>(v))) {
      scaled_[arc.id] = scale(arc.objective);
    }
  }
}

std::int64_t ScalingContext::scale(double value) const {
  if (value == kInfinity) return INT64_MAX;
  auto q = static_cast<std::int64_t>(std::floor(value / theta_));
  while (q > 0 && theta_ * static_cast<double>(q) > value) --q;
  while (theta_ * static_cast<double>(q + 1) <= value) ++q;
  return q;
}

ScalingContext scaling_factor(const Graph& graph, const Query& query, double epsilon) {
  std::vector<std::string> unique = query.keywords;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  return ScalingContext(graph, query.budget_limit, unique.size(), epsilon);
}

bool dominates(const Label& a, const Label& b) {
  if (a.node != b.node) throw ContractViolation("domination compares labels on different nodes");
  return (a.covered & b.covered) == b.covered && a.scaled_objective <= b.scaled_objective &&
         a.budget <= b.budget;
}

bool precedes(const Label& a, const Label& b) {
  const int ca = std::popcount(a.covered);
  const int cb = std::popcount(b.covered);
  if (ca != cb) return ca > cb;
  if (a.scaled_objective != b.scaled_objective) return a.scaled_objective < b.scaled_objective;
  if (a.budget != b.budget) return a.budget < b.budget;
  if (a.node != b.node) return a.node < b.node;
  return a.sequence < b.sequence;
}

LabelId LabelArena::add(Label label) {
  label.sequence = static_cast<std::uint32_t>(labels_.size());
  labels_.push_back(label);
  return label.sequence;
}

LabelId LabelArena::initial(NodeId source, const QueryKeywords& keywords) {
  Label label;
  label.node = source;
  label.covered = keywords.node_mask(source);
  return add(label);
}

Label LabelArena::extend(LabelId parent_id, const Arc& arc, const ScalingContext& scaling,
                         const QueryKeywords& keywords) const {
  const Label& parent = labels_[parent_id];
  Label child;
  child.node = arc.dst;
  child.covered = parent.covered | keywords.node_mask(arc.dst);
  child.scaled_objective = parent.scaled_objective + scaling.scaled(arc.id);
  child.objective = parent.objective + arc.objective;
  child.budget = parent.budget + arc.budget;
  child.parent = parent_id;
  return child;
}

Route LabelArena::materialize(LabelId id, const PathTables& tables) const {
  std::vector<LabelId> chain;
  for (LabelId cur = id; cur != kNoLabel; cur = labels_[cur].parent) chain.push_back(cur);
  std::reverse(chain.begin(), chain.end());
  Route route{{labels_[chain.front()].node}};
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const Label& label = labels_[chain[i]];
    if (label.hop == Hop::kEdge) {
      route.nodes.push_back(label.node);
    } else {
      const Route hop = tables.path(PathKind::kMinBudget, labels_[chain[i - 1]].node, label.node);
      route.nodes.insert(route.nodes.end(), hop.nodes.begin() + 1, hop.nodes.end());
    }
  }
  return route;
}

LabelStore::LabelStore(std::size_t node_count, std::size_t k) : k_(k), live_(node_count) {
  if (k == 0) throw ParameterError("k must be at least 1");
}

std::size_t LabelStore::dominators(const Label& label, const LabelArena& arena,
                                   std::size_t limit) const {
  std::size_t count = 0;
  for (LabelId id : live_[label.node]) {
    const Label& other = arena[id];
    if (other.sequence == label.sequence && &arena[id] == &label) continue;
    if (dominates(other, label) && ++count >= limit) break;
  }
  return count;
}

std::size_t LabelStore::insert(LabelId id, LabelArena& arena) {
  const NodeId node = arena[id].node;
  auto& bucket = live_[node];
  std::size_t killed = 0;
  for (std::size_t i = 0; i < bucket.size();) {
    Label& other = arena[bucket[i]];
    if (dominates(arena[id], other)) {
      bool evict = k_ == 1;
      if (!evict) {
        // `id` is not in the bucket yet, so count it explicitly.
        evict = dominators(other, arena, k_ - 1) + 1 >= k_;
      }
      if (evict) {
        other.alive = false;
        bucket[i] = bucket.back();
        bucket.pop_back();
        ++killed;
        continue;
      }
    }
    ++i;
  }
  bucket.push_back(id);
  max_live_ = std::max(max_live_, bucket.size());
  return killed;
}

bool k_dominated(const Label& label, std::span<const Label> others, std::size_t k) {
  std::size_t count = 0;
  for (const auto& other : others) {
    if (&other == &label) continue;
    if (dominates(other, label) && ++count >= k) return true;
  }
  return false;
}

}  // namespace kor
