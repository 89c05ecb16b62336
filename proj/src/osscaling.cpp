#include "kor/osscaling.hpp"

#include <algorithm>
#include <cassert>
#include <tuple>

#include "kor/errors.hpp"
#include "search_support.hpp"

namespace kor {
namespace {

std::optional<Label> virtual_extend(const LabelArena& arena, LabelId parent_id,
                                    const Query& query, const PathTables& tables,
                                    const QueryKeywords& keywords, const ScalingContext& scaling,
                                    std::span<const double> budget_to_target) {
  const Label& parent = arena[parent_id];
  const KeywordMask missing = keywords.full() & ~parent.covered;
  if (missing == 0) return std::nullopt;
  NodeId best = kNoNode;
  PathScore best_hop;
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    if (!(missing & (KeywordMask{1} << i))) continue;
    for (NodeId j : keywords.holders(i)) {
      if (j == parent.node) continue;
      const PathScore hop = tables.sigma(parent.node, j);
      if (hop.budget == kInfinity) continue;
      if (parent.budget + hop.budget + budget_to_target[j] > query.budget_limit) continue;
      if (best == kNoNode || std::tie(hop.budget, j) < std::tie(best_hop.budget, best)) {
        best = j;
        best_hop = hop;
      }
    }
  }
  if (best == kNoNode) return std::nullopt;
  Label label;
  label.node = best;
  label.covered = parent.covered | keywords.node_mask(best);
  label.scaled_objective = parent.scaled_objective + scaling.scale(best_hop.objective);
  label.objective = parent.objective + best_hop.objective;
  label.budget = parent.budget + best_hop.budget;
  label.parent = parent_id;
  label.hop = Hop::kBudgetPath;
  return label;
}

class Search {
 public:
  Search(const Graph& graph, const PathTables& tables, const InvertedIndex& index,
         const Query& query, std::size_t k, const OsScalingOptions& options, SearchStats* stats)
      : graph_(graph),
        tables_(tables),
        query_(query),
        options_(options),
        k_(k),
        keywords_(graph, index, query.keywords),
        scaling_(graph, query.budget_limit, keywords_.size(), options.epsilon),
        columns_(tables, query.target),
        store_(graph.node_count(), k),
        queue_(arena_),
        top_(k),
        stats_(stats ? *stats : local_stats_) {
    if (options.strategy2) {
      if (auto rare = rarest_keyword(keywords_, graph.node_count(),
                                     options.rare_keyword_fraction)) {
        rare_.emplace(tables, keywords_.holders(*rare), query.target, KeywordMask{1} << *rare);
      }
    }
  }

  std::vector<Route> run() {
    if (detail::has_unheld_keyword(keywords_)) return {};
    Label source;
    source.node = query_.source;
    source.covered = keywords_.node_mask(query_.source);
    consider(source);
    while (!queue_.empty()) {
      const LabelId id = queue_.pop();
      if (!arena_[id].alive) continue;
      if (arena_[id].objective + columns_.os_tau[arena_[id].node] >= upper_) {
        ++stats_.labels_pruned;
        continue;
      }
      ++stats_.labels_expanded;
      for (const Arc& arc : graph_.out_arcs(arena_[id].node)) {
        consider(arena_.extend(id, arc, scaling_, keywords_));
      }
      if (options_.strategy1 && arena_[id].covered != keywords_.full()) {
        if (auto v = virtual_extend(arena_, id, query_, tables_, keywords_, scaling_,
                                    columns_.bs_sigma)) {
          ++stats_.virtual_labels;
          consider(*v);
        }
      }
    }
    stats_.max_labels_per_node = std::max(stats_.max_labels_per_node, store_.max_live());
    if (k_ == 1) {
      if (best_ == kNoLabel) return {};
      return {detail::complete_route(arena_, best_, tables_, query_.target)};
    }
    return top_.routes();
  }

 private:
  void consider(const Label& label) {
    ++stats_.labels_generated;
    const auto v = static_cast<std::size_t>(label.node);
    if (label.budget + columns_.bs_sigma[v] > query_.budget_limit ||
        !(label.objective + columns_.os_tau[v] < upper_)) {
      ++stats_.labels_pruned;
      return;
    }
    if (store_.k_dominated(label, arena_)) {
      ++stats_.labels_dominated;
      return;
    }
    if (rare_ && rare_->prunable(label, upper_, query_.budget_limit)) {
      ++stats_.labels_pruned_rare;
      return;
    }
    const LabelId id = arena_.add(label);
    stats_.labels_dominated += store_.insert(id, arena_);
    const bool complete = label.covered == keywords_.full();
    if (complete && label.budget + columns_.bs_tau[v] <= query_.budget_limit) {
      const double bound = label.objective + columns_.os_tau[v];
      if (k_ == 1) {
        assert(bound < upper_);
        upper_ = bound;
        best_ = id;
        stats_.upper_bounds.push_back(upper_);
        return;
      }
      if (top_.offer(bound, detail::complete_route(arena_, id, tables_, query_.target))) {
        if (top_.kth_objective() < upper_) {
          upper_ = top_.kth_objective();
          stats_.upper_bounds.push_back(upper_);
        }
      }
    }
    queue_.push(id);
  }

  const Graph& graph_;
  const PathTables& tables_;
  const Query& query_;
  OsScalingOptions options_;
  std::size_t k_;
  QueryKeywords keywords_;
  ScalingContext scaling_;
  detail::TargetColumns columns_;
  std::optional<RareKeywordFilter> rare_;
  LabelArena arena_;
  LabelStore store_;
  detail::LabelQueue queue_;
  double upper_ = kInfinity;
  LabelId best_ = kNoLabel;
  detail::TopRoutes top_;
  SearchStats local_stats_;
  SearchStats& stats_;
};

std::map<std::string, double> params_of(const OsScalingOptions& o) {
  return {{"epsilon", o.epsilon},
          {"opt1", o.strategy1 ? 1.0 : 0.0},
          {"opt2", o.strategy2 ? 1.0 : 0.0}};
}

}  // namespace

std::optional<RouteResult> kor_osscaling(const Graph& graph, const PathTables& tables,
                                         const InvertedIndex& index, const Query& query,
                                         const OsScalingOptions& options, SearchStats* stats) {
  detail::check_inputs(graph, tables, query);
  auto routes = Search(graph, tables, index, query, 1, options, stats).run();
  if (routes.empty()) return std::nullopt;
  return make_result(std::move(routes.front()), graph, query, "osscaling", params_of(options));
}

std::vector<RouteResult> kkr_osscaling(const Graph& graph, const PathTables& tables,
                                       const InvertedIndex& index, const Query& query,
                                       std::size_t k, const OsScalingOptions& options,
                                       SearchStats* stats) {
  if (k < 1) throw ParameterError("k must be at least 1");
  detail::check_inputs(graph, tables, query);
  const auto routes = Search(graph, tables, index, query, k, options, stats).run();
  auto params = params_of(options);
  params["k"] = static_cast<double>(k);
  return detail::sorted_results(routes, graph, query, "osscaling", params);
}

std::optional<Label> strategy1_virtual_extend(const LabelArena& arena, LabelId parent,
                                              const Query& query, const PathTables& tables,
                                              const QueryKeywords& keywords,
                                              const ScalingContext& scaling) {
  const detail::TargetColumns columns(tables, query.target);
  return virtual_extend(arena, parent, query, tables, keywords, scaling, columns.bs_sigma);
}

std::optional<std::size_t> rarest_keyword(const QueryKeywords& keywords, std::size_t node_count,
                                          double fraction) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    if (!best || keywords.holders(i).size() < keywords.holders(*best).size()) best = i;
  }
  if (best && static_cast<double>(keywords.holders(*best).size()) <
                  fraction * static_cast<double>(node_count)) {
    return best;
  }
  return std::nullopt;
}

RareKeywordFilter::RareKeywordFilter(const PathTables& tables, std::span<const NodeId> holders,
                                     NodeId target, KeywordMask keyword_bit)
    : bit_(keyword_bit) {
  const auto n = tables.node_count();
  const auto into_target = detail::TargetColumns(tables, target);
  for (NodeId l : holders) {
    tables.warm_column(l);
    Holder h;
    h.objective_to.resize(n);
    h.budget_to.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      h.objective_to[v] = tables.tau(static_cast<NodeId>(v), l).objective;
      h.budget_to[v] = tables.sigma(static_cast<NodeId>(v), l).budget;
    }
    h.objective_on = into_target.os_tau[l];
    h.budget_on = into_target.bs_sigma[l];
    holders_.push_back(std::move(h));
  }
}

bool RareKeywordFilter::prunable(const Label& label, double upper_bound,
                                 double budget_limit) const {
  if (label.covered & bit_) return false;
  const auto i = static_cast<std::size_t>(label.node);
  for (const auto& h : holders_) {
    const bool too_costly = label.objective + h.objective_to[i] + h.objective_on > upper_bound;
    const bool too_far = label.budget + h.budget_to[i] + h.budget_on > budget_limit;
    if (!too_costly && !too_far) return false;
  }
  return true;
}

bool strategy2_prunable(const Label& label, std::span<const NodeId> rare_holders,
                        double upper_bound, double budget_limit, const PathTables& tables,
                        NodeId target) {
  return RareKeywordFilter(tables, rare_holders, target, 0)
      .prunable(label, upper_bound, budget_limit);
}

}  // namespace kor
