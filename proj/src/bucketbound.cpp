#include "kor/bucketbound.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kor/errors.hpp"
#include "search_support.hpp"

namespace kor {

double low_bound(const Label& label, const PathTables& tables, NodeId target) {
  return label.objective + tables.tau(label.node, target).objective;
}

int bucket_index(double low, double base, double beta) {
  if (!(beta > 1.0) || !(base > 0.0) || !std::isfinite(low) || low < base) {
    throw ContractViolation("bucket_index needs finite low >= base > 0 and beta > 1");
  }
  int r = static_cast<int>(std::floor(std::log(low / base) / std::log(beta)));
  r = std::max(r, 0);
  // The logarithm may land one off near a bucket edge; settle it exactly.
  while (r > 0 && std::pow(beta, r) * base > low) --r;
  while (std::pow(beta, r + 1) * base <= low) ++r;
  return r;
}

namespace {

class Search {
 public:
  Search(const Graph& graph, const PathTables& tables, const InvertedIndex& index,
         const Query& query, std::size_t k, const BucketBoundOptions& options, SearchStats* stats)
      : graph_(graph),
        tables_(tables),
        query_(query),
        options_(options),
        keywords_(graph, index, query.keywords),
        scaling_(graph, query.budget_limit, keywords_.size(), options.epsilon),
        columns_(tables, query.target),
        store_(graph.node_count(), k),
        top_(k),
        stats_(stats ? *stats : local_stats_) {
    if (!(options.beta > 1.0)) throw ParameterError("beta must exceed 1");
  }

  std::vector<Route> run() {
    if (detail::has_unheld_keyword(keywords_)) return {};
    Label source;
    source.node = query_.source;
    source.covered = keywords_.node_mask(query_.source);
    if (query_.source == query_.target) {
      if (source.covered == keywords_.full()) return {Route{{query_.source}}};
      // Lower bounds start at zero here; fall back to the smallest edge objective.
      base_ = graph_.stats().o_min;
    } else {
      base_ = columns_.os_tau[query_.source];
      if (base_ == kInfinity) return {};
    }
    consider(source);
    while (!done() && !buckets_.empty()) {
      auto it = buckets_.begin();
      current_ = it->first;
      const LabelId id = it->second.pop();
      if (it->second.empty()) buckets_.erase(it);
      const Label label = arena_[id];
      if (!label.alive) continue;
      if (complete_within_budget(label)) {
        found(id);
        if (done()) break;
      }
      ++stats_.labels_expanded;
      for (const Arc& arc : graph_.out_arcs(label.node)) {
        consider(arena_.extend(id, arc, scaling_, keywords_));
        if (done()) break;
      }
    }
    stats_.max_labels_per_node = std::max(stats_.max_labels_per_node, store_.max_live());
    return top_.routes();
  }

 private:
  bool done() const { return top_.full(); }

  bool complete_within_budget(const Label& label) const {
    return label.covered == keywords_.full() &&
           label.budget + columns_.bs_tau[label.node] <= query_.budget_limit;
  }

  void found(LabelId id) {
    const Label& label = arena_[id];
    top_.offer(label.objective + columns_.os_tau[label.node],
               detail::complete_route(arena_, id, tables_, query_.target));
  }

  void consider(const Label& label) {
    ++stats_.labels_generated;
    if (label.budget + columns_.bs_sigma[label.node] > query_.budget_limit) {
      ++stats_.labels_pruned;
      return;
    }
    if (store_.k_dominated(label, arena_)) {
      ++stats_.labels_dominated;
      return;
    }
    const LabelId id = arena_.add(label);
    stats_.labels_dominated += store_.insert(id, arena_);
    const double low = label.objective + columns_.os_tau[label.node];
    int r = low < base_ ? 0 : bucket_index(low, base_, options_.beta);
    r = std::max(r, current_);
    if (r == current_ && complete_within_budget(label)) {
      found(id);
      if (done()) return;
    }
    auto [it, inserted] = buckets_.try_emplace(r, arena_);
    it->second.push(id);
  }

  const Graph& graph_;
  const PathTables& tables_;
  const Query& query_;
  BucketBoundOptions options_;
  QueryKeywords keywords_;
  ScalingContext scaling_;
  detail::TargetColumns columns_;
  LabelArena arena_;
  LabelStore store_;
  std::map<int, detail::LabelQueue> buckets_;
  double base_ = 0.0;
  int current_ = 0;
  detail::TopRoutes top_;
  SearchStats local_stats_;
  SearchStats& stats_;
};

std::map<std::string, double> params_of(const BucketBoundOptions& o) {
  return {{"epsilon", o.epsilon}, {"beta", o.beta}};
}

}  // namespace

std::optional<RouteResult> kor_bucketbound(const Graph& graph, const PathTables& tables,
                                           const InvertedIndex& index, const Query& query,
                                           const BucketBoundOptions& options, SearchStats* stats) {
  detail::check_inputs(graph, tables, query);
  auto routes = Search(graph, tables, index, query, 1, options, stats).run();
  if (routes.empty()) return std::nullopt;
  return make_result(std::move(routes.front()), graph, query, "bucketbound", params_of(options));
}

std::vector<RouteResult> kkr_bucketbound(const Graph& graph, const PathTables& tables,
                                         const InvertedIndex& index, const Query& query,
                                         std::size_t k, const BucketBoundOptions& options,
                                         SearchStats* stats) {
  if (k < 1) throw ParameterError("k must be at least 1");
  detail::check_inputs(graph, tables, query);
  const auto routes = Search(graph, tables, index, query, k, options, stats).run();
  auto params = params_of(options);
  params["k"] = static_cast<double>(k);
  return detail::sorted_results(routes, graph, query, "bucketbound", params);
}

}  // namespace kor
