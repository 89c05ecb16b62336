#include "kor/greedy.hpp"

#include <algorithm>
#include <tuple>
#include <vector>

#include "kor/errors.hpp"
#include "kor/label.hpp"
#include "search_support.hpp"

namespace kor {

double node_score(NodeId candidate, NodeId current, double objective, double budget,
                  const PathTables& tables, NodeId target, double alpha) {
  const PathScore hop = tables.tau(current, candidate);
  const PathScore rest = tables.tau(candidate, target);
  if (hop.objective == kInfinity || rest.objective == kInfinity) return kInfinity;
  return alpha * (objective + hop.objective + rest.objective) +
         (1.0 - alpha) * (budget + hop.budget + rest.budget);
}

namespace {

struct Partial {
  Route route;
  double objective = 0.0;
  double budget = 0.0;
  KeywordMask missing = 0;
};

class Builder {
 public:
  Builder(const Graph& graph, const PathTables& tables, const InvertedIndex& index,
          const Query& query, const GreedyOptions& options, SearchStats& stats)
      : tables_(tables),
        query_(query),
        options_(options),
        keywords_(graph, index, query.keywords),
        columns_(tables, query.target),
        stats_(stats) {}

  std::optional<Route> run() {
    Partial start;
    start.route.nodes.push_back(query_.source);
    start.missing = keywords_.full() & ~keywords_.node_mask(query_.source);
    if (options_.mode == GreedyMode::kBudgetHard &&
        columns_.bs_sigma[query_.source] > query_.budget_limit) {
      return std::nullopt;
    }
    explore(start);
    if (!best_) return std::nullopt;
    return best_->route;
  }

 private:
  struct Candidate {
    double score;
    NodeId node;
  };

  std::vector<Candidate> ranked(const Partial& p) const {
    std::vector<Candidate> out;
    const NodeId cur = p.route.back();
    std::vector<NodeId> seen;
    for (std::size_t i = 0; i < keywords_.size(); ++i) {
      if (!(p.missing & (KeywordMask{1} << i))) continue;
      for (NodeId v : keywords_.holders(i)) seen.push_back(v);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (NodeId v : seen) {
      const double s =
          node_score(v, cur, p.objective, p.budget, tables_, query_.target, options_.alpha);
      if (s != kInfinity) out.push_back({s, v});
    }
    const auto keep = std::min<std::size_t>(out.size(), static_cast<std::size_t>(options_.width));
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(),
                      [](const Candidate& a, const Candidate& b) {
                        return std::tie(a.score, a.node) < std::tie(b.score, b.node);
                      });
    out.resize(keep);
    return out;
  }

  Partial advance(const Partial& p, PathKind kind, NodeId to) const {
    Partial next = p;
    const Route hop = tables_.path(kind, p.route.back(), to);
    const PathScore s = tables_.best(kind, p.route.back(), to);
    for (std::size_t i = 1; i < hop.size(); ++i) {
      next.route.nodes.push_back(hop.nodes[i]);
      next.missing &= ~keywords_.node_mask(hop.nodes[i]);
    }
    next.objective += s.objective;
    next.budget += s.budget;
    return next;
  }

  void finish(const Partial& p, PathKind kind) {
    const NodeId cur = p.route.back();
    if (tables_.best(kind, cur, query_.target).objective == kInfinity) return;
    Partial done = advance(p, kind, query_.target);
    const bool feasible = done.missing == 0 && done.budget <= query_.budget_limit;
    if (!best_ || std::tuple(!feasible, done.objective, done.budget) <
                      std::tuple(!best_feasible_, best_->objective, best_->budget)) {
      best_ = std::move(done);
      best_feasible_ = feasible;
    }
  }

  void explore(const Partial& p) {
    ++stats_.labels_expanded;
    const bool budget_hard = options_.mode == GreedyMode::kBudgetHard;
    const PathKind completion = budget_hard ? PathKind::kMinBudget : PathKind::kMinObjective;
    if (p.missing == 0) {
      finish(p, completion);
      return;
    }
    const auto candidates = ranked(p);
    if (candidates.empty()) {
      // Keyword-hard mode cannot cover the rest: a dead branch.
      if (budget_hard) finish(p, completion);
      return;
    }
    for (const auto& c : candidates) {
      ++stats_.labels_generated;
      if (budget_hard) {
        const double reach = p.budget + tables_.tau(p.route.back(), c.node).budget +
                             columns_.bs_sigma[c.node];
        if (reach > query_.budget_limit) {
          finish(p, completion);
          continue;
        }
      }
      explore(advance(p, PathKind::kMinObjective, c.node));
    }
  }

  const PathTables& tables_;
  const Query& query_;
  GreedyOptions options_;
  QueryKeywords keywords_;
  detail::TargetColumns columns_;
  SearchStats& stats_;
  std::optional<Partial> best_;
  bool best_feasible_ = false;
};

}  // namespace

std::optional<RouteResult> kor_greedy(const Graph& graph, const PathTables& tables,
                                      const InvertedIndex& index, const Query& query,
                                      const GreedyOptions& options, SearchStats* stats) {
  if (!(options.alpha >= 0.0 && options.alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1]");
  }
  if (options.width != 1 && options.width != 2) throw ParameterError("width must be 1 or 2");
  detail::check_inputs(graph, tables, query);
  SearchStats local;
  auto route = Builder(graph, tables, index, query, options, stats ? *stats : local).run();
  if (!route) return std::nullopt;
  const bool budget_hard = options.mode == GreedyMode::kBudgetHard;
  return make_result(std::move(*route), graph, query, "greedy",
                     {{"alpha", options.alpha},
                      {"width", static_cast<double>(options.width)},
                      {"budget_hard", budget_hard ? 1.0 : 0.0}});
}

}  // namespace kor
