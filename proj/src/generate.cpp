#include "kor/generate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "kor/errors.hpp"

namespace kor {
namespace {

void check_spec(const GenSpec& s) {
  if (s.nodes < 2) throw ParameterError("at least two nodes are required");
  if (s.degree < 1) throw ParameterError("degree must be at least 1");
  if (s.vocabulary < 1) throw ParameterError("vocabulary must not be empty");
  if (s.min_keywords > s.max_keywords || s.max_keywords > s.vocabulary) {
    throw ParameterError("keywords per node must satisfy min <= max <= vocabulary");
  }
  if (!(s.objective_min >= 0.0 && s.objective_min < s.objective_max)) {
    throw ParameterError("objective range must be a non-empty interval of non-negative values");
  }
  if (!(s.spacing > 0.0)) throw ParameterError("spacing must be positive");
  if (s.budget_model == BudgetModel::kUniform &&
      !(s.budget_min > 0.0 && s.budget_min <= s.budget_max)) {
    throw ParameterError("uniform budget range must be positive and ordered");
  }
}

// The `k` nearest other points of every point, via a uniform grid.
std::vector<std::vector<NodeId>> nearest_neighbours(const std::vector<Point>& pts, double side,
                                                    std::size_t k) {
  const auto n = pts.size();
  const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(std::sqrt(double(n)))));
  const double cell = side / static_cast<double>(cells);
  auto cell_of = [&](double c) {
    return std::min(cells - 1, static_cast<std::size_t>(std::max(0.0, c / cell)));
  };
  std::vector<std::vector<NodeId>> grid(cells * cells);
  for (std::size_t i = 0; i < n; ++i) {
    grid[cell_of(pts[i].y) * cells + cell_of(pts[i].x)].push_back(static_cast<NodeId>(i));
  }
  k = std::min(k, n - 1);
  std::vector<std::vector<NodeId>> out(n);
  std::vector<std::pair<double, NodeId>> found;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cx = static_cast<long>(cell_of(pts[i].x));
    const auto cy = static_cast<long>(cell_of(pts[i].y));
    found.clear();
    for (long r = 0;; ++r) {
      for (long y = cy - r; y <= cy + r; ++y) {
        for (long x = cx - r; x <= cx + r; ++x) {
          if (std::max(std::labs(x - cx), std::labs(y - cy)) != r) continue;
          if (x < 0 || y < 0 || x >= long(cells) || y >= long(cells)) continue;
          for (NodeId j : grid[std::size_t(y) * cells + std::size_t(x)]) {
            if (std::size_t(j) == i) continue;
            found.emplace_back(std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y), j);
          }
        }
      }
      if (found.size() >= k) {
        std::nth_element(found.begin(), found.begin() + long(k) - 1, found.end());
        // Points outside the rings searched so far are at least r cells away.
        if (found[k - 1].first <= double(r) * cell || r >= long(cells)) break;
      }
    }
    std::sort(found.begin(), found.end());
    for (std::size_t q = 0; q < k; ++q) out[i].push_back(found[q].second);
  }
  return out;
}

}  // namespace

Graph generate_graph(const GenSpec& spec) {
  check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  const double side = spec.spacing * std::sqrt(static_cast<double>(spec.nodes));
  std::uniform_real_distribution<double> coord(0.0, side);
  std::vector<Point> pts(spec.nodes);
  for (auto& p : pts) {
    p.x = coord(rng);
    p.y = coord(rng);
  }

  std::vector<double> weights(spec.vocabulary);
  for (std::size_t r = 0; r < spec.vocabulary; ++r) {
    weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), spec.zipf_exponent);
  }
  std::discrete_distribution<std::size_t> word(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> per_node(spec.min_keywords, spec.max_keywords);

  GraphData data;
  data.keywords.resize(spec.nodes);
  for (auto& kws : data.keywords) {
    const auto want = per_node(rng);
    std::set<std::size_t> picked;
    while (picked.size() < want) picked.insert(word(rng));
    for (auto w : picked) kws.push_back("w" + std::to_string(w));
  }

  std::uniform_real_distribution<double> objective(spec.objective_min, spec.objective_max);
  std::uniform_real_distribution<double> uniform_budget(spec.budget_min, spec.budget_max);
  auto draw_objective = [&] {
    double o = objective(rng);
    while (!(o > spec.objective_min)) o = objective(rng);
    return o;
  };
  std::set<std::pair<NodeId, NodeId>> linked;
  const auto neighbours = nearest_neighbours(pts, side, spec.degree);
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    for (NodeId j : neighbours[i]) {
      const auto a = static_cast<NodeId>(i);
      for (auto [u, v] : {std::pair{a, j}, std::pair{j, a}}) {
        if (!linked.emplace(u, v).second) continue;
        double b = spec.budget_model == BudgetModel::kPlanarDistance
                       ? std::hypot(pts[u].x - pts[v].x, pts[u].y - pts[v].y)
                       : uniform_budget(rng);
        b = std::max(b, 1e-9 * spec.spacing);
        data.edges.push_back({u, v, draw_objective(), b});
      }
    }
  }
  return Graph(std::move(data));
}

std::vector<Query> generate_queries(const Graph& graph, std::size_t keyword_count,
                                    double budget_limit, std::size_t count, std::uint64_t seed,
                                    const QueryGenOptions& options) {
  if (keyword_count < 1) throw ParameterError("at least one query keyword is required");
  if (graph.node_count() < 2) throw ParameterError("graph needs at least two nodes");
  std::set<std::string> vocabulary;
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    for (const auto& kw : graph.keywords(static_cast<NodeId>(v))) vocabulary.insert(kw);
  }
  if (keyword_count > vocabulary.size()) {
    throw ParameterError("keyword count exceeds the graph vocabulary");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(graph.node_count() - 1));
  std::vector<Query> out;
  for (std::size_t q = 0; q < count; ++q) {
    Query query;
    query.budget_limit = budget_limit;
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt == options.max_attempts_per_query) {
        throw ParameterError("no endpoint pair within the budget limit was found");
      }
      query.source = node(rng);
      query.target = node(rng);
      if (query.source == query.target) continue;
      if (options.reachability &&
          options.reachability->sigma(query.source, query.target).budget > budget_limit) {
        continue;
      }
      break;
    }
    while (query.keywords.size() < keyword_count) {
      const auto kws = graph.keywords(node(rng));
      if (kws.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, kws.size() - 1);
      const auto& kw = kws[pick(rng)];
      if (std::find(query.keywords.begin(), query.keywords.end(), kw) == query.keywords.end()) {
        query.keywords.push_back(kw);
      }
    }
    out.push_back(std::move(query));
  }
  return out;
}

}  // namespace kor
