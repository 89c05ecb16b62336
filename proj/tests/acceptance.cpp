// Acceptance gate: one PASS/FAIL line per criterion.
//   kor_acceptance               run every criterion
//   kor_acceptance --criterion N run criterion N only
// Exit status is non-zero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kor/bench.hpp"
#include "kor/bucketbound.hpp"
#include "kor/greedy.hpp"
#include "kor/label.hpp"
#include "kor/oracle.hpp"
#include "kor/osscaling.hpp"
#include "support/instances.hpp"

using namespace kor;

namespace {

constexpr double kTol = 1e-9;
constexpr std::size_t kInstanceCount = 2000;
constexpr std::size_t kPropertyCases = 1000;
constexpr std::uint64_t kInstanceSeed = 20240601;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << why;
    pass = false;
  }
};

/// The small instances shared by criteria 3, 4, 5 and 7, with their exact answers.
struct Prepared {
  kor::testing::Instance inst;
  InvertedIndex index;
  PreprocessTables tables;
  std::optional<RouteResult> optimum;
};

std::vector<Prepared> small_instances() {
  std::mt19937_64 rng(kInstanceSeed);
  kor::testing::InstanceOptions opt;  // |V| <= 10, weights 1..5, m <= 3, delta <= 10 b_min
  opt.edge_probability = 0.4;
  std::vector<Prepared> out;
  out.reserve(kInstanceCount);
  for (std::size_t i = 0; i < kInstanceCount; ++i) {
    auto inst = kor::testing::random_instance(rng, opt);
    auto index = build_inverted_index(inst.graph);
    auto tables = all_pairs_best(inst.graph);
    auto optimum = kor_exact(inst.graph, inst.query);
    out.push_back({std::move(inst), std::move(index), std::move(tables), std::move(optimum)});
  }
  return out;
}

bool same_route(const std::optional<RouteResult>& r, const std::vector<NodeId>& nodes,
                double objective, double budget) {
  return r && r->route.nodes == nodes && r->objective == objective && r->budget == budget;
}

Outcome criterion1() {
  Outcome o;
  const auto start = Clock::now();
  const Graph g = kor::testing::fixture_a();
  const auto a = kor_exact(g, Query{0, 7, {"t1", "t2", "t3"}, 8});
  const auto b = kor_exact(g, Query{0, 7, {"t1", "t2", "t3"}, 6});
  const double secs = seconds_since(start);
  if (!same_route(a, {0, 3, 4, 7}, 4, 7)) o.fail("delta=8 answer differs");
  if (!same_route(b, {0, 3, 5, 7}, 9, 5)) o.fail("delta=6 answer differs");
  if (!(secs < 1.0)) o.fail("runtime " + std::to_string(secs) + " s");
  o.detail << (o.pass ? "" : "; ") << "runtime " << secs << " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const Graph g = kor::testing::fixture_a();
  const auto t = all_pairs_best(g);
  if (t.os_tau(0, 7) != 4 || t.bs_tau(0, 7) != 7 || t.os_sigma(0, 7) != 9 ||
      t.bs_sigma(0, 7) != 5) {
    o.fail("table values differ");
  }
  const auto idx = build_inverted_index(g);
  OsScalingOptions opt;
  opt.epsilon = 0.5;
  const auto r = kor_osscaling(g, t, idx, Query{0, 7, {"t1", "t2"}, 10}, opt);
  if (!r || r->objective != 6 || r->budget != 10) {
    std::ostringstream why;
    why << "expected OS=6 BS=10, got ";
    if (r) {
      why << "OS=" << r->objective << " BS=" << r->budget << " route";
      for (NodeId v : r->route.nodes) why << ' ' << v;
    } else {
      why << "no route";
    }
    o.fail(why.str());
  }
  return o;
}

Outcome criterion3(const std::vector<Prepared>& set, double setup_secs) {
  Outcome o;
  const auto start = Clock::now();
  std::size_t checks = 0;
  for (double eps : {0.1, 0.3, 0.5, 0.9}) {
    OsScalingOptions opt;
    opt.epsilon = eps;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const auto& p = set[i];
      const auto r = kor_osscaling(p.inst.graph, p.tables, p.index, p.inst.query, opt);
      ++checks;
      if (r.has_value() != p.optimum.has_value() || (r && !r->feasible)) {
        o.fail("feasibility mismatch on instance " + std::to_string(i));
        continue;
      }
      if (r && !(r->objective * (1 - eps) <= p.optimum->objective + kTol)) {
        o.fail("bound violated on instance " + std::to_string(i));
      }
    }
  }
  const double secs = seconds_since(start) + setup_secs;
  if (!(secs < 120.0)) o.fail("runtime " + std::to_string(secs) + " s");
  std::size_t feasible = 0;
  for (const auto& p : set) feasible += p.optimum.has_value();
  o.detail << (o.pass ? "" : "; ") << set.size() << " instances (" << feasible << " feasible), "
           << checks << " runs, " << secs << " s";
  return o;
}

Outcome criterion4(const std::vector<Prepared>& set) {
  Outcome o;
  double worst_ratio = 0.0;
  for (double eps : {0.1, 0.3, 0.5, 0.9}) {
    OsScalingOptions os_opt;
    os_opt.epsilon = eps;
    for (double beta : {1.1, 1.2, 1.5}) {
      BucketBoundOptions bb_opt;
      bb_opt.epsilon = eps;
      bb_opt.beta = beta;
      for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& p = set[i];
        const auto os = kor_osscaling(p.inst.graph, p.tables, p.index, p.inst.query, os_opt);
        const auto bb = kor_bucketbound(p.inst.graph, p.tables, p.index, p.inst.query, bb_opt);
        if (bb.has_value() != p.optimum.has_value() || (bb && !bb->feasible)) {
          o.fail("feasibility mismatch on instance " + std::to_string(i));
          continue;
        }
        if (!bb) continue;
        worst_ratio = std::max(worst_ratio, bb->objective / os->objective / beta);
        if (!(bb->objective < beta * os->objective + kTol)) {
          o.fail("relative bound violated on instance " + std::to_string(i));
        }
        if (!(bb->objective * (1 - eps) / beta <= p.optimum->objective + kTol)) {
          o.fail("approximation bound violated on instance " + std::to_string(i));
        }
      }
    }
  }
  o.detail << (o.pass ? "" : "; ") << "max (BB/OS)/beta = " << worst_ratio;
  return o;
}

Outcome criterion5(const std::vector<Prepared>& set) {
  Outcome o;
  std::size_t returned = 0, failures = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& p = set[i];
    for (int width : {1, 2}) {
      for (double alpha : {0.0, 0.5, 1.0}) {
        for (auto mode : {GreedyMode::kKeywordHard, GreedyMode::kBudgetHard}) {
          GreedyOptions g;
          g.alpha = alpha;
          g.width = width;
          g.mode = mode;
          const auto r = kor_greedy(p.inst.graph, p.tables, p.index, p.inst.query, g);
          if (!r) {
            ++failures;
            continue;
          }
          ++returned;
          const bool truly = kor::testing::route_is_feasible(r->route, p.inst.graph, p.inst.query);
          if (r->feasible != truly) o.fail("feasible flag wrong on instance " + std::to_string(i));
          if (mode == GreedyMode::kKeywordHard &&
              !covers(r->route, p.inst.query.keywords, p.inst.graph)) {
            o.fail("keyword-hard result misses a keyword on instance " + std::to_string(i));
          }
          if (mode == GreedyMode::kBudgetHard &&
              !(route_scores(r->route, p.inst.graph).budget <= p.inst.query.budget_limit)) {
            o.fail("budget-hard result over budget on instance " + std::to_string(i));
          }
        }
      }
    }
  }
  o.detail << (o.pass ? "" : "; ") << returned << " greedy results, " << failures
           << " reported failures";

  BenchConfig c;
  c.generate.nodes = 1000;
  c.generate.vocabulary = 50;
  c.generate.seed = 11;
  c.keyword_counts = {2, 4, 6};
  c.budget_limit = 20;
  c.queries_per_set = 20;
  c.query_seed = 13;
  c.baseline_epsilon = 0.1;
  const std::vector<double> eps{0.1, 0.3, 0.5, 0.7, 0.9};
  for (double e : eps) {
    AlgorithmSpec a;
    a.algorithm = Algorithm::kOsScaling;
    a.osscaling.epsilon = e;
    a.label = "osscaling-" + std::to_string(e);
    c.algorithms.push_back(a);
  }
  const auto report = run_benchmark(c);
  double previous = 0.0;
  o.detail << "; mean ratios";
  for (const auto& s : report.summaries) {
    const double m = s.mean_ratio.value_or(std::nan(""));
    o.detail << ' ' << m;
    if (!(m >= previous - kTol)) o.fail("");
    previous = m;
  }
  o.detail << " over " << report.summaries.front().ratio_queries << " queries";
  if (!o.pass) o.detail << " (greedy or epsilon monotonicity failed)";
  return o;
}

Label random_label(std::mt19937_64& rng, NodeId node, std::uint32_t sequence) {
  Label l;
  l.node = node;
  l.covered = static_cast<KeywordMask>(rng() % 8);
  l.scaled_objective = static_cast<std::int64_t>(rng() % 3);
  l.budget = static_cast<double>(rng() % 3);
  l.objective = static_cast<double>(l.scaled_objective);
  l.sequence = sequence;
  return l;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(kInstanceSeed + 6);
  kor::testing::InstanceOptions decimal;
  decimal.decimal_weights = true;
  std::uniform_real_distribution<double> eps_dist(0.01, 0.99);

  // Scaling sandwich over every edge of random graphs and epsilons.
  for (std::size_t c = 0; c < kPropertyCases; ++c) {
    const auto inst = kor::testing::random_instance(rng, decimal);
    const ScalingContext sc(inst.graph, inst.query.budget_limit, 3, eps_dist(rng));
    for (const auto& e : inst.graph.edges()) {
      const auto q = sc.scaled(inst.graph.find_arc(e.src, e.dst)->id);
      const double th = sc.theta();
      if (!(th * double(q) <= e.objective && e.objective < th * double(q + 1))) {
        o.fail("scaling sandwich");
      }
    }
  }

  // LOW never decreases along an extension.
  std::size_t low_cases = 0;
  while (low_cases < kPropertyCases) {
    const auto inst = kor::testing::random_instance(rng, decimal);
    const auto idx = build_inverted_index(inst.graph);
    const auto tables = all_pairs_best(inst.graph);
    const QueryKeywords kw(inst.graph, idx, inst.query.keywords);
    const ScalingContext sc(inst.graph, inst.query.budget_limit, kw.size(), 0.5);
    LabelArena arena;
    LabelId id = arena.initial(inst.query.source, kw);
    for (int s = 0; s < 5; ++s) {
      const auto arcs = inst.graph.out_arcs(arena[id].node);
      if (arcs.empty()) break;
      const Label child = arena.extend(id, arcs[rng() % arcs.size()], sc, kw);
      if (low_bound(child, tables, inst.query.target) <
          low_bound(arena[id], tables, inst.query.target) - kTol) {
        o.fail("LOW decreased");
      }
      id = arena.add(child);
      ++low_cases;
    }
  }

  // Dominance: transitive, antisymmetric up to equal fields.
  for (std::size_t c = 0; c < kPropertyCases; ++c) {
    const Label a = random_label(rng, 0, 0), b = random_label(rng, 0, 1),
                d = random_label(rng, 0, 2);
    if (dominates(a, b) && dominates(b, d) && !dominates(a, d)) o.fail("dominance transitivity");
    if (dominates(a, b) && dominates(b, a) &&
        !(a.covered == b.covered && a.scaled_objective == b.scaled_objective &&
          a.budget == b.budget)) {
      o.fail("dominance antisymmetry");
    }
    if (!dominates(a, a)) o.fail("dominance reflexive on equal fields");
  }

  // Label order: irreflexive, transitive, trichotomous.
  for (std::size_t c = 0; c < kPropertyCases; ++c) {
    const Label a = random_label(rng, NodeId(rng() % 2), 0);
    const Label b = random_label(rng, NodeId(rng() % 2), 1);
    const Label d = random_label(rng, NodeId(rng() % 2), 2);
    if (precedes(a, a)) o.fail("order reflexive");
    if (precedes(a, b) + precedes(b, a) != 1) o.fail("order trichotomy");
    if (precedes(a, b) && precedes(b, d) && !precedes(a, d)) o.fail("order transitivity");
  }

  // Live labels per node bounded by the label bound; strategies leave the answer unchanged.
  std::size_t neutral_runs = 0;
  OsScalingOptions plain;
  plain.strategy1 = plain.strategy2 = false;
  for (std::size_t c = 0; c < kPropertyCases; ++c) {
    const auto inst = kor::testing::random_instance(rng);
    const auto idx = build_inverted_index(inst.graph);
    const auto tables = all_pairs_best(inst.graph);
    const QueryKeywords kw(inst.graph, idx, inst.query.keywords);
    const ScalingContext sc(inst.graph, inst.query.budget_limit, kw.size(), 0.5);
    SearchStats stats;
    const auto base = kor_osscaling(inst.graph, tables, idx, inst.query, plain, &stats);
    if (double(stats.max_labels_per_node) > sc.label_bound()) o.fail("label bound exceeded");
    for (int mask = 1; mask < 4; ++mask) {
      OsScalingOptions opt;
      opt.strategy1 = mask & 1;
      opt.strategy2 = mask & 2;
      opt.rare_keyword_fraction = 1.0;
      SearchStats s2;
      const auto r = kor_osscaling(inst.graph, tables, idx, inst.query, opt, &s2);
      ++neutral_runs;
      if (double(s2.max_labels_per_node) > sc.label_bound()) o.fail("label bound exceeded");
      if (r.has_value() != base.has_value() ||
          (r && std::abs(r->objective - base->objective) > kTol)) {
        o.fail("strategies changed the objective on case " + std::to_string(c) + " (mask " +
               std::to_string(mask) + ")");
      }
    }
  }
  o.detail << (o.pass ? "" : "; ") << kPropertyCases << " cases per property, " << neutral_runs
           << " strategy runs";
  return o;
}

Outcome criterion7(const std::vector<Prepared>& set) {
  Outcome o;
  std::size_t lists = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& p = set[i];
    const auto& g = p.inst.graph;
    const auto& q = p.inst.query;
    for (std::size_t k : {1, 2, 3, 5}) {
      const auto exact = kkr_exact(g, q, k);
      const auto os = kkr_osscaling(g, p.tables, p.index, q, k);
      const auto bb = kkr_bucketbound(g, p.tables, p.index, q, k);
      for (const auto* list : {&os, &bb}) {
        ++lists;
        for (std::size_t j = 0; j < list->size(); ++j) {
          const auto& r = (*list)[j];
          if (!r.feasible || !kor::testing::route_is_feasible(r.route, g, q)) {
            o.fail("infeasible top-k route on instance " + std::to_string(i));
          }
          if (j && (*list)[j - 1].objective > r.objective) o.fail("unsorted top-k list");
          if (j >= exact.size() || r.objective < exact[j].objective - kTol) {
            o.fail("top-k objective below the exact one on instance " + std::to_string(i));
          }
        }
      }
      if (k == 1) {
        const auto a = kor_osscaling(g, p.tables, p.index, q);
        const auto b = kor_bucketbound(g, p.tables, p.index, q);
        if (a.has_value() != !os.empty() || (a && a->route != os.front().route)) {
          o.fail("k=1 OSScaling differs on instance " + std::to_string(i));
        }
        if (b.has_value() != !bb.empty() || (b && b->route != bb.front().route)) {
          o.fail("k=1 BucketBound differs on instance " + std::to_string(i));
        }
      }
    }
  }
  o.detail << (o.pass ? "" : "; ") << lists << " top-k lists";
  return o;
}

Outcome criterion8() {
  Outcome o;
  BenchConfig c;
  c.generate.nodes = 20000;
  c.generate.degree = 4;
  c.generate.vocabulary = 200;
  c.generate.seed = 8;
  c.generate.spacing = 0.8;
  c.tables = TablesMode::kLazy;
  c.keyword_counts = {6};
  c.budget_limit = 30;
  c.queries_per_set = 10;
  c.query_seed = 88;
  c.baseline = false;
  AlgorithmSpec os, bb, g1, g2;
  os.algorithm = Algorithm::kOsScaling;
  os.label = "osscaling";
  bb.algorithm = Algorithm::kBucketBound;
  bb.label = "bucketbound";
  g1.algorithm = g2.algorithm = Algorithm::kGreedy;
  g1.label = "greedy-1";
  g2.label = "greedy-2";
  g2.greedy.width = 2;
  c.algorithms = {os, bb, g1, g2};
  const auto start = Clock::now();
  const auto report = run_benchmark(c, &std::cerr);
  for (const auto& row : report.rows) {
    if (!row.error.empty()) o.fail(row.label + " failed a query: " + row.error);
  }
  double os_ms = 0, bb_ms = 0;
  for (const auto& s : report.summaries) {
    if (s.queries != c.queries_per_set) o.fail(s.label + " did not run every query");
    if (s.label == "osscaling") os_ms = s.mean_runtime_ms;
    if (s.label == "bucketbound") bb_ms = s.mean_runtime_ms;
  }
  if (!(bb_ms <= os_ms)) o.fail("BucketBound slower than OSScaling");
  o.detail << (o.pass ? "" : "; ") << "mean ms:";
  for (const auto& s : report.summaries) {
    o.detail << ' ' << s.label << '=' << s.mean_runtime_ms << " (" << s.feasible << "/"
             << s.queries << " feasible)";
  }
  o.detail << "; total " << seconds_since(start) << " s";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: kor_acceptance [--criterion N]\n";
      return 2;
    }
  }
  const std::vector<std::string> names{
      "",
      "fixture exactness",
      "worked example replay",
      "approximation bound",
      "bucket bound",
      "greedy constraints and epsilon trend",
      "invariant suites",
      "top-k suite",
      "scalability smoke",
  };
  if (only < 0 || only > 8) {
    std::cerr << "criterion must be 1..8\n";
    return 2;
  }

  std::optional<std::vector<Prepared>> set;
  double setup_secs = 0.0;
  auto instances = [&]() -> const std::vector<Prepared>& {
    if (!set) {
      const auto start = Clock::now();
      set = small_instances();
      setup_secs = seconds_since(start);
    }
    return *set;
  };

  bool all_pass = true;
  for (int n = 1; n <= 8; ++n) {
    if (only && n != only) continue;
    Outcome out;
    try {
      switch (n) {
        case 1: out = criterion1(); break;
        case 2: out = criterion2(); break;
        case 3: { const auto& s = instances(); out = criterion3(s, setup_secs); break; }
        case 4: out = criterion4(instances()); break;
        case 5: out = criterion5(instances()); break;
        case 6: out = criterion6(); break;
        case 7: out = criterion7(instances()); break;
        case 8: out = criterion8(); break;
      }
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << n << " (" << names[n] << "): " << (out.pass ? "PASS" : "FAIL")
              << " -- " << out.detail.str() << std::endl;
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
