#include <random>

#include "doctest.h"
#include "kor/errors.hpp"
#include "kor/oracle.hpp"
#include "kor/osscaling.hpp"
#include "support/instances.hpp"

using namespace kor;
using kor::testing::fixture_a;

namespace {

struct Fixture {
  Graph graph = fixture_a();
  InvertedIndex index = build_inverted_index(graph);
  PreprocessTables tables = all_pairs_best(graph);
};

const Query kExample2{0, 7, {"t1", "t2"}, 10};

}  // namespace

TEST_SUITE("osscaling") {
  TEST_CASE("worked example query") {
    Fixture f;
    const auto r = kor_osscaling(f.graph, f.tables, f.index, kExample2);
    REQUIRE(r);
    CHECK(r->feasible);
    // The oracle optimum is 4 via v0 v3 v4 v7; epsilon = 0.5 allows up to 8.
    CHECK(r->objective * 0.5 <= 4.0 + 1e-9);
    CHECK(r->route.nodes == std::vector<NodeId>{0, 3, 4, 7});
    CHECK(r->algorithm == "osscaling");
    CHECK(r->params.at("epsilon") == 0.5);
  }

  TEST_CASE("unheld keyword gives no route") {
    Fixture f;
    const Query q{0, 7, {"t1", "nowhere"}, 10};
    CHECK_FALSE(kor_osscaling(f.graph, f.tables, f.index, q));
    CHECK(kkr_osscaling(f.graph, f.tables, f.index, q, 3).empty());
  }

  TEST_CASE("parameter and contract errors") {
    Fixture f;
    OsScalingOptions o;
    o.epsilon = 1.0;
    CHECK_THROWS_AS(kor_osscaling(f.graph, f.tables, f.index, kExample2, o), ParameterError);
    CHECK_THROWS_AS(kkr_osscaling(f.graph, f.tables, f.index, kExample2, 0), ParameterError);
    const Graph other = load_graph_file(kor::testing::data_path("fixture_a.graph"));
    GraphData small;
    small.keywords = {{"t1"}, {"t2"}};
    small.edges = {{0, 1, 1, 1}};
    const auto wrong = all_pairs_best(Graph(small));
    CHECK_THROWS_AS(kor_osscaling(other, wrong, f.index, kExample2), ContractViolation);
  }

  TEST_CASE("strategy 1 picks the budget-closest holder") {
    Fixture f;
    const std::vector<std::string> psi{"t3"};
    const QueryKeywords kw(f.graph, f.index, psi);
    const Query q{0, 7, psi, 10};
    const auto sc = scaling_factor(f.graph, q, 0.5);
    LabelArena arena;
    const LabelId src = arena.initial(0, kw);
    const auto v = strategy1_virtual_extend(arena, src, q, f.tables, kw, sc);
    REQUIRE(v);
    // v7 is the only t3 holder; the hop follows the min-budget path v0 v3 v5 v7.
    CHECK(v->node == 7);
    CHECK(v->budget == 5.0);
    CHECK(v->objective == 9.0);
    CHECK(v->scaled_objective == 180);
    CHECK(v->hop == Hop::kBudgetPath);
    const LabelId id = arena.add(*v);
    CHECK(arena.materialize(id, f.tables).nodes == std::vector<NodeId>{0, 3, 5, 7});
    const Query tight{0, 7, psi, 4};
    CHECK_FALSE(strategy1_virtual_extend(arena, src, tight, f.tables, kw, sc));
  }

  TEST_CASE("strategy 1 virtual labels rescore to table values") {
    Fixture f;
    const QueryKeywords kw(f.graph, f.index, kExample2.keywords);
    const auto sc = scaling_factor(f.graph, kExample2, 0.5);
    for (NodeId start = 0; start < 7; ++start) {
      LabelArena arena;
      Label l;
      l.node = start;
      l.covered = kw.node_mask(start);
      const LabelId id = arena.add(l);
      const auto v = strategy1_virtual_extend(arena, id, kExample2, f.tables, kw, sc);
      if (!v) continue;
      const Route r = arena.materialize(arena.add(*v), f.tables);
      const auto s = route_scores(r, f.graph);
      CHECK(s.objective == f.tables.os_sigma(start, v->node));
      CHECK(s.budget == f.tables.bs_sigma(start, v->node));
    }
  }

  TEST_CASE("strategy 2 prunes against rare holders") {
    Fixture f;
    Label l;
    l.node = 0;
    const std::vector<NodeId> holder{7};
    CHECK_FALSE(strategy2_prunable(l, holder, kInfinity, kInfinity, f.tables, 7));
    // Reaching v7 needs budget 5 from v0.
    CHECK(strategy2_prunable(l, holder, kInfinity, 4, f.tables, 7));
    CHECK_FALSE(strategy2_prunable(l, holder, kInfinity, 5, f.tables, 7));
    // Objective 4 is the best completion from v0.
    CHECK(strategy2_prunable(l, holder, 3.5, kInfinity, f.tables, 7));
    CHECK_FALSE(strategy2_prunable(l, holder, 4, kInfinity, f.tables, 7));
  }

  TEST_CASE("rarest keyword threshold") {
    Fixture f;
    const std::vector<std::string> psi{"t1", "t3"};
    const QueryKeywords kw(f.graph, f.index, psi);
    CHECK(rarest_keyword(kw, 8, 0.01) == std::nullopt);
    CHECK(rarest_keyword(kw, 8, 0.5) == std::optional<std::size_t>{1});
  }

  TEST_CASE("agrees with the oracle on random instances") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 200; ++it) {
      const auto inst = kor::testing::random_instance(rng);
      const auto idx = build_inverted_index(inst.graph);
      const auto tables = all_pairs_best(inst.graph);
      const auto opt = kor_exact(inst.graph, inst.query);
      for (double eps : {0.1, 0.5, 0.9}) {
        OsScalingOptions o;
        o.epsilon = eps;
        SearchStats stats;
        const auto r = kor_osscaling(inst.graph, tables, idx, inst.query, o, &stats);
        REQUIRE(r.has_value() == opt.has_value());
        if (!r) continue;
        CHECK(r->feasible);
        CHECK(kor::testing::route_is_feasible(r->route, inst.graph, inst.query));
        CHECK(r->objective * (1 - eps) <= opt->objective + 1e-9);
        CHECK(r->objective >= opt->objective - 1e-9);
        // Upper bounds strictly decrease and the last one is the answer.
        for (std::size_t i = 1; i < stats.upper_bounds.size(); ++i) {
          CHECK(stats.upper_bounds[i] < stats.upper_bounds[i - 1]);
        }
        REQUIRE_FALSE(stats.upper_bounds.empty());
        CHECK(stats.upper_bounds.back() == doctest::Approx(r->objective));
      }
    }
  }

  TEST_CASE("live labels per node stay within the label bound") {
    std::mt19937_64 rng(77);
    for (int it = 0; it < 200; ++it) {
      const auto inst = kor::testing::random_instance(rng);
      const auto idx = build_inverted_index(inst.graph);
      const auto tables = all_pairs_best(inst.graph);
      const QueryKeywords kw(inst.graph, idx, inst.query.keywords);
      const ScalingContext sc(inst.graph, inst.query.budget_limit, kw.size(), 0.5);
      SearchStats stats;
      kor_osscaling(inst.graph, tables, idx, inst.query, {}, &stats);
      CHECK(double(stats.max_labels_per_node) <= sc.label_bound());
    }
  }

  TEST_CASE("strategies do not change the objective") {
    std::mt19937_64 rng(5150);
    OsScalingOptions plain;
    plain.strategy1 = plain.strategy2 = false;
    for (int it = 0; it < 200; ++it) {
      const auto inst = kor::testing::random_instance(rng);
      const auto idx = build_inverted_index(inst.graph);
      const auto tables = all_pairs_best(inst.graph);
      const auto base = kor_osscaling(inst.graph, tables, idx, inst.query, plain);
      for (int mask = 1; mask < 4; ++mask) {
        OsScalingOptions o;
        o.strategy1 = mask & 1;
        o.strategy2 = mask & 2;
        o.rare_keyword_fraction = 1.0;  // make strategy 2 active on small graphs
        const auto r = kor_osscaling(inst.graph, tables, idx, inst.query, o);
        REQUIRE(r.has_value() == base.has_value());
        if (r) CHECK(r->objective == doctest::Approx(base->objective));
      }
    }
  }

  TEST_CASE("top-k routes") {
    Fixture f;
    const auto one = kkr_osscaling(f.graph, f.tables, f.index, kExample2, 1);
    const auto single = kor_osscaling(f.graph, f.tables, f.index, kExample2);
    REQUIRE(one.size() == 1);
    CHECK(one.front().route == single->route);
    const auto three = kkr_osscaling(f.graph, f.tables, f.index, kExample2, 3);
    const auto exact = kkr_exact(f.graph, kExample2, 3);
    REQUIRE(three.size() == 3);
    REQUIRE(exact.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(three[i].feasible);
      CHECK(three[i].objective >= exact[i].objective - 1e-9);
    }
    CHECK(three[1].objective == 6.0);
    CHECK(three[1].params.at("k") == 3.0);
  }

  TEST_CASE("top-k returns every route when fewer than k exist") {
    GraphData d;
    d.keywords = {{}, {"a"}, {}};
    d.edges = {{0, 1, 1, 1}, {1, 2, 1, 1}, {0, 2, 1, 1}};
    const Graph g(d);
    const auto idx = build_inverted_index(g);
    const auto t = all_pairs_best(g);
    const Query q{0, 2, {"a"}, 2};
    const auto exact = kkr_exact(g, q, 5);
    REQUIRE(exact.size() == 1);
    const auto r = kkr_osscaling(g, t, idx, q, 5);
    REQUIRE(r.size() == 1);
    CHECK(r.front().route.nodes == std::vector<NodeId>{0, 1, 2});
  }
}
