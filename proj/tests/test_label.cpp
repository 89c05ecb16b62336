#include <random>

#include "doctest.h"
#include "kor/errors.hpp"
#include "kor/label.hpp"
#include "support/instances.hpp"

using namespace kor;
using kor::testing::fixture_a;

namespace {

struct Fixture {
  Graph graph = fixture_a();
  InvertedIndex index = build_inverted_index(graph);
  PreprocessTables tables = all_pairs_best(graph);
};

// Builds the label chain of `route` and returns the id of its last label.
LabelId walk(LabelArena& arena, const Graph& g, const std::vector<NodeId>& route,
             const ScalingContext& sc, const QueryKeywords& kw) {
  LabelId id = arena.initial(route.front(), kw);
  for (std::size_t i = 1; i < route.size(); ++i) {
    const Arc* arc = g.find_arc(route[i - 1], route[i]);
    REQUIRE(arc != nullptr);
    id = arena.add(arena.extend(id, *arc, sc, kw));
  }
  return id;
}

Label random_label(std::mt19937_64& rng, NodeId node) {
  Label l;
  l.node = node;
  l.covered = static_cast<KeywordMask>(rng() % 8);
  l.scaled_objective = static_cast<std::int64_t>(rng() % 4);
  l.budget = static_cast<double>(rng() % 4);
  l.objective = static_cast<double>(l.scaled_objective);
  return l;
}

}  // namespace

TEST_SUITE("label_engine") {
  TEST_CASE("scaling factor of the worked example") {
    Fixture f;
    const Query q{0, 7, {"t1", "t2"}, 10};
    const auto sc = scaling_factor(f.graph, q, 0.5);
    CHECK(sc.theta() == doctest::Approx(1.0 / 20));
    CHECK(sc.scaled(f.graph.find_arc(5, 7)->id) == 80);
    CHECK(sc.scale(sc.theta()) == 1);
    // 2^2 * floor(10 / 1) * floor(4 * 10 / (0.5 * 1 * 1))
    CHECK(sc.label_bound() == 3200.0);
    CHECK_THROWS_AS(scaling_factor(f.graph, q, 0.0), ParameterError);
    CHECK_THROWS_AS(scaling_factor(f.graph, q, 1.0), ParameterError);
    CHECK_THROWS_AS(scaling_factor(f.graph, Query{0, 7, {"t1"}, -1}, 0.5), ParameterError);
  }

  TEST_CASE("every edge of the worked example scales by 20") {
    Fixture f;
    const ScalingContext sc(f.graph, 10, 2, 0.5);
    for (const auto& e : f.graph.edges()) {
      CHECK(sc.scaled(f.graph.find_arc(e.src, e.dst)->id) == std::int64_t(e.objective * 20));
    }
  }

  TEST_CASE("initial label") {
    Fixture f;
    const std::vector<std::string> psi{"t1", "t2"};
    const QueryKeywords kw(f.graph, f.index, psi);
    LabelArena arena;
    const Label& l = arena[arena.initial(0, kw)];
    CHECK(l.covered == 0);
    CHECK(l.scaled_objective == 0);
    CHECK(l.objective == 0.0);
    CHECK(l.budget == 0.0);
    CHECK(l.parent == kNoLabel);
    const std::vector<std::string> with_source{"t4", "t1"};
    const QueryKeywords kw2(f.graph, f.index, with_source);
    CHECK(arena[arena.initial(0, kw2)].covered == 0b01);
    CHECK(kw2.full() == 0b11);
  }

  TEST_CASE("extension adds edge values and keywords") {
    Fixture f;
    const std::vector<std::string> psi{"t1", "t2"};
    const QueryKeywords kw(f.graph, f.index, psi);
    const ScalingContext sc(f.graph, 10, kw.size(), 0.5);
    LabelArena arena;
    const LabelId at3 = walk(arena, f.graph, {0, 3}, sc, kw);
    const Label next = arena.extend(at3, *f.graph.find_arc(3, 5), sc, kw);
    CHECK(next.objective - arena[at3].objective == 3.0);
    CHECK(next.budget - arena[at3].budget == 2.0);
    CHECK(next.covered == 0b11);
    CHECK(next.parent == at3);
    // v1 holds only t5, which is not queried.
    const LabelId at0 = arena.initial(0, kw);
    CHECK(arena.extend(at0, *f.graph.find_arc(0, 1), sc, kw).covered == 0);
  }

  TEST_CASE("worked example labels at v4") {
    Fixture f;
    const std::vector<std::string> psi{"t1", "t2", "t4"};
    const QueryKeywords kw(f.graph, f.index, psi);
    const ScalingContext sc(f.graph, 10, kw.size(), 0.5);
    LabelArena arena;
    const Label a = arena[walk(arena, f.graph, {0, 2, 3, 4}, sc, kw)];
    const Label b = arena[walk(arena, f.graph, {0, 2, 6, 5, 4}, sc, kw)];
    CHECK(a.covered == kw.full());
    CHECK(b.covered == kw.full());
    CHECK(a.scaled_objective == 100);
    CHECK(a.objective == 5.0);
    CHECK(a.budget == 7.0);
    CHECK(b.scaled_objective == 120);
    CHECK(b.objective == 6.0);
    CHECK(b.budget == 11.0);
    CHECK(dominates(a, b));
    CHECK_FALSE(dominates(b, a));
    CHECK(precedes(a, b));
    CHECK_FALSE(precedes(b, a));
  }

  TEST_CASE("domination needs every field") {
    Label a, b;
    a.node = b.node = 1;
    a.covered = 0b11;
    b.covered = 0b01;
    a.budget = 5;
    b.budget = 4;
    CHECK_FALSE(dominates(a, b));
    b.node = 2;
    CHECK_THROWS_AS(dominates(a, b), ContractViolation);
  }

  TEST_CASE("label order") {
    Label a, b;
    a.node = b.node = 0;
    a.covered = 0b11;
    b.covered = 0b100;
    a.scaled_objective = 50;
    CHECK(precedes(a, b));
    b.covered = 0b11;
    a.scaled_objective = b.scaled_objective = 3;
    a.sequence = 1;
    b.sequence = 2;
    CHECK(precedes(a, b));
    CHECK_FALSE(precedes(b, a));
    a.node = 4;
    CHECK(precedes(b, a));
  }

  TEST_CASE("k-domination") {
    std::vector<Label> others(3);
    Label target;
    target.node = 0;
    target.covered = 0b1;
    target.scaled_objective = 10;
    target.budget = 10;
    for (auto& o : others) o.node = 0;
    others[0].covered = 0b1;
    others[0].scaled_objective = 5;
    others[0].budget = 5;
    others[1].covered = 0b0;  // misses a keyword
    others[2].covered = 0b1;
    others[2].scaled_objective = 20;
    CHECK(k_dominated(target, others, 1));
    CHECK_FALSE(k_dominated(target, others, 2));
  }

  TEST_CASE("k-domination matches a brute-force count") {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 1000; ++it) {
      std::vector<Label> set(1 + rng() % 8);
      for (auto& l : set) l = random_label(rng, 0);
      const Label probe = random_label(rng, 0);
      const auto count = kor::testing::reference_dominators(probe, set);
      for (std::size_t k = 1; k <= 4; ++k) CHECK(k_dominated(probe, set, k) == (count >= k));
    }
  }

  TEST_CASE("store keeps the incumbent among equal labels") {
    LabelArena arena;
    LabelStore store(1);
    Label l;
    l.node = 0;
    l.covered = 1;
    l.scaled_objective = 5;
    l.budget = 2;
    const LabelId first = arena.add(l);
    store.insert(first, arena);
    CHECK(store.k_dominated(l, arena));
    CHECK(store.live(0).size() == 1);
  }

  TEST_CASE("store keeps no dominated pairs, in k modes too") {
    std::mt19937_64 rng(4);
    for (int it = 0; it < 300; ++it) {
      const std::size_t k = 1 + rng() % 3;
      LabelArena arena;
      LabelStore store(1, k);
      for (int i = 0; i < 30; ++i) {
        const Label l = random_label(rng, 0);
        if (store.k_dominated(l, arena)) continue;
        store.insert(arena.add(l), arena);
      }
      std::vector<Label> live;
      for (LabelId id : store.live(0)) {
        CHECK(arena[id].alive);
        live.push_back(arena[id]);
      }
      for (const auto& l : live) {
        CHECK(kor::testing::reference_dominators(l, live) < k);
      }
    }
  }

  TEST_CASE("label chains reproduce route scores") {
    std::mt19937_64 rng(8);
    kor::testing::InstanceOptions opt;
    opt.decimal_weights = true;
    for (int it = 0; it < 200; ++it) {
      const auto inst = kor::testing::random_instance(rng, opt);
      const auto idx = build_inverted_index(inst.graph);
      const QueryKeywords kw(inst.graph, idx, inst.query.keywords);
      const ScalingContext sc(inst.graph, inst.query.budget_limit, kw.size(), 0.5);
      const auto tables = all_pairs_best(inst.graph);
      std::vector<NodeId> route{inst.query.source};
      for (int s = 0; s < 5 && !inst.graph.out_arcs(route.back()).empty(); ++s) {
        const auto arcs = inst.graph.out_arcs(route.back());
        route.push_back(arcs[rng() % arcs.size()].dst);
      }
      LabelArena arena;
      const LabelId id = walk(arena, inst.graph, route, sc, kw);
      const Route back = arena.materialize(id, tables);
      CHECK(back.nodes == route);
      const auto rs = route_scores(back, inst.graph);
      CHECK(arena[id].objective == doctest::Approx(rs.objective));
      CHECK(arena[id].budget == doctest::Approx(rs.budget));
      std::int64_t scaled = 0;
      for (std::size_t i = 1; i < route.size(); ++i) {
        scaled += sc.scaled(inst.graph.find_arc(route[i - 1], route[i])->id);
      }
      CHECK(arena[id].scaled_objective == scaled);
      // Only query keywords are tracked.
      CHECK((arena[id].covered & ~kw.full()) == 0);
    }
  }
}
