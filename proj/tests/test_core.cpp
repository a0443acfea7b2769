#include <algorithm>

#include "common.hpp"
#include "doctest.h"
#include "teamlog/core.hpp"
#include "teamlog/semantics.hpp"

using namespace teamlog;
using teamlog::testing::pure_set;
using teamlog::testing::pset;

TEST_CASE("relation canonical form") {
  Relation r(2, {{1, 0}, {0, 1}, {1, 0}});
  CHECK(r.tuples == std::vector<Tuple>{{0, 1}, {1, 0}});
  CHECK(r.contains({1, 0}));
  CHECK(!r.contains({1, 1}));
  CHECK(Relation::empty(3).arity == 3);
  CHECK(Relation::empty(1) != Relation::empty(2));
  CHECK(Relation::point() == Relation(0, {Tuple{}}));
  CHECK_THROWS_WITH_AS(Relation(1, {{0, 1}}), "relation tuple length does not match arity",
                       Error);
}

TEST_CASE("team_of_relation") {
  Team t = team_of_relation(Relation(2, {{0, 1}}));
  CHECK(t.domain == std::vector<std::string>{"v0", "v1"});
  CHECK(t.rows == std::vector<Tuple>{{0, 1}});

  Team e = team_of_relation(Relation::empty(1));
  CHECK(e.domain == std::vector<std::string>{"v0"});
  CHECK(e.is_empty());

  Team p = team_of_relation(Relation::point());
  CHECK(p.domain.empty());
  CHECK(p.rows == std::vector<Tuple>{Tuple{}});
}

TEST_CASE("relation_of_team") {
  Team x({"x", "y"}, {{0, 1}});
  CHECK(relation_of_team(x, {"y", "x"}) == Relation(2, {{1, 0}}));

  Team rep({"x"}, {{0}, {1}});
  CHECK(relation_of_team(rep, {"x", "x"}) == Relation(2, {{0, 0}, {1, 1}}));

  Team e({"x"}, {});
  CHECK(relation_of_team(e, {"x"}) == Relation::empty(1));
  CHECK_THROWS_WITH_AS(relation_of_team(e, {"zz"}), "variable not in team domain: zz", Error);
}

TEST_CASE("round trip relation -> team -> relation") {
  Structure a = pure_set(3);
  for (int n = 0; n <= 2; ++n) {
    RelationFamily all = all_relations(a, n);
    for (const Relation& r : all.relations) {
      if (r.arity != n) continue;
      std::vector<std::string> vars;
      for (int i = 0; i < n; ++i) vars.push_back("v" + std::to_string(i));
      CHECK(relation_of_team(team_of_relation(r), vars) == r);
    }
  }
}

TEST_CASE("supplement") {
  Team start({}, {Tuple{}});
  Team two = supplement(start, "v0", [](const Assignment&) {
    return std::vector<Elem>{0, 1};
  });
  CHECK(two == Team({"v0"}, {{0}, {1}}));

  Team empty({"v0"}, {});
  Team se = supplement(empty, "v1", [](const Assignment&) {
    return std::vector<Elem>{0};
  });
  CHECK(se.domain == std::vector<std::string>{"v0", "v1"});
  CHECK(se.is_empty());

  Team over = supplement(Team({"v0"}, {{0}}), "v0", [](const Assignment&) {
    return std::vector<Elem>{1};
  });
  CHECK(over == Team({"v0"}, {{1}}));

  CHECK_THROWS_WITH_AS(supplement(Team({"v0"}, {{0}}), "v1",
                                  [](const Assignment&) { return std::vector<Elem>{}; }),
                       "supplement function must return a non-empty set on every row", Error);
}

TEST_CASE("duplicate_team") {
  Structure a = pure_set(2);
  CHECK(duplicate_team(Team({}, {Tuple{}}), a, "v0") == Team({"v0"}, {{0}, {1}}));
  CHECK(duplicate_team(Team({"v0"}, {}), a, "v1").is_empty());
  CHECK(duplicate_team(Team({"v0"}, {{0}}), a, "v1") ==
        Team({"v0", "v1"}, {{0, 0}, {0, 1}}));
}

TEST_CASE("restrict_team") {
  Team x({"x", "y"}, {{0, 0}, {0, 1}});
  CHECK(restrict_team(x, {"x"}) == Team({"x"}, {{0}}));
  CHECK(restrict_team(x, {"x", "y"}) == x);
  CHECK(restrict_team(x, {}) == Team({}, {Tuple{}}));
  CHECK(restrict_team(Team({"x"}, {}), {}) == Team({}, {}));
  CHECK_THROWS_WITH_AS(restrict_team(x, {"z"}), "restriction variable not in team domain: z",
                       Error);

  // (X|D)|E = X|E for E within D
  Team big({"x", "y", "z"}, {{0, 1, 0}, {1, 1, 1}, {0, 0, 1}});
  CHECK(restrict_team(restrict_team(big, {"x", "y"}), {"x"}) == restrict_team(big, {"x"}));
}

TEST_CASE("project") {
  Relation r(2, {{0, 1}});
  CHECK(project(r, {1, 0}) == Relation(2, {{1, 0}}));
  CHECK(project(r, {0, 0}) == Relation(2, {{0, 0}}));
  CHECK(project(r, {}) == Relation::point());
  CHECK(project(Relation::empty(2), {}) == Relation::empty(0));
  CHECK_THROWS_WITH_AS(project(r, {2}), "projection index out of range", Error);
}

TEST_CASE("product") {
  CHECK(product(Relation(1, {{0}}), Relation(1, {{1}})) == Relation(2, {{0, 1}}));
  Relation r(2, {{0, 1}, {1, 1}});
  CHECK(product(Relation::point(), r) == r);
  CHECK(product(r, Relation::point()) == r);
  CHECK(product(Relation::empty(1), r) == Relation::empty(3));
  CHECK(product(r, Relation::empty(2)) == Relation::empty(4));
}

TEST_CASE("join_k") {
  CHECK(join_k(Relation(2, {{0, 1}}), Relation(2, {{1, 2}}), 1) == Relation(3, {{0, 1, 2}}));
  CHECK(join_k(Relation(2, {{0, 1}}), Relation(2, {{2, 0}}), 1) == Relation::empty(3));
  Relation r(1, {{0}, {1}}), s(2, {{1, 2}});
  CHECK(join_k(r, s, 0) == product(r, s));
  Relation p(2, {{0, 1}, {2, 2}}), q(2, {{0, 1}, {1, 1}});
  CHECK(join_k(p, q, 2) == intersect(p, q));
  CHECK_THROWS_WITH_AS(join_k(r, s, 2), "join overlap exceeds an arity", Error);
}

TEST_CASE("diagonal") {
  Structure a = pure_set(2);
  CHECK(diagonal(a, 0) == Relation::point());
  CHECK(diagonal(a, 1) == Relation(2, {{0, 0}, {1, 1}}));
  CHECK(diagonal(a, 2) ==
        Relation(4, {{0, 0, 0, 0}, {0, 1, 0, 1}, {1, 0, 1, 0}, {1, 1, 1, 1}}));
}

TEST_CASE("join identity against the product/diagonal/projection composite") {
  // X join_k Y = Pr((X x Y) meet (A^n x Diag^k x A^m)) over every pair in a
  // capped family, |A| = 3, arities <= 3
  Structure a = pure_set(3);
  RelationFamily seeds;
  seeds.relations = {Relation(2, {{0, 1}}), Relation(1, {{0}, {2}}),
                     Relation(3, {{0, 1, 2}, {2, 2, 0}})};
  seeds.normalize();
  ClosureResult c = closure(a, seeds, 3);
  REQUIRE(c.family.relations.size() > 10);

  auto composite = [&](const Relation& x, const Relation& y, int k) {
    int n = x.arity - k, m = y.arity - k;
    Relation guard = product(product(a.full_relation(n), diagonal(a, k)),
                             a.full_relation(m));
    Relation mixed = intersect(product(x, y), guard);
    std::vector<int> idx;
    for (int i = 0; i < n + k; ++i) idx.push_back(i);
    for (int i = 0; i < m; ++i) idx.push_back(n + 2 * k + i);
    return project(mixed, idx);
  };

  long checked = 0;
  for (const Relation& x : c.family.relations)
    for (const Relation& y : c.family.relations)
      for (int k = 0; k <= std::min(x.arity, y.arity); ++k) {
        CHECK(join_k(x, y, k) == composite(x, y, k));
        ++checked;
      }
  CHECK(checked > 1000);
}

TEST_CASE("closure base case on a one-element pure set") {
  Structure a = pure_set(1);
  ClosureResult c = closure(a, {}, 2);
  RelationFamily expect;
  expect.relations = {Relation::empty(0), Relation::empty(1), Relation::empty(2),
                      Relation::point(), Relation(1, {{0}}), Relation(2, {{0, 0}})};
  expect.normalize();
  CHECK(c.family == expect);
  CHECK(c.derivations.size() == c.family.relations.size());
  CHECK(!c.truncated);
}

TEST_CASE("closure is idempotent, monotone, and keeps symbol interpretations") {
  Structure a = pset(2, {1});
  a.sig.functions["f"] = 1;
  a.functions["f"] = FunctionTable{1, {1, 0}};
  a.sig.constants.insert("c");
  a.constants["c"] = 0;
  a.validate();

  RelationFamily seeds;
  seeds.relations = {Relation(2, {{0, 1}})};
  ClosureResult c1 = closure(a, seeds, 2);
  ClosureResult c2 = closure(a, c1.family, 2);
  CHECK(c1.family == c2.family);

  ClosureResult base = closure(a, {}, 2);
  for (const Relation& r : base.family.relations) CHECK(c1.family.contains(r));

  CHECK(c1.family.contains(diagonal(a, 1)));
  CHECK(c1.family.contains(a.relations.at("P")));
  CHECK(c1.family.contains(a.function_graph("f")));
  CHECK(c1.family.contains(a.constant_singleton("c")));
  // the seed's permutation is forced by projection
  CHECK(c1.family.contains(Relation(2, {{1, 0}})));
}

TEST_CASE("closure cap errors") {
  Structure a = pure_set(1);
  CHECK_THROWS_WITH_AS(closure(a, {}, 1), "closure cap must be at least 2", Error);

  Structure b = pure_set(2);
  b.sig.relations["T"] = 3;
  b.relations["T"] = Relation(3, {{0, 0, 0}});
  b.validate();
  CHECK_THROWS_WITH_AS(closure(b, {}, 2), "closure cap below relation arity: T", Error);

  RelationFamily deep;
  deep.relations = {Relation(3, {{0, 0, 0}})};
  CHECK_THROWS_WITH_AS(closure(a, deep, 2), "closure cap below a seed arity", Error);
}

TEST_CASE("term_graph") {
  Structure a = pure_set(2);
  a.sig.functions["f"] = 1;
  a.functions["f"] = FunctionTable{1, {1, 0}};
  a.sig.constants.insert("c");
  a.constants["c"] = 0;
  a.validate();

  CHECK(term_graph(a, mk_var("v0"), 1) == Relation(2, {{0, 0}, {1, 1}}));
  CHECK(term_graph(a, mk_const("c"), 1) == Relation(2, {{0, 0}, {1, 0}}));
  CHECK(term_graph(a, mk_apply("f", {mk_var("v0")}), 1) == Relation(2, {{0, 1}, {1, 0}}));
  CHECK_THROWS_AS(term_graph(a, mk_var("v1"), 1), Error);

  // graph of a total function: one extension per argument tuple
  Relation g = term_graph(a, mk_apply("f", {mk_apply("f", {mk_var("v0")})}), 2);
  CHECK(g.tuples.size() == a.space_size(2));
}

TEST_CASE("all_relations and the blow-up guard") {
  Structure a = pure_set(2);
  RelationFamily fam = all_relations(a, 2);
  // 2 nullary + 4 unary + 16 binary
  CHECK(fam.relations.size() == 22);
  CHECK_THROWS_AS(all_relations(pure_set(3), 3, 100), Error);
}

TEST_CASE("team invariants") {
  CHECK(Team({"v0"}, {{0}, {0}}).rows.size() == 1);
  CHECK_THROWS_WITH_AS(Team({"v0", "v0"}, {}), "duplicate variable in team domain", Error);
  CHECK_THROWS_WITH_AS(Team({"v0"}, {{0, 1}}), "team row length does not match domain", Error);
  CHECK(team_union(Team({"x"}, {{0}}), Team({"x"}, {{1}})) == Team({"x"}, {{0}, {1}}));
  CHECK_THROWS_WITH_AS(team_union(Team({"x"}, {}), Team({"y"}, {})),
                       "team union requires equal domains", Error);
}

TEST_CASE("structure validation") {
  Structure a = pure_set(2);
  a.sig.relations["P"] = 1;
  CHECK_THROWS_WITH_AS(a.validate(), "missing relation interpretation: P", Error);
  a.relations["P"] = Relation(2, {});
  CHECK_THROWS_WITH_AS(a.validate(), "relation arity mismatch: P", Error);
  a.relations["P"] = Relation(1, {{1}});
  a.validate();

  Structure b = pure_set(2);
  b.sig.functions["f"] = 1;
  b.functions["f"] = FunctionTable{1, {0}};
  CHECK_THROWS_WITH_AS(b.validate(), "function table must be total: f", Error);
  b.functions["f"] = FunctionTable{1, {0, 0}};
  b.validate();

  CHECK_THROWS_WITH_AS(pure_set(0).validate(), "structure domain must be non-empty", Error);
}

TEST_CASE("tuple ranking is a bijection") {
  Structure a = pure_set(3);
  for (int n = 0; n <= 3; ++n) {
    for (uint64_t r = 0; r < a.space_size(n); ++r)
      CHECK(a.tuple_rank(a.tuple_unrank(r, n)) == r);
  }
  CHECK(a.full_relation(2).tuples.size() == 9);
}
