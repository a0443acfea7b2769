#include <cstdlib>
#include <map>
#include <string>

#include "common.hpp"
#include "doctest.h"
#include "teamlog/semantics.hpp"

using namespace teamlog;
using teamlog::testing::all_teams;
using teamlog::testing::pset;
using teamlog::testing::pure_set;

TEST_CASE("eval_term") {
  Structure a = pure_set(2);
  a.sig.functions["f"] = 1;
  a.functions["f"] = FunctionTable{1, {1, 0}};
  a.sig.constants.insert("c");
  a.constants["c"] = 1;
  a.validate();

  Assignment s{{"x", 0}};
  CHECK(eval_term(a, s, mk_var("x")) == 0);
  CHECK(eval_term(a, s, mk_const("c")) == 1);
  CHECK(eval_term(a, s, mk_apply("f", {mk_apply("f", {mk_var("x")})})) == 0);
  CHECK_THROWS_WITH_AS(eval_term(a, s, mk_var("y")), "unbound variable 'y'", Error);
}

TEST_CASE("eval_tarski") {
  Structure a = pset(2, {1});
  CHECK(eval_tarski(a, {{"x", 1}}, parse_formula("P(x)", Dialect::FO, &a.sig)));
  CHECK(!eval_tarski(a, {{"x", 0}}, parse_formula("P(x)", Dialect::FO, &a.sig)));
  CHECK(eval_tarski(a, {{"x", 0}},
                    parse_formula("exists y. !y = x", Dialect::FO, &a.sig)));
  CHECK(!eval_tarski(a, {{"x", 0}},
                     parse_formula("forall y. y = x", Dialect::FO, &a.sig)));
  CHECK_THROWS_WITH_AS(eval_tarski(a, {{"x", 0}}, mk_con({"x"})),
                       "eval_tarski expects a first-order formula; found a team-level "
                       "constructor",
                       Error);
  CHECK_THROWS_WITH_AS(
      eval_tarski(a, {}, parse_formula("P(x)", Dialect::FO, &a.sig)),
      "unbound variable 'x'", Error);
}

TEST_CASE("eval_team base examples") {
  Structure a = pset(2, {1});
  Team x({"v0"}, {{0}, {1}});

  // the empty team satisfies everything, whatever its declared domain
  Team e0({"v0"}, {});
  Team ebare({}, {});
  for (auto* f : enumerate_formulas(a.sig, {"v0"}, 2, Dialect::FOIL)) {
    CHECK(eval_team(a, e0, f));
    CHECK(eval_team(a, ebare, f));
  }

  CHECK(!eval_team(a, x, parse_formula("con(v0)", Dialect::FOT, &a.sig)));
  CHECK(eval_team(a, x, parse_formula("P(v0) | !P(v0)", Dialect::FO, &a.sig)));
  CHECK(!eval_team(a, x, parse_formula("E1 v1. v0 = v1", Dialect::FOT, &a.sig)));
  CHECK(eval_team(a, x, parse_formula("exists v1. v0 = v1", Dialect::FO, &a.sig)));

  CHECK_THROWS_WITH_AS(eval_team(a, x, parse_formula("P(v1)", Dialect::FO, &a.sig)),
                       "free variable 'v1' is not in the team domain", Error);
}

TEST_CASE("team atoms on concrete teams") {
  Structure a = pure_set(3);
  Team x({"x", "y"}, {{0, 1}, {1, 1}, {2, 1}});
  CHECK(eval_team(a, x, mk_dep({"y"}, {"y"})));
  CHECK(eval_team(a, x, mk_con({"y"})));
  CHECK(!eval_team(a, x, mk_dep({"y"}, {"x"})));
  CHECK(eval_team(a, x, mk_dep({"x"}, {"y"})));
  CHECK(!eval_team(a, x, mk_inc({"x"}, {"y"})));
  CHECK(eval_team(a, x, mk_inc({"y"}, {"x"})));
  CHECK(!eval_team(a, x, mk_exc({"x"}, {"y"})));
  CHECK(eval_team(a, Team({"x", "y"}, {{0, 1}, {2, 1}}), mk_exc({"x"}, {"y"})));

  // X |= ind(x;z;y) iff X[xzy] = X[xz] join_|z| X[zy]
  Team ind_yes({"x", "z", "y"}, {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}, {1, 0, 1}});
  CHECK(eval_team(a, ind_yes, mk_ind({"x"}, {"z"}, {"y"})));
  Team ind_no({"x", "z", "y"}, {{0, 0, 0}, {1, 0, 1}});
  CHECK(!eval_team(a, ind_no, mk_ind({"x"}, {"z"}, {"y"})));
  // unconditional independence: empty conditioning tuple
  CHECK(eval_team(a, ind_yes, mk_ind({"x"}, {}, {"y"})));
  CHECK(!eval_team(a, ind_no, mk_ind({"x"}, {}, {"y"})));
}

TEST_CASE("weak operators") {
  Structure a = pset(2, {1});
  Team x({"v0"}, {{0}, {1}});
  Team e({"v0"}, {});
  const Formula* p = parse_formula("P(v0)", Dialect::FOT, &a.sig);
  CHECK(eval_team(a, e, mk_weak_neg(p)));
  CHECK(eval_team(a, x, mk_weak_neg(p)));          // X does not satisfy P(v0)
  CHECK(!eval_team(a, Team({"v0"}, {{1}}), mk_weak_neg(p)));
  // weak disjunction is not splitting: P(v0) \/ !P(v0) fails on the full team
  CHECK(!eval_team(a, x, parse_formula("P(v0) \\/ !P(v0)", Dialect::FOT, &a.sig)));
  CHECK(eval_team(a, x, parse_formula("P(v0) | !P(v0)", Dialect::FOT, &a.sig)));
  // A1 duplicates with every single element
  CHECK(eval_team(a, Team({}, {Tuple{}}),
                  parse_formula("A1 v0. con(v0)", Dialect::FOT, &a.sig)));
  CHECK(!eval_team(a, Team({}, {Tuple{}}),
                   parse_formula("A1 v0. P(v0)", Dialect::FOT, &a.sig)));
}

TEST_CASE("sentences evaluate the same on every nonempty team") {
  Structure a = pset(2, {1});
  const Formula* sent = parse_formula("exists v0. P(v0) & con(v0)", Dialect::FOIL, &a.sig);
  REQUIRE(free_vars(sent).empty());
  bool base = eval_team(a, Team({}, {Tuple{}}), sent);
  CHECK(base);
  for (const Team& x : all_teams(a, {"v1"}, 2))
    if (!x.is_empty()) CHECK(eval_team(a, x, sent) == base);
}

TEST_CASE("generic and fast modes agree") {
  Structure a = pset(2, {1});
  TeamEvaluator gen(a, EvalMode::Generic), fast(a, EvalMode::Fast);
  auto teams = all_teams(a, {"v0", "v1"}, 4);
  for (auto* f : enumerate_formulas(a.sig, {"v0", "v1"}, 2, Dialect::FOIL))
    for (const Team& x : teams) CHECK(gen.eval(x, f) == fast.eval(x, f));
  for (auto* f : enumerate_formulas(a.sig, {"v0"}, 3, Dialect::FOT))
    for (const Team& x : teams) CHECK(gen.eval(x, f) == fast.eval(x, f));
}

TEST_CASE("search limits surface as errors in the generic engine") {
  Structure a = pure_set(2);
  EvalLimits tight;
  tight.max_cover_candidates = 8;
  tight.max_supplement_candidates = 8;
  TeamEvaluator ev(a, EvalMode::Generic, tight);
  Team x({"v0"}, {{0}, {1}});
  const Formula* split = parse_formula("v0 = v0 | v0 = v0", Dialect::FO, nullptr);
  CHECK_THROWS_AS(ev.eval(x, split), Error);
  const Formula* ex = parse_formula("exists v1. v0 = v0", Dialect::FO, nullptr);
  CHECK_THROWS_AS(ev.eval(x, ex), Error);
}

TEST_CASE("eval_fo_with_relations") {
  Structure a = pset(2, {1});
  SOSentence all = parse_sentence("forall x. R(x)");
  CHECK(eval_fo_with_relations(a, all, {{"R", a.full_relation(1)}}));
  SOSentence some = parse_sentence("exists x. R(x)");
  CHECK(!eval_fo_with_relations(a, some, {{"R", Relation::empty(1)}}));

  SOSentence prod =
      parse_sentence("forall x. forall y. R(x, y) <-> (P(x) & P(y))", &a.sig);
  CHECK(eval_fo_with_relations(a, prod, {{"R", Relation(2, {{1, 1}})}}));
  CHECK(!eval_fo_with_relations(a, prod, {{"R", Relation(2, {{0, 1}})}}));

  CHECK_THROWS_WITH_AS(eval_fo_with_relations(a, all, {{"R", Relation::empty(2)}}),
                       "parameter 'R' arity mismatch: declared 1, bound to arity 2", Error);
  CHECK_THROWS_WITH_AS(eval_fo_with_relations(a, all, {}),
                       "missing binding for relation parameter 'R'", Error);
  CHECK_THROWS_WITH_AS(
      eval_fo_with_relations(a, parse_sentence("EX S:1. forall x. S(x)"), {}),
      "eval_fo_with_relations expects an empty relation prefix", Error);
}

TEST_CASE("eval_eso") {
  Structure a = pset(2, {1});
  CHECK(eval_eso(a, parse_sentence("EX R:1. forall x. R(x)", &a.sig), {}));
  CHECK(!eval_eso(
      a, parse_sentence("EX R:1. (forall x. R(x)) & (exists x. !R(x))", &a.sig), {}));

  // a bijection graph between P and its complement exists iff |P| = |A \ P|
  const char* bij =
      "EX F:2. (forall x. forall y. F(x, y) -> P(x) & !P(y))"
      " & (forall x. P(x) -> exists y. F(x, y))"
      " & (forall y. !P(y) -> exists x. F(x, y))"
      " & (forall x. forall y. forall z. F(x, y) & F(x, z) -> y = z)"
      " & (forall x. forall y. forall z. F(x, z) & F(y, z) -> x = y)";
  CHECK(eval_eso(a, parse_sentence(bij, &a.sig), {}));
  Structure b = pset(2, {0, 1});
  CHECK(!eval_eso(b, parse_sentence(bij, &b.sig), {}));
  Structure c = pset(2, {});
  CHECK(eval_eso(c, parse_sentence(bij, &c.sig), {}));
}

TEST_CASE("eso budget") {
  CHECK(default_eso_budget() == (uint64_t(1) << 24));
  Structure a = pure_set(3);
  SOSentence big = parse_sentence("EX R:3. forall x. R(x, x, x)");
  try {
    eval_eso(a, big, {});  // 2^27 candidate relations
    FAIL("expected a budget error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("exceeds the budget") != std::string::npos);
  }
  CHECK(eval_eso(a, big, {}, uint64_t(1) << 28));

  setenv("TEAMLOG_BUDGET", "268435456", 1);
  CHECK(default_eso_budget() == (uint64_t(1) << 28));
  CHECK(eval_eso(a, big, {}));
  setenv("TEAMLOG_BUDGET", "zero", 1);
  CHECK_THROWS_WITH_AS(default_eso_budget(), "TEAMLOG_BUDGET must be a positive integer",
                       Error);
  unsetenv("TEAMLOG_BUDGET");
  CHECK(default_eso_budget() == (uint64_t(1) << 24));
}

TEST_CASE("evaluators reuse state across calls") {
  Structure a = pset(3, {1, 2});
  TeamEvaluator ev(a);
  const Formula* f =
      parse_formula("exists v2. dep(v0 ; v2) & (P(v2) | v1 = v2)", Dialect::FOIL, &a.sig);
  auto teams = all_teams(a, {"v0", "v1"}, 3);
  std::vector<bool> first;
  for (const Team& x : teams) first.push_back(ev.eval(x, f));
  for (size_t i = 0; i < teams.size(); ++i) CHECK(ev.eval(teams[i], f) == first[i]);

  SentenceEvaluator se(a, parse_sentence("exists x. R(x) & P(x)", &a.sig));
  CHECK(se.eval({{"R", Relation(1, {{1}})}}));
  CHECK(!se.eval({{"R", Relation(1, {{0}})}}));
  CHECK(se.eval({{"R", a.full_relation(1)}}));
}
