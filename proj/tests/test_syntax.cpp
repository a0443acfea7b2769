#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "doctest.h"
#include "teamlog/syntax.hpp"

using namespace teamlog;

namespace {

Signature sig_pq() {
  Signature s;
  s.relations["P"] = 1;
  s.relations["Q"] = 1;
  return s;
}

int depth_of(const Formula* f) {
  switch (f->kind) {
    case FKind::RelAtom:
    case FKind::EqAtom:
    case FKind::Dep:
    case FKind::Con:
    case FKind::Inc:
    case FKind::Exc:
    case FKind::Ind:
      return 1;
    case FKind::WeakNeg:
    case FKind::Exists:
    case FKind::Forall:
    case FKind::ExistsOne:
    case FKind::ForallOne:
      return 1 + depth_of(f->left);
    default:
      return 1 + std::max(depth_of(f->left), depth_of(f->right));
  }
}

}  // namespace

TEST_CASE("terms are interned") {
  CHECK(mk_var("x") == mk_var("x"));
  CHECK(mk_var("x") != mk_var("y"));
  CHECK(mk_var("c") != mk_const("c"));
  CHECK(mk_apply("f", {mk_var("x")}) == mk_apply("f", {mk_var("x")}));
  CHECK(render(mk_apply("f", {mk_var("x"), mk_const("c")})) == "f(x, c)");

  std::vector<std::string> vs;
  term_vars(mk_apply("f", {mk_var("x"), mk_apply("g", {mk_var("y")})}), vs);
  CHECK(vs == std::vector<std::string>{"x", "y"});
}

TEST_CASE("formulas are interned and dep normalizes") {
  const Formula* a = mk_rel("P", {mk_var("x")});
  CHECK(a == mk_rel("P", {mk_var("x")}));
  CHECK(mk_and(a, a) == mk_and(a, a));
  CHECK(mk_and(a, a) != mk_or(a, a));
  CHECK(a->id != mk_or(a, a)->id);

  CHECK(mk_dep({}, {"y"}) == mk_con({"y"}));
  CHECK(mk_dep({}, {"y"})->kind == FKind::Con);
  CHECK(mk_dep({"x"}, {"y"})->kind == FKind::Dep);
}

TEST_CASE("parse and render agree on precedence") {
  Signature sig = sig_pq();
  auto rt = [&](const std::string& text, Dialect d) {
    return render(parse_formula(text, d, &sig));
  };
  CHECK(rt("P(x) & Q(x) | P(y)", Dialect::FO) == "P(x) & Q(x) | P(y)");
  CHECK(rt("(P(x) | Q(x)) & P(y)", Dialect::FO) == "(P(x) | Q(x)) & P(y)");
  CHECK(rt("exists x. P(x) & Q(x)", Dialect::FO) == "exists x. P(x) & Q(x)");
  CHECK(rt("~P(x) \\/ ~Q(x)", Dialect::FOT) == "~P(x) \\/ ~Q(x)");
  CHECK(rt("~(P(x) & Q(x))", Dialect::FOT) == "~(P(x) & Q(x))");
  CHECK(rt("!x = y", Dialect::FO) == "!x = y");
  CHECK(rt("dep(x y ; z)", Dialect::FOIL) == "dep(x y ; z)");
  CHECK(rt("dep( ; z)", Dialect::FOIL) == "con(z)");
  CHECK(rt("ind(x ; z ; y)", Dialect::FOIL) == "ind(x ; z ; y)");
  CHECK(rt("A1 x. ~P(x) \\/ con(x)", Dialect::FOT) == "A1 x. ~P(x) \\/ con(x)");

  // implication sugar lowers to weak operators
  CHECK(rt("P(x) ~> Q(x)", Dialect::FOT) == "~P(x) \\/ Q(x)");
  CHECK(rt("P(x) <~> Q(x)", Dialect::FOT) == "(~P(x) \\/ Q(x)) & (~Q(x) \\/ P(x))");
}

TEST_CASE("parse round trips to the same interned node") {
  Signature sig = sig_pq();
  for (const char* text : {"P(x)", "!P(x)", "x = y", "!x = y", "P(x) & Q(x) | P(y)",
                           "exists x. forall y. P(x) | Q(y)"}) {
    const Formula* f = parse_formula(text, Dialect::FO, &sig);
    CHECK(parse_formula(render(f), Dialect::FO, &sig) == f);
  }
  for (const char* text : {"con(x)", "inc(x ; y)", "E1 x. con(x)", "~P(x) \\/ con(x y)",
                           "A1 y. inc(y ; x)"}) {
    const Formula* f = parse_formula(text, Dialect::FOT, &sig);
    CHECK(parse_formula(render(f), Dialect::FOT, &sig) == f);
  }
  for (const char* text : {"dep(x y ; z)", "exc(x ; y)", "ind(x ; z ; y)",
                           "exists x. dep(x ; y) & P(x)"}) {
    const Formula* f = parse_formula(text, Dialect::FOIL, &sig);
    CHECK(parse_formula(render(f), Dialect::FOIL, &sig) == f);
  }
}

TEST_CASE("signature constants parse as constant terms") {
  Signature sig;
  sig.relations["P"] = 1;
  sig.functions["f"] = 1;
  sig.constants.insert("c");
  const Formula* f = parse_formula("P(f(c)) & f(x) = c", Dialect::FO, &sig);
  CHECK(render(f) == "P(f(c)) & f(x) = c");
  CHECK(f->left->terms[0]->kind == TermKind::Apply);
  CHECK(f->right->terms[1]->kind == TermKind::Constant);

  // without a signature the same identifier is a variable
  const Formula* g = parse_formula("P(c)", Dialect::FO, nullptr);
  CHECK(g->terms[0]->kind == TermKind::Variable);
}

TEST_CASE("parse errors") {
  Signature sig = sig_pq();
  auto msg = [&](const char* text, Dialect d) -> std::string {
    try {
      parse_formula(text, d, &sig);
    } catch (const Error& e) {
      return e.what();
    }
    return "NO THROW";
  };
  CHECK(msg("P(x", Dialect::FO) == "expected ')' at position 3, got ''");
  CHECK(msg("~P(x)", Dialect::FOIL) == "weak negation '~' is not part of dialect foil");
  CHECK(msg("dep(x ; y)", Dialect::FOT) == "'dep' is not part of dialect fot");
  CHECK(msg("P(x) &", Dialect::FO) == "expected an identifier at position 6, got ''");
  CHECK(msg("", Dialect::FO) == "expected an identifier at position 0, got ''");
  CHECK(msg("exists x", Dialect::FO) == "expected '.' at position 8, got ''");
  CHECK(msg("P(x) Q(x)", Dialect::FO) == "trailing input at position 5: 'Q'");
  CHECK(msg("con(x)", Dialect::FO) == "'con' is not part of dialect fo");
}

TEST_CASE("dialect membership") {
  Signature sig = sig_pq();
  const Formula* split = parse_formula("P(x) | Q(x)", Dialect::FO, &sig);
  CHECK(in_dialect(split, Dialect::FO));
  CHECK(!in_dialect(split, Dialect::FOT));
  CHECK(in_dialect(split, Dialect::FOIL));

  const Formula* weak = parse_formula("~P(x) \\/ Q(x)", Dialect::FOT, &sig);
  CHECK(!in_dialect(weak, Dialect::FO));
  CHECK(in_dialect(weak, Dialect::FOT));
  CHECK(!in_dialect(weak, Dialect::FOIL));

  const Formula* con = mk_con({"x"});
  CHECK(!in_dialect(con, Dialect::FO));
  CHECK(in_dialect(con, Dialect::FOT));
  CHECK(in_dialect(con, Dialect::FOIL));

  const Formula* inc = mk_inc({"x"}, {"y"});
  CHECK(in_dialect(inc, Dialect::FOT));
  CHECK(in_dialect(inc, Dialect::FOIL));

  const Formula* dep = mk_dep({"x"}, {"y"});
  CHECK(!in_dialect(dep, Dialect::FOT));
  CHECK(in_dialect(dep, Dialect::FOIL));

  const Formula* e1 = mk_exists_one("x", con);
  CHECK(in_dialect(e1, Dialect::FOT));
  CHECK(!in_dialect(e1, Dialect::FOIL));

  CHECK_NOTHROW(check_dialect(split, Dialect::FO));
  CHECK_THROWS_AS(check_dialect(split, Dialect::FOT), Error);
}

TEST_CASE("literals and the downward fragment flag") {
  Signature sig = sig_pq();
  CHECK(is_literal(parse_formula("P(x)", Dialect::FO, &sig)));
  CHECK(is_literal(parse_formula("!P(x)", Dialect::FO, &sig)));
  CHECK(is_literal(parse_formula("!x = y", Dialect::FO, &sig)));
  CHECK(!is_literal(parse_formula("P(x) & Q(x)", Dialect::FO, &sig)));
  CHECK(!is_literal(mk_con({"x"})));

  CHECK(parse_formula("exists x. dep(x ; y) & (P(x) | exc(x ; y))", Dialect::FOIL, &sig)
            ->downward_fragment);
  CHECK(mk_con({"x"})->downward_fragment);
  CHECK(!mk_inc({"x"}, {"y"})->downward_fragment);
  CHECK(!mk_ind({"x"}, {}, {"y"})->downward_fragment);
  CHECK(!parse_formula("~P(x)", Dialect::FOT, &sig)->downward_fragment);
  CHECK(!parse_formula("P(x) \\/ Q(x)", Dialect::FOT, &sig)->downward_fragment);
}

TEST_CASE("free variables") {
  Signature sig = sig_pq();
  auto fv = [&](const char* text, Dialect d) {
    return free_vars(parse_formula(text, d, &sig));
  };
  CHECK(fv("exists v0. P(v0) & Q(v1)", Dialect::FO) == std::vector<std::string>{"v1"});
  CHECK(fv("forall x. x = y", Dialect::FO) == std::vector<std::string>{"y"});
  CHECK(fv("dep(x y ; z)", Dialect::FOIL) == std::vector<std::string>{"x", "y", "z"});
  CHECK(fv("ind(x ; z ; y)", Dialect::FOIL) == std::vector<std::string>{"x", "y", "z"});
  CHECK(fv("con(x x)", Dialect::FOT) == std::vector<std::string>{"x"});
  CHECK(fv("P(x) & P(x)", Dialect::FO) == std::vector<std::string>{"x"});
}

TEST_CASE("rename_free_var respects binders") {
  Signature sig = sig_pq();
  const Formula* f = parse_formula("P(x) & exists x. Q(x)", Dialect::FO, &sig);
  CHECK(render(rename_free_var(f, "x", "z")) == "P(z) & exists x. Q(x)");
  const Formula* g = parse_formula("dep(x ; y)", Dialect::FOIL, &sig);
  CHECK(render(rename_free_var(g, "y", "w")) == "dep(x ; w)");
  CHECK(rename_free_var(f, "nope", "z") == f);
}

TEST_CASE("collect_names") {
  Signature sig = sig_pq();
  std::set<std::string> vars, rels;
  collect_names(parse_formula("exists x. P(x) & Q(y)", Dialect::FO, &sig), vars, rels);
  CHECK(vars == std::set<std::string>{"x", "y"});
  CHECK(rels == std::set<std::string>{"P", "Q"});
}

TEST_CASE("enumeration is deterministic, duplicate-free, and downward closed") {
  Signature sp;
  sp.relations["P"] = 1;
  std::vector<std::string> xs = {"x"};

  auto e1 = enumerate_formulas(sp, xs, 1, Dialect::FO);
  std::vector<std::string> got;
  for (auto* f : e1) got.push_back(render(f));
  CHECK(got == std::vector<std::string>{"P(x)", "!P(x)", "x = x", "!x = x"});

  CHECK(enumerate_formulas(sp, xs, 2, Dialect::FO).size() == 12);
  CHECK(enumerate_formulas(sp, xs, 3, Dialect::FO).size() == 60);
  CHECK(enumerate_formulas(sp, xs, 4, Dialect::FO).size() == 284);
  CHECK(enumerate_formulas(sp, xs, 3, Dialect::FOT).size() == 189);
  CHECK(enumerate_formulas(sp, xs, 3, Dialect::FOIL).size() == 319);

  auto f1 = enumerate_formulas(sp, xs, 1, Dialect::FOT);
  got.clear();
  for (auto* f : f1) got.push_back(render(f));
  CHECK(got == std::vector<std::string>{"P(x)", "!P(x)", "x = x", "!x = x", "con()",
                                        "con(x)", "inc(x ; x)"});

  auto e2 = enumerate_formulas(sp, xs, 2, Dialect::FO);
  auto e3 = enumerate_formulas(sp, xs, 3, Dialect::FO);
  REQUIRE(e2.size() <= e3.size());
  for (size_t i = 0; i < e2.size(); ++i) CHECK(e2[i] == e3[i]);
  CHECK(e3 == enumerate_formulas(sp, xs, 3, Dialect::FO));

  std::set<const Formula*> uniq(e3.begin(), e3.end());
  CHECK(uniq.size() == e3.size());
  for (auto* f : e3) {
    CHECK(f->size <= 3);
    CHECK(in_dialect(f, Dialect::FO));
  }
  for (auto* f : enumerate_formulas(sp, {"x", "y"}, 2, Dialect::FOIL))
    CHECK(in_dialect(f, Dialect::FOIL));
}

TEST_CASE("size metric") {
  Signature sig = sig_pq();
  CHECK(parse_formula("P(x)", Dialect::FO, &sig)->size == 1);
  CHECK(parse_formula("P(x) & Q(x)", Dialect::FO, &sig)->size == 3);
  CHECK(parse_formula("exists x. P(x)", Dialect::FO, &sig)->size == 2);
  CHECK(parse_formula("dep(x ; y)", Dialect::FOIL, &sig)->size == 1);
}

TEST_CASE("sampling is seeded and stays in the dialect") {
  Signature sp;
  sp.relations["P"] = 1;
  std::vector<std::string> vs = {"v0", "v1"};
  for (Dialect d : {Dialect::FO, Dialect::FOT, Dialect::FOIL}) {
    for (uint64_t seed = 0; seed < 50; ++seed) {
      const Formula* f = sample_formula(sp, vs, 3, seed, d);
      CHECK(f == sample_formula(sp, vs, 3, seed, d));
      CHECK(in_dialect(f, d));
      CHECK(depth_of(f) <= 3);
    }
  }
  std::set<const Formula*> seen;
  for (uint64_t seed = 0; seed < 50; ++seed)
    seen.insert(sample_formula(sp, vs, 4, seed, Dialect::FOIL));
  CHECK(seen.size() > 10);
}

TEST_CASE("dialect names") {
  CHECK(dialect_from_string("fo") == Dialect::FO);
  CHECK(dialect_from_string("fot") == Dialect::FOT);
  CHECK(dialect_from_string("foil") == Dialect::FOIL);
  CHECK(to_string(Dialect::FOIL) == "foil");
  CHECK_THROWS_WITH_AS(dialect_from_string("pdl"),
                       "unknown dialect 'pdl' (expected fo, fot, or foil)", Error);
}

TEST_CASE("second-order sentences parse, render, and infer parameters") {
  Signature sig = sig_pq();
  SOSentence s = parse_sentence("EX R:1. forall x. R(x) -> P(x)", &sig);
  CHECK(render(s) == "EX R:1. forall x. R(x) -> P(x)");
  CHECK(s.prefix == std::vector<std::pair<std::string, int>>{{"R", 1}});
  // signature relations are interpreted symbols, not parameters
  CHECK(s.params.empty());

  SOSentence t = parse_sentence("forall x. forall y. R(x, y) <-> (P(x) & P(y))");
  CHECK(render(t) == "forall x. forall y. R(x, y) <-> P(x) & P(y)");
  CHECK(t.params == std::map<std::string, int>{{"P", 1}, {"R", 2}});
  CHECK(t.prefix.empty());

  CHECK(render(parse_sentence("exists x. !x = x | P(x)", &sig)) ==
        "exists x. !x = x | P(x)");
  CHECK_THROWS_WITH_AS(parse_sentence("EX R. forall x. R(x)"),
                       "expected ':' at position 4, got '.'", Error);
}

TEST_CASE("SO builder") {
  SOBuilder b;
  const SOFormula* rx = b.atom("R", {mk_var("x")});
  const SOFormula* px = b.atom("P", {mk_var("x")});
  const SOFormula* m = b.forall("x", b.implies(rx, px));
  SOSentence s = b.finish({{"R", 1}}, {{"P", 1}}, m);
  CHECK(render(s) == "EX R:1. forall x. R(x) -> P(x)");
  CHECK(render(m) == "forall x. R(x) -> P(x)");

  SOBuilder c;
  CHECK(render(c.conj_all({})) == "forall u. u = u");
  const SOFormula* two = c.conj_all({c.eq(mk_var("x"), mk_var("x")),
                                     c.negate(c.atom("Q", {mk_var("x")}))});
  CHECK(render(two) == "x = x & !Q(x)");
}

TEST_CASE("round trip across an enumerated corpus") {
  Signature sp;
  sp.relations["P"] = 1;
  for (auto* f : enumerate_formulas(sp, {"x"}, 3, Dialect::FOIL))
    CHECK(parse_formula(render(f), Dialect::FOIL, &sp) == f);
  for (auto* f : enumerate_formulas(sp, {"x"}, 3, Dialect::FOT))
    CHECK(parse_formula(render(f), Dialect::FOT, &sp) == f);
}
