#include <map>
#include <string>
#include <vector>

#include "common.hpp"
#include "doctest.h"
#include "teamlog/maps.hpp"
#include "teamlog/semantics.hpp"
#include "teamlog/translate.hpp"

using namespace teamlog;
using teamlog::testing::all_teams;
using teamlog::testing::pset;
using teamlog::testing::pure_set;

namespace {

Signature sig_pq() {
  Signature s;
  s.relations["P"] = 1;
  s.relations["Q"] = 1;
  return s;
}

int split_or_exists_nodes(const Formula* f) {
  int here = (f->kind == FKind::Or || f->kind == FKind::Exists) ? 1 : 0;
  if (f->left) here += split_or_exists_nodes(f->left);
  if (f->right) here += split_or_exists_nodes(f->right);
  return here;
}

}  // namespace

TEST_CASE("translation clause shapes") {
  Signature sig = sig_pq();
  auto fot = [&](const char* text, int n) {
    return render(fot_to_fo(parse_formula(text, Dialect::FOT, &sig), n));
  };
  auto foil = [&](const char* text, int n) {
    return render(foil_to_eso(parse_formula(text, Dialect::FOIL, &sig), n));
  };

  CHECK(fot("P(v0)", 1) == "forall v0. R(v0) -> P(v0)");
  CHECK(fot("con(v0)", 1) == "exists y0. forall v0. R(v0) -> v0 = y0");
  CHECK(fot("inc(v0 ; v1)", 2) ==
        "forall v0. forall v1. R(v0, v1) -> exists y0. exists y1. R(y0, y1) & y1 = v0");
  CHECK(foil("dep(v0 ; v1)", 2) ==
        "forall v0. forall v1. forall y0. forall y1. R(v0, v1) & R(y0, y1) & v0 = y0 -> "
        "v1 = y1");
  CHECK(foil("P(v0) | Q(v0)", 1) ==
        "EX R1:1. EX R2:1. (forall v0. R(v0) <-> R1(v0) | R2(v0)) & (forall v0. R1(v0) "
        "-> P(v0)) & forall v0. R2(v0) -> Q(v0)");
  CHECK(foil("exists v1. v0 = v1", 1) ==
        "EX S:2. (forall v0. R(v0) -> exists y0. S(v0, y0)) & (forall v0. forall y0. "
        "S(v0, y0) -> R(v0)) & forall v0. forall v1. S(v0, v1) -> v0 = v1");

  SOSentence s = fot_to_fo(parse_formula("con(v0)", Dialect::FOT, &sig), 1);
  CHECK(s.prefix.empty());
  CHECK(s.params == std::map<std::string, int>{{"R", 1}});
  SOSentence t = foil_to_eso(parse_formula("P(v0) | Q(v0)", Dialect::FOIL, &sig), 1);
  CHECK(t.prefix.size() == 2);
  CHECK(t.params == std::map<std::string, int>{{"R", 1}});
}

TEST_CASE("translation errors") {
  Signature sig = sig_pq();
  CHECK_THROWS_WITH_AS(fot_to_fo(parse_formula("con(v1)", Dialect::FOT, &sig), 1),
                       "free variable 'v1' outside the declared window v0..v0", Error);
  CHECK_THROWS_AS(fot_to_fo(parse_formula("dep(v0 ; v0)", Dialect::FOIL, &sig), 1),
                  Error);  // not an FOT formula
}

TEST_CASE("fot translation agrees with team evaluation, empty team included") {
  Signature sp;
  sp.relations["P"] = 1;
  auto pool = enumerate_formulas(sp, {"v0"}, 3, Dialect::FOT);
  for (auto p : {std::vector<Elem>{}, std::vector<Elem>{1}, std::vector<Elem>{0, 1}}) {
    Structure a = pset(2, p);
    TeamEvaluator ev(a);
    auto teams = all_teams(a, {"v0"}, 2);
    for (auto* f : pool) {
      SOSentence chi = fot_to_fo(f, 1);
      CHECK(chi.prefix.empty());
      SentenceEvaluator se(a, chi);
      for (const Team& x : teams) {
        bool lhs = ev.eval(x, f);
        bool rhs = se.eval({{"R", relation_of_team(x, {"v0"})}});
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("foil translation agrees with team evaluation through the eso search") {
  Signature sp;
  sp.relations["P"] = 1;
  auto pool = enumerate_formulas(sp, {"v0"}, 2, Dialect::FOIL);
  Structure a = pset(2, {1});
  TeamEvaluator ev(a);
  auto teams = all_teams(a, {"v0"}, 2);
  for (auto* f : pool) {
    SOSentence chi = foil_to_eso(f, 1);
    CHECK((int)chi.prefix.size() <= split_or_exists_nodes(f));
    SentenceEvaluator se(a, chi);
    for (const Team& x : teams)
      CHECK(ev.eval(x, f) == se.eval({{"R", relation_of_team(x, {"v0"})}}));
  }
}

TEST_CASE("chi_plus guards the empty parameter") {
  SOSentence chi = parse_sentence("exists x. R(x)");
  SOSentence guarded = chi_plus(chi, 1);
  CHECK(render(guarded) == "(exists x0. R(x0)) -> exists x. R(x)");

  Structure a = pure_set(2);
  CHECK(!eval_fo_with_relations(a, chi, {{"R", Relation::empty(1)}}));
  CHECK(eval_fo_with_relations(a, guarded, {{"R", Relation::empty(1)}}));
  for (const Relation& r : all_relations(a, 1).relations) {
    if (r.arity != 1 || r.is_empty()) continue;
    CHECK(eval_fo_with_relations(a, guarded, {{"R", r}}) ==
          eval_fo_with_relations(a, chi, {{"R", r}}));
  }

  // idempotent up to equivalence on every parameter value, n <= 2
  Signature sp;
  sp.relations["P"] = 1;
  for (int n : {1, 2}) {
    std::vector<SOSentence> seeds;
    seeds.push_back(fot_to_fo(parse_formula("con(v0)", Dialect::FOT, &sp),
                              n));  // true-ish sentence
    seeds.push_back(n == 1 ? parse_sentence("exists x. R(x)")
                           : parse_sentence("exists x. R(x, x)"));
    for (const SOSentence& s : seeds) {
      SOSentence once = chi_plus(s, n);
      SOSentence twice = chi_plus(once, n);
      for (int sz = 1; sz <= 2; ++sz) {
        Structure b = pset(sz, {0});
        for (const Relation& r : all_relations(b, n).relations) {
          if (r.arity != n) continue;
          CHECK(eval_fo_with_relations(b, once, {{"R", r}}) ==
                eval_fo_with_relations(b, twice, {{"R", r}}));
        }
      }
    }
  }

  CHECK_THROWS_WITH_AS(chi_plus(parse_sentence("exists x. R(x) & S(x)"), 1),
                       "chi_plus expects a sentence with exactly one relation parameter",
                       Error);
  CHECK_THROWS_AS(chi_plus(parse_sentence("exists x. R(x)"), 2), Error);
}

TEST_CASE("encode_relations") {
  CHECK(encode_relations({Relation(1, {{0}}), Relation(1, {{1}})}) ==
        Relation(2, {{0, 1}}));
  Relation r(2, {{0, 1}, {1, 1}});
  CHECK(encode_relations({r}) == r);
  CHECK(encode_relations({r, Relation(1, {{0}, {1}})}).arity == 3);
  CHECK_THROWS_WITH_AS(encode_relations({Relation(1, {{0}}), Relation::empty(1)}),
                       "encode_relations: relation at position 1 is empty", Error);
  CHECK_THROWS_WITH_AS(encode_relations({}), "encode_relations needs at least one relation",
                       Error);
}

TEST_CASE("teams that agree on all FOT formulas are isomorphic as predicates") {
  Signature sp;
  sp.relations["P"] = 1;
  Structure a = pset(2, {1});
  Structure b = pset(2, {0});
  Team x({"v0"}, {{0}});
  Team y({"v0"}, {{1}});

  // expand each structure with its team's relation and look for an isomorphism
  auto expand = [](Structure s, const Team& t) {
    s.sig.relations["X0"] = 1;
    s.relations["X0"] = relation_of_team(t, {"v0"});
    s.validate();
    return s;
  };
  Structure ea = expand(a, x), eb = expand(b, y);
  CHECK(find_isomorphism(ea, eb).has_value());

  auto pool = enumerate_formulas(sp, {"v0"}, 4, Dialect::FOT);
  TeamEvaluator eva(a), evb(b);
  for (auto* f : pool) CHECK(eva.eval(x, f) == evb.eval(y, f));

  // a non-isomorphic pair is separated by some formula in the same pool
  Structure c = pset(2, {0, 1});
  Team z({"v0"}, {{1}});
  Structure ec = expand(c, z);
  CHECK(!find_isomorphism(ea, ec).has_value());
  TeamEvaluator evc(c);
  bool separated = false;
  for (auto* f : pool)
    if (eva.eval(x, f) != evc.eval(z, f)) {
      separated = true;
      break;
    }
  CHECK(separated);
}
