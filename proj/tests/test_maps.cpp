#include <algorithm>
#include <string>
#include <vector>

#include "common.hpp"
#include "doctest.h"
#include "teamlog/maps.hpp"
#include "teamlog/semantics.hpp"

using namespace teamlog;
using teamlog::testing::pset;
using teamlog::testing::pure_set;

namespace {

bool has_issue(const CheckReport& r, const std::string& id) {
  return std::any_of(r.issues.begin(), r.issues.end(),
                     [&](const CheckIssue& i) { return i.id == id; });
}

// two-element structure with predicate, involutive function, and constant
Structure rich(std::vector<Elem> p, std::vector<Elem> ftab, Elem c) {
  Structure a = pset(2, p);
  a.sig.functions["f"] = 1;
  a.functions["f"] = FunctionTable{1, std::move(ftab)};
  a.sig.constants.insert("c");
  a.constants["c"] = c;
  a.validate();
  return a;
}

bool quantifier_free(const Formula* f) {
  if (f->kind == FKind::ExistsOne || f->kind == FKind::ForallOne) return false;
  if (f->left && !quantifier_free(f->left)) return false;
  if (f->right && !quantifier_free(f->right)) return false;
  return true;
}

}  // namespace

TEST_CASE("element maps and isomorphism search") {
  CHECK(apply_element_map({1, 0}, Tuple{0, 0, 1}) == Tuple{1, 1, 0});
  CHECK(apply_element_map({1, 0}, Relation(2, {{0, 1}, {0, 0}})) ==
        Relation(2, {{1, 0}, {1, 1}}));

  Structure a = pset(2, {1}), b = pset(2, {0});
  CHECK(is_isomorphism({1, 0}, a, b));
  std::string why;
  CHECK(!is_isomorphism({0, 1}, a, b, &why));
  CHECK(!why.empty());

  CHECK(find_isomorphism(a, b) == ElementMap{1, 0});
  CHECK(find_isomorphism(pure_set(2), pure_set(2)) == ElementMap{0, 1});
  CHECK(!find_isomorphism(a, pset(2, {0, 1})).has_value());
  CHECK(!find_isomorphism(pure_set(2), pure_set(3)).has_value());
}

TEST_CASE("lift_isomorphism") {
  Structure a = pset(2, {1}), b = pset(2, {0});
  TeamMap m = lift_isomorphism({1, 0}, a, b, 2);
  CHECK(m.image(Relation(1, {{0}})) == Relation(1, {{1}}));
  CHECK(m.image(Relation(2, {{0, 1}})) == Relation(2, {{1, 0}}));
  CHECK(m.image(diagonal(a, 1)) == diagonal(b, 1));
  CHECK(m.element_total());
  CHECK(m.element_surjective());
  CHECK(m.elem_image(0) == 1);

  TeamMap id = lift_isomorphism({0, 1}, a, a, 2);
  for (const auto& [x, y] : id.entries) CHECK(x == y);

  CHECK_THROWS_AS(lift_isomorphism({0, 1}, a, b, 2), Error);  // P not preserved
  CHECK_THROWS_WITH_AS(lift_isomorphism({0, 0}, pure_set(2), pure_set(2), 2),
                       "element map is not injective into the target", Error);
}

TEST_CASE("lifted isomorphisms pass the axiom checks") {
  Structure a = pset(2, {1}), b = pset(2, {0});
  TeamMap m = lift_isomorphism({1, 0}, a, b, 2);
  CheckReport r = check_partial_team_isomorphism(m, 2);
  CHECK(r.pass());
  CHECK(check_elementary_map(m));
  CHECK(check_boolean_embedding(m, 1).pass());
  CHECK(check_boolean_embedding(m, 2).pass());
}

TEST_CASE("axiom violations are reported with ids") {
  Structure a = pset(2, {1});
  TeamMap m = lift_isomorphism({0, 1}, a, a, 2);

  // swap the images of a singleton and a two-element relation: PI2 breaks
  TeamMap bad = m;
  Relation s1(1, {{0}}), s2(1, {{0}, {1}});
  std::swap(bad.entries[s1], bad.entries[s2]);
  CheckReport r = check_partial_team_isomorphism(bad, 2);
  CHECK(!r.pass());
  CHECK(has_issue(r, "PI2"));
  CheckReport first = check_partial_team_isomorphism(bad, 2, true);
  CHECK(first.issues.size() == 1);

  // swap the diagonal's image with the full binary relation: PI6 breaks
  TeamMap bad6 = m;
  std::swap(bad6.entries[diagonal(a, 1)], bad6.entries[a.full_relation(2)]);
  CHECK(has_issue(check_partial_team_isomorphism(bad6, 2), "PI6"));

  // remove the diagonal from the domain: closure defect
  TeamMap open = m;
  open.entries.erase(diagonal(a, 1));
  CHECK(has_issue(check_partial_team_isomorphism(open, 2), "closure-dom"));

  // arity-breaking and out-of-domain entries
  TeamMap junk;
  junk.source = a;
  junk.target = a;
  junk.entries[s1] = Relation(2, {{0, 0}});
  CHECK(has_issue(check_partial_team_isomorphism(junk, 2), "arity"));
  TeamMap stray;
  stray.source = a;
  stray.target = a;
  stray.entries[s1] = Relation(1, {{7}});
  CHECK(has_issue(check_partial_team_isomorphism(stray, 2), "malformed"));
}

TEST_CASE("elementary map decisions") {
  Structure a = pset(2, {1});
  CHECK(!check_elementary_map(lift_embedding({0, 1}, a, pset(2, {0, 1}), 2)));

  ClosureResult base = closure(a, {}, 2);
  TeamMap id = identity_team_map(a, base.family);
  CHECK(check_elementary_map(id));
  CHECK(check_partial_team_isomorphism(id, 2).pass());
}

TEST_CASE("find_partial_elementary_map") {
  Structure a = pure_set(2);
  RelationFamily xs;
  xs.relations = {Relation(1, {{0}})};

  auto found = find_partial_elementary_map(a, xs, a, 2);
  REQUIRE(found.has_value());
  CHECK(check_elementary_map(*found));
  CHECK(check_partial_team_isomorphism(*found, 2).pass());
  CHECK(found->image(Relation(1, {{0}})) == Relation(1, {{0}}));

  // the other expansion isomorphism also gives an elementary map
  ClosureResult dom = closure(a, xs, 2);
  TeamMap other;
  other.source = a;
  other.target = a;
  for (const Relation& r : dom.family.relations)
    other.entries[r] = apply_element_map({1, 0}, r);
  CHECK(check_elementary_map(other));
  CHECK(other.image(Relation(1, {{0}})) == Relation(1, {{1}}));

  // elementarity between finite structures needs an isomorphism
  CHECK(!find_partial_elementary_map(pset(2, {1}), xs, pset(2, {0, 1}), 2).has_value());
  CHECK(!find_partial_elementary_map(pure_set(2), xs, pure_set(3), 2).has_value());

  // B = A: identity on the closure of any seed family is found
  RelationFamily empty_seeds;
  auto idm = find_partial_elementary_map(a, empty_seeds, a, 2);
  REQUIRE(idm.has_value());
  CHECK(check_elementary_map(*idm));
}

TEST_CASE("tarski-vaught") {
  Structure a = pset(2, {1}), b = pset(2, {0});
  TeamMap m = lift_isomorphism({1, 0}, a, b, 2);
  std::vector<const Formula*> corpus = {
      parse_formula("P(v1)", Dialect::FOT, &a.sig),
      parse_formula("inc(v1 ; v0)", Dialect::FOT, &a.sig),
      parse_formula("con(v0) & P(v1)", Dialect::FOT, &a.sig)};
  CHECK(check_tarski_vaught(m, corpus).pass());
  CHECK(check_tarski_vaught(m, {}).pass());

  // one-point structure into a larger one, missing the only P-witness
  Structure one = pset(1, {});
  Structure two = pset(2, {1});
  TeamMap emb = direct_image_map({0}, one, two, 2);
  CheckReport r =
      check_tarski_vaught(emb, {parse_formula("P(v1)", Dialect::FOT, &one.sig)});
  CHECK(has_issue(r, "tarski-vaught"));
}

TEST_CASE("boolean embedding violations") {
  Structure a = pset(2, {1});
  TeamMap m = lift_isomorphism({0, 1}, a, a, 2);
  TeamMap bad = m;
  bad.entries[Relation(1, {{1}})] = Relation(1, {{0}});
  CheckReport r = check_boolean_embedding(bad, 1);
  CHECK(has_issue(r, "boolean-complement"));
  CHECK(has_issue(r, "boolean-union"));

  TeamMap open = m;
  open.entries.erase(Relation(1, {{1}}));
  CHECK(has_issue(check_boolean_embedding(open, 1), "boolean-domain"));

  Structure big = pure_set(3);
  TeamMap idbig = lift_isomorphism({0, 1, 2}, big, big, 2);
  try {
    check_boolean_embedding(idbig, 3);
    FAIL("expected a sweep-size error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("boolean sweep too large") != std::string::npos);
  }
}

TEST_CASE("induced substructure") {
  Structure a = pset(2, {1}), b = pset(2, {0});
  TeamMap m = lift_isomorphism({1, 0}, a, b, 2);
  auto [img, g] = induced_substructure(m);
  CHECK(img == b);  // element-surjective: the image is the whole target

  Structure one = pset(1, {0});
  Structure two = pset(2, {0});
  TeamMap emb = direct_image_map({0}, one, two, 2);
  auto [sub, h] = induced_substructure(emb);
  CHECK(sub.size() == 1);
  CHECK(sub.relations.at("P") == Relation(1, {{0}}));
  CHECK(check_partial_team_isomorphism(h, 2).pass());
  CHECK(h.target == sub);
}

TEST_CASE("invert, compose, extract") {
  Structure a = pset(2, {1}), b = pset(2, {0});
  TeamMap m = lift_isomorphism({1, 0}, a, b, 2);
  TeamMap back = invert(m);
  CHECK(check_partial_team_isomorphism(back, 2).pass());
  TeamMap round = compose(back, m);
  for (const auto& [x, y] : round.entries) CHECK(x == y);

  CHECK(extract_isomorphism(m) == ElementMap{1, 0});
  CHECK(extract_isomorphism(round) == ElementMap{0, 1});

  TeamMap squash;
  squash.source = a;
  squash.target = b;
  squash.entries[Relation(1, {{0}})] = Relation(1, {{1}});
  squash.entries[Relation(1, {{1}})] = Relation(1, {{1}});
  CHECK_THROWS_AS(invert(squash), Error);
}

TEST_CASE("passing maps preserve the relational algebra") {
  Structure a = pset(2, {1}), b = pset(2, {0});
  TeamMap m = lift_isomorphism({1, 0}, a, b, 2);
  const auto& es = m.entries;
  for (const auto& [x, fx] : es)
    for (const auto& [y, fy] : es) {
      if (x.arity == y.arity)
        CHECK(m.image(intersect(x, y)) == intersect(fx, fy));
      for (int k = 0; k <= std::min(x.arity, y.arity); ++k) {
        if (x.arity + y.arity - k > 2) continue;
        CHECK(m.image(join_k(x, y, k)) == join_k(fx, fy, k));
      }
    }
}

TEST_CASE("passing maps preserve quantifier-free FOT satisfaction") {
  Structure a = pset(2, {1}), b = pset(2, {0});
  TeamMap m = lift_isomorphism({1, 0}, a, b, 2);
  TeamEvaluator eva(a), evb(b);

  Signature sp;
  sp.relations["P"] = 1;
  for (auto* f : enumerate_formulas(sp, {"v0"}, 4, Dialect::FOT)) {
    if (!quantifier_free(f)) continue;
    for (const auto& [x, fx] : m.entries) {
      if (x.arity != 1) continue;
      CHECK(eva.eval(team_of_relation(x), f) == evb.eval(team_of_relation(fx), f));
    }
  }
  for (auto* f : enumerate_formulas(sp, {"v0", "v1"}, 3, Dialect::FOT)) {
    if (!quantifier_free(f)) continue;
    for (const auto& [x, fx] : m.entries) {
      if (x.arity != 2) continue;
      CHECK(eva.eval(team_of_relation(x), f) == evb.eval(team_of_relation(fx), f));
    }
  }
}

TEST_CASE("passing maps carry term graphs to term graphs") {
  Structure a = rich({1}, {1, 0}, 0);
  Structure b = rich({0}, {1, 0}, 1);  // image of a under the swap
  REQUIRE(is_isomorphism({1, 0}, a, b));
  TeamMap m = lift_isomorphism({1, 0}, a, b, 3);

  const Term* v0 = mk_var("v0");
  std::vector<const Term*> terms = {
      v0,
      mk_const("c"),
      mk_apply("f", {v0}),
      mk_apply("f", {mk_const("c")}),
      mk_apply("f", {mk_apply("f", {v0})}),
  };
  for (const Term* t : terms)
    CHECK(m.image(term_graph(a, t, 1)) == term_graph(b, t, 1));
  CHECK(m.image(term_graph(a, mk_apply("f", {mk_var("v1")}), 2)) ==
        term_graph(b, mk_apply("f", {mk_var("v1")}), 2));
}

TEST_CASE("elementary maps are forward-preserving for independence formulas") {
  Structure a = pset(2, {1}), b = pset(2, {0});
  TeamMap m = lift_isomorphism({1, 0}, a, b, 2);
  REQUIRE(check_elementary_map(m));
  TeamEvaluator eva(a), evb(b);
  Signature sp;
  sp.relations["P"] = 1;
  for (auto* f : enumerate_formulas(sp, {"v0", "v1"}, 3, Dialect::FOIL))
    for (const auto& [x, fx] : m.entries) {
      if (x.arity != 2) continue;
      if (eva.eval(team_of_relation(x), f))
        CHECK(evb.eval(team_of_relation(fx), f));
    }
}
