#pragma once

#include <optional>

#include "teamlog/core.hpp"
#include "teamlog/syntax.hpp"

// Team maps: partial functions from the relations of one finite structure to
// the relations of another, with the closure/axiom checkers that decide when
// such a map is a partial team isomorphism or an elementary map.

namespace teamlog {

struct CheckIssue {
  std::string id;      // axiom or condition identifier
  std::string detail;  // rendered witness
};

struct CheckReport {
  std::vector<CheckIssue> issues;
  bool pass() const { return issues.empty(); }
};

struct TeamMap {
  Structure source;
  Structure target;
  std::map<Relation, Relation> entries;

  bool defined_on(const Relation& x) const { return entries.count(x) > 0; }
  const Relation& image(const Relation& x) const;  // throws if undefined
  RelationFamily domain_family() const;
  RelationFamily range_family() const;

  // element view through singleton entries {(a)} -> {(b)}
  std::optional<Elem> elem_image(Elem a) const;
  bool element_total() const;
  bool element_surjective() const;
};

// Ordinary element maps pi: A -> B, pi[a] = image index.
using ElementMap = std::vector<Elem>;

Tuple apply_element_map(const ElementMap& pi, const Tuple& t);
Relation apply_element_map(const ElementMap& pi, const Relation& x);

// Full isomorphism test (bijective, atoms preserved in both directions,
// functions and constants commute). On failure, *why (if given) receives a
// rendered violated atom.
bool is_isomorphism(const ElementMap& pi, const Structure& a, const Structure& b,
                    std::string* why = nullptr);

// First isomorphism in lexicographic image order, if any.
std::optional<ElementMap> find_isomorphism(const Structure& a, const Structure& b);

// pi-hat: X |-> { pi(t) : t in X } over every relation of arity <= max_arity.
// pi must be an isomorphism (error otherwise).
TeamMap lift_isomorphism(const ElementMap& pi, const Structure& a, const Structure& b,
                         int max_arity);

// Element-injective atom-preserving pi lifts to a map on cl(singletons; A):
// each derived relation is rebuilt over B by replaying its derivation with the
// base cases transported (A^n -> B^n, diagonal -> diagonal, symbol
// interpretations -> symbol interpretations, {a} -> {pi(a)}). For a proper
// embedding the result can still fail the axiom checks (e.g. a singleton A^1
// must land on B^1); callers validate.
TeamMap lift_embedding(const ElementMap& pi, const Structure& a, const Structure& b,
                       int max_arity);

// pi-hat for an element-injective atom-preserving pi that need not be onto:
// X |-> { pi(t) : t in X } over every relation of arity <= max_arity. Not an
// embedding in the axiom sense unless pi is onto; it is the usual input to
// induced_substructure.
TeamMap direct_image_map(const ElementMap& pi, const Structure& a, const Structure& b,
                         int max_arity);

// Identity entries on the given (already closed) family.
TeamMap identity_team_map(const Structure& a, const RelationFamily& family);

// Axioms PI1-PI6 plus the closure precondition on dom/ran (closure defects are
// reported first). With first_only, stops at the first issue.
CheckReport check_partial_team_isomorphism(const TeamMap& f, int max_arity,
                                           bool first_only = false);

// Exact elementarity for finite structures: true iff the expansions of source
// and target by the named dom/image relations are isomorphic.
bool check_elementary_map(const TeamMap& f);

// First (canonical order) elementary map with domain cl(xs; a), if one exists.
std::optional<TeamMap> find_partial_elementary_map(const Structure& a,
                                                   const RelationFamily& xs,
                                                   const Structure& b, int max_arity);

// Tarski-Vaught test over a corpus of FOT formulas phi(v0..vn): whenever the
// target satisfies E1 vn. phi on f(X), some source element a must witness phi
// on f(X)(f(a)/n).
CheckReport check_tarski_vaught(const TeamMap& f, const std::vector<const Formula*>& corpus);

// Union/complement preservation over all pairs of n-ary relations (f must be
// defined on all of them).
CheckReport check_boolean_embedding(const TeamMap& f, int n);

// For an element-total f: A -> C passing the PI axioms: the substructure B of
// C induced on the element image, and the corestriction g = X |-> f(X) meet B^n.
std::pair<Structure, TeamMap> induced_substructure(const TeamMap& f);

TeamMap invert(const TeamMap& f);                      // error if not injective
TeamMap compose(const TeamMap& g, const TeamMap& f);   // g after f

// For element-total, element-surjective maps passing PI: the ordinary
// isomorphism pi with f contained in the pi-lift, read off the singletons.
std::optional<ElementMap> extract_isomorphism(const TeamMap& f);

}  // namespace teamlog
