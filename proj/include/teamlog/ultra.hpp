#pragma once

#include "teamlog/maps.hpp"
#include "teamlog/semantics.hpp"

// Ultrafilters on finite index sets and the ultraproducts they induce. Every
// ultrafilter on a finite set is principal, so quotients collapse onto one
// factor; the quotient of choice sequences is still constructed literally and
// the collapse is verified, not assumed.

namespace teamlog {

struct Ultrafilter {
  std::vector<std::string> index;  // names of the points of I, order canonical
  std::set<std::set<int>> members; // subsets of I by position

  bool has(const std::set<int>& s) const { return members.count(s) > 0; }
};

// members = every subset containing `at`; error if `at` is not in the index
// or the index is empty/too large to enumerate subsets.
Ultrafilter principal_ultrafilter(const std::vector<std::string>& index,
                                  const std::string& at);

// Axiom report: ids "range", "empty", "upward", "intersection", "maximality".
CheckReport validate_ultrafilter(const Ultrafilter& u);

// Position of the generator: the intersection of all members, which for a
// valid ultrafilter on a finite set is a singleton. Error otherwise.
int principal_index(const Ultrafilter& u);

struct UltraproductResult {
  Structure product;  // collapsed: element e is the class whose principal
                      // component is e; names reused from the principal factor
  int principal = -1; // position j of the generator in u.index
  std::vector<std::vector<Tuple>> classes;  // classes[e] = choice sequences in
                                            // class e (each of length |I|)
};

// Quotient of the choice-sequence product by U-agreement. All factors must
// share a signature; the collapsed structure is checked to coincide with the
// principal factor.
UltraproductResult ultraproduct_structures(const std::vector<Structure>& as,
                                           const Ultrafilter& u);

// { (f_0/U,...,f_{n-1}/U) | {i | (f_0(i),...,f_{n-1}(i)) in R_i} in U },
// collapsed onto the principal factor. rs[i] must be a relation of as[i], all
// of one arity.
Relation relation_ultraproduct(const std::vector<Structure>& as,
                               const std::vector<Relation>& rs,
                               const Ultrafilter& u);

// Team ultraproduct: assignments s = (s_i)/U with s_i in X_i for U-many i.
// All teams must share a variable domain.
Team team_ultraproduct(const std::vector<Structure>& as, const std::vector<Team>& xs,
                       const Ultrafilter& u);

struct LosReport {
  bool factor_side = false;   // { i | A_i satisfies phi on X_i } is in U
  bool product_side = false;  // the ultraproduct satisfies phi on the team quotient
  bool pass = false;          // fo/fot: sides equal; foil: factor implies product
};

// Evaluates both sides of the fundamental theorem. For fo and fot the two
// sides must agree; for foil only the forward implication is required.
LosReport verify_los(const std::vector<Structure>& as, const std::vector<Team>& xs,
                     const Ultrafilter& u, const Formula* phi, Dialect d);

}  // namespace teamlog
