#pragma once

#include "teamlog/syntax.hpp"

// Compilers from team-logic formulas to relationally parameterized sentences.
// A translation chi(R) of phi over the window v0..v(n-1) satisfies, for every
// finite structure A and team X over the window:
//
//   eval_team(A, X, phi)  <=>  the sentence holds with R bound to X[v0..v(n-1)]
//
// including the empty team. The FOT fragment compiles to a plain first-order
// sentence (empty prefix); the FOIL fragment needs an existential
// relation-variable prefix (one fresh relation per disjunction side or
// first-order existential).

namespace teamlog {

// phi must lie in the FOT dialect and have free variables inside the window.
SOSentence fot_to_fo(const Formula* phi, int n);

// phi must lie in the FOIL dialect; same window convention.
SOSentence foil_to_eso(const Formula* phi, int n);

// Guarded form: (exists x0..x(n-1). R(x0,..)) -> chi. The guard makes the
// sentence true whenever the parameter is empty, matching the convention that
// every team formula holds on the empty team. chi must carry exactly one
// parameter, of arity n.
SOSentence chi_plus(const SOSentence& chi, int n);

// Product coding of a tuple of nonempty relations into a single relation of
// summed arity. Any empty factor is an error: an empty factor would collapse
// the product and lose the other components.
Relation encode_relations(const std::vector<Relation>& rs);

}  // namespace teamlog
