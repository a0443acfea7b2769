#pragma once

#include "teamlog/maps.hpp"

// Finite directed systems of structures and team maps, and their direct
// limits. Limit elements are coherent, backward-maximal choice functions on
// upsets of the index poset; each node gets a limit map into the colimit, and
// the relations in any limit map's range are the admissible ones.

namespace teamlog {

struct DirectedSystem {
  std::vector<std::string> nodes;           // names of the points of I
  std::vector<std::vector<bool>> leq;       // leq[i][j]: i <= j
  std::vector<Structure> structures;        // one per node
  std::map<std::pair<int, int>, TeamMap> maps;  // one per pair i <= j

  bool le(int i, int j) const { return leq[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
  int node(const std::string& name) const;  // -1 if absent
  const TeamMap& map(int i, int j) const;   // throws if missing
};

// System conditions: preorder and directedness of (I, <=); a map for exactly
// the pairs i <= j with matching endpoint structures; every f_ii the identity
// on its domain; dom(f_ij) = dom(f_ii); ran(f_ij) within dom(f_jk) and
// f_ik = f_jk after f_ij for i <= j <= k. With check_axioms, every edge must
// also pass check_partial_team_isomorphism.
CheckReport validate_system(const DirectedSystem& s, int max_arity,
                            bool check_axioms = true);

// A point of the limit: values on a nonempty upset, coherent along the maps
// and defined at every node that maps into it.
struct LimitElement {
  std::map<int, Elem> values;  // node -> element; keys form the upset

  friend auto operator<=>(const LimitElement&, const LimitElement&) = default;
};

struct DirectLimitResult {
  Structure limit;                     // element e is elements[e]; named
                                       // "<node>.<elem>" at the least node
  std::vector<LimitElement> elements;  // aligned with limit.domain
  std::vector<TeamMap> maps;           // limit map g_i per node, domain
                                       // dom(f_ii) verbatim
  RelationFamily admissible;           // union of the ranges of the g_i
};

// Requires a valid system of element-total maps passing the axiom checks
// (error otherwise). Symbol interpretations are computed from every node and
// their agreement is asserted.
DirectLimitResult direct_limit(const DirectedSystem& s, int max_arity);

// For cofinal directed J (error otherwise): restricts the system to J,
// rebuilds the limit, and checks that eta |-> eta restricted to J is a
// structure isomorphism commuting with the limit maps on their whole domains.
CheckReport cofinal_restriction_check(const DirectedSystem& s, const std::set<int>& j,
                                      int max_arity);

// Cone: one map h_i per node into a common target with h_i = h_j after f_ij
// (error otherwise). Returns the map on admissible relations sending g_i(X)
// to h_i(X); the factoring identity is verified across all witnesses.
TeamMap mediating_map(const DirectedSystem& s, const DirectLimitResult& lim,
                      const std::vector<TeamMap>& cone);

}  // namespace teamlog
