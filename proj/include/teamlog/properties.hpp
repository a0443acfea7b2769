#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "teamlog/core.hpp"

// Seeded property suites. Every suite draws random instances and compares two
// independent computations (engine vs. oracle, or the two sides of a proved
// equivalence); a fixed config yields a byte-identical report.

namespace teamlog {

struct PropertyConfig {
  uint64_t seed = 1;
  int count = 200;           // instances per suite
  int max_structure = 3;     // domain size cap
  int max_team = 4;          // team row cap
  int max_formula_size = 3;  // sampled formula depth
  std::vector<std::string> suites;  // empty = all suites
};

struct SuiteResult {
  std::string name;
  int checked = 0;
  int failed = 0;
  std::string counterexample;  // first failing instance, single line
};

struct PropertyReport {
  std::vector<SuiteResult> suites;
  bool pass() const;
};

// Canonical suite order:
//   flatness             FO formulas: team satisfaction = row-wise Tarski
//   locality             satisfaction only depends on the free-variable columns
//   empty-team           the empty team satisfies everything
//   downward-closure     dep/con/exc fragment: subteams inherit satisfaction
//   union-closure        inc fragment: satisfaction is closed under unions
//   constancy-definability  con(xs) = E1 ys. xs = ys
//   theta                R(xs) & A1 ys (R(ys) ~> inc(ys;xs)) captures X[xs]=R
//   translation-fot      eval_team vs. the compiled first-order sentence
//   translation-foil     eval_team vs. the compiled ESO sentence
//   pi-axioms            lifted isomorphisms pass the axiom checks; a
//                        corrupted entry fails them
//   join-preservation    f(X join_k Y) = f(X) join_k f(Y) on lifted maps
//   los                  ultraproduct satisfaction vs. the factor vote, plus
//                        the team/relation ultraproduct commuting identity
//   fast-path            Generic and Fast evaluation modes agree
const std::vector<std::string>& property_suite_names();

// Throws on a malformed config or an unknown suite name.
PropertyReport run_properties(const PropertyConfig& cfg);

// One line per suite plus a summary line.
std::string render(const PropertyReport& r);

}  // namespace teamlog
