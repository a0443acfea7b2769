#pragma once

#include <string>
#include <vector>

#include "teamlog/core.hpp"

// Small structure builders shared by the test suites.

namespace teamlog::testing {

// pure set {0, 1, ..., n-1} with an empty signature
inline Structure pure_set(int n) {
  Structure a;
  for (int i = 0; i < n; ++i) a.domain.push_back(std::to_string(i));
  a.validate();
  return a;
}

// {0, ..., n-1} with one unary predicate P holding on the listed elements
inline Structure pset(int n, std::vector<Elem> p) {
  Structure a = pure_set(n);
  a.sig.relations["P"] = 1;
  std::vector<Tuple> ts;
  for (Elem e : p) ts.push_back({e});
  a.relations["P"] = Relation(1, std::move(ts));
  a.validate();
  return a;
}

// every team over `vars` whose rows come from the full assignment space of a,
// with at most max_rows rows
inline std::vector<Team> all_teams(const Structure& a, const std::vector<std::string>& vars,
                                   int max_rows) {
  int n = static_cast<int>(vars.size());
  uint64_t cells = a.space_size(n);
  std::vector<Tuple> space;
  for (uint64_t r = 0; r < cells; ++r) space.push_back(a.tuple_unrank(r, n));
  std::vector<Team> out;
  for (uint64_t m = 0; m < (uint64_t(1) << cells); ++m) {
    if (__builtin_popcountll(m) > max_rows) continue;
    std::vector<Tuple> rows;
    for (uint64_t i = 0; i < cells; ++i)
      if (m & (uint64_t(1) << i)) rows.push_back(space[i]);
    out.emplace_back(vars, std::move(rows));
  }
  return out;
}

}  // namespace teamlog::testing
