#include "teamlog/core.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace teamlog {

// -------- relations --------

Relation::Relation(int n, std::vector<Tuple> ts) : arity(n), tuples(std::move(ts)) {
  if (arity < 0) throw Error("relation arity must be non-negative");
  for (const Tuple& t : tuples)
    if (static_cast<int>(t.size()) != arity)
      throw Error("relation tuple length does not match arity");
  std::sort(tuples.begin(), tuples.end());
  tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
}

bool Relation::contains(const Tuple& t) const {
  return std::binary_search(tuples.begin(), tuples.end(), t);
}

bool Relation::subset_of(const Relation& other) const {
  if (arity != other.arity) return false;
  return std::includes(other.tuples.begin(), other.tuples.end(), tuples.begin(), tuples.end());
}

void RelationFamily::normalize() {
  std::sort(relations.begin(), relations.end());
  relations.erase(std::unique(relations.begin(), relations.end()), relations.end());
}

bool RelationFamily::contains(const Relation& r) const {
  return std::binary_search(relations.begin(), relations.end(), r);
}

// -------- signatures and structures --------

void Signature::validate() const {
  std::set<std::string> seen;
  auto claim = [&](const std::string& n) {
    if (n.empty()) throw Error("empty symbol name in signature");
    if (!seen.insert(n).second) throw Error("duplicate symbol name in signature: " + n);
  };
  for (const auto& [n, k] : relations) {
    claim(n);
    if (k < 0) throw Error("negative relation arity: " + n);
  }
  for (const auto& [n, k] : functions) {
    claim(n);
    if (k < 1) throw Error("function arity must be positive: " + n);
  }
  for (const auto& n : constants) claim(n);
}

Elem Structure::elem(const std::string& name) const {
  for (size_t i = 0; i < domain.size(); ++i)
    if (domain[i] == name) return static_cast<Elem>(i);
  throw Error("unknown element name: " + name);
}

const std::string& Structure::elem_name(Elem e) const {
  if (e < 0 || e >= size()) throw Error("element index out of range");
  return domain[static_cast<size_t>(e)];
}

uint64_t Structure::tuple_rank(const Tuple& t) const {
  uint64_t r = 0;
  for (Elem e : t) r = r * static_cast<uint64_t>(size()) + static_cast<uint64_t>(e);
  return r;
}

Tuple Structure::tuple_unrank(uint64_t rank, int arity) const {
  Tuple t(static_cast<size_t>(arity));
  for (int i = arity - 1; i >= 0; --i) {
    t[static_cast<size_t>(i)] = static_cast<Elem>(rank % static_cast<uint64_t>(size()));
    rank /= static_cast<uint64_t>(size());
  }
  return t;
}

uint64_t Structure::space_size(int arity) const {
  uint64_t s = 1;
  for (int i = 0; i < arity; ++i) s *= static_cast<uint64_t>(size());
  return s;
}

Relation Structure::full_relation(int arity) const {
  std::vector<Tuple> ts;
  uint64_t n = space_size(arity);
  ts.reserve(static_cast<size_t>(n));
  for (uint64_t r = 0; r < n; ++r) ts.push_back(tuple_unrank(r, arity));
  return Relation(arity, std::move(ts));
}

Relation Structure::function_graph(const std::string& f) const {
  auto it = functions.find(f);
  if (it == functions.end()) throw Error("unknown function symbol: " + f);
  const FunctionTable& tab = it->second;
  std::vector<Tuple> ts;
  for (uint64_t r = 0; r < space_size(tab.arity); ++r) {
    Tuple t = tuple_unrank(r, tab.arity);
    t.push_back(tab.values[static_cast<size_t>(r)]);
    ts.push_back(std::move(t));
  }
  return Relation(tab.arity + 1, std::move(ts));
}

Relation Structure::constant_singleton(const std::string& c) const {
  auto it = constants.find(c);
  if (it == constants.end()) throw Error("unknown constant symbol: " + c);
  return Relation(1, {Tuple{it->second}});
}

Elem Structure::apply_function(const std::string& f, const Tuple& args) const {
  auto it = functions.find(f);
  if (it == functions.end()) throw Error("unknown function symbol: " + f);
  if (static_cast<int>(args.size()) != it->second.arity)
    throw Error("function argument count mismatch for " + f);
  return it->second.values[static_cast<size_t>(tuple_rank(args))];
}

void Structure::validate() const {
  sig.validate();
  if (domain.empty()) throw Error("structure domain must be non-empty");
  std::set<std::string> names(domain.begin(), domain.end());
  if (names.size() != domain.size()) throw Error("duplicate element names in domain");
  auto check_elem = [&](Elem e) {
    if (e < 0 || e >= size()) throw Error("element index out of range in interpretation");
  };
  for (const auto& [name, arity] : sig.relations) {
    auto it = relations.find(name);
    if (it == relations.end()) throw Error("missing relation interpretation: " + name);
    if (it->second.arity != arity) throw Error("relation arity mismatch: " + name);
    for (const Tuple& t : it->second.tuples)
      for (Elem e : t) check_elem(e);
  }
  for (const auto& [name, arity] : sig.functions) {
    auto it = functions.find(name);
    if (it == functions.end()) throw Error("missing function interpretation: " + name);
    if (it->second.arity != arity) throw Error("function arity mismatch: " + name);
    if (it->second.values.size() != space_size(arity))
      throw Error("function table must be total: " + name);
    for (Elem e : it->second.values) check_elem(e);
  }
  for (const auto& name : sig.constants) {
    auto it = constants.find(name);
    if (it == constants.end()) throw Error("missing constant interpretation: " + name);
    check_elem(it->second);
  }
  if (relations.size() != sig.relations.size() || functions.size() != sig.functions.size() ||
      constants.size() != sig.constants.size())
    throw Error("interpretation of a symbol missing from the signature");
}

// -------- teams --------

Team::Team(std::vector<std::string> dom, std::vector<Tuple> rs)
    : domain(std::move(dom)), rows(std::move(rs)) {
  std::set<std::string> names(domain.begin(), domain.end());
  if (names.size() != domain.size()) throw Error("duplicate variable in team domain");
  for (const Tuple& r : rows)
    if (r.size() != domain.size()) throw Error("team row length does not match domain");
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
}

int Team::var_pos(const std::string& v) const {
  for (size_t i = 0; i < domain.size(); ++i)
    if (domain[i] == v) return static_cast<int>(i);
  return -1;
}

Team team_of_relation(const Relation& r) {
  std::vector<std::string> dom;
  for (int i = 0; i < r.arity; ++i) dom.push_back("v" + std::to_string(i));
  return Team(std::move(dom), r.tuples);
}

Relation relation_of_team(const Team& x, const std::vector<std::string>& vars) {
  std::vector<int> pos;
  for (const auto& v : vars) {
    int p = x.var_pos(v);
    if (p < 0) throw Error("variable not in team domain: " + v);
    pos.push_back(p);
  }
  std::vector<Tuple> ts;
  for (const Tuple& row : x.rows) {
    Tuple t;
    t.reserve(pos.size());
    for (int p : pos) t.push_back(row[static_cast<size_t>(p)]);
    ts.push_back(std::move(t));
  }
  return Relation(static_cast<int>(vars.size()), std::move(ts));
}

Team supplement(const Team& x, const std::string& var,
                const std::function<std::vector<Elem>(const Assignment&)>& f) {
  int p = x.var_pos(var);
  std::vector<std::string> dom = x.domain;
  if (p < 0) {
    p = static_cast<int>(dom.size());
    dom.push_back(var);
  }
  std::vector<Tuple> rows;
  for (const Tuple& row : x.rows) {
    Assignment s;
    for (size_t i = 0; i < x.domain.size(); ++i) s[x.domain[i]] = row[i];
    std::vector<Elem> vals = f(s);
    if (vals.empty()) throw Error("supplement function must return a non-empty set on every row");
    for (Elem e : vals) {
      Tuple nr = row;
      nr.resize(dom.size(), 0);
      nr[static_cast<size_t>(p)] = e;
      rows.push_back(std::move(nr));
    }
  }
  return Team(std::move(dom), std::move(rows));
}

Team duplicate_team(const Team& x, const Structure& a, const std::string& var) {
  std::vector<Elem> all;
  for (Elem e = 0; e < a.size(); ++e) all.push_back(e);
  return supplement(x, var, [&](const Assignment&) { return all; });
}

Team restrict_team(const Team& x, const std::set<std::string>& dom) {
  std::vector<std::string> kept;
  std::vector<int> pos;
  for (size_t i = 0; i < x.domain.size(); ++i) {
    if (dom.count(x.domain[i])) {
      kept.push_back(x.domain[i]);
      pos.push_back(static_cast<int>(i));
    }
  }
  for (const auto& v : dom)
    if (x.var_pos(v) < 0) throw Error("restriction variable not in team domain: " + v);
  std::vector<Tuple> rows;
  for (const Tuple& row : x.rows) {
    Tuple nr;
    for (int p : pos) nr.push_back(row[static_cast<size_t>(p)]);
    rows.push_back(std::move(nr));
  }
  return Team(std::move(kept), std::move(rows));
}

Team team_union(const Team& x, const Team& y) {
  if (x.is_empty() && x.domain.empty()) return y;
  if (y.is_empty() && y.domain.empty()) return x;
  std::set<std::string> dx(x.domain.begin(), x.domain.end());
  std::set<std::string> dy(y.domain.begin(), y.domain.end());
  if (dx != dy) throw Error("team union requires equal domains");
  std::vector<Tuple> rows = x.rows;
  std::vector<int> pos;
  for (const auto& v : x.domain) pos.push_back(y.var_pos(v));
  for (const Tuple& row : y.rows) {
    Tuple nr;
    for (int p : pos) nr.push_back(row[static_cast<size_t>(p)]);
    rows.push_back(std::move(nr));
  }
  return Team(x.domain, std::move(rows));
}

// -------- relational algebra --------

Relation project(const Relation& r, const std::vector<int>& idx) {
  for (int i : idx)
    if (i < 0 || i >= r.arity) throw Error("projection index out of range");
  std::vector<Tuple> ts;
  for (const Tuple& t : r.tuples) {
    Tuple nt;
    nt.reserve(idx.size());
    for (int i : idx) nt.push_back(t[static_cast<size_t>(i)]);
    ts.push_back(std::move(nt));
  }
  return Relation(static_cast<int>(idx.size()), std::move(ts));
}

Relation product(const Relation& r, const Relation& s) {
  std::vector<Tuple> ts;
  ts.reserve(r.tuples.size() * s.tuples.size());
  for (const Tuple& a : r.tuples)
    for (const Tuple& b : s.tuples) {
      Tuple t = a;
      t.insert(t.end(), b.begin(), b.end());
      ts.push_back(std::move(t));
    }
  return Relation(r.arity + s.arity, std::move(ts));
}

Relation intersect(const Relation& r, const Relation& s) {
  if (r.arity != s.arity) throw Error("intersection requires equal arities");
  std::vector<Tuple> ts;
  std::set_intersection(r.tuples.begin(), r.tuples.end(), s.tuples.begin(), s.tuples.end(),
                        std::back_inserter(ts));
  return Relation(r.arity, std::move(ts));
}

Relation join_k(const Relation& r, const Relation& s, int k) {
  if (k < 0 || k > r.arity || k > s.arity) throw Error("join overlap exceeds an arity");
  int n = r.arity - k, m = s.arity - k;
  std::vector<Tuple> ts;
  for (const Tuple& a : r.tuples)
    for (const Tuple& b : s.tuples) {
      bool match = true;
      for (int i = 0; i < k && match; ++i)
        if (a[static_cast<size_t>(n + i)] != b[static_cast<size_t>(i)]) match = false;
      if (!match) continue;
      Tuple t(a.begin(), a.end());
      t.insert(t.end(), b.begin() + k, b.end());
      ts.push_back(std::move(t));
    }
  return Relation(n + k + m, std::move(ts));
}

Relation diagonal(const Structure& a, int n) {
  if (n < 0) throw Error("diagonal index must be non-negative");
  if (n == 0) return Relation::point();
  std::vector<Tuple> ts;
  uint64_t count = a.space_size(n);
  for (uint64_t r = 0; r < count; ++r) {
    Tuple half = a.tuple_unrank(r, n);
    Tuple t = half;
    t.insert(t.end(), half.begin(), half.end());
    ts.push_back(std::move(t));
  }
  return Relation(2 * n, std::move(ts));
}

// -------- closure --------

ClosureResult closure(const Structure& a, const RelationFamily& seeds, int max_arity,
                      bool with_singletons, size_t family_limit) {
  if (max_arity < 2) throw Error("closure cap must be at least 2");
  for (const auto& [name, k] : a.sig.relations)
    if (k > max_arity) throw Error("closure cap below relation arity: " + name);
  for (const auto& [name, k] : a.sig.functions)
    if (k + 1 > max_arity) throw Error("closure cap below function graph arity: " + name);
  for (const Relation& r : seeds.relations) {
    if (r.arity > max_arity) throw Error("closure cap below a seed arity");
    for (const Tuple& t : r.tuples)
      for (Elem e : t)
        if (e < 0 || e >= a.size()) throw Error("seed relation tuple outside the domain");
  }

  std::vector<Relation> fam;
  std::vector<Derivation> how;
  std::map<Relation, int> index;
  bool truncated = false;

  auto add = [&](Relation r, Derivation d) -> int {
    auto it = index.find(r);
    if (it != index.end()) return it->second;
    if (fam.size() >= family_limit) throw Error("closure family exceeds the configured limit");
    int id = static_cast<int>(fam.size());
    index.emplace(r, id);
    fam.push_back(std::move(r));
    how.push_back(std::move(d));
    return id;
  };

  for (int n = 0; n <= max_arity; ++n) {
    add(Relation::empty(n), Derivation{Derivation::EmptyRel, n, "", -1, -1, -1, {}});
    add(a.full_relation(n), Derivation{Derivation::FullRel, n, "", -1, -1, -1, {}});
  }
  add(diagonal(a, 1), Derivation{Derivation::DiagonalRel, 1, "", -1, -1, -1, {}});
  for (const auto& [name, k] : a.sig.relations)
    add(a.relations.at(name), Derivation{Derivation::SymbolRel, k, name, -1, -1, -1, {}});
  for (const auto& [name, k] : a.sig.functions)
    add(a.function_graph(name), Derivation{Derivation::SymbolFun, k + 1, name, -1, -1, -1, {}});
  for (const auto& name : a.sig.constants)
    add(a.constant_singleton(name), Derivation{Derivation::SymbolConst, 1, name, -1, -1, -1, {}});
  for (size_t i = 0; i < seeds.relations.size(); ++i)
    add(seeds.relations[i], Derivation{Derivation::Seed, seeds.relations[i].arity, "", -1,
                                       static_cast<int>(i), -1, {}});
  if (with_singletons)
    for (Elem e = 0; e < a.size(); ++e)
      add(Relation(1, {Tuple{e}}), Derivation{Derivation::Singleton, 1, "", e, -1, -1, {}});

  // Saturate. Passes over the growing family until a fixpoint.
  size_t done = 0;
  while (done < fam.size()) {
    size_t upto = fam.size();
    for (size_t i = 0; i < upto; ++i) {
      for (size_t j = (i < done ? done : 0); j < upto; ++j) {
        const Relation ri = fam[i], rj = fam[j];
        if (ri.arity == rj.arity)
          add(intersect(ri, rj),
              Derivation{Derivation::Meet, ri.arity, "", -1, static_cast<int>(i),
                         static_cast<int>(j), {}});
        if (ri.arity + rj.arity <= max_arity)
          add(product(ri, rj), Derivation{Derivation::Prod, ri.arity + rj.arity, "", -1,
                                          static_cast<int>(i), static_cast<int>(j), {}});
        else if (!ri.is_empty() && !rj.is_empty())
          truncated = true;
      }
    }
    for (size_t i = done; i < upto; ++i) {
      const int n = fam[i].arity;
      // all index tuples over {0..n-1} of length <= cap
      std::vector<std::vector<int>> idxs{{}};
      for (size_t q = 0; q < idxs.size(); ++q) {
        std::vector<int> cur = idxs[q];
        const Relation src = fam[i];
        add(project(src, cur), Derivation{Derivation::Proj, static_cast<int>(cur.size()), "", -1,
                                          static_cast<int>(i), -1, cur});
        if (static_cast<int>(cur.size()) < max_arity)
          for (int c = 0; c < n; ++c) {
            std::vector<int> ext = cur;
            ext.push_back(c);
            idxs.push_back(std::move(ext));
          }
      }
    }
    done = upto;
  }

  // Canonical output order with derivations realigned.
  std::vector<int> order(fam.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return fam[static_cast<size_t>(x)] < fam[static_cast<size_t>(y)]; });
  std::vector<int> rank(fam.size());
  for (size_t i = 0; i < order.size(); ++i) rank[static_cast<size_t>(order[i])] = static_cast<int>(i);

  ClosureResult out;
  out.truncated = truncated;
  out.family.relations.reserve(fam.size());
  out.derivations.reserve(fam.size());
  for (int oi : order) {
    Derivation d = how[static_cast<size_t>(oi)];
    if (d.kind == Derivation::Meet || d.kind == Derivation::Prod) {
      d.a = rank[static_cast<size_t>(d.a)];
      d.b = rank[static_cast<size_t>(d.b)];
    } else if (d.kind == Derivation::Proj) {
      d.a = rank[static_cast<size_t>(d.a)];
    }
    out.family.relations.push_back(fam[static_cast<size_t>(oi)]);
    out.derivations.push_back(std::move(d));
  }
  return out;
}

RelationFamily all_relations(const Structure& a, int max_arity, size_t limit) {
  RelationFamily fam;
  size_t total = 0;
  for (int n = 0; n <= max_arity; ++n) {
    uint64_t cells = a.space_size(n);
    if (cells > 24) throw Error("relation space too large to materialize");
    uint64_t count = 1ull << cells;
    total += static_cast<size_t>(count);
    if (total > limit) throw Error("relation family too large to materialize");
    for (uint64_t mask = 0; mask < count; ++mask) {
      std::vector<Tuple> ts;
      for (uint64_t c = 0; c < cells; ++c)
        if (mask & (1ull << c)) ts.push_back(a.tuple_unrank(c, n));
      fam.relations.push_back(Relation(n, std::move(ts)));
    }
  }
  fam.normalize();
  return fam;
}

// -------- rendering --------

std::string show_tuple(const Structure& a, const Tuple& t) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) os << ",";
    os << a.elem_name(t[i]);
  }
  os << ")";
  return os.str();
}

std::string show_relation(const Structure& a, const Relation& r) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < r.tuples.size(); ++i) {
    if (i) os << ",";
    os << show_tuple(a, r.tuples[i]);
  }
  os << "}:" << r.arity;
  return os.str();
}

std::string show_team(const Team& x, const Structure& a) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < x.domain.size(); ++i) {
    if (i) os << ",";
    os << x.domain[i];
  }
  os << "]{";
  for (size_t i = 0; i < x.rows.size(); ++i) {
    if (i) os << ",";
    os << show_tuple(a, x.rows[i]);
  }
  os << "}";
  return os.str();
}

}  // namespace teamlog
