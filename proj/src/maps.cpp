#include "teamlog/maps.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_set>

#include "teamlog/semantics.hpp"

namespace teamlog {

Tuple apply_element_map(const ElementMap& pi, const Tuple& t) {
  Tuple out;
  out.reserve(t.size());
  for (Elem e : t) out.push_back(pi[static_cast<size_t>(e)]);
  return out;
}

Relation apply_element_map(const ElementMap& pi, const Relation& x) {
  std::vector<Tuple> ts;
  ts.reserve(x.tuples.size());
  for (const Tuple& t : x.tuples) ts.push_back(apply_element_map(pi, t));
  return Relation(x.arity, std::move(ts));
}

namespace {

Relation relation_union(const Relation& x, const Relation& y) {
  if (x.arity != y.arity) throw Error("union of relations with different arities");
  std::vector<Tuple> ts = x.tuples;
  ts.insert(ts.end(), y.tuples.begin(), y.tuples.end());
  return Relation(x.arity, std::move(ts));
}

Relation relation_complement(const Relation& x, const Structure& a) {
  Relation full = a.full_relation(x.arity);
  std::vector<Tuple> ts;
  for (const Tuple& t : full.tuples)
    if (!x.contains(t)) ts.push_back(t);
  return Relation(x.arity, std::move(ts));
}

uint64_t relation_hash(const Relation& r) {
  uint64_t h = 1469598103934665603ull ^ static_cast<uint64_t>(r.arity);
  for (const Tuple& t : r.tuples) {
    h = (h ^ 0x9e3779b9ull) * 1099511628211ull;
    for (Elem e : t) {
      h ^= static_cast<uint64_t>(e) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
  }
  return h;
}

// One-pass closedness test against the same operations closure() saturates
// under: base relations present, same-arity meet, capped product, capped
// projection. Reports relations missing one derivation step away — any
// fixpoint defect surfaces here first. limit = 0 collects everything.
std::vector<Relation> closure_defects(const Structure& a, const RelationFamily& fam,
                                      int max_arity, size_t limit) {
  if (max_arity < 2) throw Error("closure cap must be at least 2");
  for (const auto& [name, k] : a.sig.relations)
    if (k > max_arity) throw Error("closure cap below relation arity: " + name);
  for (const auto& [name, k] : a.sig.functions)
    if (k + 1 > max_arity) throw Error("closure cap below function graph arity: " + name);

  std::unordered_set<uint64_t> hashes;
  for (const Relation& r : fam.relations) hashes.insert(relation_hash(r));
  std::set<Relation> missing;
  auto full_size = [&](int n) { return a.space_size(n); };
  auto saturated = [&] { return limit > 0 && missing.size() >= limit; };
  auto need = [&](const Relation& r) {
    if (hashes.count(relation_hash(r)) == 0 || !fam.contains(r)) missing.insert(r);
  };

  for (int n = 0; n <= max_arity && !saturated(); ++n) {
    need(Relation::empty(n));
    need(a.full_relation(n));
  }
  if (!saturated()) need(diagonal(a, 1));
  for (const auto& [name, r] : a.relations)
    if (!saturated()) need(r);
  for (const auto& [name, k] : a.sig.functions)
    if (!saturated()) need(a.function_graph(name));
  for (const auto& name : a.sig.constants)
    if (!saturated()) need(a.constant_singleton(name));

  const auto& rs = fam.relations;
  for (size_t i = 0; i < rs.size() && !saturated(); ++i) {
    if (rs[i].is_empty()) continue;  // meets with the bottom are base relations
    bool i_full = rs[i].tuples.size() == full_size(rs[i].arity);
    for (size_t j = i + 1; j < rs.size() && !saturated(); ++j) {
      if (rs[i].arity != rs[j].arity || rs[j].is_empty()) continue;
      if (i_full || rs[j].tuples.size() == full_size(rs[j].arity)) continue;
      need(intersect(rs[i], rs[j]));
    }
  }
  for (size_t i = 0; i < rs.size() && !saturated(); ++i) {
    if (rs[i].is_empty()) continue;
    for (size_t j = 0; j < rs.size() && !saturated(); ++j) {
      if (rs[j].is_empty() || rs[i].arity + rs[j].arity > max_arity) continue;
      need(product(rs[i], rs[j]));
    }
  }
  for (size_t i = 0; i < rs.size() && !saturated(); ++i) {
    if (rs[i].is_empty()) continue;
    std::vector<std::vector<int>> idxs{{}};
    for (size_t q = 0; q < idxs.size() && !saturated(); ++q) {
      std::vector<int> cur = idxs[q];
      need(project(rs[i], cur));
      if (static_cast<int>(cur.size()) < max_arity)
        for (int c = 0; c < rs[i].arity; ++c) {
          std::vector<int> ext = cur;
          ext.push_back(c);
          idxs.push_back(std::move(ext));
        }
    }
  }

  std::vector<Relation> out(missing.begin(), missing.end());
  if (limit > 0 && out.size() > limit) out.resize(limit);
  return out;
}

bool tuple_in_domain(const Tuple& t, const Structure& a) {
  for (Elem e : t)
    if (e < 0 || e >= a.size()) return false;
  return true;
}

std::string show_atom(const Structure& a, const std::string& rel, const Tuple& t) {
  std::string s = rel + "(";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) s += ", ";
    s += a.elem_name(t[i]);
  }
  return s + ")";
}

}  // namespace

const Relation& TeamMap::image(const Relation& x) const {
  auto it = entries.find(x);
  if (it == entries.end())
    throw Error("team map not defined on " + show_relation(source, x));
  return it->second;
}

RelationFamily TeamMap::domain_family() const {
  RelationFamily fam;
  for (const auto& [x, y] : entries) fam.relations.push_back(x);
  fam.normalize();
  return fam;
}

RelationFamily TeamMap::range_family() const {
  RelationFamily fam;
  for (const auto& [x, y] : entries) fam.relations.push_back(y);
  fam.normalize();
  return fam;
}

std::optional<Elem> TeamMap::elem_image(Elem a) const {
  auto it = entries.find(Relation(1, {Tuple{a}}));
  if (it == entries.end() || !it->second.is_singleton() || it->second.arity != 1)
    return std::nullopt;
  return it->second.tuples[0][0];
}

bool TeamMap::element_total() const {
  for (Elem a = 0; a < source.size(); ++a)
    if (!defined_on(Relation(1, {Tuple{a}}))) return false;
  return true;
}

bool TeamMap::element_surjective() const {
  std::vector<bool> hit(static_cast<size_t>(target.size()), false);
  for (const auto& [x, y] : entries)
    if (x.arity == 1 && x.is_singleton() && y.arity == 1 && y.is_singleton())
      hit[static_cast<size_t>(y.tuples[0][0])] = true;
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

bool is_isomorphism(const ElementMap& pi, const Structure& a, const Structure& b,
                    std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (a.sig != b.sig) return fail("signatures differ");
  if (a.size() != b.size() || static_cast<int>(pi.size()) != a.size())
    return fail("domain sizes differ");
  std::vector<bool> hit(pi.size(), false);
  for (Elem e : pi) {
    if (e < 0 || e >= b.size() || hit[static_cast<size_t>(e)]) return fail("not a bijection");
    hit[static_cast<size_t>(e)] = true;
  }
  for (const auto& [name, k] : a.sig.relations) {
    const Relation& ra = a.relations.at(name);
    const Relation& rb = b.relations.at(name);
    if (ra.tuples.size() != rb.tuples.size())
      return fail("relation " + name + " has different sizes");
    for (const Tuple& t : ra.tuples)
      if (!rb.contains(apply_element_map(pi, t)))
        return fail("atom not preserved: " + show_atom(a, name, t));
    (void)k;
  }
  for (const auto& [name, k] : a.sig.functions) {
    Relation ga = a.function_graph(name);
    for (const Tuple& t : ga.tuples) {
      Tuple args(t.begin(), t.end() - 1);
      if (b.apply_function(name, apply_element_map(pi, args)) != pi[static_cast<size_t>(t.back())])
        return fail("function not preserved: " + show_atom(a, name, args));
    }
    (void)k;
  }
  for (const auto& name : a.sig.constants)
    if (pi[static_cast<size_t>(a.constants.at(name))] != b.constants.at(name))
      return fail("constant not preserved: " + name);
  return true;
}

std::optional<ElementMap> find_isomorphism(const Structure& a, const Structure& b) {
  if (a.sig != b.sig || a.size() != b.size()) return std::nullopt;
  ElementMap pi(static_cast<size_t>(a.size()));
  std::iota(pi.begin(), pi.end(), 0);
  do {
    if (is_isomorphism(pi, a, b)) return pi;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return std::nullopt;
}

TeamMap lift_isomorphism(const ElementMap& pi, const Structure& a, const Structure& b,
                         int max_arity) {
  std::string why;
  if (!is_isomorphism(pi, a, b, &why)) throw Error("not an isomorphism: " + why);
  TeamMap f;
  f.source = a;
  f.target = b;
  for (const Relation& x : all_relations(a, max_arity).relations)
    f.entries.emplace(x, apply_element_map(pi, x));
  return f;
}

namespace {

// shared precondition of the two embedding lifts
void require_embedding(const ElementMap& pi, const Structure& a, const Structure& b) {
  if (a.sig != b.sig) throw Error("signatures differ");
  if (static_cast<int>(pi.size()) != a.size()) throw Error("element map has wrong size");
  std::vector<bool> hit(static_cast<size_t>(b.size()), false);
  for (Elem e : pi) {
    if (e < 0 || e >= b.size() || hit[static_cast<size_t>(e)])
      throw Error("element map is not injective into the target");
    hit[static_cast<size_t>(e)] = true;
  }
  for (const auto& [name, k] : a.sig.relations) {
    for (const Tuple& t : a.full_relation(k).tuples)
      if (a.relations.at(name).contains(t) != b.relations.at(name).contains(apply_element_map(pi, t)))
        throw Error("atom not preserved: " + show_atom(a, name, t));
  }
  for (const auto& [name, k] : a.sig.functions) {
    for (const Tuple& t : a.full_relation(k).tuples)
      if (b.apply_function(name, apply_element_map(pi, t)) !=
          pi[static_cast<size_t>(a.apply_function(name, t))])
        throw Error("function not preserved: " + show_atom(a, name, t));
  }
  for (const auto& name : a.sig.constants)
    if (pi[static_cast<size_t>(a.constants.at(name))] != b.constants.at(name))
      throw Error("constant not preserved: " + name);
}

}  // namespace

TeamMap lift_embedding(const ElementMap& pi, const Structure& a, const Structure& b,
                       int max_arity) {
  require_embedding(pi, a, b);

  ClosureResult cl = closure(a, RelationFamily{}, max_arity, /*with_singletons=*/true);
  const auto& fam = cl.family.relations;
  std::vector<std::optional<Relation>> out(fam.size());
  std::function<const Relation&(int)> replay = [&](int i) -> const Relation& {
    auto& slot = out[static_cast<size_t>(i)];
    if (slot) return *slot;
    const Derivation& d = cl.derivations[static_cast<size_t>(i)];
    switch (d.kind) {
      case Derivation::EmptyRel: slot = Relation::empty(d.n); break;
      case Derivation::FullRel: slot = b.full_relation(d.n); break;
      case Derivation::DiagonalRel: slot = diagonal(b, 1); break;
      case Derivation::SymbolRel: slot = b.relations.at(d.name); break;
      case Derivation::SymbolFun: slot = b.function_graph(d.name); break;
      case Derivation::SymbolConst: slot = b.constant_singleton(d.name); break;
      case Derivation::Singleton: slot = Relation(1, {Tuple{pi[static_cast<size_t>(d.elem)]}}); break;
      case Derivation::Seed: throw Error("unexpected seed in singleton closure");
      case Derivation::Meet: slot = intersect(replay(d.a), replay(d.b)); break;
      case Derivation::Prod: slot = product(replay(d.a), replay(d.b)); break;
      case Derivation::Proj: slot = project(replay(d.a), d.idx); break;
    }
    return *slot;
  };

  TeamMap f;
  f.source = a;
  f.target = b;
  for (size_t i = 0; i < fam.size(); ++i)
    f.entries.emplace(fam[i], replay(static_cast<int>(i)));
  return f;
}

TeamMap direct_image_map(const ElementMap& pi, const Structure& a, const Structure& b,
                         int max_arity) {
  require_embedding(pi, a, b);
  TeamMap f;
  f.source = a;
  f.target = b;
  for (const Relation& x : all_relations(a, max_arity).relations)
    f.entries.emplace(x, apply_element_map(pi, x));
  return f;
}

TeamMap identity_team_map(const Structure& a, const RelationFamily& family) {
  TeamMap f;
  f.source = a;
  f.target = a;
  for (const Relation& x : family.relations) f.entries.emplace(x, x);
  return f;
}

CheckReport check_partial_team_isomorphism(const TeamMap& f, int max_arity, bool first_only) {
  CheckReport rep;
  const Structure& a = f.source;
  const Structure& b = f.target;
  auto issue = [&](const std::string& id, const std::string& detail) {
    rep.issues.push_back({id, detail});
  };
  auto done = [&]() { return first_only && !rep.issues.empty(); };

  for (const auto& [x, y] : f.entries) {
    if (x.arity != y.arity)
      issue("arity", show_relation(a, x) + " maps to arity " + std::to_string(y.arity));
    for (const Tuple& t : x.tuples)
      if (!tuple_in_domain(t, a)) {
        issue("malformed", "domain relation outside the source: " + show_relation(a, x));
        break;
      }
    for (const Tuple& t : y.tuples)
      if (!tuple_in_domain(t, b)) {
        issue("malformed", "image relation outside the target: " + show_relation(b, y));
        break;
      }
    if (done()) return rep;
  }
  if (!rep.issues.empty()) return rep;  // axioms assume well-formed entries

  RelationFamily dom = f.domain_family();
  RelationFamily ran = f.range_family();
  for (const Relation& r : closure_defects(a, dom, max_arity, first_only ? 1 : 0)) {
    issue("closure-dom", "domain misses " + show_relation(a, r));
    if (done()) return rep;
  }
  for (const Relation& r : closure_defects(b, ran, max_arity, first_only ? 1 : 0)) {
    issue("closure-ran", "range misses " + show_relation(b, r));
    if (done()) return rep;
  }

  // PI1 / PI2: bottom, top, singletons
  for (const auto& [x, y] : f.entries) {
    if (x.is_empty() != y.is_empty()) {
      issue("PI1", show_relation(a, x) + " -> " + show_relation(b, y));
      if (done()) return rep;
    }
    if ((x == a.full_relation(x.arity)) != (y == b.full_relation(y.arity))) {
      issue("PI1", show_relation(a, x) + " -> " + show_relation(b, y));
      if (done()) return rep;
    }
    if (x.is_singleton() != y.is_singleton()) {
      issue("PI2", show_relation(a, x) + " -> " + show_relation(b, y));
      if (done()) return rep;
    }
  }

  // PI3: products
  for (const auto& [x, fx] : f.entries) {
    for (const auto& [y, fy] : f.entries) {
      if (x.arity + y.arity > max_arity) continue;
      auto it = f.entries.find(product(x, y));
      if (it == f.entries.end()) continue;  // reported as a closure defect
      if (it->second != product(fx, fy)) {
        issue("PI3", "f(X x Y) mismatch for X=" + show_relation(a, x) +
                         ", Y=" + show_relation(a, y));
        if (done()) return rep;
      }
    }
  }

  // PI4: projections, all index sequences of length <= cap
  for (const auto& [x, fx] : f.entries) {
    std::vector<std::vector<int>> idxs{{}};
    for (size_t q = 0; q < idxs.size(); ++q) {
      std::vector<int> cur = idxs[q];
      auto it = f.entries.find(project(x, cur));
      if (it != f.entries.end() && it->second != project(fx, cur)) {
        std::string seq;
        for (size_t i = 0; i < cur.size(); ++i)
          seq += (i ? "," : "") + std::to_string(cur[i]);
        issue("PI4", "projection (" + seq + ") of " + show_relation(a, x));
        if (done()) return rep;
      }
      if (static_cast<int>(cur.size()) < max_arity)
        for (int c = 0; c < x.arity; ++c) {
          std::vector<int> ext = cur;
          ext.push_back(c);
          idxs.push_back(std::move(ext));
        }
    }
  }

  // PI5: order
  for (const auto& [x, fx] : f.entries) {
    for (const auto& [y, fy] : f.entries) {
      if (x.arity != y.arity) continue;
      if (x.subset_of(y) != fx.subset_of(fy)) {
        issue("PI5", show_relation(a, x) + " vs " + show_relation(a, y));
        if (done()) return rep;
      }
    }
  }

  // PI6: diagonal and symbol interpretations
  auto check_named = [&](const Relation& xa, const Relation& xb, const std::string& what) {
    auto it = f.entries.find(xa);
    if (it == f.entries.end()) return;  // closure defect already reported
    if (it->second != xb) issue("PI6", what + " -> " + show_relation(b, it->second));
  };
  check_named(diagonal(a, 1), diagonal(b, 1), "diagonal");
  for (const auto& [name, k] : a.sig.relations) {
    check_named(a.relations.at(name), b.relations.at(name), name);
    (void)k;
  }
  for (const auto& [name, k] : a.sig.functions) {
    check_named(a.function_graph(name), b.function_graph(name), "graph of " + name);
    (void)k;
  }
  for (const auto& name : a.sig.constants)
    check_named(a.constant_singleton(name), b.constant_singleton(name), "constant " + name);

  return rep;
}

bool check_elementary_map(const TeamMap& f) {
  const Structure& a = f.source;
  const Structure& b = f.target;
  if (a.sig != b.sig || a.size() != b.size()) return false;
  ElementMap pi(static_cast<size_t>(a.size()));
  std::iota(pi.begin(), pi.end(), 0);
  do {
    if (!is_isomorphism(pi, a, b)) continue;
    bool ok = true;
    for (const auto& [x, y] : f.entries)
      if (apply_element_map(pi, x) != y) {
        ok = false;
        break;
      }
    if (ok) return true;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return false;
}

std::optional<TeamMap> find_partial_elementary_map(const Structure& a,
                                                   const RelationFamily& xs,
                                                   const Structure& b, int max_arity) {
  std::optional<ElementMap> pi = find_isomorphism(a, b);
  if (!pi) return std::nullopt;
  ClosureResult cl = closure(a, xs, max_arity);
  TeamMap f;
  f.source = a;
  f.target = b;
  for (const Relation& x : cl.family.relations) f.entries.emplace(x, apply_element_map(*pi, x));
  return f;
}

CheckReport check_tarski_vaught(const TeamMap& f, const std::vector<const Formula*>& corpus) {
  CheckReport rep;
  const Structure& a = f.source;
  const Structure& b = f.target;
  for (const Formula* phi : corpus) {
    check_dialect(phi, Dialect::FOT);
    int n = 0;
    for (const std::string& v : free_vars(phi)) {
      if (v.size() < 2 || v[0] != 'v' ||
          !std::all_of(v.begin() + 1, v.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw Error("corpus formula has a free variable outside v0,v1,...: " + v);
      n = std::max(n, std::stoi(v.substr(1)));
    }
    std::string vn = "v" + std::to_string(n);
    const Formula* exphi = mk_exists_one(vn, phi);
    for (const auto& [x, fx] : f.entries) {
      if (x.arity != n) continue;
      Team fteam = team_of_relation(fx);
      if (!eval_team(b, fteam, exphi)) continue;
      bool witnessed = false;
      for (Elem e = 0; e < a.size() && !witnessed; ++e) {
        auto img = f.elem_image(e);
        if (!img)
          throw Error("Tarski-Vaught needs {" + a.elem_name(e) + "} in the domain");
        Team supp = supplement(fteam, vn, [&](const Assignment&) {
          return std::vector<Elem>{*img};
        });
        witnessed = eval_team(b, supp, phi);
      }
      if (!witnessed)
        rep.issues.push_back(
            {"tarski-vaught", render(phi) + " at X=" + show_relation(a, x)});
    }
  }
  return rep;
}

CheckReport check_boolean_embedding(const TeamMap& f, int n) {
  CheckReport rep;
  const Structure& a = f.source;
  const Structure& b = f.target;
  uint64_t cells = a.space_size(n);
  if (cells > 16) throw Error("boolean sweep too large: |A|^n = " + std::to_string(cells));
  std::vector<std::pair<Relation, Relation>> nary;
  for (const auto& [x, y] : f.entries)
    if (x.arity == n) nary.emplace_back(x, y);
  if (nary.size() != (uint64_t(1) << cells))
    rep.issues.push_back({"boolean-domain",
                          "map covers " + std::to_string(nary.size()) + " of " +
                              std::to_string(uint64_t(1) << cells) + " n-ary relations"});
  for (const auto& [x, fx] : nary) {
    auto itc = f.entries.find(relation_complement(x, a));
    if (itc != f.entries.end() && itc->second != relation_complement(fx, b))
      rep.issues.push_back({"boolean-complement", show_relation(a, x)});
    for (const auto& [y, fy] : nary) {
      auto itu = f.entries.find(relation_union(x, y));
      if (itu != f.entries.end() && itu->second != relation_union(fx, fy))
        rep.issues.push_back(
            {"boolean-union", show_relation(a, x) + " with " + show_relation(a, y)});
    }
  }
  return rep;
}

std::pair<Structure, TeamMap> induced_substructure(const TeamMap& f) {
  const Structure& a = f.source;
  const Structure& c = f.target;
  if (!f.element_total()) throw Error("induced_substructure needs an element-total map");

  std::vector<Elem> image;  // target indices, sorted
  for (Elem e = 0; e < a.size(); ++e) {
    auto img = f.elem_image(e);
    if (!img) throw Error("singleton image is not a singleton");
    image.push_back(*img);
  }
  std::sort(image.begin(), image.end());
  image.erase(std::unique(image.begin(), image.end()), image.end());
  if (static_cast<int>(image.size()) != a.size())
    throw Error("element map is not injective");

  std::vector<Elem> reindex(static_cast<size_t>(c.size()), -1);
  for (size_t i = 0; i < image.size(); ++i) reindex[static_cast<size_t>(image[i])] = static_cast<Elem>(i);
  auto in_image = [&](const Tuple& t) {
    for (Elem e : t)
      if (reindex[static_cast<size_t>(e)] < 0) return false;
    return true;
  };
  auto restrict_relation = [&](const Relation& r) {
    std::vector<Tuple> ts;
    for (const Tuple& t : r.tuples)
      if (in_image(t)) {
        Tuple u;
        for (Elem e : t) u.push_back(reindex[static_cast<size_t>(e)]);
        ts.push_back(std::move(u));
      }
    return Relation(r.arity, std::move(ts));
  };

  Structure sub;
  sub.sig = c.sig;
  for (Elem e : image) sub.domain.push_back(c.elem_name(e));
  for (const auto& [name, k] : c.sig.relations) {
    sub.relations[name] = restrict_relation(f.image(a.relations.at(name)));
    (void)k;
  }
  for (const auto& [name, k] : c.sig.functions) {
    Relation graph = restrict_relation(f.image(a.function_graph(name)));
    FunctionTable tab;
    tab.arity = k;
    tab.values.assign(static_cast<size_t>(sub.space_size(k)), -1);
    for (const Tuple& t : graph.tuples) {
      Tuple args(t.begin(), t.end() - 1);
      tab.values[sub.tuple_rank(args)] = t.back();
    }
    for (Elem v : tab.values)
      if (v < 0) throw Error("image is not closed under function " + name);
    sub.functions[name] = std::move(tab);
  }
  for (const auto& name : c.sig.constants) {
    Relation s = restrict_relation(f.image(a.constant_singleton(name)));
    if (!s.is_singleton()) throw Error("image misses constant " + name);
    sub.constants[name] = s.tuples[0][0];
  }
  sub.validate();

  // substructure assertion: every symbol agrees with the ambient restriction
  for (const auto& [name, k] : c.sig.relations) {
    Relation ambient = restrict_relation(c.relations.at(name));
    if (sub.relations.at(name) != ambient)
      throw Error("image is not an induced substructure at relation " + name);
    (void)k;
  }

  TeamMap g;
  g.source = a;
  g.target = sub;
  for (const auto& [x, y] : f.entries) g.entries.emplace(x, restrict_relation(y));
  return {std::move(sub), std::move(g)};
}

TeamMap invert(const TeamMap& f) {
  TeamMap g;
  g.source = f.target;
  g.target = f.source;
  for (const auto& [x, y] : f.entries) {
    auto [it, fresh] = g.entries.emplace(y, x);
    if (!fresh)
      throw Error("map is not injective at " + show_relation(f.target, y));
  }
  return g;
}

TeamMap compose(const TeamMap& g, const TeamMap& f) {
  TeamMap h;
  h.source = f.source;
  h.target = g.target;
  for (const auto& [x, y] : f.entries) h.entries.emplace(x, g.image(y));
  return h;
}

std::optional<ElementMap> extract_isomorphism(const TeamMap& f) {
  if (!f.element_total() || !f.element_surjective()) return std::nullopt;
  ElementMap pi(static_cast<size_t>(f.source.size()));
  for (Elem e = 0; e < f.source.size(); ++e) {
    auto img = f.elem_image(e);
    if (!img) return std::nullopt;
    pi[static_cast<size_t>(e)] = *img;
  }
  if (!is_isomorphism(pi, f.source, f.target)) return std::nullopt;
  for (const auto& [x, y] : f.entries)
    if (apply_element_map(pi, x) != y) return std::nullopt;
  return pi;
}

}  // namespace teamlog
