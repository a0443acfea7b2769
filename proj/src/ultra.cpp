#include "teamlog/ultra.hpp"

#include <algorithm>

namespace teamlog {

namespace {

constexpr uint64_t kSequenceCap = 1u << 20;

int find_point(const std::vector<std::string>& index, const std::string& name) {
  auto it = std::find(index.begin(), index.end(), name);
  return it == index.end() ? -1 : static_cast<int>(it - index.begin());
}

// all choice sequences (a_i)_{i in I}, a_i an element of as[i], in rank order
std::vector<Tuple> choice_sequences(const std::vector<Structure>& as) {
  uint64_t total = 1;
  for (const Structure& a : as) {
    total *= static_cast<uint64_t>(a.size());
    if (total > kSequenceCap) throw Error("choice-sequence product too large");
  }
  std::vector<Tuple> seqs;
  seqs.reserve(total);
  Tuple cur(as.size(), 0);
  for (uint64_t k = 0; k < total; ++k) {
    seqs.push_back(cur);
    for (size_t pos = as.size(); pos-- > 0;) {
      if (++cur[pos] < as[pos].size()) break;
      cur[pos] = 0;
    }
  }
  return seqs;
}

void require_common_signature(const std::vector<Structure>& as, const Ultrafilter& u) {
  if (as.empty()) throw Error("ultraproduct needs at least one factor");
  if (as.size() != u.index.size())
    throw Error("factor count does not match the index set");
  for (const Structure& a : as)
    if (a.sig != as[0].sig) throw Error("factors have different signatures");
}

std::set<int> agreement(const Tuple& f, const Tuple& g) {
  std::set<int> s;
  for (size_t i = 0; i < f.size(); ++i)
    if (f[i] == g[i]) s.insert(static_cast<int>(i));
  return s;
}

}  // namespace

Ultrafilter principal_ultrafilter(const std::vector<std::string>& index,
                                  const std::string& at) {
  int i = find_point(index, at);
  if (i < 0) throw Error("principal point " + at + " is not in the index");
  if (index.size() > 20) throw Error("index set too large");
  Ultrafilter u;
  u.index = index;
  for (uint32_t mask = 0; mask < (1u << index.size()); ++mask) {
    if (!(mask & (1u << i))) continue;
    std::set<int> s;
    for (size_t k = 0; k < index.size(); ++k)
      if (mask & (1u << k)) s.insert(static_cast<int>(k));
    u.members.insert(std::move(s));
  }
  return u;
}

CheckReport validate_ultrafilter(const Ultrafilter& u) {
  CheckReport rep;
  auto issue = [&](const std::string& id, const std::string& detail) {
    rep.issues.push_back({id, detail});
  };
  auto show = [&](const std::set<int>& s) {
    std::string out = "{";
    for (int i : s) out += (out.size() > 1 ? "," : "") + u.index[static_cast<size_t>(i)];
    return out + "}";
  };
  int n = static_cast<int>(u.index.size());
  if (n == 0 || n > 20) {
    issue("range", "index set must be nonempty and small");
    return rep;
  }
  for (const auto& s : u.members)
    for (int i : s)
      if (i < 0 || i >= n) {
        issue("range", "member with out-of-range point");
        return rep;
      }
  if (u.has({})) issue("empty", "the empty set is a member");
  for (const auto& s : u.members) {
    for (int i = 0; i < n; ++i) {
      if (s.count(i)) continue;
      std::set<int> t = s;
      t.insert(i);
      if (!u.has(t)) issue("upward", show(s) + " in, " + show(t) + " out");
    }
    for (const auto& t : u.members) {
      std::set<int> m;
      std::set_intersection(s.begin(), s.end(), t.begin(), t.end(),
                            std::inserter(m, m.end()));
      if (!u.has(m)) issue("intersection", show(s) + " meet " + show(t));
    }
  }
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::set<int> s, c;
    for (int k = 0; k < n; ++k) (mask & (1u << k) ? s : c).insert(k);
    if (u.has(s) == u.has(c))
      issue("maximality", show(s) + " and its complement are " +
                              (u.has(s) ? "both in" : "both out"));
  }
  return rep;
}

int principal_index(const Ultrafilter& u) {
  if (u.members.empty()) throw Error("empty ultrafilter");
  std::set<int> meet = *u.members.begin();
  for (const auto& s : u.members) {
    std::set<int> m;
    std::set_intersection(meet.begin(), meet.end(), s.begin(), s.end(),
                          std::inserter(m, m.end()));
    meet = std::move(m);
  }
  if (meet.size() != 1)
    throw Error("ultrafilter is not principal at a single point");
  return *meet.begin();
}

UltraproductResult ultraproduct_structures(const std::vector<Structure>& as,
                                           const Ultrafilter& u) {
  require_common_signature(as, u);
  UltraproductResult res;
  res.principal = principal_index(u);
  const Structure& aj = as[static_cast<size_t>(res.principal)];

  // quotient of the literal sequence product by U-agreement
  std::vector<Tuple> seqs = choice_sequences(as);
  res.classes.assign(static_cast<size_t>(aj.size()), {});
  for (const Tuple& f : seqs) {
    Elem cls = -1;
    for (Elem e = 0; e < aj.size(); ++e) {
      if (res.classes[static_cast<size_t>(e)].empty()) continue;
      if (u.has(agreement(f, res.classes[static_cast<size_t>(e)].front()))) {
        cls = e;
        break;
      }
    }
    if (cls < 0) cls = f[static_cast<size_t>(res.principal)];  // first of its class
    if (cls != f[static_cast<size_t>(res.principal)])
      throw Error("ultraproduct class is not determined by the principal component");
    res.classes[static_cast<size_t>(cls)].push_back(f);
  }
  for (const auto& c : res.classes)
    if (c.empty()) throw Error("ultraproduct class collapse is not onto");

  Structure& b = res.product;
  b.sig = aj.sig;
  b.domain = aj.domain;
  for (const auto& [name, k] : b.sig.relations) {
    std::vector<Relation> rs;
    rs.reserve(as.size());
    for (const Structure& a : as) rs.push_back(a.relations.at(name));
    b.relations[name] = relation_ultraproduct(as, rs, u);
    (void)k;
  }
  for (const auto& [name, k] : b.sig.functions) {
    FunctionTable tab;
    tab.arity = k;
    uint64_t cells = b.space_size(k);
    tab.values.reserve(cells);
    for (uint64_t r = 0; r < cells; ++r) {
      Tuple args = b.tuple_unrank(r, k);
      // pointwise application to the canonical representatives
      Tuple out(as.size());
      for (size_t i = 0; i < as.size(); ++i) {
        Tuple factor_args;
        for (Elem cls : args)
          factor_args.push_back(res.classes[static_cast<size_t>(cls)].front()[i]);
        out[i] = as[i].apply_function(name, factor_args);
      }
      tab.values.push_back(out[static_cast<size_t>(res.principal)]);
    }
    b.functions[name] = std::move(tab);
  }
  for (const auto& name : b.sig.constants) {
    Tuple out(as.size());
    for (size_t i = 0; i < as.size(); ++i) out[i] = as[i].constants.at(name);
    b.constants[name] = out[static_cast<size_t>(res.principal)];
  }
  b.validate();
  if (b != aj) throw Error("ultraproduct did not collapse onto the principal factor");
  return res;
}

Relation relation_ultraproduct(const std::vector<Structure>& as,
                               const std::vector<Relation>& rs,
                               const Ultrafilter& u) {
  require_common_signature(as, u);
  if (rs.size() != as.size()) throw Error("one relation per factor required");
  int arity = rs[0].arity;
  for (size_t i = 0; i < rs.size(); ++i) {
    if (rs[i].arity != arity) throw Error("relation factors have mixed arities");
    for (const Tuple& t : rs[i].tuples)
      for (Elem e : t)
        if (e < 0 || e >= as[i].size())
          throw Error("relation factor outside its structure");
  }
  int j = principal_index(u);

  std::vector<Tuple> seqs = choice_sequences(as);
  uint64_t combos = 1;
  bool literal = true;
  for (int k = 0; k < arity; ++k) {
    combos *= seqs.size();
    if (combos > kSequenceCap) {
      literal = false;
      break;
    }
  }

  std::vector<Tuple> out;
  if (literal) {
    // the comprehension over tuples of choice sequences, verbatim
    std::vector<size_t> pick(static_cast<size_t>(arity), 0);
    for (uint64_t c = 0; c < combos; ++c) {
      std::set<int> where;
      for (size_t i = 0; i < as.size(); ++i) {
        Tuple at_i;
        for (int k = 0; k < arity; ++k) at_i.push_back(seqs[pick[static_cast<size_t>(k)]][i]);
        if (rs[i].contains(at_i)) where.insert(static_cast<int>(i));
      }
      if (u.has(where)) {
        Tuple cls;
        for (int k = 0; k < arity; ++k)
          cls.push_back(seqs[pick[static_cast<size_t>(k)]][static_cast<size_t>(j)]);
        out.push_back(std::move(cls));
      }
      for (size_t pos = pick.size(); pos-- > 0;) {
        if (++pick[pos] < seqs.size()) break;
        pick[pos] = 0;
      }
    }
  } else {
    // same comprehension restricted to principal-component representatives
    for (const Tuple& t : as[static_cast<size_t>(j)].full_relation(arity).tuples) {
      std::vector<Tuple> reps;
      for (Elem e : t) {
        Tuple constant(as.size(), 0);
        for (size_t i = 0; i < as.size(); ++i)
          constant[i] = std::min<Elem>(e, as[i].size() - 1);
        constant[static_cast<size_t>(j)] = e;
        reps.push_back(std::move(constant));
      }
      std::set<int> where;
      for (size_t i = 0; i < as.size(); ++i) {
        Tuple at_i;
        for (const Tuple& r : reps) at_i.push_back(r[i]);
        if (rs[i].contains(at_i)) where.insert(static_cast<int>(i));
      }
      if (u.has(where)) out.push_back(t);
    }
  }
  return Relation(arity, std::move(out));
}

Team team_ultraproduct(const std::vector<Structure>& as, const std::vector<Team>& xs,
                       const Ultrafilter& u) {
  require_common_signature(as, u);
  if (xs.size() != as.size()) throw Error("one team per factor required");
  const std::vector<std::string>& dom = xs[0].domain;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].domain != dom) throw Error("team factors have different domains");
    for (const Tuple& row : xs[i].rows)
      for (Elem e : row)
        if (e < 0 || e >= as[i].size()) throw Error("team factor outside its structure");
  }
  int j = principal_index(u);
  int n = static_cast<int>(dom.size());

  // an assignment tuple is one choice of s_i per factor; enumerate literally
  uint64_t combos = 1;
  for (const Structure& a : as) {
    combos *= a.space_size(n);
    if (combos > kSequenceCap)
      throw Error("team ultraproduct too large to enumerate");
  }
  std::vector<Tuple> rows;
  std::vector<uint64_t> pick(as.size(), 0);
  for (uint64_t c = 0; c < combos; ++c) {
    std::set<int> where;
    for (size_t i = 0; i < as.size(); ++i) {
      Tuple s_i = as[i].tuple_unrank(pick[i], n);
      if (std::binary_search(xs[i].rows.begin(), xs[i].rows.end(), s_i))
        where.insert(static_cast<int>(i));
    }
    if (u.has(where))
      rows.push_back(as[static_cast<size_t>(j)].tuple_unrank(pick[static_cast<size_t>(j)], n));
    for (size_t pos = pick.size(); pos-- > 0;) {
      if (++pick[pos] < as[pos].space_size(n)) break;
      pick[pos] = 0;
    }
  }
  return Team(dom, std::move(rows));
}

LosReport verify_los(const std::vector<Structure>& as, const std::vector<Team>& xs,
                     const Ultrafilter& u, const Formula* phi, Dialect d) {
  check_dialect(phi, d);
  LosReport rep;
  std::set<int> where;
  for (size_t i = 0; i < as.size(); ++i)
    if (eval_team(as[i], xs[i], phi)) where.insert(static_cast<int>(i));
  rep.factor_side = u.has(where);

  UltraproductResult prod = ultraproduct_structures(as, u);
  Team quotient = team_ultraproduct(as, xs, u);
  rep.product_side = eval_team(prod.product, quotient, phi);

  rep.pass = d == Dialect::FOIL ? (!rep.factor_side || rep.product_side)
                                : rep.factor_side == rep.product_side;
  return rep;
}

}  // namespace teamlog
