#include "teamlog/properties.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "teamlog/maps.hpp"
#include "teamlog/semantics.hpp"
#include "teamlog/syntax.hpp"
#include "teamlog/translate.hpp"
#include "teamlog/ultra.hpp"

namespace teamlog {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t suite_seed(uint64_t seed, const std::string& name) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return splitmix64(h ^ splitmix64(seed));
}

struct Ctx {
  const PropertyConfig& cfg;
  std::mt19937_64 rng;
  SuiteResult res;

  Ctx(const PropertyConfig& c, const std::string& name)
      : cfg(c), rng(suite_seed(c.seed, name)) {
    res.name = name;
  }

  size_t pick(size_t n) { return static_cast<size_t>(rng() % n); }
  bool flip() { return pick(2) == 1; }

  void record(bool ok, const std::function<std::string()>& witness) {
    ++res.checked;
    if (!ok) {
      if (res.failed == 0) res.counterexample = witness();
      ++res.failed;
    }
  }
};

std::string show_structure(const Structure& a) {
  std::string s = "|A|=" + std::to_string(a.size());
  for (const auto& [name, r] : a.relations) s += " " + name + "=" + show_relation(a, r);
  for (const auto& [name, tab] : a.functions) {
    s += " " + name + "=[";
    for (uint64_t rank = 0; rank < tab.values.size(); ++rank) {
      if (rank) s += ",";
      s += show_tuple(a, a.tuple_unrank(rank, tab.arity)) + "->" +
           a.elem_name(tab.values[static_cast<size_t>(rank)]);
    }
    s += "]";
  }
  for (const auto& [name, e] : a.constants) s += " " + name + "=" + a.elem_name(e);
  return s;
}

Structure random_structure(Ctx& c, const Signature& sig, int max_size) {
  Structure a;
  int size = 1 + static_cast<int>(c.pick(static_cast<size_t>(max_size)));
  for (int i = 0; i < size; ++i) a.domain.push_back(std::to_string(i));
  a.sig = sig;
  for (const auto& [name, arity] : sig.relations) {
    std::vector<Tuple> ts;
    for (uint64_t rank = 0; rank < a.space_size(arity); ++rank)
      if (c.flip()) ts.push_back(a.tuple_unrank(rank, arity));
    a.relations[name] = Relation(arity, std::move(ts));
  }
  for (const auto& [name, arity] : sig.functions) {
    FunctionTable tab;
    tab.arity = arity;
    tab.values.resize(static_cast<size_t>(a.space_size(arity)));
    for (Elem& v : tab.values) v = static_cast<Elem>(c.pick(static_cast<size_t>(size)));
    a.functions[name] = std::move(tab);
  }
  for (const auto& name : sig.constants)
    a.constants[name] = static_cast<Elem>(c.pick(static_cast<size_t>(size)));
  a.validate();
  return a;
}

Team random_team(Ctx& c, const Structure& a, std::vector<std::string> vars,
                 bool allow_empty) {
  size_t cap = static_cast<size_t>(c.cfg.max_team);
  size_t rows = allow_empty ? c.pick(cap + 1) : 1 + c.pick(cap);
  std::vector<Tuple> rs;
  for (size_t i = 0; i < rows; ++i) {
    Tuple t(vars.size());
    for (Elem& e : t) e = static_cast<Elem>(c.pick(static_cast<size_t>(a.size())));
    rs.push_back(std::move(t));
  }
  return Team(std::move(vars), std::move(rs));
}

Signature sig_pe() {
  Signature sig;
  sig.relations["P"] = 1;
  sig.relations["E"] = 2;
  return sig;
}

Signature sig_p() {
  Signature sig;
  sig.relations["P"] = 1;
  return sig;
}

std::vector<std::string> random_var_tuple(Ctx& c, const std::vector<std::string>& vars,
                                          size_t len) {
  std::vector<std::string> t(len);
  for (auto& v : t) v = vars[c.pick(vars.size())];
  return t;
}

bool atoms_within(const Formula* f, const std::set<FKind>& allowed) {
  switch (f->kind) {
    case FKind::And:
    case FKind::Or:
    case FKind::WeakOr:
      return atoms_within(f->left, allowed) && atoms_within(f->right, allowed);
    case FKind::Exists:
    case FKind::Forall:
    case FKind::WeakNeg:
    case FKind::ExistsOne:
    case FKind::ForallOne:
      return atoms_within(f->left, allowed);
    default:
      return allowed.count(f->kind) > 0;
  }
}

// ---- suites ----

void suite_flatness(Ctx& c) {
  Signature sig = sig_pe();
  std::vector<std::string> vars = {"v0", "v1"};
  for (int i = 0; i < c.cfg.count; ++i) {
    Structure a = random_structure(c, sig, c.cfg.max_structure);
    Team x = random_team(c, a, vars, true);
    const Formula* f =
        sample_formula(sig, vars, c.cfg.max_formula_size, c.rng(), Dialect::FO);
    bool whole = eval_team(a, x, f);
    bool rows = true;
    for (const Tuple& row : x.rows) {
      Assignment s;
      for (size_t j = 0; j < x.domain.size(); ++j) s[x.domain[j]] = row[j];
      rows = rows && eval_tarski(a, s, f);
    }
    c.record(whole == rows, [&] {
      return show_structure(a) + " team=" + show_team(x, a) + " formula=" + render(f);
    });
  }
}

void suite_locality(Ctx& c) {
  Signature sig = sig_pe();
  std::vector<std::string> fvars = {"v0", "v1"};
  std::vector<std::string> tvars = {"v0", "v1", "v2"};
  for (int i = 0; i < c.cfg.count; ++i) {
    Dialect d = i % 2 == 0 ? Dialect::FOIL : Dialect::FOT;
    Structure a = random_structure(c, sig, c.cfg.max_structure);
    Team x = random_team(c, a, tvars, true);
    const Formula* f = sample_formula(sig, fvars, c.cfg.max_formula_size, c.rng(), d);
    const auto& fv = free_vars(f);
    Team cut = restrict_team(x, std::set<std::string>(fv.begin(), fv.end()));
    c.record(eval_team(a, x, f) == eval_team(a, cut, f), [&] {
      return show_structure(a) + " team=" + show_team(x, a) + " formula=" + render(f);
    });
  }
}

void suite_empty_team(Ctx& c) {
  Signature sig = sig_pe();
  std::vector<std::string> vars = {"v0", "v1"};
  for (int i = 0; i < c.cfg.count; ++i) {
    Dialect d = i % 2 == 0 ? Dialect::FOIL : Dialect::FOT;
    Structure a = random_structure(c, sig, c.cfg.max_structure);
    const Formula* f = sample_formula(sig, vars, c.cfg.max_formula_size, c.rng(), d);
    c.record(eval_team(a, Team(vars, {}), f), [&] {
      return show_structure(a) + " formula=" + render(f);
    });
  }
}

void suite_downward_closure(Ctx& c) {
  Signature sig = sig_pe();
  std::vector<std::string> vars = {"v0", "v1"};
  for (int i = 0; i < c.cfg.count; ++i) {
    Structure a = random_structure(c, sig, c.cfg.max_structure);
    const Formula* f = nullptr;
    do {
      f = sample_formula(sig, vars, c.cfg.max_formula_size, c.rng(), Dialect::FOIL);
    } while (!f->downward_fragment);
    Team x = random_team(c, a, vars, true);
    std::vector<Tuple> kept;
    for (const Tuple& row : x.rows)
      if (c.flip()) kept.push_back(row);
    Team y(x.domain, std::move(kept));
    bool ok = !eval_team(a, x, f) || eval_team(a, y, f);
    c.record(ok, [&] {
      return show_structure(a) + " team=" + show_team(x, a) +
             " subteam=" + show_team(y, a) + " formula=" + render(f);
    });
  }
}

void suite_union_closure(Ctx& c) {
  Signature sig = sig_pe();
  std::vector<std::string> vars = {"v0", "v1"};
  const std::set<FKind> allowed = {FKind::RelAtom, FKind::EqAtom, FKind::Inc};
  for (int i = 0; i < c.cfg.count; ++i) {
    Structure a = random_structure(c, sig, c.cfg.max_structure);
    const Formula* f = nullptr;
    do {
      f = sample_formula(sig, vars, c.cfg.max_formula_size, c.rng(), Dialect::FOIL);
    } while (!atoms_within(f, allowed));
    Team x = random_team(c, a, vars, true);
    Team y = random_team(c, a, vars, true);
    bool ok =
        !(eval_team(a, x, f) && eval_team(a, y, f)) || eval_team(a, team_union(x, y), f);
    c.record(ok, [&] {
      return show_structure(a) + " x=" + show_team(x, a) + " y=" + show_team(y, a) +
             " formula=" + render(f);
    });
  }
}

void suite_constancy(Ctx& c) {
  Signature sig = sig_pe();
  std::vector<std::string> vars = {"v0", "v1", "v2"};
  for (int i = 0; i < c.cfg.count; ++i) {
    Structure a = random_structure(c, sig, c.cfg.max_structure);
    Team x = random_team(c, a, vars, true);
    std::vector<std::string> xs = random_var_tuple(c, vars, 1 + c.pick(3));
    const Formula* lhs = mk_con(xs);
    const Formula* body = nullptr;
    for (size_t j = 0; j < xs.size(); ++j) {
      const Formula* eq = mk_eq(mk_var(xs[j]), mk_var("y" + std::to_string(j)));
      body = body ? mk_and(body, eq) : eq;
    }
    const Formula* rhs = body;
    for (size_t j = xs.size(); j-- > 0;)
      rhs = mk_exists_one("y" + std::to_string(j), rhs);
    c.record(eval_team(a, x, lhs) == eval_team(a, x, rhs), [&] {
      return show_structure(a) + " team=" + show_team(x, a) + " formula=" + render(lhs);
    });
  }
}

void suite_theta(Ctx& c) {
  std::vector<std::string> vars = {"v0", "v1"};
  for (int i = 0; i < c.cfg.count; ++i) {
    int n = 1 + static_cast<int>(c.pick(2));
    Signature sig;
    sig.relations["R"] = n;
    Structure a = random_structure(c, sig, c.cfg.max_structure);
    Team x = random_team(c, a, vars, false);
    std::vector<std::string> xs = random_var_tuple(c, vars, static_cast<size_t>(n));
    if (c.flip()) a.relations["R"] = relation_of_team(x, xs);

    std::vector<const Term*> xts, yts;
    std::vector<std::string> ys;
    for (const auto& v : xs) xts.push_back(mk_var(v));
    for (int j = 0; j < n; ++j) {
      ys.push_back("y" + std::to_string(j));
      yts.push_back(mk_var(ys.back()));
    }
    const Formula* guard = mk_weak_or(mk_weak_neg(mk_rel("R", yts)), mk_inc(ys, xs));
    for (int j = n; j-- > 0;) guard = mk_forall_one(ys[static_cast<size_t>(j)], guard);
    const Formula* theta = mk_and(mk_rel("R", xts), guard);

    bool expected = relation_of_team(x, xs) == a.relations.at("R");
    c.record(eval_team(a, x, theta) == expected, [&] {
      return show_structure(a) + " team=" + show_team(x, a) + " formula=" + render(theta);
    });
  }
}

void suite_translation_fot(Ctx& c) {
  Signature sig = sig_p();
  std::vector<std::string> vars = {"v0", "v1"};
  for (int i = 0; i < c.cfg.count; ++i) {
    Structure a = random_structure(c, sig, c.cfg.max_structure);
    Team x = random_team(c, a, vars, true);
    const Formula* f =
        sample_formula(sig, vars, c.cfg.max_formula_size, c.rng(), Dialect::FOT);
    SOSentence chi = fot_to_fo(f, 2);
    bool lhs = eval_team(a, x, f);
    bool rhs =
        eval_fo_with_relations(a, chi, {{"R", relation_of_team(x, vars)}});
    c.record(lhs == rhs, [&] {
      return show_structure(a) + " team=" + show_team(x, a) + " formula=" + render(f) +
             " sentence=" + render(chi);
    });
  }
}

void suite_translation_foil(Ctx& c) {
  Signature sig = sig_p();
  std::vector<std::string> vars = {"v0"};
  for (int i = 0; i < c.cfg.count; ++i) {
    Structure a = random_structure(c, sig, std::min(2, c.cfg.max_structure));
    Team x = random_team(c, a, vars, true);
    const Formula* f =
        sample_formula(sig, vars, c.cfg.max_formula_size, c.rng(), Dialect::FOIL);
    SOSentence chi = foil_to_eso(f, 1);
    bool lhs = eval_team(a, x, f);
    bool rhs = eval_eso(a, chi, {{"R", relation_of_team(x, vars)}});
    c.record(lhs == rhs, [&] {
      return show_structure(a) + " team=" + show_team(x, a) + " formula=" + render(f) +
             " sentence=" + render(chi);
    });
  }
}

// Random isomorphic copy: same element names, interpretations transported
// along a random permutation.
struct IsoPair {
  Structure a, b;
  ElementMap pi;
};

IsoPair random_iso_pair(Ctx& c) {
  Signature sig;
  sig.relations["P"] = 1;
  sig.functions["f"] = 1;
  sig.constants.insert("c");
  IsoPair p;
  p.a = random_structure(c, sig, c.cfg.max_structure);
  int n = p.a.size();
  p.pi.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) p.pi[static_cast<size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(p.pi[static_cast<size_t>(i)], p.pi[c.pick(static_cast<size_t>(i) + 1)]);

  p.b.sig = sig;
  p.b.domain = p.a.domain;
  p.b.relations["P"] = apply_element_map(p.pi, p.a.relations.at("P"));
  FunctionTable tab;
  tab.arity = 1;
  tab.values.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    tab.values[static_cast<size_t>(p.pi[static_cast<size_t>(i)])] =
        p.pi[static_cast<size_t>(p.a.functions.at("f").values[static_cast<size_t>(i)])];
  p.b.functions["f"] = std::move(tab);
  p.b.constants["c"] = p.pi[static_cast<size_t>(p.a.constants.at("c"))];
  p.b.validate();
  return p;
}

void suite_pi_axioms(Ctx& c) {
  for (int i = 0; i < c.cfg.count; ++i) {
    IsoPair p = random_iso_pair(c);
    TeamMap g = lift_isomorphism(p.pi, p.a, p.b, 2);
    CheckReport rep = check_partial_team_isomorphism(g, 2);
    c.record(rep.pass(), [&] {
      return show_structure(p.a) + " issue=" +
             (rep.issues.empty() ? std::string("none") : rep.issues[0].id + ": " + rep.issues[0].detail);
    });

    // a single corrupted entry must break at least one axiom
    auto it = g.entries.begin();
    std::advance(it, static_cast<long>(c.pick(g.entries.size())));
    Relation& y = it->second;
    Tuple t = p.b.tuple_unrank(c.pick(static_cast<size_t>(p.b.space_size(y.arity))), y.arity);
    auto pos = std::find(y.tuples.begin(), y.tuples.end(), t);
    if (pos == y.tuples.end()) {
      y.tuples.push_back(t);
      std::sort(y.tuples.begin(), y.tuples.end());
    } else {
      y.tuples.erase(pos);
    }
    CheckReport rep2 = check_partial_team_isomorphism(g, 2, /*first_only=*/true);
    c.record(!rep2.pass(), [&] {
      return show_structure(p.a) + " corrupted entry at " + show_relation(p.a, it->first) +
             " -> " + show_relation(p.b, it->second) + " still passes";
    });
  }
}

void suite_join_preservation(Ctx& c) {
  for (int i = 0; i < c.cfg.count; ++i) {
    IsoPair p = random_iso_pair(c);
    TeamMap g = lift_isomorphism(p.pi, p.a, p.b, 2);
    std::vector<const Relation*> keys;
    for (const auto& [x, y] : g.entries) keys.push_back(&x);
    const Relation& x = *keys[c.pick(keys.size())];
    const Relation& y = *keys[c.pick(keys.size())];
    bool ok = true;
    std::string why;
    for (int k = 0; k <= std::min(x.arity, y.arity); ++k) {
      Relation j = join_k(x, y, k);
      bool derivable = (k == 0 && x.arity + y.arity <= 2) || (k == x.arity && k == y.arity);
      if (derivable && !g.defined_on(j)) {
        ok = false;
        why = "join_" + std::to_string(k) + " left the domain";
        break;
      }
      if (g.defined_on(j) && g.image(j) != join_k(g.image(x), g.image(y), k)) {
        ok = false;
        why = "f(X join_" + std::to_string(k) + " Y) != f(X) join f(Y)";
        break;
      }
    }
    c.record(ok, [&] {
      return show_structure(p.a) + " X=" + show_relation(p.a, x) +
             " Y=" + show_relation(p.a, y) + " " + why;
    });
  }
}

void suite_los(Ctx& c) {
  Signature sig = sig_p();
  std::vector<std::string> vars = {"v0", "v1"};
  for (int i = 0; i < c.cfg.count; ++i) {
    size_t k = 1 + c.pick(3);
    std::vector<std::string> index;
    for (size_t j = 0; j < k; ++j) index.push_back(std::to_string(j));
    Ultrafilter u = principal_ultrafilter(index, index[c.pick(k)]);

    std::vector<Structure> as;
    std::vector<Team> xs;
    for (size_t j = 0; j < k; ++j) {
      Structure a;
      a.sig = sig;
      a.domain = {"0", "1"};
      std::vector<Tuple> ts;
      for (Elem e = 0; e < 2; ++e)
        if (c.flip()) ts.push_back({e});
      a.relations["P"] = Relation(1, std::move(ts));
      a.validate();
      xs.push_back(random_team(c, a, vars, true));
      as.push_back(std::move(a));
    }

    Dialect d = i % 2 == 0 ? Dialect::FOT : Dialect::FOIL;
    const Formula* f = sample_formula(sig, vars, c.cfg.max_formula_size, c.rng(), d);
    LosReport lr = verify_los(as, xs, u, f, d);
    c.record(lr.pass, [&] {
      std::string s = "formula=" + render(f) + " factors=" +
                      (lr.factor_side ? "true" : "false") + " product=" +
                      (lr.product_side ? "true" : "false");
      for (size_t j = 0; j < k; ++j)
        s += " X" + std::to_string(j) + "=" + show_team(xs[j], as[j]);
      return s;
    });

    std::vector<std::string> xt = random_var_tuple(c, vars, 1 + c.pick(2));
    Relation lhs = relation_of_team(team_ultraproduct(as, xs, u), xt);
    std::vector<Relation> rs;
    for (size_t j = 0; j < k; ++j) rs.push_back(relation_of_team(xs[j], xt));
    Relation rhs = relation_ultraproduct(as, rs, u);
    c.record(lhs == rhs, [&] {
      std::string s = "projection tuple (";
      for (size_t j = 0; j < xt.size(); ++j) s += (j ? " " : "") + xt[j];
      return s + ") does not commute with the ultraproduct";
    });
  }
}

void suite_fast_path(Ctx& c) {
  Signature sig = sig_pe();
  std::vector<std::string> vars = {"v0", "v1"};
  for (int i = 0; i < c.cfg.count; ++i) {
    Structure a = random_structure(c, sig, c.cfg.max_structure);
    Team x = random_team(c, a, vars, true);
    const Formula* f =
        sample_formula(sig, vars, c.cfg.max_formula_size, c.rng(), Dialect::FOIL);
    bool slow = eval_team(a, x, f, EvalMode::Generic);
    bool fast = eval_team(a, x, f, EvalMode::Fast);
    c.record(slow == fast, [&] {
      return show_structure(a) + " team=" + show_team(x, a) + " formula=" + render(f) +
             " generic=" + (slow ? "true" : "false") + " fast=" + (fast ? "true" : "false");
    });
  }
}

using SuiteFn = void (*)(Ctx&);

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"flatness", suite_flatness},
      {"locality", suite_locality},
      {"empty-team", suite_empty_team},
      {"downward-closure", suite_downward_closure},
      {"union-closure", suite_union_closure},
      {"constancy-definability", suite_constancy},
      {"theta", suite_theta},
      {"translation-fot", suite_translation_fot},
      {"translation-foil", suite_translation_foil},
      {"pi-axioms", suite_pi_axioms},
      {"join-preservation", suite_join_preservation},
      {"los", suite_los},
      {"fast-path", suite_fast_path},
  };
  return table;
}

}  // namespace

bool PropertyReport::pass() const {
  for (const auto& s : suites)
    if (s.failed > 0) return false;
  return true;
}

const std::vector<std::string>& property_suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : suite_table()) out.push_back(name);
    return out;
  }();
  return names;
}

PropertyReport run_properties(const PropertyConfig& cfg) {
  if (cfg.count < 1) throw Error("properties config: count must be positive");
  if (cfg.max_structure < 1) throw Error("properties config: max_structure must be positive");
  if (cfg.max_team < 0) throw Error("properties config: max_team must be non-negative");
  if (cfg.max_formula_size < 1)
    throw Error("properties config: max_formula_size must be positive");

  std::set<std::string> wanted(cfg.suites.begin(), cfg.suites.end());
  for (const auto& name : wanted) {
    bool known = false;
    for (const auto& [n, fn] : suite_table()) known = known || n == name;
    if (!known) throw Error("unknown suite: " + name);
  }

  PropertyReport report;
  for (const auto& [name, fn] : suite_table()) {
    if (!wanted.empty() && wanted.count(name) == 0) continue;
    Ctx ctx(cfg, name);
    fn(ctx);
    report.suites.push_back(std::move(ctx.res));
  }
  return report;
}

std::string render(const PropertyReport& r) {
  std::string out;
  int passed = 0;
  for (const auto& s : r.suites) {
    out += s.name + ": " + std::to_string(s.checked) + " checked, " +
           std::to_string(s.failed) + " failed\n";
    if (s.failed > 0)
      out += "  first counterexample: " + s.counterexample + "\n";
    else
      ++passed;
  }
  out += std::to_string(passed) + "/" + std::to_string(r.suites.size()) +
         " suites passed\n";
  return out;
}

}  // namespace teamlog
