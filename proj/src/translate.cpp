#include "teamlog/translate.hpp"

#include <cctype>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace teamlog {

namespace {

int window_index(const std::string& name) {
  if (name.size() < 2 || name[0] != 'v') return -1;
  for (size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
  if (name.size() > 2 && name[1] == '0') return -1;  // no leading zeros
  long k = std::stol(name.substr(1));
  return k > 1000000 ? -1 : static_cast<int>(k);
}

// --- window normalization ---------------------------------------------------
//
// The clause set only knows how to translate a quantifier that binds the next
// window variable v_n. A general formula may rebind window variables or use
// other names, so we first alpha-rename: every binder gets a unique temporary
// name (bottom-up), then binders are renamed to v_n, v_(n+1), ... by
// quantifier depth (top-down). Team semantics only looks at the subteam on a
// subformula's free variables, so depth-indexed names are sound.

bool is_quant_kind(FKind k) {
  return k == FKind::Exists || k == FKind::Forall || k == FKind::ExistsOne ||
         k == FKind::ForallOne;
}

const Formula* requant(const Formula* f, const std::string& var, const Formula* body) {
  switch (f->kind) {
    case FKind::Exists: return mk_exists(var, body);
    case FKind::Forall: return mk_forall(var, body);
    case FKind::ExistsOne: return mk_exists_one(var, body);
    case FKind::ForallOne: return mk_forall_one(var, body);
    default: throw Error("not a quantifier");
  }
}

const Formula* rebuild(const Formula* f, const Formula* l, const Formula* r) {
  if (l == f->left && r == f->right) return f;
  switch (f->kind) {
    case FKind::And: return mk_and(l, r);
    case FKind::Or: return mk_or(l, r);
    case FKind::WeakOr: return mk_weak_or(l, r);
    case FKind::WeakNeg: return mk_weak_neg(l);
    default: throw Error("not a connective");
  }
}

const Formula* alpha_unique(const Formula* f, int& k, const std::set<std::string>& avoid) {
  if (is_quant_kind(f->kind)) {
    const Formula* body = alpha_unique(f->left, k, avoid);
    std::string t;
    do {
      t = "q" + std::to_string(k++);
    } while (avoid.count(t));
    return requant(f, t, rename_free_var(body, f->name, t));
  }
  if (f->left) {
    const Formula* l = alpha_unique(f->left, k, avoid);
    const Formula* r = f->right ? alpha_unique(f->right, k, avoid) : nullptr;
    return rebuild(f, l, r);
  }
  return f;
}

const Formula* to_levels(const Formula* f, int level) {
  if (is_quant_kind(f->kind)) {
    std::string target = "v" + std::to_string(level);
    const Formula* body = f->left;
    if (f->name != target) body = rename_free_var(body, f->name, target);
    return requant(f, target, to_levels(body, level + 1));
  }
  if (f->left) {
    const Formula* l = to_levels(f->left, level);
    const Formula* r = f->right ? to_levels(f->right, level) : nullptr;
    return rebuild(f, l, r);
  }
  return f;
}

const Formula* normalize_window(const Formula* f, int n) {
  std::set<std::string> vars, rels;
  collect_names(f, vars, rels);
  int k = 0;
  return to_levels(alpha_unique(f, k, vars), n);
}

// --- clause application ------------------------------------------------------

// How the current subformula sees team membership: member(t0..t(n-1)) expands
// to an atom on the parameter or a fresh prefix relation, or — under the
// one-element quantifiers — to the parent's membership plus a pin t_(n-1)=y.
using Member = std::function<const SOFormula*(const std::vector<const Term*>&)>;

struct Translator {
  SOBuilder b;
  std::vector<std::pair<std::string, int>> prefix;
  std::set<std::string> used_rels;
  int var_counter = 0;
  int split_counter = 0;
  int exists_counter = 0;

  std::string fresh_var() { return "y" + std::to_string(var_counter++); }

  std::vector<std::string> fresh_tuple(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(fresh_var());
    return out;
  }

  std::string fresh_split_rel() {
    std::string name;
    do {
      name = "R" + std::to_string(++split_counter);
    } while (used_rels.count(name));
    used_rels.insert(name);
    return name;
  }

  std::string fresh_exists_rel() {
    std::string name;
    do {
      ++exists_counter;
      name = exists_counter == 1 ? "S" : "S" + std::to_string(exists_counter);
    } while (used_rels.count(name));
    used_rels.insert(name);
    return name;
  }

  static std::vector<const Term*> row_terms(int n) {
    std::vector<const Term*> ts;
    for (int i = 0; i < n; ++i) ts.push_back(mk_var("v" + std::to_string(i)));
    return ts;
  }

  static std::vector<const Term*> name_terms(const std::vector<std::string>& names) {
    std::vector<const Term*> ts;
    for (const auto& s : names) ts.push_back(mk_var(s));
    return ts;
  }

  const SOFormula* forall_block(const std::vector<std::string>& names, const SOFormula* body) {
    for (auto it = names.rbegin(); it != names.rend(); ++it) body = b.forall(*it, body);
    return body;
  }
  const SOFormula* forall_window(int n, const SOFormula* body) {
    for (int i = n - 1; i >= 0; --i) body = b.forall("v" + std::to_string(i), body);
    return body;
  }
  const SOFormula* exists_block(const std::vector<std::string>& names, const SOFormula* body) {
    for (auto it = names.rbegin(); it != names.rend(); ++it) body = b.exists(*it, body);
    return body;
  }

  // component index of a window variable inside a team atom tuple
  static int col(const std::string& name, int n) {
    int k = window_index(name);
    if (k < 0 || k >= n) throw Error("variable '" + name + "' escaped the window");
    return k;
  }

  const SOFormula* tr(const Formula* f, int n, const Member& member) {
    switch (f->kind) {
      case FKind::RelAtom:
      case FKind::EqAtom: {
        const SOFormula* lit = f->kind == FKind::RelAtom
                                   ? b.atom(f->name, f->terms)
                                   : b.eq(f->terms[0], f->terms[1]);
        if (f->negated) lit = b.negate(lit);
        return forall_window(n, b.implies(member(row_terms(n)), lit));
      }
      case FKind::Con: {
        auto wits = fresh_tuple(static_cast<int>(f->xs.size()));
        std::vector<const SOFormula*> eqs;
        for (size_t i = 0; i < f->xs.size(); ++i)
          eqs.push_back(b.eq(mk_var(f->xs[i]), mk_var(wits[i])));
        const SOFormula* body =
            forall_window(n, b.implies(member(row_terms(n)), b.conj_all(eqs)));
        return exists_block(wits, body);
      }
      case FKind::Dep: {
        auto w = fresh_tuple(n);
        auto wt = name_terms(w);
        std::vector<const SOFormula*> ante = {member(row_terms(n)), member(wt)};
        for (const auto& x : f->xs) ante.push_back(b.eq(mk_var(x), wt[col(x, n)]));
        std::vector<const SOFormula*> cons;
        for (const auto& y : f->ys) cons.push_back(b.eq(mk_var(y), wt[col(y, n)]));
        return forall_window(n,
                             forall_block(w, b.implies(b.conj_all(ante), b.conj_all(cons))));
      }
      case FKind::Inc: {
        auto w = fresh_tuple(n);
        auto wt = name_terms(w);
        std::vector<const SOFormula*> inner = {member(wt)};
        for (size_t i = 0; i < f->xs.size(); ++i)
          inner.push_back(b.eq(wt[col(f->ys[i], n)], mk_var(f->xs[i])));
        const SOFormula* body =
            b.implies(member(row_terms(n)), exists_block(w, b.conj_all(inner)));
        return forall_window(n, body);
      }
      case FKind::Exc: {
        auto w = fresh_tuple(n);
        auto wt = name_terms(w);
        const SOFormula* both = b.conj(member(row_terms(n)), member(wt));
        std::vector<const SOFormula*> eqs;
        for (size_t i = 0; i < f->xs.size(); ++i)
          eqs.push_back(b.eq(mk_var(f->xs[i]), wt[col(f->ys[i], n)]));
        return forall_window(
            n, forall_block(w, b.implies(both, b.negate(b.conj_all(eqs)))));
      }
      case FKind::Ind: {
        auto w = fresh_tuple(n);
        auto u = fresh_tuple(n);
        auto wt = name_terms(w);
        auto ut = name_terms(u);
        std::vector<const SOFormula*> ante = {member(row_terms(n)), member(wt)};
        for (const auto& z : f->zs) ante.push_back(b.eq(mk_var(z), wt[col(z, n)]));
        std::vector<const SOFormula*> inner = {member(ut)};
        for (const auto& x : f->xs) inner.push_back(b.eq(ut[col(x, n)], mk_var(x)));
        for (const auto& z : f->zs) inner.push_back(b.eq(ut[col(z, n)], mk_var(z)));
        for (const auto& y : f->ys) inner.push_back(b.eq(ut[col(y, n)], wt[col(y, n)]));
        const SOFormula* body =
            b.implies(b.conj_all(ante), exists_block(u, b.conj_all(inner)));
        return forall_window(n, forall_block(w, body));
      }
      case FKind::And:
        return b.conj(tr(f->left, n, member), tr(f->right, n, member));
      case FKind::WeakOr:
        return b.disj(tr(f->left, n, member), tr(f->right, n, member));
      case FKind::WeakNeg: {
        const SOFormula* nonempty =
            exists_block(window_names(n), member(row_terms(n)));
        return b.disj(b.negate(nonempty), b.negate(tr(f->left, n, member)));
      }
      case FKind::ExistsOne:
      case FKind::ForallOne: {
        expect_binds_next(f, n);
        std::string wit = fresh_var();
        Member inner = [this, member, wit](const std::vector<const Term*>& ts) {
          std::vector<const Term*> head(ts.begin(), ts.end() - 1);
          return b.conj(member(head), b.eq(ts.back(), mk_var(wit)));
        };
        const SOFormula* child = tr(f->left, n + 1, inner);
        return f->kind == FKind::ExistsOne ? b.exists(wit, child) : b.forall(wit, child);
      }
      case FKind::Forall: {
        expect_binds_next(f, n);
        Member inner = [member](const std::vector<const Term*>& ts) {
          return member(std::vector<const Term*>(ts.begin(), ts.end() - 1));
        };
        return tr(f->left, n + 1, inner);
      }
      case FKind::Exists: {
        expect_binds_next(f, n);
        std::string s = fresh_exists_rel();
        prefix.emplace_back(s, n + 1);
        std::string y = fresh_var();
        auto rows = row_terms(n);
        auto rows_y = rows;
        rows_y.push_back(mk_var(y));
        const SOFormula* total = forall_window(
            n, b.implies(member(rows), b.exists(y, b.atom(s, rows_y))));
        const SOFormula* project = forall_window(
            n, b.forall(y, b.implies(b.atom(s, rows_y), member(rows))));
        Member inner = [this, s](const std::vector<const Term*>& ts) {
          return b.atom(s, ts);
        };
        return b.conj_all({total, project, tr(f->left, n + 1, inner)});
      }
      case FKind::Or: {
        std::string r1 = fresh_split_rel();
        std::string r2 = fresh_split_rel();
        prefix.emplace_back(r1, n);
        prefix.emplace_back(r2, n);
        auto rows = row_terms(n);
        const SOFormula* cover = forall_window(
            n, b.iff(member(rows), b.disj(b.atom(r1, rows), b.atom(r2, rows))));
        Member m1 = [this, r1](const std::vector<const Term*>& ts) { return b.atom(r1, ts); };
        Member m2 = [this, r2](const std::vector<const Term*>& ts) { return b.atom(r2, ts); };
        return b.conj_all({cover, tr(f->left, n, m1), tr(f->right, n, m2)});
      }
      default:
        throw Error("formula kind outside the translatable dialects");
    }
  }

  static std::vector<std::string> window_names(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("v" + std::to_string(i));
    return out;
  }

  static void expect_binds_next(const Formula* f, int n) {
    if (f->name != "v" + std::to_string(n))
      throw Error("internal: quantifier not in window form");
  }
};

SOSentence translate(const Formula* phi, int n, Dialect d) {
  if (n < 0) throw Error("window size must be nonnegative");
  check_dialect(phi, d);
  for (const auto& v : free_vars(phi)) {
    int k = window_index(v);
    if (k < 0 || k >= n)
      throw Error("free variable '" + v + "' outside the declared window v0..v" +
                  std::to_string(n - 1));
  }
  std::set<std::string> vars, rels;
  collect_names(phi, vars, rels);
  if (rels.count("R"))
    throw Error("relation name 'R' is reserved for the team parameter");

  Translator t;
  t.used_rels = rels;
  t.used_rels.insert("R");

  Member root = [&t](const std::vector<const Term*>& ts) { return t.b.atom("R", ts); };
  const SOFormula* matrix = t.tr(normalize_window(phi, n), n, root);
  return t.b.finish(std::move(t.prefix), {{"R", n}}, matrix);
}

}  // namespace

SOSentence fot_to_fo(const Formula* phi, int n) { return translate(phi, n, Dialect::FOT); }

SOSentence foil_to_eso(const Formula* phi, int n) { return translate(phi, n, Dialect::FOIL); }

SOSentence chi_plus(const SOSentence& chi, int n) {
  if (chi.params.size() != 1)
    throw Error("chi_plus expects a sentence with exactly one relation parameter");
  const auto& [pname, parity] = *chi.params.begin();
  if (parity != n)
    throw Error("parameter " + pname + " has arity " + std::to_string(parity) +
                ", expected " + std::to_string(n));
  SOBuilder b;
  b.absorb(chi);
  std::vector<const Term*> xs;
  const SOFormula* guard = nullptr;
  for (int i = 0; i < n; ++i) xs.push_back(mk_var("x" + std::to_string(i)));
  guard = b.atom(pname, xs);
  for (int i = n - 1; i >= 0; --i) guard = b.exists("x" + std::to_string(i), guard);
  return b.finish(chi.prefix, chi.params, b.implies(guard, chi.matrix));
}

Relation encode_relations(const std::vector<Relation>& rs) {
  if (rs.empty()) throw Error("encode_relations needs at least one relation");
  for (size_t i = 0; i < rs.size(); ++i)
    if (rs[i].is_empty())
      throw Error("encode_relations: relation at position " + std::to_string(i) +
                  " is empty");
  Relation acc = rs[0];
  for (size_t i = 1; i < rs.size(); ++i) acc = product(acc, rs[i]);
  return acc;
}

}  // namespace teamlog
