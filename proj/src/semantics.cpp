#include "teamlog/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <set>
#include <unordered_map>
#include <vector>

namespace teamlog {

// ---------------------------------------------------------------------------
// terms and Tarski semantics

Elem eval_term(const Structure& a, const Assignment& s, const Term* t) {
  switch (t->kind) {
    case TermKind::Variable: {
      auto it = s.find(t->name);
      if (it == s.end()) throw Error("unbound variable '" + t->name + "'");
      return it->second;
    }
    case TermKind::Constant: {
      auto it = a.constants.find(t->name);
      if (it == a.constants.end()) throw Error("unknown constant '" + t->name + "'");
      return it->second;
    }
    case TermKind::Apply: {
      Tuple args;
      args.reserve(t->args.size());
      for (const Term* u : t->args) args.push_back(eval_term(a, s, u));
      return a.apply_function(t->name, args);
    }
  }
  throw Error("eval_term: unreachable");
}

namespace {

// v<k> -> k, otherwise -1
int var_index(const std::string& name) {
  if (name.size() < 2 || name[0] != 'v') return -1;
  int idx = 0;
  for (size_t i = 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
    idx = idx * 10 + (name[i] - '0');
  }
  return idx;
}

}  // namespace

Relation term_graph(const Structure& a, const Term* t, int n) {
  if (n < 0) throw Error("term_graph: window must be non-negative");
  std::vector<std::string> vars;
  term_vars(t, vars);
  for (const auto& v : vars) {
    int idx = var_index(v);
    if (idx < 0) throw Error("term_graph: variable '" + v + "' is not of the form v<k>");
    if (idx >= n)
      throw Error("term_graph: variable " + v + " outside the window v0..v" +
                  std::to_string(n - 1));
  }
  std::vector<Tuple> tuples;
  uint64_t count = a.space_size(n);
  for (uint64_t r = 0; r < count; ++r) {
    Tuple args = a.tuple_unrank(r, n);
    Assignment s;
    for (int i = 0; i < n; ++i) s["v" + std::to_string(i)] = args[i];
    args.push_back(eval_term(a, s, t));
    tuples.push_back(std::move(args));
  }
  return Relation(n + 1, std::move(tuples));
}

bool eval_tarski(const Structure& a, const Assignment& s, const Formula* f) {
  switch (f->kind) {
    case FKind::RelAtom: {
      auto it = a.relations.find(f->name);
      if (it == a.relations.end()) throw Error("unknown relation symbol '" + f->name + "'");
      if (static_cast<int>(f->terms.size()) != it->second.arity)
        throw Error("relation '" + f->name + "' arity mismatch");
      Tuple vals;
      for (const Term* t : f->terms) vals.push_back(eval_term(a, s, t));
      return it->second.contains(vals) != f->negated;
    }
    case FKind::EqAtom:
      return (eval_term(a, s, f->terms[0]) == eval_term(a, s, f->terms[1])) != f->negated;
    case FKind::And:
      return eval_tarski(a, s, f->left) && eval_tarski(a, s, f->right);
    case FKind::Or:
      return eval_tarski(a, s, f->left) || eval_tarski(a, s, f->right);
    case FKind::Exists: {
      Assignment s2 = s;
      for (Elem e = 0; e < a.size(); ++e) {
        s2[f->name] = e;
        if (eval_tarski(a, s2, f->left)) return true;
      }
      return false;
    }
    case FKind::Forall: {
      Assignment s2 = s;
      for (Elem e = 0; e < a.size(); ++e) {
        s2[f->name] = e;
        if (!eval_tarski(a, s2, f->left)) return false;
      }
      return true;
    }
    default:
      throw Error("eval_tarski expects a first-order formula; found a team-level constructor");
  }
}

// ---------------------------------------------------------------------------
// team evaluation

namespace {

uint64_t sat_pow(uint64_t base, uint64_t exp) {
  uint64_t r = 1;
  while (exp--) {
    if (base != 0 && r > UINT64_MAX / base) return UINT64_MAX;
    r *= base;
  }
  return r;
}

}  // namespace

struct TeamEvaluator::Impl {
  const Structure& a;
  bool fast;
  EvalLimits limits;

  std::map<std::vector<std::string>, int> domain_ids;
  std::deque<std::map<std::string, int>> positions;  // per domain id: var -> column

  struct Table {
    uint64_t cells = 0;
    std::vector<int8_t> dense;                       // when cells <= 16
    std::unordered_map<uint64_t, int8_t> sparse64;   // when cells <= 64
    std::unordered_map<std::string, int8_t> sparse;  // general fallback
  };
  std::unordered_map<uint64_t, Table> tables;  // key: formula id << 16 | domain id

  Impl(const Structure& s, EvalMode mode, EvalLimits lim)
      : a(s), fast(mode != EvalMode::Generic), limits(lim) {}

  int domain_id(const std::vector<std::string>& d) {
    auto it = domain_ids.find(d);
    if (it != domain_ids.end()) return it->second;
    int id = static_cast<int>(positions.size());
    domain_ids.emplace(d, id);
    std::map<std::string, int> pos;
    for (size_t i = 0; i < d.size(); ++i) pos[d[i]] = static_cast<int>(i);
    positions.push_back(std::move(pos));
    return id;
  }

  Elem term_value(const Term* t, const std::map<std::string, int>& pos, const Tuple& row) {
    switch (t->kind) {
      case TermKind::Variable: {
        auto it = pos.find(t->name);
        if (it == pos.end())
          throw Error("free variable '" + t->name + "' not in the team domain");
        return row[it->second];
      }
      case TermKind::Constant: {
        auto it = a.constants.find(t->name);
        if (it == a.constants.end()) throw Error("unknown constant '" + t->name + "'");
        return it->second;
      }
      case TermKind::Apply: {
        Tuple args;
        args.reserve(t->args.size());
        for (const Term* u : t->args) args.push_back(term_value(u, pos, row));
        return a.apply_function(t->name, args);
      }
    }
    throw Error("term_value: unreachable");
  }

  std::vector<int> tuple_positions(const std::vector<std::string>& vars,
                                   const std::map<std::string, int>& pos) {
    std::vector<int> out;
    out.reserve(vars.size());
    for (const auto& v : vars) {
      auto it = pos.find(v);
      if (it == pos.end()) throw Error("free variable '" + v + "' not in the team domain");
      out.push_back(it->second);
    }
    return out;
  }

  Relation team_columns(const Team& x, const std::vector<int>& cols) {
    std::vector<Tuple> ts;
    ts.reserve(x.rows.size());
    for (const Tuple& row : x.rows) {
      Tuple t;
      t.reserve(cols.size());
      for (int c : cols) t.push_back(row[c]);
      ts.push_back(std::move(t));
    }
    return Relation(static_cast<int>(cols.size()), std::move(ts));
  }

  bool eval(const Formula* f, const Team& x) {
    int did = domain_id(x.domain);
    if (did >= (1 << 16)) throw Error("too many distinct team domains in one evaluator");
    Table& tb = tables[(uint64_t(f->id) << 16) | uint64_t(did)];
    if (tb.cells == 0) tb.cells = a.space_size(static_cast<int>(x.domain.size()));

    uint64_t mask = 0;
    std::string bigkey;
    if (tb.cells <= 64) {
      for (const Tuple& row : x.rows) mask |= uint64_t(1) << a.tuple_rank(row);
    } else {
      bigkey.reserve(x.rows.size() * 8);
      for (const Tuple& row : x.rows) {
        uint64_t r = a.tuple_rank(row);
        for (int b = 0; b < 8; ++b) bigkey.push_back(static_cast<char>((r >> (8 * b)) & 0xff));
      }
    }

    if (tb.cells <= 16) {
      if (tb.dense.empty()) tb.dense.assign(size_t(1) << tb.cells, -1);
      int8_t& slot = tb.dense[mask];
      if (slot < 0) slot = compute(f, x) ? 1 : 0;
      return slot != 0;
    }
    if (tb.cells <= 64) {
      auto it = tb.sparse64.find(mask);
      if (it != tb.sparse64.end()) return it->second != 0;
      bool r = compute(f, x);
      tb.sparse64.emplace(mask, r ? 1 : 0);
      return r;
    }
    auto it = tb.sparse.find(bigkey);
    if (it != tb.sparse.end()) return it->second != 0;
    bool r = compute(f, x);
    tb.sparse.emplace(std::move(bigkey), r ? 1 : 0);
    return r;
  }

  Team mask_team(const Team& x, uint64_t mask) {
    std::vector<Tuple> rows;
    for (size_t i = 0; i < x.rows.size(); ++i)
      if (mask & (uint64_t(1) << i)) rows.push_back(x.rows[i]);
    return Team(x.domain, std::move(rows));
  }

  bool compute(const Formula* f, const Team& x) {
    const auto& pos = positions[domain_id(x.domain)];
    switch (f->kind) {
      case FKind::RelAtom: {
        auto it = a.relations.find(f->name);
        if (it == a.relations.end()) throw Error("unknown relation symbol '" + f->name + "'");
        if (static_cast<int>(f->terms.size()) != it->second.arity)
          throw Error("relation '" + f->name + "' arity mismatch");
        for (const Tuple& row : x.rows) {
          Tuple vals;
          vals.reserve(f->terms.size());
          for (const Term* t : f->terms) vals.push_back(term_value(t, pos, row));
          if (it->second.contains(vals) == f->negated) return false;
        }
        return true;
      }
      case FKind::EqAtom: {
        for (const Tuple& row : x.rows) {
          bool eq = term_value(f->terms[0], pos, row) == term_value(f->terms[1], pos, row);
          if (eq == f->negated) return false;
        }
        return true;
      }
      case FKind::And:
        return eval(f->left, x) && eval(f->right, x);
      case FKind::WeakOr:
        return eval(f->left, x) || eval(f->right, x);
      case FKind::WeakNeg:
        return x.rows.empty() || !eval(f->left, x);
      case FKind::Or:
        return eval_or(f, x);
      case FKind::Exists:
        return eval_exists(f, x);
      case FKind::Forall:
        return eval(f->left, extended(x, f->name, -1));
      case FKind::ExistsOne: {
        for (Elem e = 0; e < a.size(); ++e)
          if (eval(f->left, extended(x, f->name, e))) return true;
        return false;
      }
      case FKind::ForallOne: {
        for (Elem e = 0; e < a.size(); ++e)
          if (!eval(f->left, extended(x, f->name, e))) return false;
        return true;
      }
      case FKind::Dep: {
        if (x.rows.empty()) return true;
        auto px = tuple_positions(f->xs, pos);
        auto py = tuple_positions(f->ys, pos);
        std::map<Tuple, Tuple> fn;
        for (const Tuple& row : x.rows) {
          Tuple k, v;
          for (int c : px) k.push_back(row[c]);
          for (int c : py) v.push_back(row[c]);
          auto [it, fresh] = fn.emplace(std::move(k), v);
          if (!fresh && it->second != v) return false;
        }
        return true;
      }
      case FKind::Con: {
        if (x.rows.empty()) return true;
        auto px = tuple_positions(f->xs, pos);
        Tuple first;
        for (int c : px) first.push_back(x.rows[0][c]);
        for (const Tuple& row : x.rows) {
          for (size_t i = 0; i < px.size(); ++i)
            if (row[px[i]] != first[i]) return false;
        }
        return true;
      }
      case FKind::Inc: {
        if (x.rows.empty()) return true;
        Relation rx = team_columns(x, tuple_positions(f->xs, pos));
        Relation ry = team_columns(x, tuple_positions(f->ys, pos));
        return rx.subset_of(ry);
      }
      case FKind::Exc: {
        if (x.rows.empty()) return true;
        Relation rx = team_columns(x, tuple_positions(f->xs, pos));
        Relation ry = team_columns(x, tuple_positions(f->ys, pos));
        return intersect(rx, ry).is_empty();
      }
      case FKind::Ind: {
        if (x.rows.empty()) return true;
        std::vector<std::string> xz = f->xs, zy = f->zs, xzy = f->xs;
        xz.insert(xz.end(), f->zs.begin(), f->zs.end());
        zy.insert(zy.end(), f->ys.begin(), f->ys.end());
        xzy.insert(xzy.end(), f->zs.begin(), f->zs.end());
        xzy.insert(xzy.end(), f->ys.begin(), f->ys.end());
        Relation lhs = team_columns(x, tuple_positions(xzy, pos));
        Relation rhs = join_k(team_columns(x, tuple_positions(xz, pos)),
                              team_columns(x, tuple_positions(zy, pos)),
                              static_cast<int>(f->zs.size()));
        return lhs == rhs;
      }
    }
    throw Error("compute: unreachable");
  }

  // X with column `var` set to e for every row, or duplicated over all of A
  // when e < 0; appends the column when `var` is not in the domain.
  Team extended(const Team& x, const std::string& var, Elem e) {
    std::vector<std::string> nd = x.domain;
    int p = x.var_pos(var);
    if (p < 0) {
      nd.push_back(var);
      p = static_cast<int>(nd.size()) - 1;
    }
    std::vector<Tuple> rows;
    for (const Tuple& row : x.rows) {
      Tuple r = row;
      r.resize(nd.size(), 0);
      if (e >= 0) {
        r[p] = e;
        rows.push_back(std::move(r));
      } else {
        for (Elem v = 0; v < a.size(); ++v) {
          r[p] = v;
          rows.push_back(r);
        }
      }
    }
    return Team(std::move(nd), std::move(rows));
  }

  Team single_row(const Team& x, size_t i) { return Team(x.domain, {x.rows[i]}); }

  bool eval_or(const Formula* f, const Team& x) {
    size_t m = x.rows.size();
    bool dc = fast && f->downward_fragment;
    uint64_t need = sat_pow(dc ? 2 : 3, m);
    if (need > limits.max_cover_candidates)
      throw Error("disjunction cover search over " + std::to_string(m) +
                  " rows needs " + std::to_string(need) + " candidates, over the limit of " +
                  std::to_string(limits.max_cover_candidates));
    uint64_t full = m == 0 ? 0 : ((m == 64 ? 0 : (uint64_t(1) << m)) - 1);
    if (dc) {
      // Downward closure makes row membership necessary: a row on the left
      // side of a partition must satisfy the left disjunct alone, so rows
      // failing a side are forced to the other and only ambiguous rows are
      // enumerated.
      uint64_t okl = 0, okr = 0;
      for (size_t i = 0; i < m; ++i) {
        Team one = single_row(x, i);
        bool l = eval(f->left, one), r = eval(f->right, one);
        if (!l && !r) return false;
        if (l) okl |= uint64_t(1) << i;
        if (r) okr |= uint64_t(1) << i;
      }
      uint64_t both = okl & okr;
      for (uint64_t w = both;; w = (w - 1) & both) {
        uint64_t y = (okl & ~okr) | w;
        if (eval(f->left, mask_team(x, y)) && eval(f->right, mask_team(x, full & ~y)))
          return true;
        if (w == 0) break;
      }
      return false;
    }
    for (uint64_t y = full;; y = (y - 1) & full) {
      if (eval(f->left, mask_team(x, y))) {
        uint64_t rest = full & ~y;
        for (uint64_t w = y;; w = (w - 1) & y) {
          if (eval(f->right, mask_team(x, rest | w))) return true;
          if (w == 0) break;
        }
      }
      if (y == 0) break;
    }
    return false;
  }

  bool eval_exists(const Formula* f, const Team& x) {
    size_t m = x.rows.size();
    bool dc = fast && f->downward_fragment;
    uint64_t nsets = (uint64_t(1) << a.size()) - 1;  // non-empty subsets of A
    uint64_t per_row = dc ? a.size() : nsets;
    uint64_t need = sat_pow(per_row, m);
    if (need > limits.max_supplement_candidates)
      throw Error("supplement search over " + std::to_string(m) + " rows needs " +
                  std::to_string(need) + " candidates, over the limit of " +
                  std::to_string(limits.max_supplement_candidates));

    std::vector<std::string> nd = x.domain;
    int p = x.var_pos(f->name);
    if (p < 0) {
      nd.push_back(f->name);
      p = static_cast<int>(nd.size()) - 1;
    }
    if (dc) {
      // Downward closure makes row-wise membership necessary: if X(F/x)
      // satisfies the body, so does each single-row subteam {s(F(s)/x)}, so
      // F(s) can only come from that row's witness set.
      std::vector<std::vector<Elem>> wit(m);
      for (size_t i = 0; i < m; ++i) {
        Tuple r = x.rows[i];
        r.resize(nd.size(), 0);
        for (Elem v = 0; v < a.size(); ++v) {
          r[p] = v;
          if (eval(f->left, Team(nd, {r}))) wit[i].push_back(v);
        }
        if (wit[i].empty()) return false;
      }
      std::vector<size_t> digit(m, 0);
      for (;;) {
        std::vector<Tuple> rows;
        rows.reserve(m);
        for (size_t i = 0; i < m; ++i) {
          Tuple r = x.rows[i];
          r.resize(nd.size(), 0);
          r[p] = wit[i][digit[i]];
          rows.push_back(std::move(r));
        }
        if (eval(f->left, Team(nd, std::move(rows)))) return true;
        size_t i = 0;
        while (i < m && digit[i] + 1 == wit[i].size()) digit[i++] = 0;
        if (i == m) return false;
        ++digit[i];
      }
    }
    // digit i = row i's chosen value set, starting at "duplication" and
    // counting down
    std::vector<uint64_t> digit(m, nsets);
    for (;;) {
      std::vector<Tuple> rows;
      for (size_t i = 0; i < m; ++i) {
        Tuple r = x.rows[i];
        r.resize(nd.size(), 0);
        for (Elem v = 0; v < a.size(); ++v)
          if (digit[i] & (uint64_t(1) << v)) {
            r[p] = v;
            rows.push_back(r);
          }
      }
      if (eval(f->left, Team(nd, std::move(rows)))) return true;
      // advance the odometer
      size_t i = 0;
      while (i < m && digit[i] == 1) digit[i++] = nsets;
      if (i == m) return false;
      --digit[i];
    }
  }
};

TeamEvaluator::TeamEvaluator(const Structure& a, EvalMode mode, EvalLimits limits)
    : impl(std::make_unique<Impl>(a, mode, limits)) {
  a.validate();
}
TeamEvaluator::~TeamEvaluator() = default;

bool TeamEvaluator::eval(const Team& x, const Formula* f) {
  const Structure& a = impl->a;
  for (const Tuple& row : x.rows)
    for (Elem e : row)
      if (e < 0 || e >= a.size()) throw Error("team element out of the structure's domain");
  if (!x.rows.empty()) {
    for (const auto& v : free_vars(f))
      if (x.var_pos(v) < 0)
        throw Error("free variable '" + v + "' is not in the team domain");
  }
  return impl->eval(f, x);
}

bool eval_team(const Structure& a, const Team& x, const Formula* f, EvalMode mode) {
  TeamEvaluator ev(a, mode);
  return ev.eval(x, f);
}

// ---------------------------------------------------------------------------
// sentences

uint64_t default_eso_budget() {
  if (const char* env = std::getenv("TEAMLOG_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
      throw Error("TEAMLOG_BUDGET must be a positive integer");
    return v;
  }
  return uint64_t(1) << 24;
}

struct SentenceEvaluator::Impl {
  const Structure& a;
  SOSentence sent;

  struct RelSlot {
    std::string name;
    int arity;
    uint64_t cells;
    int kind;  // 0 prefix, 1 parameter, 2 structure
    std::vector<uint64_t> bits;
  };
  std::vector<RelSlot> slots;
  std::map<std::string, int> slot_of;  // prefix and parameter slots only
  size_t nprefix;

  struct CTerm {
    int kind;  // 0 var, 1 const, 2 apply
    int slot = -1;
    Elem value = -1;
    const FunctionTable* fn = nullptr;
    std::vector<int> args;
  };
  std::vector<CTerm> cterms;

  struct CNode {
    SOKind kind;
    int rel = -1;
    std::vector<int> args;  // compiled term ids (atom: args, eq: two)
    int slot = -1;          // quantified variable slot
    int l = -1, r = -1;
  };
  std::vector<CNode> nodes;
  int nvars = 0;

  std::vector<std::vector<int>> staged;  // per stage 0..nprefix: conjunct roots
  std::vector<Elem> env;

  Impl(const Structure& s, const SOSentence& so) : a(s), sent(so) {
    a.validate();
    for (const auto& [name, arity] : sent.prefix) {
      if (arity < 0) throw Error("negative arity in the relation prefix");
      slot_of[name] = static_cast<int>(slots.size());
      slots.push_back({name, arity, a.space_size(arity), 0, {}});
    }
    nprefix = slots.size();
    for (const auto& [name, arity] : sent.params) {
      if (slot_of.count(name))
        throw Error("name '" + name + "' is both a prefix variable and a parameter");
      slot_of[name] = static_cast<int>(slots.size());
      slots.push_back({name, arity, a.space_size(arity), 1, {}});
    }

    std::map<std::string, std::vector<int>> scope;
    int root = compile(sent.matrix, scope);

    // split the matrix into top-level conjuncts; check each at the earliest
    // point of the prefix enumeration where its relations are all assigned
    staged.assign(nprefix + 1, {});
    std::vector<int> conjuncts;
    flatten_and(root, conjuncts);
    for (int c : conjuncts) {
      int s = max_prefix_slot(c) + 1;
      staged[s].push_back(c);
    }
    env.assign(nvars, 0);
  }

  void flatten_and(int id, std::vector<int>& out) {
    if (nodes[id].kind == SOKind::And) {
      flatten_and(nodes[id].l, out);
      flatten_and(nodes[id].r, out);
    } else {
      out.push_back(id);
    }
  }

  int max_prefix_slot(int id) {
    const CNode& n = nodes[id];
    int m = -1;
    if (n.kind == SOKind::Atom && n.rel < static_cast<int>(nprefix)) m = n.rel;
    if (n.l >= 0) m = std::max(m, max_prefix_slot(n.l));
    if (n.r >= 0) m = std::max(m, max_prefix_slot(n.r));
    return m;
  }

  int compile_term(const Term* t, std::map<std::string, std::vector<int>>& scope) {
    CTerm ct;
    switch (t->kind) {
      case TermKind::Variable: {
        auto it = scope.find(t->name);
        if (it == scope.end() || it->second.empty())
          throw Error("unbound variable '" + t->name + "' in a sentence");
        ct.kind = 0;
        ct.slot = it->second.back();
        break;
      }
      case TermKind::Constant: {
        auto it = a.constants.find(t->name);
        if (it == a.constants.end()) throw Error("unknown constant '" + t->name + "'");
        ct.kind = 1;
        ct.value = it->second;
        break;
      }
      case TermKind::Apply: {
        auto it = a.functions.find(t->name);
        if (it == a.functions.end()) throw Error("unknown function '" + t->name + "'");
        if (static_cast<int>(t->args.size()) != it->second.arity)
          throw Error("function '" + t->name + "' arity mismatch");
        ct.kind = 2;
        ct.fn = &it->second;
        for (const Term* u : t->args) ct.args.push_back(compile_term(u, scope));
        break;
      }
    }
    cterms.push_back(std::move(ct));
    return static_cast<int>(cterms.size()) - 1;
  }

  int compile(const SOFormula* f, std::map<std::string, std::vector<int>>& scope) {
    CNode n;
    n.kind = f->kind;
    switch (f->kind) {
      case SOKind::Atom: {
        auto it = slot_of.find(f->name);
        if (it != slot_of.end()) {
          n.rel = it->second;
        } else {
          auto rit = a.relations.find(f->name);
          if (rit == a.relations.end())
            throw Error("unknown relation symbol '" + f->name + "'");
          n.rel = static_cast<int>(slots.size());
          slots.push_back({f->name, rit->second.arity, a.space_size(rit->second.arity), 2, {}});
          slot_of[f->name] = n.rel;
        }
        if (static_cast<int>(f->terms.size()) != slots[n.rel].arity)
          throw Error("relation '" + f->name + "' arity mismatch: expected " +
                      std::to_string(slots[n.rel].arity) + ", got " +
                      std::to_string(f->terms.size()));
        for (const Term* t : f->terms) n.args.push_back(compile_term(t, scope));
        break;
      }
      case SOKind::Eq:
        n.args.push_back(compile_term(f->terms[0], scope));
        n.args.push_back(compile_term(f->terms[1], scope));
        break;
      case SOKind::Not:
        n.l = compile(f->left, scope);
        break;
      case SOKind::And:
      case SOKind::Or:
      case SOKind::Implies:
      case SOKind::Iff:
        n.l = compile(f->left, scope);
        n.r = compile(f->right, scope);
        break;
      case SOKind::Exists:
      case SOKind::Forall: {
        n.slot = nvars++;
        scope[f->name].push_back(n.slot);
        n.l = compile(f->left, scope);
        scope[f->name].pop_back();
        break;
      }
    }
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size()) - 1;
  }

  Elem term_val(int id) {
    const CTerm& t = cterms[id];
    switch (t.kind) {
      case 0: return env[t.slot];
      case 1: return t.value;
      default: {
        uint64_t rank = 0;
        for (int arg : t.args) rank = rank * a.size() + term_val(arg);
        return t.fn->values[rank];
      }
    }
  }

  bool eval_node(int id) {
    const CNode& n = nodes[id];
    switch (n.kind) {
      case SOKind::Atom: {
        const RelSlot& rs = slots[n.rel];
        uint64_t rank = 0;
        for (int arg : n.args) rank = rank * a.size() + term_val(arg);
        return (rs.bits[rank >> 6] >> (rank & 63)) & 1;
      }
      case SOKind::Eq:
        return term_val(n.args[0]) == term_val(n.args[1]);
      case SOKind::Not:
        return !eval_node(n.l);
      case SOKind::And:
        return eval_node(n.l) && eval_node(n.r);
      case SOKind::Or:
        return eval_node(n.l) || eval_node(n.r);
      case SOKind::Implies:
        return !eval_node(n.l) || eval_node(n.r);
      case SOKind::Iff:
        return eval_node(n.l) == eval_node(n.r);
      case SOKind::Exists: {
        for (Elem e = 0; e < a.size(); ++e) {
          env[n.slot] = e;
          if (eval_node(n.l)) return true;
        }
        return false;
      }
      case SOKind::Forall: {
        for (Elem e = 0; e < a.size(); ++e) {
          env[n.slot] = e;
          if (!eval_node(n.l)) return false;
        }
        return true;
      }
    }
    throw Error("eval_node: unreachable");
  }

  bool stage_ok(size_t s) {
    for (int c : staged[s])
      if (!eval_node(c)) return false;
    return true;
  }

  bool search(size_t s) {
    if (!stage_ok(s)) return false;
    if (s == nprefix) return true;
    RelSlot& rs = slots[s];
    // cells > 63 would have tripped the budget check already
    for (uint64_t mask = 0; mask < (uint64_t(1) << rs.cells); ++mask) {
      rs.bits[0] = mask;
      if (search(s + 1)) return true;
    }
    return false;
  }

  bool eval(const std::map<std::string, Relation>& params, std::optional<uint64_t> budget) {
    // bind parameters
    for (const auto& [name, arity] : sent.params) {
      auto it = params.find(name);
      if (it == params.end())
        throw Error("missing binding for relation parameter '" + name + "'");
      if (it->second.arity != arity)
        throw Error("parameter '" + name + "' arity mismatch: declared " +
                    std::to_string(arity) + ", bound to arity " +
                    std::to_string(it->second.arity));
    }
    for (const auto& [name, rel] : params)
      if (!sent.params.count(name))
        throw Error("unused relation parameter binding '" + name + "'");

    uint64_t limit = budget ? *budget : default_eso_budget();
    uint64_t space = 1;
    for (size_t i = 0; i < nprefix; ++i) {
      uint64_t c = slots[i].cells;
      space = c >= 64 ? UINT64_MAX : sat_mul(space, uint64_t(1) << c);
    }
    if (space > limit)
      throw Error("second-order search space " + space_str(space) + " exceeds the budget of " +
                  std::to_string(limit) + " instantiations");
    for (size_t i = 0; i < nprefix; ++i)
      if (slots[i].cells > 63)
        throw Error("prefix relation '" + slots[i].name + "' ranges over 2^" +
                    std::to_string(slots[i].cells) + " values; not enumerable");

    for (RelSlot& rs : slots) {
      rs.bits.assign((rs.cells + 63) / 64, 0);
      if (rs.kind == 1) {
        const Relation& rel = params.at(rs.name);
        for (const Tuple& t : rel.tuples) {
          for (Elem e : t)
            if (e < 0 || e >= a.size())
              throw Error("parameter '" + rs.name + "' has a tuple outside the domain");
          uint64_t rank = a.tuple_rank(t);
          rs.bits[rank >> 6] |= uint64_t(1) << (rank & 63);
        }
      } else if (rs.kind == 2) {
        const Relation& rel = a.relations.at(rs.name);
        for (const Tuple& t : rel.tuples) {
          uint64_t rank = a.tuple_rank(t);
          rs.bits[rank >> 6] |= uint64_t(1) << (rank & 63);
        }
      }
    }
    return search(0);
  }

  static uint64_t sat_mul(uint64_t x, uint64_t y) {
    if (y != 0 && x > UINT64_MAX / y) return UINT64_MAX;
    return x * y;
  }

  static std::string space_str(uint64_t space) {
    return space == UINT64_MAX ? "over 2^64" : std::to_string(space);
  }
};

SentenceEvaluator::SentenceEvaluator(const Structure& a, const SOSentence& s)
    : impl(std::make_unique<Impl>(a, s)) {}
SentenceEvaluator::~SentenceEvaluator() = default;

bool SentenceEvaluator::eval(const std::map<std::string, Relation>& params,
                             std::optional<uint64_t> budget) {
  return impl->eval(params, budget);
}

bool eval_fo_with_relations(const Structure& a, const SOSentence& s,
                            const std::map<std::string, Relation>& params) {
  if (!s.prefix.empty())
    throw Error("eval_fo_with_relations expects an empty relation prefix");
  SentenceEvaluator ev(a, s);
  return ev.eval(params);
}

bool eval_eso(const Structure& a, const SOSentence& s,
              const std::map<std::string, Relation>& params,
              std::optional<uint64_t> budget) {
  SentenceEvaluator ev(a, s);
  return ev.eval(params, budget);
}

}  // namespace teamlog
