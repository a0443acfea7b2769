#include "teamlog/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace teamlog {

Dialect dialect_from_string(const std::string& s) {
  if (s == "fo" || s == "FO") return Dialect::FO;
  if (s == "fot" || s == "FOT") return Dialect::FOT;
  if (s == "foil" || s == "FOIL") return Dialect::FOIL;
  throw Error("unknown dialect '" + s + "' (expected fo, fot, or foil)");
}

std::string to_string(Dialect d) {
  switch (d) {
    case Dialect::FO: return "fo";
    case Dialect::FOT: return "fot";
    case Dialect::FOIL: return "foil";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// pools

namespace {

constexpr char kSep = '\x1f';

std::deque<Term> g_terms;
std::unordered_map<std::string, const Term*> g_term_index;

std::deque<Formula> g_formulas;
std::unordered_map<std::string, const Formula*> g_formula_index;

std::string term_key(TermKind k, const std::string& name, const std::vector<const Term*>& args) {
  std::string key;
  key += static_cast<char>('0' + static_cast<int>(k));
  key += kSep;
  key += name;
  for (const Term* a : args) {
    key += kSep;
    key += std::to_string(a->id);
  }
  return key;
}

const Term* intern_term(TermKind k, const std::string& name, std::vector<const Term*> args) {
  std::string key = term_key(k, name, args);
  auto it = g_term_index.find(key);
  if (it != g_term_index.end()) return it->second;
  Term t;
  t.kind = k;
  t.name = name;
  t.args = std::move(args);
  t.id = static_cast<uint32_t>(g_terms.size());
  g_terms.push_back(std::move(t));
  const Term* p = &g_terms.back();
  g_term_index.emplace(std::move(key), p);
  return p;
}

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

const Formula* intern_formula(Formula f) {
  std::string key;
  key += static_cast<char>('A' + static_cast<int>(f.kind));
  key += f.negated ? '1' : '0';
  key += kSep;
  key += f.name;
  for (const Term* t : f.terms) {
    key += kSep;
    key += 't' + std::to_string(t->id);
  }
  if (f.left) {
    key += kSep;
    key += 'l' + std::to_string(f.left->id);
  }
  if (f.right) {
    key += kSep;
    key += 'r' + std::to_string(f.right->id);
  }
  for (const auto* blk : {&f.xs, &f.zs, &f.ys}) {
    key += kSep;
    key += ';';
    for (const auto& v : *blk) {
      key += kSep;
      key += v;
    }
  }
  auto it = g_formula_index.find(key);
  if (it != g_formula_index.end()) return it->second;

  // cached attributes
  switch (f.kind) {
    case FKind::RelAtom:
    case FKind::EqAtom: {
      f.size = 1;
      for (const Term* t : f.terms) term_vars(t, f.fv);
      sort_unique(f.fv);
      f.downward_fragment = true;
      break;
    }
    case FKind::And:
    case FKind::Or:
    case FKind::WeakOr: {
      f.size = 1 + f.left->size + f.right->size;
      f.fv = f.left->fv;
      f.fv.insert(f.fv.end(), f.right->fv.begin(), f.right->fv.end());
      sort_unique(f.fv);
      f.downward_fragment =
          f.kind != FKind::WeakOr && f.left->downward_fragment && f.right->downward_fragment;
      break;
    }
    case FKind::Exists:
    case FKind::Forall:
    case FKind::ExistsOne:
    case FKind::ForallOne: {
      f.size = 1 + f.left->size;
      f.fv = f.left->fv;
      f.fv.erase(std::remove(f.fv.begin(), f.fv.end(), f.name), f.fv.end());
      f.downward_fragment = (f.kind == FKind::Exists || f.kind == FKind::Forall) &&
                            f.left->downward_fragment;
      break;
    }
    case FKind::WeakNeg: {
      f.size = 1 + f.left->size;
      f.fv = f.left->fv;
      f.downward_fragment = false;
      break;
    }
    case FKind::Dep:
    case FKind::Con:
    case FKind::Inc:
    case FKind::Exc:
    case FKind::Ind: {
      std::vector<const std::vector<std::string>*> blocks;
      blocks.push_back(&f.xs);
      if (f.kind == FKind::Ind) blocks.push_back(&f.zs);
      if (f.kind != FKind::Con) blocks.push_back(&f.ys);
      f.size = 1;  // an atom is one node, whatever its tuple lengths
      for (const auto* b : blocks) f.fv.insert(f.fv.end(), b->begin(), b->end());
      sort_unique(f.fv);
      f.downward_fragment =
          f.kind == FKind::Dep || f.kind == FKind::Con || f.kind == FKind::Exc;
      break;
    }
  }
  f.id = static_cast<uint32_t>(g_formulas.size());
  g_formulas.push_back(std::move(f));
  const Formula* p = &g_formulas.back();
  g_formula_index.emplace(std::move(key), p);
  return p;
}

}  // namespace

const Term* mk_var(const std::string& name) { return intern_term(TermKind::Variable, name, {}); }
const Term* mk_const(const std::string& name) { return intern_term(TermKind::Constant, name, {}); }
const Term* mk_apply(const std::string& fn, std::vector<const Term*> args) {
  return intern_term(TermKind::Apply, fn, std::move(args));
}

void term_vars(const Term* t, std::vector<std::string>& out) {
  if (t->kind == TermKind::Variable) out.push_back(t->name);
  for (const Term* a : t->args) term_vars(a, out);
}

std::string render(const Term* t) {
  if (t->kind != TermKind::Apply) return t->name;
  std::string s = t->name + "(";
  for (size_t i = 0; i < t->args.size(); ++i) {
    if (i) s += ", ";
    s += render(t->args[i]);
  }
  return s + ")";
}

const Formula* mk_rel(const std::string& name, std::vector<const Term*> args, bool negated) {
  Formula f;
  f.kind = FKind::RelAtom;
  f.negated = negated;
  f.name = name;
  f.terms = std::move(args);
  return intern_formula(std::move(f));
}

const Formula* mk_eq(const Term* a, const Term* b, bool negated) {
  Formula f;
  f.kind = FKind::EqAtom;
  f.negated = negated;
  f.terms = {a, b};
  return intern_formula(std::move(f));
}

namespace {
const Formula* binary(FKind k, const Formula* a, const Formula* b) {
  Formula f;
  f.kind = k;
  f.left = a;
  f.right = b;
  return intern_formula(std::move(f));
}
const Formula* quant(FKind k, const std::string& var, const Formula* body) {
  if (var.empty()) throw Error("quantified variable name must be non-empty");
  Formula f;
  f.kind = k;
  f.name = var;
  f.left = body;
  return intern_formula(std::move(f));
}
}  // namespace

const Formula* mk_and(const Formula* a, const Formula* b) { return binary(FKind::And, a, b); }
const Formula* mk_or(const Formula* a, const Formula* b) { return binary(FKind::Or, a, b); }
const Formula* mk_weak_or(const Formula* a, const Formula* b) {
  return binary(FKind::WeakOr, a, b);
}
const Formula* mk_exists(const std::string& var, const Formula* body) {
  return quant(FKind::Exists, var, body);
}
const Formula* mk_forall(const std::string& var, const Formula* body) {
  return quant(FKind::Forall, var, body);
}
const Formula* mk_exists_one(const std::string& var, const Formula* body) {
  return quant(FKind::ExistsOne, var, body);
}
const Formula* mk_forall_one(const std::string& var, const Formula* body) {
  return quant(FKind::ForallOne, var, body);
}
const Formula* mk_weak_neg(const Formula* a) {
  Formula f;
  f.kind = FKind::WeakNeg;
  f.left = a;
  return intern_formula(std::move(f));
}

const Formula* mk_dep(std::vector<std::string> xs, std::vector<std::string> ys) {
  if (ys.empty()) throw Error("dep: the determined tuple must be non-empty");
  if (xs.empty()) return mk_con(std::move(ys));
  Formula f;
  f.kind = FKind::Dep;
  f.xs = std::move(xs);
  f.ys = std::move(ys);
  return intern_formula(std::move(f));
}

const Formula* mk_con(std::vector<std::string> xs) {
  Formula f;
  f.kind = FKind::Con;
  f.xs = std::move(xs);
  return intern_formula(std::move(f));
}

namespace {
const Formula* pair_atom(FKind k, std::vector<std::string> xs, std::vector<std::string> ys,
                         const char* what) {
  if (xs.empty() || ys.empty()) throw Error(std::string(what) + ": tuples must be non-empty");
  if (xs.size() != ys.size())
    throw Error(std::string(what) + ": tuples must have equal length");
  Formula f;
  f.kind = k;
  f.xs = std::move(xs);
  f.ys = std::move(ys);
  return intern_formula(std::move(f));
}
}  // namespace

const Formula* mk_inc(std::vector<std::string> xs, std::vector<std::string> ys) {
  return pair_atom(FKind::Inc, std::move(xs), std::move(ys), "inc");
}
const Formula* mk_exc(std::vector<std::string> xs, std::vector<std::string> ys) {
  return pair_atom(FKind::Exc, std::move(xs), std::move(ys), "exc");
}

const Formula* mk_ind(std::vector<std::string> xs, std::vector<std::string> zs,
                      std::vector<std::string> ys) {
  if (xs.empty() || ys.empty()) throw Error("ind: outer tuples must be non-empty");
  Formula f;
  f.kind = FKind::Ind;
  f.xs = std::move(xs);
  f.zs = std::move(zs);
  f.ys = std::move(ys);
  return intern_formula(std::move(f));
}

bool is_literal(const Formula* f) {
  return f->kind == FKind::RelAtom || f->kind == FKind::EqAtom;
}

namespace {
const char* constructor_name(FKind k) {
  switch (k) {
    case FKind::RelAtom: return "relation atom";
    case FKind::EqAtom: return "equality atom";
    case FKind::And: return "'&'";
    case FKind::Or: return "splitting disjunction '|'";
    case FKind::Exists: return "'exists'";
    case FKind::Forall: return "'forall'";
    case FKind::WeakNeg: return "weak negation '~'";
    case FKind::WeakOr: return "weak disjunction '\\/'";
    case FKind::ExistsOne: return "'E1'";
    case FKind::ForallOne: return "'A1'";
    case FKind::Dep: return "'dep'";
    case FKind::Con: return "'con'";
    case FKind::Inc: return "'inc'";
    case FKind::Exc: return "'exc'";
    case FKind::Ind: return "'ind'";
  }
  return "?";
}

bool kind_in_dialect(FKind k, Dialect d) {
  switch (k) {
    case FKind::RelAtom:
    case FKind::EqAtom:
    case FKind::And:
      return true;
    case FKind::Or:
    case FKind::Exists:
    case FKind::Forall:
      return d != Dialect::FOT;
    case FKind::WeakNeg:
    case FKind::WeakOr:
    case FKind::ExistsOne:
    case FKind::ForallOne:
      return d == Dialect::FOT;
    case FKind::Con:
    case FKind::Inc:
      return d != Dialect::FO;
    case FKind::Dep:
    case FKind::Exc:
    case FKind::Ind:
      return d == Dialect::FOIL;
  }
  return false;
}
}  // namespace

bool in_dialect(const Formula* f, Dialect d) {
  if (!kind_in_dialect(f->kind, d)) return false;
  if (f->left && !in_dialect(f->left, d)) return false;
  if (f->right && !in_dialect(f->right, d)) return false;
  return true;
}

void check_dialect(const Formula* f, Dialect d) {
  if (!kind_in_dialect(f->kind, d))
    throw Error(std::string(constructor_name(f->kind)) + " is not part of dialect " +
                to_string(d));
  if (f->left) check_dialect(f->left, d);
  if (f->right) check_dialect(f->right, d);
}

const std::vector<std::string>& free_vars(const Formula* f) { return f->fv; }

const Formula* rename_free_var(const Formula* f, const std::string& from, const std::string& to) {
  if (!std::binary_search(f->fv.begin(), f->fv.end(), from)) return f;
  auto sub_term = [&](const Term* t, auto&& self) -> const Term* {
    if (t->kind == TermKind::Variable) return t->name == from ? mk_var(to) : t;
    if (t->kind == TermKind::Constant) return t;
    std::vector<const Term*> args;
    args.reserve(t->args.size());
    for (const Term* a : t->args) args.push_back(self(a, self));
    return mk_apply(t->name, std::move(args));
  };
  auto sub_tuple = [&](const std::vector<std::string>& xs) {
    std::vector<std::string> out = xs;
    for (auto& v : out)
      if (v == from) v = to;
    return out;
  };
  switch (f->kind) {
    case FKind::RelAtom: {
      std::vector<const Term*> args;
      for (const Term* t : f->terms) args.push_back(sub_term(t, sub_term));
      return mk_rel(f->name, std::move(args), f->negated);
    }
    case FKind::EqAtom:
      return mk_eq(sub_term(f->terms[0], sub_term), sub_term(f->terms[1], sub_term), f->negated);
    case FKind::And:
    case FKind::Or:
    case FKind::WeakOr:
      return binary(f->kind, rename_free_var(f->left, from, to),
                    rename_free_var(f->right, from, to));
    case FKind::WeakNeg:
      return mk_weak_neg(rename_free_var(f->left, from, to));
    case FKind::Exists:
    case FKind::Forall:
    case FKind::ExistsOne:
    case FKind::ForallOne:
      // f->name == from cannot happen here: `from` is free in f
      return quant(f->kind, f->name, rename_free_var(f->left, from, to));
    case FKind::Dep:
      return mk_dep(sub_tuple(f->xs), sub_tuple(f->ys));
    case FKind::Con:
      return mk_con(sub_tuple(f->xs));
    case FKind::Inc:
      return mk_inc(sub_tuple(f->xs), sub_tuple(f->ys));
    case FKind::Exc:
      return mk_exc(sub_tuple(f->xs), sub_tuple(f->ys));
    case FKind::Ind:
      return mk_ind(sub_tuple(f->xs), sub_tuple(f->zs), sub_tuple(f->ys));
  }
  throw Error("rename_free_var: unreachable");
}

void collect_names(const Formula* f, std::set<std::string>& vars, std::set<std::string>& rels) {
  auto walk_term = [&](const Term* t, auto&& self) -> void {
    if (t->kind == TermKind::Variable) vars.insert(t->name);
    for (const Term* a : t->args) self(a, self);
  };
  if (f->kind == FKind::RelAtom) rels.insert(f->name);
  for (const Term* t : f->terms) walk_term(t, walk_term);
  for (const auto* blk : {&f->xs, &f->zs, &f->ys})
    for (const auto& v : *blk) vars.insert(v);
  if (f->kind == FKind::Exists || f->kind == FKind::Forall || f->kind == FKind::ExistsOne ||
      f->kind == FKind::ForallOne)
    vars.insert(f->name);
  if (f->left) collect_names(f->left, vars, rels);
  if (f->right) collect_names(f->right, vars, rels);
}

// ---------------------------------------------------------------------------
// tokenizer shared by both parsers

namespace {

enum class Tok {
  Ident, Int, LParen, RParen, Dot, Comma, Semi, Eq, Amp, Bar, Bang, Tilde,
  WeakOr, RArrowW, IffW, Arrow, Iff, Colon, End,
};

struct Token {
  Tok kind;
  std::string text;
  size_t pos;
};

struct Lexer {
  std::vector<Token> toks;

  explicit Lexer(const std::string& s) {
    size_t i = 0;
    auto push = [&](Tok k, std::string t, size_t p) { toks.push_back({k, std::move(t), p}); };
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      size_t p = i;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' ||
                                s[j] == '\''))
          ++j;
        push(Tok::Ident, s.substr(i, j - i), p);
        i = j;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        push(Tok::Int, s.substr(i, j - i), p);
        i = j;
        continue;
      }
      auto two = [&](const char* pat) {
        return i + 1 < s.size() && s[i] == pat[0] && s[i + 1] == pat[1];
      };
      auto three = [&](const char* pat) {
        return i + 2 < s.size() && s[i] == pat[0] && s[i + 1] == pat[1] && s[i + 2] == pat[2];
      };
      if (three("<~>")) { push(Tok::IffW, "<~>", p); i += 3; continue; }
      if (three("<->")) { push(Tok::Iff, "<->", p); i += 3; continue; }
      if (two("~>")) { push(Tok::RArrowW, "~>", p); i += 2; continue; }
      if (two("->")) { push(Tok::Arrow, "->", p); i += 2; continue; }
      if (two("\\/")) { push(Tok::WeakOr, "\\/", p); i += 2; continue; }
      switch (c) {
        case '(': push(Tok::LParen, "(", p); break;
        case ')': push(Tok::RParen, ")", p); break;
        case '.': push(Tok::Dot, ".", p); break;
        case ',': push(Tok::Comma, ",", p); break;
        case ';': push(Tok::Semi, ";", p); break;
        case '=': push(Tok::Eq, "=", p); break;
        case '&': push(Tok::Amp, "&", p); break;
        case '|': push(Tok::Bar, "|", p); break;
        case '!': push(Tok::Bang, "!", p); break;
        case '~': push(Tok::Tilde, "~", p); break;
        case ':': push(Tok::Colon, ":", p); break;
        default:
          throw Error("unexpected character '" + std::string(1, c) + "' at position " +
                      std::to_string(p));
      }
      ++i;
    }
    toks.push_back({Tok::End, "", s.size()});
  }
};

const std::unordered_set<std::string> kKeywords = {
    "exists", "forall", "E1", "A1", "dep", "con", "inc", "exc", "ind", "EX",
};

bool is_team_atom_kw(const std::string& s) {
  return s == "dep" || s == "con" || s == "inc" || s == "exc" || s == "ind";
}

// untyped call tree: lets `f(x) = y` and `R(x)` share one parse path
struct Call {
  std::string name;
  bool has_parens = false;
  std::vector<Call> args;
};

struct ParserBase {
  std::vector<Token> toks;
  size_t i = 0;
  const Signature* sig;

  ParserBase(const std::string& text, const Signature* s) : toks(Lexer(text).toks), sig(s) {}

  const Token& peek() const { return toks[i]; }
  const Token& peek2() const { return i + 1 < toks.size() ? toks[i + 1] : toks.back(); }
  Token next() { return toks[i++]; }
  bool at(Tok k) const { return toks[i].kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    ++i;
    return true;
  }
  Token expect(Tok k, const char* what) {
    if (!at(k))
      throw Error(std::string("expected ") + what + " at position " +
                  std::to_string(peek().pos) + ", got '" + peek().text + "'");
    return next();
  }

  std::string ident(const char* what) {
    Token t = expect(Tok::Ident, what);
    return t.text;
  }

  Call parse_call() {
    Call c;
    c.name = ident("an identifier");
    if (kKeywords.count(c.name))
      throw Error("reserved word '" + c.name + "' cannot be used as a name");
    if (accept(Tok::LParen)) {
      c.has_parens = true;
      if (!accept(Tok::RParen)) {
        c.args.push_back(parse_call());
        while (accept(Tok::Comma)) c.args.push_back(parse_call());
        expect(Tok::RParen, "')'");
      }
    }
    return c;
  }

  // interpret a call tree as a term; bound: nullptr means "any identifier is a variable"
  const Term* call_to_term(const Call& c, const std::set<std::string>* bound) {
    if (c.has_parens) {
      if (sig) {
        auto it = sig->functions.find(c.name);
        if (it == sig->functions.end())
          throw Error("'" + c.name + "' is not a function symbol");
        if (static_cast<int>(c.args.size()) != it->second)
          throw Error("function '" + c.name + "' expects " + std::to_string(it->second) +
                      " arguments");
      }
      std::vector<const Term*> args;
      for (const Call& a : c.args) args.push_back(call_to_term(a, bound));
      return mk_apply(c.name, std::move(args));
    }
    if (sig && sig->constants.count(c.name)) return mk_const(c.name);
    if (bound && !bound->count(c.name))
      throw Error("unbound variable '" + c.name + "' in a sentence");
    return mk_var(c.name);
  }

  void check_rel_arity(const std::string& name, size_t n) {
    if (!sig) return;
    auto it = sig->relations.find(name);
    if (it == sig->relations.end()) throw Error("unknown relation symbol '" + name + "'");
    if (static_cast<int>(n) != it->second)
      throw Error("relation '" + name + "' expects " + std::to_string(it->second) +
                  " arguments");
  }
};

// -------- team-logic parser --------

struct FormulaParser : ParserBase {
  using ParserBase::ParserBase;

  std::vector<std::string> tuple_block() {
    std::vector<std::string> out;
    while (at(Tok::Ident)) out.push_back(next().text);
    return out;
  }

  const Formula* team_atom(const std::string& kw) {
    expect(Tok::LParen, "'('");
    std::vector<std::vector<std::string>> blocks;
    blocks.push_back(tuple_block());
    while (accept(Tok::Semi)) blocks.push_back(tuple_block());
    expect(Tok::RParen, "')'");
    auto want = [&](size_t n) {
      if (blocks.size() != n)
        throw Error("'" + kw + "' expects " + std::to_string(n) +
                    " ';'-separated tuple(s), got " + std::to_string(blocks.size()));
    };
    if (kw == "con") {
      want(1);
      return mk_con(std::move(blocks[0]));
    }
    if (kw == "dep") {
      want(2);
      return mk_dep(std::move(blocks[0]), std::move(blocks[1]));
    }
    if (kw == "inc") {
      want(2);
      return mk_inc(std::move(blocks[0]), std::move(blocks[1]));
    }
    if (kw == "exc") {
      want(2);
      return mk_exc(std::move(blocks[0]), std::move(blocks[1]));
    }
    want(3);
    return mk_ind(std::move(blocks[0]), std::move(blocks[1]), std::move(blocks[2]));
  }

  const Formula* atom(bool negated) {
    if (at(Tok::Ident) && is_team_atom_kw(peek().text)) {
      if (negated) throw Error("'!' applies to relation and equality atoms only");
      return team_atom(next().text);
    }
    Call c = parse_call();
    if (accept(Tok::Eq)) {
      const Term* lhs = call_to_term(c, nullptr);
      Call c2 = parse_call();
      const Term* rhs = call_to_term(c2, nullptr);
      return mk_eq(lhs, rhs, negated);
    }
    // a relation atom; bare identifiers are 0-ary only with explicit parens
    if (!c.has_parens)
      throw Error("expected an atom at position " + std::to_string(peek().pos));
    check_rel_arity(c.name, c.args.size());
    std::vector<const Term*> args;
    for (const Call& a : c.args) args.push_back(call_to_term(a, nullptr));
    return mk_rel(c.name, std::move(args), negated);
  }

  const Formula* primary() {
    if (accept(Tok::LParen)) {
      const Formula* f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (accept(Tok::Bang)) return atom(true);
    return atom(false);
  }

  const Formula* unary() {
    if (accept(Tok::Tilde)) return mk_weak_neg(unary());
    if (at(Tok::Ident)) {
      const std::string& w = peek().text;
      if (w == "exists" || w == "forall" || w == "E1" || w == "A1") {
        next();
        std::string var = ident("a variable");
        expect(Tok::Dot, "'.'");
        const Formula* body = formula();
        if (w == "exists") return mk_exists(var, body);
        if (w == "forall") return mk_forall(var, body);
        if (w == "E1") return mk_exists_one(var, body);
        return mk_forall_one(var, body);
      }
    }
    return primary();
  }

  const Formula* conj() {
    const Formula* f = unary();
    while (accept(Tok::Amp)) f = mk_and(f, unary());
    return f;
  }

  const Formula* disj() {
    const Formula* f = conj();
    for (;;) {
      if (accept(Tok::Bar))
        f = mk_or(f, conj());
      else if (accept(Tok::WeakOr))
        f = mk_weak_or(f, conj());
      else
        return f;
    }
  }

  static const Formula* desugar_impl(const Formula* a, const Formula* b) {
    return mk_weak_or(mk_weak_neg(a), b);
  }

  const Formula* formula() {
    const Formula* f = disj();
    if (accept(Tok::RArrowW)) return desugar_impl(f, formula());
    if (accept(Tok::IffW)) {
      const Formula* g = formula();
      return mk_and(desugar_impl(f, g), desugar_impl(g, f));
    }
    return f;
  }
};

}  // namespace

const Formula* parse_formula(const std::string& text, Dialect d, const Signature* sig) {
  FormulaParser p(text, sig);
  const Formula* f = p.formula();
  if (!p.at(Tok::End))
    throw Error("trailing input at position " + std::to_string(p.peek().pos) + ": '" +
                p.peek().text + "'");
  check_dialect(f, d);
  return f;
}

// ---------------------------------------------------------------------------
// rendering

namespace {

bool is_quantifier(const Formula* f) {
  return f->kind == FKind::Exists || f->kind == FKind::Forall || f->kind == FKind::ExistsOne ||
         f->kind == FKind::ForallOne;
}

int prec_of(const Formula* f) {
  switch (f->kind) {
    case FKind::Or:
    case FKind::WeakOr: return 1;
    case FKind::And: return 2;
    case FKind::WeakNeg: return 3;
    case FKind::Exists:
    case FKind::Forall:
    case FKind::ExistsOne:
    case FKind::ForallOne: return 0;
    default: return 4;
  }
}

void render_tuple(std::string& out, const std::vector<std::string>& xs) {
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += xs[i];
  }
}

// `tail` marks positions that run to the end of the enclosing unit, where a
// quantifier may appear unparenthesized because it cannot capture anything
// that follows.
void render_f(std::string& out, const Formula* f, bool tail) {
  auto wrap = [&](const Formula* g, int mp, bool tl) {
    bool parens = is_quantifier(g) ? !tl : prec_of(g) < mp;
    if (parens) out += '(';
    render_f(out, g, parens ? true : tl);
    if (parens) out += ')';
  };
  switch (f->kind) {
    case FKind::RelAtom: {
      if (f->negated) out += '!';
      out += f->name;
      out += '(';
      for (size_t i = 0; i < f->terms.size(); ++i) {
        if (i) out += ", ";
        out += render(f->terms[i]);
      }
      out += ')';
      return;
    }
    case FKind::EqAtom: {
      if (f->negated) out += '!';
      out += render(f->terms[0]);
      out += " = ";
      out += render(f->terms[1]);
      return;
    }
    case FKind::And:
    case FKind::Or:
    case FKind::WeakOr: {
      int p = prec_of(f);
      wrap(f->left, p, false);
      out += f->kind == FKind::And ? " & " : (f->kind == FKind::Or ? " | " : " \\/ ");
      wrap(f->right, p + 1, tail);
      return;
    }
    case FKind::WeakNeg: {
      out += '~';
      wrap(f->left, 3, tail);
      return;
    }
    case FKind::Exists:
    case FKind::Forall:
    case FKind::ExistsOne:
    case FKind::ForallOne: {
      switch (f->kind) {
        case FKind::Exists: out += "exists "; break;
        case FKind::Forall: out += "forall "; break;
        case FKind::ExistsOne: out += "E1 "; break;
        default: out += "A1 "; break;
      }
      out += f->name;
      out += ". ";
      render_f(out, f->left, true);
      return;
    }
    case FKind::Dep:
    case FKind::Inc:
    case FKind::Exc: {
      out += f->kind == FKind::Dep ? "dep(" : (f->kind == FKind::Inc ? "inc(" : "exc(");
      render_tuple(out, f->xs);
      out += " ; ";
      render_tuple(out, f->ys);
      out += ')';
      return;
    }
    case FKind::Con: {
      out += "con(";
      render_tuple(out, f->xs);
      out += ')';
      return;
    }
    case FKind::Ind: {
      out += "ind(";
      render_tuple(out, f->xs);
      out += " ; ";
      render_tuple(out, f->zs);
      out += " ; ";
      render_tuple(out, f->ys);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string render(const Formula* f) {
  std::string out;
  render_f(out, f, true);
  return out;
}

// ---------------------------------------------------------------------------
// second-order sentences

struct SOBuilder::Arena {
  std::deque<SOFormula> nodes;
  std::vector<std::shared_ptr<const void>> deps;
};

SOBuilder::SOBuilder() : arena(std::make_shared<Arena>()) {}

namespace {
const SOFormula* push_so(std::deque<SOFormula>& nodes, SOFormula f) {
  nodes.push_back(std::move(f));
  return &nodes.back();
}
}  // namespace

const SOFormula* SOBuilder::atom(const std::string& rel, std::vector<const Term*> args) {
  SOFormula f;
  f.kind = SOKind::Atom;
  f.name = rel;
  f.terms = std::move(args);
  return push_so(arena->nodes, std::move(f));
}
const SOFormula* SOBuilder::eq(const Term* a, const Term* b) {
  SOFormula f;
  f.kind = SOKind::Eq;
  f.terms = {a, b};
  return push_so(arena->nodes, std::move(f));
}
const SOFormula* SOBuilder::negate(const SOFormula* a) {
  SOFormula f;
  f.kind = SOKind::Not;
  f.left = a;
  return push_so(arena->nodes, std::move(f));
}
const SOFormula* SOBuilder::conj(const SOFormula* a, const SOFormula* b) {
  SOFormula f;
  f.kind = SOKind::And;
  f.left = a;
  f.right = b;
  return push_so(arena->nodes, std::move(f));
}
const SOFormula* SOBuilder::disj(const SOFormula* a, const SOFormula* b) {
  SOFormula f;
  f.kind = SOKind::Or;
  f.left = a;
  f.right = b;
  return push_so(arena->nodes, std::move(f));
}
const SOFormula* SOBuilder::implies(const SOFormula* a, const SOFormula* b) {
  SOFormula f;
  f.kind = SOKind::Implies;
  f.left = a;
  f.right = b;
  return push_so(arena->nodes, std::move(f));
}
const SOFormula* SOBuilder::iff(const SOFormula* a, const SOFormula* b) {
  SOFormula f;
  f.kind = SOKind::Iff;
  f.left = a;
  f.right = b;
  return push_so(arena->nodes, std::move(f));
}
const SOFormula* SOBuilder::exists(const std::string& var, const SOFormula* body) {
  SOFormula f;
  f.kind = SOKind::Exists;
  f.name = var;
  f.left = body;
  return push_so(arena->nodes, std::move(f));
}
const SOFormula* SOBuilder::forall(const std::string& var, const SOFormula* body) {
  SOFormula f;
  f.kind = SOKind::Forall;
  f.name = var;
  f.left = body;
  return push_so(arena->nodes, std::move(f));
}
const SOFormula* SOBuilder::conj_all(const std::vector<const SOFormula*>& cs) {
  if (cs.empty()) {
    const Term* v = mk_var("u");
    return forall("u", eq(v, v));  // vacuously true
  }
  const SOFormula* f = cs[0];
  for (size_t i = 1; i < cs.size(); ++i) f = conj(f, cs[i]);
  return f;
}
void SOBuilder::absorb(const SOSentence& s) {
  if (s.owner) arena->deps.push_back(s.owner);
}
SOSentence SOBuilder::finish(std::vector<std::pair<std::string, int>> prefix,
                             std::map<std::string, int> params, const SOFormula* matrix) const {
  SOSentence s;
  s.prefix = std::move(prefix);
  s.params = std::move(params);
  s.matrix = matrix;
  s.owner = arena;
  return s;
}

namespace {

struct SOParser : ParserBase {
  SOBuilder b;
  std::set<std::string> bound;
  std::set<std::string> rel_vars;  // prefix names
  std::map<std::string, int>* params;

  SOParser(const std::string& text, const Signature* s, std::map<std::string, int>* ps)
      : ParserBase(text, s), params(ps) {}

  const SOFormula* atom_or_eq() {
    Call c = parse_call();
    if (accept(Tok::Eq)) {
      const Term* lhs = call_to_term(c, &bound);
      Call c2 = parse_call();
      return b.eq(lhs, call_to_term(c2, &bound));
    }
    if (!c.has_parens)
      throw Error("expected an atom at position " + std::to_string(peek().pos));
    if (bound.count(c.name))
      throw Error("'" + c.name + "' is bound as a first-order variable");
    std::vector<const Term*> args;
    for (const Call& a : c.args) args.push_back(call_to_term(a, &bound));
    if (!rel_vars.count(c.name)) {
      if (sig && sig->relations.count(c.name)) {
        check_rel_arity(c.name, args.size());
      } else {
        auto [it, fresh] = params->emplace(c.name, static_cast<int>(args.size()));
        if (!fresh && it->second != static_cast<int>(args.size()))
          throw Error("relation parameter '" + c.name + "' used with inconsistent arities");
      }
    }
    return b.atom(c.name, std::move(args));
  }

  const SOFormula* unary() {
    if (accept(Tok::Bang)) return b.negate(unary());
    if (at(Tok::Ident) && (peek().text == "exists" || peek().text == "forall")) {
      bool ex = next().text == "exists";
      std::string var = ident("a variable");
      expect(Tok::Dot, "'.'");
      bool shadow = bound.count(var) > 0;
      bound.insert(var);
      const SOFormula* body = formula();
      if (!shadow) bound.erase(var);
      return ex ? b.exists(var, body) : b.forall(var, body);
    }
    if (accept(Tok::LParen)) {
      const SOFormula* f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    return atom_or_eq();
  }

  const SOFormula* conj() {
    const SOFormula* f = unary();
    while (accept(Tok::Amp)) f = b.conj(f, unary());
    return f;
  }
  const SOFormula* disj() {
    const SOFormula* f = conj();
    while (accept(Tok::Bar)) f = b.disj(f, conj());
    return f;
  }
  const SOFormula* impl() {
    const SOFormula* f = disj();
    if (accept(Tok::Arrow)) return b.implies(f, impl());
    return f;
  }
  const SOFormula* formula() {
    const SOFormula* f = impl();
    while (accept(Tok::Iff)) f = b.iff(f, impl());
    return f;
  }
};

}  // namespace

SOSentence parse_sentence(const std::string& text, const Signature* sig) {
  SOSentence s;
  SOParser p(text, sig, &s.params);
  while (p.at(Tok::Ident) && p.peek().text == "EX") {
    p.next();
    std::string name = p.ident("a relation variable");
    if (kKeywords.count(name))
      throw Error("reserved word '" + name + "' cannot be used as a name");
    p.expect(Tok::Colon, "':'");
    Token ar = p.expect(Tok::Int, "an arity");
    p.expect(Tok::Dot, "'.'");
    if (p.rel_vars.count(name))
      throw Error("duplicate relation variable '" + name + "' in prefix");
    p.rel_vars.insert(name);
    s.prefix.emplace_back(name, std::stoi(ar.text));
  }
  const SOFormula* matrix = p.formula();
  if (!p.at(Tok::End))
    throw Error("trailing input at position " + std::to_string(p.peek().pos) + ": '" +
                p.peek().text + "'");
  return p.b.finish(std::move(s.prefix), std::move(s.params), matrix);
}

namespace {

bool so_is_quant(const SOFormula* f) {
  return f->kind == SOKind::Exists || f->kind == SOKind::Forall;
}

int so_prec(const SOFormula* f) {
  switch (f->kind) {
    case SOKind::Iff: return 0;
    case SOKind::Implies: return 1;
    case SOKind::Or: return 2;
    case SOKind::And: return 3;
    case SOKind::Not: return 4;
    case SOKind::Exists:
    case SOKind::Forall: return -1;
    default: return 5;
  }
}

void render_so(std::string& out, const SOFormula* f, bool tail) {
  auto wrap = [&](const SOFormula* g, int mp, bool tl) {
    bool parens = so_is_quant(g) ? !tl : so_prec(g) < mp;
    if (parens) out += '(';
    render_so(out, g, parens ? true : tl);
    if (parens) out += ')';
  };
  switch (f->kind) {
    case SOKind::Atom: {
      out += f->name;
      out += '(';
      for (size_t i = 0; i < f->terms.size(); ++i) {
        if (i) out += ", ";
        out += render(f->terms[i]);
      }
      out += ')';
      return;
    }
    case SOKind::Eq:
      out += render(f->terms[0]);
      out += " = ";
      out += render(f->terms[1]);
      return;
    case SOKind::Not:
      out += '!';
      wrap(f->left, 4, tail);
      return;
    case SOKind::And:
    case SOKind::Or: {
      int p = so_prec(f);
      wrap(f->left, p, false);
      out += f->kind == SOKind::And ? " & " : " | ";
      wrap(f->right, p + 1, tail);
      return;
    }
    case SOKind::Implies:
      wrap(f->left, 2, false);
      out += " -> ";
      wrap(f->right, 1, tail);
      return;
    case SOKind::Iff:
      wrap(f->left, 0, false);
      out += " <-> ";
      wrap(f->right, 1, tail);
      return;
    case SOKind::Exists:
    case SOKind::Forall:
      out += f->kind == SOKind::Exists ? "exists " : "forall ";
      out += f->name;
      out += ". ";
      render_so(out, f->left, true);
      return;
  }
}

}  // namespace

std::string render(const SOFormula* f) {
  std::string out;
  render_so(out, f, true);
  return out;
}

std::string render(const SOSentence& s) {
  std::string out;
  for (const auto& [name, arity] : s.prefix) {
    out += "EX ";
    out += name;
    out += ':';
    out += std::to_string(arity);
    out += ". ";
  }
  render_so(out, s.matrix, true);
  return out;
}

// ---------------------------------------------------------------------------
// enumeration

namespace {

// all sequences over vars of the given length, lexicographic in var index
void emit_tuples(const std::vector<std::string>& vars, int len,
                 const std::function<void(const std::vector<std::string>&)>& fn) {
  std::vector<int> idx(len, 0);
  std::vector<std::string> tup(len);
  for (;;) {
    for (int k = 0; k < len; ++k) tup[k] = vars[idx[k]];
    fn(tup);
    int k = len - 1;
    while (k >= 0 && idx[k] == static_cast<int>(vars.size()) - 1) idx[k--] = 0;
    if (k < 0) return;
    ++idx[k];
  }
}

}  // namespace

std::vector<const Formula*> enumerate_formulas(const Signature& sig,
                                               const std::vector<std::string>& vars,
                                               int size_bound, Dialect d) {
  if (vars.empty()) throw Error("enumerate_formulas: variable list must be non-empty");
  if (size_bound < 1) return {};
  const int V = static_cast<int>(vars.size());

  // by_size[s] = formulas of size exactly s, in canonical order
  std::vector<std::vector<const Formula*>> by_size(size_bound + 1);
  std::unordered_set<uint32_t> seen;
  auto emit = [&](const Formula* f) {
    if (f->size <= size_bound && seen.insert(f->id).second) by_size[f->size].push_back(f);
  };

  // literals (size 1)
  for (const auto& [rname, arity] : sig.relations) {
    std::vector<std::vector<std::string>> tuples;
    if (arity == 0) {
      tuples.push_back({});
    } else if (arity <= 4) {
      emit_tuples(vars, arity, [&](const std::vector<std::string>& t) { tuples.push_back(t); });
    } else {
      continue;  // arities past desk scale are not enumerated
    }
    for (const auto& tup : tuples) {
      std::vector<const Term*> args;
      for (const auto& v : tup) args.push_back(mk_var(v));
      emit(mk_rel(rname, args, false));
      emit(mk_rel(rname, std::move(args), true));
    }
  }
  for (int a = 0; a < V; ++a)
    for (int b = 0; b < V; ++b) {
      emit(mk_eq(mk_var(vars[a]), mk_var(vars[b]), false));
      emit(mk_eq(mk_var(vars[a]), mk_var(vars[b]), true));
    }

  // team atoms (size by tuple weight); tuple lengths run up to |vars|
  std::vector<std::vector<std::string>> pool;  // non-empty tuples, by length then lex
  for (int len = 1; len <= V; ++len)
    emit_tuples(vars, len, [&](const std::vector<std::string>& t) { pool.push_back(t); });

  if (d == Dialect::FOIL)
    for (const auto& xs : pool)
      for (const auto& ys : pool) emit(mk_dep(xs, ys));
  if (d != Dialect::FO) {
    emit(mk_con({}));
    for (const auto& xs : pool) emit(mk_con(xs));
    for (const auto& xs : pool)
      for (const auto& ys : pool)
        if (xs.size() == ys.size()) emit(mk_inc(xs, ys));
  }
  if (d == Dialect::FOIL) {
    for (const auto& xs : pool)
      for (const auto& ys : pool)
        if (xs.size() == ys.size()) emit(mk_exc(xs, ys));
    for (const auto& xs : pool) {
      for (const auto& ys : pool) {
        emit(mk_ind(xs, {}, ys));
        for (const auto& zs : pool) emit(mk_ind(xs, zs, ys));
      }
    }
  }
  // composites, smallest sizes first; bucket order is generation order, which
  // is canonical and independent of pool state
  for (int s = 2; s <= size_bound; ++s) {
    // quantifiers / weak negation over size s-1
    for (const Formula* g : by_size[s - 1]) {
      if (d != Dialect::FOT) {
        for (const auto& v : vars) emit(mk_exists(v, g));
        for (const auto& v : vars) emit(mk_forall(v, g));
      } else {
        for (const auto& v : vars) emit(mk_exists_one(v, g));
        for (const auto& v : vars) emit(mk_forall_one(v, g));
        emit(mk_weak_neg(g));
      }
    }
    // binary connectives over (s1, s2) with s1 + s2 = s - 1
    for (int s1 = 1; s1 <= s - 2; ++s1) {
      int s2 = s - 1 - s1;
      for (const Formula* a : by_size[s1])
        for (const Formula* b : by_size[s2]) {
          emit(mk_and(a, b));
          if (d != Dialect::FOT)
            emit(mk_or(a, b));
          else
            emit(mk_weak_or(a, b));
        }
    }
  }

  std::vector<const Formula*> out;
  for (const auto& bucket : by_size) out.insert(out.end(), bucket.begin(), bucket.end());
  return out;
}

// ---------------------------------------------------------------------------
// sampling

namespace {

struct Sampler {
  std::mt19937_64 rng;
  const Signature& sig;
  const std::vector<std::string>& vars;
  Dialect d;
  std::vector<std::string> rel_names;

  Sampler(const Signature& s, const std::vector<std::string>& v, uint64_t seed, Dialect dd)
      : rng(seed), sig(s), vars(v), d(dd) {
    for (const auto& [n, a] : s.relations) rel_names.push_back(n);
  }

  size_t pick(size_t n) { return static_cast<size_t>(rng() % n); }

  std::vector<std::string> tuple(bool allow_long) {
    size_t maxlen = std::min<size_t>(vars.size(), allow_long ? 2 : 1);
    size_t len = 1 + pick(maxlen);
    std::vector<std::string> t(len);
    for (auto& v : t) v = vars[pick(vars.size())];
    return t;
  }

  const Formula* atom() {
    std::vector<int> kinds = {0, 1};  // rel literal (if any), equality literal
    if (rel_names.empty()) kinds.erase(kinds.begin());
    if (d != Dialect::FO) {
      kinds.push_back(2);  // con
      kinds.push_back(3);  // inc
    }
    if (d == Dialect::FOIL) {
      kinds.push_back(4);  // dep
      kinds.push_back(5);  // exc
      kinds.push_back(6);  // ind
    }
    int k = kinds[pick(kinds.size())];
    bool neg = pick(2) == 1;
    switch (k) {
      case 0: {
        const std::string& r = rel_names[pick(rel_names.size())];
        int arity = sig.relations.at(r);
        std::vector<const Term*> args;
        for (int i = 0; i < arity; ++i) args.push_back(mk_var(vars[pick(vars.size())]));
        return mk_rel(r, std::move(args), neg);
      }
      case 1:
        return mk_eq(mk_var(vars[pick(vars.size())]), mk_var(vars[pick(vars.size())]), neg);
      case 2:
        return mk_con(tuple(true));
      case 3: {
        auto xs = tuple(true);
        std::vector<std::string> ys(xs.size());
        for (auto& v : ys) v = vars[pick(vars.size())];
        return mk_inc(xs, ys);
      }
      case 4:
        return mk_dep(tuple(true), tuple(false));
      case 5: {
        auto xs = tuple(true);
        std::vector<std::string> ys(xs.size());
        for (auto& v : ys) v = vars[pick(vars.size())];
        return mk_exc(xs, ys);
      }
      default: {
        auto xs = tuple(false);
        auto ys = tuple(false);
        std::vector<std::string> zs;
        if (pick(2) == 1) zs = tuple(false);
        return mk_ind(xs, zs, ys);
      }
    }
  }

  const Formula* go(int depth) {
    if (depth <= 1) return atom();
    // production lists per dialect; index 0 is "stop at an atom"
    int n = d == Dialect::FOT ? 6 : 5;
    switch (pick(n)) {
      case 0: return atom();
      case 1: return mk_and(go(depth - 1), go(depth - 1));
      case 2:
        return d == Dialect::FOT ? mk_weak_or(go(depth - 1), go(depth - 1))
                                 : mk_or(go(depth - 1), go(depth - 1));
      case 3: {
        const std::string& v = vars[pick(vars.size())];
        return d == Dialect::FOT ? mk_exists_one(v, go(depth - 1))
                                 : mk_exists(v, go(depth - 1));
      }
      case 4: {
        const std::string& v = vars[pick(vars.size())];
        return d == Dialect::FOT ? mk_forall_one(v, go(depth - 1))
                                 : mk_forall(v, go(depth - 1));
      }
      default: return mk_weak_neg(go(depth - 1));
    }
  }
};

}  // namespace

const Formula* sample_formula(const Signature& sig, const std::vector<std::string>& vars,
                              int depth, uint64_t seed, Dialect d) {
  if (vars.empty()) throw Error("sample_formula: variable list must be non-empty");
  Sampler s(sig, vars, seed, d);
  return s.go(depth);
}

}  // namespace teamlog
