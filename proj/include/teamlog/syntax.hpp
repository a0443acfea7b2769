#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "teamlog/core.hpp"

// Formula language: terms, team-logic formulas (three dialects), and
// relationally parameterized (existential) second-order sentences. Terms and
// team formulas are hash-consed in process-wide pools: pointer equality is
// structural equality and every node carries a stable integer id.

namespace teamlog {

enum class Dialect { FO, FOT, FOIL };

Dialect dialect_from_string(const std::string& s);
std::string to_string(Dialect d);

// -------- terms --------

enum class TermKind { Variable, Constant, Apply };

struct Term {
  TermKind kind;
  std::string name;
  std::vector<const Term*> args;
  uint32_t id;
};

const Term* mk_var(const std::string& name);
const Term* mk_const(const std::string& name);
const Term* mk_apply(const std::string& fn, std::vector<const Term*> args);

std::string render(const Term* t);
void term_vars(const Term* t, std::vector<std::string>& out);

// -------- team-logic formulas --------

enum class FKind {
  RelAtom,     // R(t...), possibly negated
  EqAtom,      // t = t', possibly negated
  And,
  Or,          // splitting disjunction
  Exists,      // lax existential
  Forall,
  WeakNeg,     // ~phi
  WeakOr,      // phi \/ psi
  ExistsOne,   // E1 x.
  ForallOne,   // A1 x.
  Dep,         // dep(xs ; ys)
  Con,         // con(xs)
  Inc,         // inc(xs ; ys)
  Exc,         // exc(xs ; ys)
  Ind,         // ind(xs ; zs ; ys)  (zs is the conditioning tuple)
};

struct Formula {
  FKind kind;
  uint32_t id = 0;  // assigned when interned
  bool negated = false;            // literals only
  std::string name;                // relation symbol / quantified variable
  std::vector<const Term*> terms;  // RelAtom args or the two equality sides
  const Formula* left = nullptr;
  const Formula* right = nullptr;
  std::vector<std::string> xs, ys, zs;  // team atom tuples

  // cached at construction
  int size = 0;                          // enumeration size metric
  std::vector<std::string> fv;           // sorted free variables
  bool downward_fragment = false;        // literals/dep/con/exc/and/or/exists/forall only
};

const Formula* mk_rel(const std::string& name, std::vector<const Term*> args, bool negated = false);
const Formula* mk_eq(const Term* a, const Term* b, bool negated = false);
const Formula* mk_and(const Formula* a, const Formula* b);
const Formula* mk_or(const Formula* a, const Formula* b);
const Formula* mk_exists(const std::string& var, const Formula* body);
const Formula* mk_forall(const std::string& var, const Formula* body);
const Formula* mk_weak_neg(const Formula* a);
const Formula* mk_weak_or(const Formula* a, const Formula* b);
const Formula* mk_exists_one(const std::string& var, const Formula* body);
const Formula* mk_forall_one(const std::string& var, const Formula* body);
// dep with an empty left tuple normalizes to con(ys)
const Formula* mk_dep(std::vector<std::string> xs, std::vector<std::string> ys);
const Formula* mk_con(std::vector<std::string> xs);
const Formula* mk_inc(std::vector<std::string> xs, std::vector<std::string> ys);
const Formula* mk_exc(std::vector<std::string> xs, std::vector<std::string> ys);
const Formula* mk_ind(std::vector<std::string> xs, std::vector<std::string> zs,
                      std::vector<std::string> ys);

bool is_literal(const Formula* f);
bool in_dialect(const Formula* f, Dialect d);
// throws with the offending constructor when the formula leaves the dialect
void check_dialect(const Formula* f, Dialect d);

const std::vector<std::string>& free_vars(const Formula* f);
// capture-safe only when `to` does not occur in f; used with globally fresh names
const Formula* rename_free_var(const Formula* f, const std::string& from, const std::string& to);
void collect_names(const Formula* f, std::set<std::string>& vars, std::set<std::string>& rels);

// Concrete syntax (see README): '&', '|' split, '\/' weak, '~' weak negation,
// '!' on atoms, 'exists x.', 'forall x.', 'E1 x.', 'A1 x.', team atoms
// 'dep(x y ; z)', 'con(x)', 'inc(x ; y)', 'exc(x ; y)', 'ind(x ; z ; y)',
// sugar 'a ~> b' and 'a <~> b'. When a signature is given, bare identifiers
// naming its constants parse as constant terms.
const Formula* parse_formula(const std::string& text, Dialect d, const Signature* sig = nullptr);
std::string render(const Formula* f);

// -------- second-order sentences --------

enum class SOKind { Atom, Eq, Not, And, Or, Implies, Iff, Exists, Forall };

// Unlike team formulas, sentence nodes are not interned: each sentence owns
// its nodes (see SOSentence::owner), so bulk translation runs do not grow a
// process-wide pool.
struct SOFormula {
  SOKind kind;
  std::string name;                // relation name or quantified variable
  std::vector<const Term*> terms;  // atom args or equality sides
  const SOFormula* left = nullptr;
  const SOFormula* right = nullptr;
};

// An (existential) second-order sentence: existential relation-variable
// prefix, full first-order matrix, and free relation parameters with declared
// arities. The matrix has no free first-order variables.
struct SOSentence {
  std::vector<std::pair<std::string, int>> prefix;  // relation variables, in order
  std::map<std::string, int> params;                // free relation parameters
  const SOFormula* matrix = nullptr;
  std::shared_ptr<const void> owner;  // keeps the nodes alive; copies share
};

// Allocates sentence nodes; finish() hands ownership to the sentence.
class SOBuilder {
 public:
  SOBuilder();

  const SOFormula* atom(const std::string& rel, std::vector<const Term*> args);
  const SOFormula* eq(const Term* a, const Term* b);
  const SOFormula* negate(const SOFormula* a);
  const SOFormula* conj(const SOFormula* a, const SOFormula* b);
  const SOFormula* disj(const SOFormula* a, const SOFormula* b);
  const SOFormula* implies(const SOFormula* a, const SOFormula* b);
  const SOFormula* iff(const SOFormula* a, const SOFormula* b);
  const SOFormula* exists(const std::string& var, const SOFormula* body);
  const SOFormula* forall(const std::string& var, const SOFormula* body);
  const SOFormula* conj_all(const std::vector<const SOFormula*>& cs);  // empty -> true

  // record that nodes of `s` are referenced by formulas built here
  void absorb(const SOSentence& s);

  SOSentence finish(std::vector<std::pair<std::string, int>> prefix,
                    std::map<std::string, int> params, const SOFormula* matrix) const;

 private:
  struct Arena;
  std::shared_ptr<Arena> arena;
};

// 'EX R:2. matrix' prefix entries; matrix with '!', '&', '|', '->', '<->',
// 'exists x.', 'forall x.'. Free relation names become parameters.
SOSentence parse_sentence(const std::string& text, const Signature* sig = nullptr);
std::string render(const SOSentence& s);
std::string render(const SOFormula* f);

// -------- enumeration and sampling --------

// All dialect formulas over the given variables with size <= size_bound,
// deterministic order, duplicate-free, closed downward in size. Atom tuples
// range over non-empty variable sequences of length <= |vars| (repetition
// allowed); enumerated terms are variables only.
std::vector<const Formula*> enumerate_formulas(const Signature& sig,
                                               const std::vector<std::string>& vars,
                                               int size_bound, Dialect d);

// Seeded random formula of depth <= depth (atoms at depth 1), uniform over the
// dialect's productions at each node.
const Formula* sample_formula(const Signature& sig, const std::vector<std::string>& vars,
                              int depth, uint64_t seed, Dialect d);

}  // namespace teamlog
