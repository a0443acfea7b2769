#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Relational core: finite structures, relations with explicit arity, teams,
// the relational algebra (projection, product, k-join, diagonals) and the
// closure operator generating families of relations.

namespace teamlog {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Elem = int;
using Tuple = std::vector<Elem>;

// A finite relation with an explicit arity tag. The empty relation of arity n
// and the empty relation of arity m are distinct values. Tuples are kept
// sorted and duplicate-free, so relations compare canonically.
struct Relation {
  int arity = 0;
  std::vector<Tuple> tuples;

  Relation() = default;
  Relation(int n, std::vector<Tuple> ts);

  static Relation empty(int n) { return Relation(n, {}); }
  static Relation point() { return Relation(0, {Tuple{}}); }  // {()}

  bool is_empty() const { return tuples.empty(); }
  bool is_singleton() const { return tuples.size() == 1; }
  bool contains(const Tuple& t) const;
  bool subset_of(const Relation& other) const;

  friend bool operator==(const Relation&, const Relation&) = default;
  friend auto operator<=>(const Relation&, const Relation&) = default;
};

struct RelationFamily {
  std::vector<Relation> relations;  // sorted, duplicate-free

  void normalize();
  bool contains(const Relation& r) const;
  friend bool operator==(const RelationFamily&, const RelationFamily&) = default;
};

struct Signature {
  std::map<std::string, int> relations;  // name -> arity (>= 0)
  std::map<std::string, int> functions;  // name -> arity (>= 1)
  std::set<std::string> constants;

  void validate() const;  // distinct names across kinds, sane arities
  friend bool operator==(const Signature&, const Signature&) = default;
};

// Total function table: values indexed by the rank of the argument tuple.
struct FunctionTable {
  int arity = 0;
  std::vector<Elem> values;

  friend bool operator==(const FunctionTable&, const FunctionTable&) = default;
};

struct Structure {
  Signature sig;
  std::vector<std::string> domain;  // element names; order is canonical
  std::map<std::string, Relation> relations;
  std::map<std::string, FunctionTable> functions;
  std::map<std::string, Elem> constants;

  int size() const { return static_cast<int>(domain.size()); }
  Elem elem(const std::string& name) const;  // throws on unknown name
  const std::string& elem_name(Elem e) const;

  uint64_t tuple_rank(const Tuple& t) const;  // mixed-radix, first coord most significant
  Tuple tuple_unrank(uint64_t rank, int arity) const;
  uint64_t space_size(int arity) const;  // |A|^arity

  Relation full_relation(int arity) const;              // A^n
  Relation function_graph(const std::string& f) const;  // arity k+1
  Relation constant_singleton(const std::string& c) const;
  Elem apply_function(const std::string& f, const Tuple& args) const;

  void validate() const;
  friend bool operator==(const Structure&, const Structure&) = default;
};

// A team: a set of assignments over a fixed, ordered variable domain. Rows are
// aligned with the domain order, sorted and duplicate-free.
struct Team {
  std::vector<std::string> domain;
  std::vector<Tuple> rows;

  Team() = default;
  Team(std::vector<std::string> dom, std::vector<Tuple> rs);

  bool is_empty() const { return rows.empty(); }
  int var_pos(const std::string& v) const;  // -1 if absent

  friend bool operator==(const Team&, const Team&) = default;
};

using Assignment = std::map<std::string, Elem>;

// Team/relation conversions and team surgery.
Team team_of_relation(const Relation& r);  // variables v0, v1, ...
Relation relation_of_team(const Team& x, const std::vector<std::string>& vars);

// X(F/x): every row s gains (or overwrites) x with each value in F(s); F must
// return a non-empty set for every row.
Team supplement(const Team& x, const std::string& var,
                const std::function<std::vector<Elem>(const Assignment&)>& f);
// X(A/x): duplication with every element of the domain.
Team duplicate_team(const Team& x, const Structure& a, const std::string& var);
Team restrict_team(const Team& x, const std::set<std::string>& dom);
Team team_union(const Team& x, const Team& y);  // same domain set required

// Relational algebra.
Relation project(const Relation& r, const std::vector<int>& idx);
Relation product(const Relation& r, const Relation& s);
Relation intersect(const Relation& r, const Relation& s);  // same arity required
Relation join_k(const Relation& r, const Relation& s, int k);
Relation diagonal(const Structure& a, int n);  // {t t : t in A^n}, arity 2n

// Closure of a seed family under: empties and fulls, same-arity intersection,
// product, projection, the binary diagonal, and all symbol interpretations
// (functions as graphs, constants as singletons), with arities capped.
struct Derivation {
  enum Kind {
    EmptyRel,    // n
    FullRel,     // n
    DiagonalRel, // binary diagonal of the structure
    SymbolRel,   // name
    SymbolFun,   // name (graph relation)
    SymbolConst, // name (singleton)
    Seed,        // seed index in the input family
    Singleton,   // one-element unary relation {a}, elem = a
    Meet,        // family indices a, b
    Prod,        // family indices a, b
    Proj,        // family index a, index tuple idx
  } kind = Seed;
  int n = 0;
  std::string name;
  Elem elem = -1;
  int a = -1, b = -1;
  std::vector<int> idx;
};

struct ClosureResult {
  RelationFamily family;                // canonical order
  std::vector<Derivation> derivations;  // aligned with family.relations
  bool truncated = false;               // some product/projection exceeded the cap
};

ClosureResult closure(const Structure& a, const RelationFamily& seeds, int max_arity,
                      bool with_singletons = false, size_t family_limit = 200000);

// All relations over the structure with arity <= max_arity. Guarded against
// blow-up (throws when the family would exceed the limit).
RelationFamily all_relations(const Structure& a, int max_arity, size_t limit = 1u << 20);

std::string show_tuple(const Structure& a, const Tuple& t);
std::string show_relation(const Structure& a, const Relation& r);
std::string show_team(const Team& x, const Structure& a);

}  // namespace teamlog
