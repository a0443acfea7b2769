#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "teamlog/core.hpp"
#include "teamlog/syntax.hpp"

// Evaluation engines: Tarski semantics for first-order formulas, lax team
// semantics for all three dialects, first-order sentences with relation
// parameters, and brute-force existential second-order search.

namespace teamlog {

Elem eval_term(const Structure& a, const Assignment& s, const Term* t);

// graph of c0,...,c(n-1) |-> t(c0,...,c(n-1)); term variables must be v0..v(n-1)
Relation term_graph(const Structure& a, const Term* t, int n);

// classical single-assignment satisfaction; first-order formulas only
bool eval_tarski(const Structure& a, const Assignment& s, const Formula* f);

// Generic enumerates disjunction covers (3^|X|) and supplement functions
// ((2^|A|-1)^|X|); Fast additionally restricts to partitions (2^|X|) and
// singleton supplements (|A|^|X|) at nodes whose subtree is downward closed,
// pruned row-wise (a row can only take values/sides whose single-row team
// already satisfies the subformula — necessary under downward closure).
// Auto is Fast. Both modes return identical verdicts; agreement is tested.
enum class EvalMode { Generic, Fast, Auto };

struct EvalLimits {
  uint64_t max_cover_candidates = uint64_t(1) << 24;
  uint64_t max_supplement_candidates = uint64_t(1) << 24;
};

// Memoizes on (subformula id, canonical team), so one evaluator instance can
// be reused across many formulas and teams over the same structure.
class TeamEvaluator {
 public:
  explicit TeamEvaluator(const Structure& a, EvalMode mode = EvalMode::Auto,
                         EvalLimits limits = EvalLimits{});
  ~TeamEvaluator();
  TeamEvaluator(const TeamEvaluator&) = delete;
  TeamEvaluator& operator=(const TeamEvaluator&) = delete;

  bool eval(const Team& x, const Formula* f);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl;
};

bool eval_team(const Structure& a, const Team& x, const Formula* f,
               EvalMode mode = EvalMode::Auto);

// 2^24 unless overridden by the TEAMLOG_BUDGET environment variable
uint64_t default_eso_budget();

// Compiles a sentence once and evaluates it against many parameter bindings.
class SentenceEvaluator {
 public:
  SentenceEvaluator(const Structure& a, const SOSentence& s);
  ~SentenceEvaluator();
  SentenceEvaluator(const SentenceEvaluator&) = delete;
  SentenceEvaluator& operator=(const SentenceEvaluator&) = delete;

  // params must bind every free relation parameter with the declared arity
  bool eval(const std::map<std::string, Relation>& params,
            std::optional<uint64_t> budget = std::nullopt);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl;
};

// sentence must have an empty prefix
bool eval_fo_with_relations(const Structure& a, const SOSentence& s,
                            const std::map<std::string, Relation>& params);

bool eval_eso(const Structure& a, const SOSentence& s,
              const std::map<std::string, Relation>& params,
              std::optional<uint64_t> budget = std::nullopt);

}  // namespace teamlog
