// engine.hpp : proof search, goal reduction, traces
#ifndef UDRS_ENGINE_HPP
#define UDRS_ENGINE_HPP

#include <optional>

#include "udrs/core.hpp"
#include "udrs/modelsem.hpp"
#include "udrs/replace.hpp"
#include "udrs/rules.hpp"

namespace udrs {

struct EngineOptions {
  int bound = 4;   // oracle domain bound
  int budget = 8;  // rule-application budget
  LexTheory lex = LexTheory::empty();
  DeterminerTable table = DeterminerTable::defaults();

  RuleOptions ruleOptions() const {
    RuleOptions r;
    r.bound = bound;
    r.constraints = lex.modelConstraints();
    r.table = table;
    return r;
  }
  EntailOptions entailOptions() const {
    EntailOptions e;
    e.bound = bound;
    e.constraints = lex.modelConstraints();
    e.table = table;
    return e;
  }
};

// A goal is a structure to derive, or - inside a reductio subproof - the
// obligation to show the data inconsistent.
struct Goal {
  std::optional<Udrs> udrs;
  bool inconsistency = false;

  static Goal of(Udrs u) { return {std::move(u), false}; }
  static Goal contradiction() { return {std::nullopt, true}; }
};

struct TraceStep {
  std::string rule;               // cond | raa | diff | det | rr | ai | direct | closed
  std::vector<std::string> args;  // replay parameters
  Sexpr detail = Sexpr::list();   // side-condition discharges
};

struct ProofTrace {
  enum Verdict { Proved, Refuted, Exhausted } verdict = Exhausted;
  std::vector<TraceStep> steps;
  Database finalDb;
  std::optional<EntailWitness> refutation;
  int budget = 0;

  Sexpr toSexpr() const;
  std::string str() const;
};

// Iterative-deepening forward search with the fixed instance order
// cond, raa, diff, det, rr, ai. Goals are discharged by an index-respecting
// structural match; goal reduction applies only when every reading of the
// goal puts the same implication or negation on top.
ProofTrace prove(const Database& db, const Udrs& goal, const EngineOptions& opts);

// Goal reductions, exposed for direct use. Both throw RuleRefused when the
// goal's top operator is not unambiguous.
struct CondOutcome {
  Database next;  // antecedent instance added
  Udrs subgoal;   // consequent with the conditional discharged
};
CondOutcome condRule(const Database& db, const Udrs& goal, const EngineOptions& opts);

struct RaaOutcome {
  Database next;  // the negation's body added
};
RaaOutcome raaRule(const Database& db, const Udrs& goal, const EngineOptions& opts);

// True when every reading of the goal has the same top node and that node
// satisfies `wantNeg` (negation) or not (implication/universal).
bool topOperatorUnambiguous(const Udrs& goal, bool wantNeg, Label* outLabel = nullptr);

// Re-applies a trace to the initial database; the result must equal
// trace.finalDb byte for byte when printed.
Database replayTrace(const Database& db0, const Udrs& goal, const ProofTrace& trace,
                     const EngineOptions& opts);

// (database before, entry added) for every entry-producing step of a trace.
std::vector<std::pair<Database, Udrs>> traceDerivations(const Database& db0, const Udrs& goal,
                                                        const ProofTrace& trace,
                                                        const EngineOptions& opts);

// The goal in force before each step; nullopt once a reductio turned the
// obligation into deriving an inconsistency. Serves guard audits.
std::vector<std::optional<Udrs>> traceGoals(const Database& db0, const Udrs& goal,
                                            const ProofTrace& trace, const EngineOptions& opts);

}  // namespace udrs

#endif
