// replace.hpp : the replacement calculus
//
// Judgments have the shape "database |- X >> Y": X is at least as strong as
// Y. Replacing a box or condition at a positively marked label weakens the
// entry (old >> new); at a negatively marked label the replacement must be
// the stronger side (new >> old). Restrictor positions are additionally gated
// by the quantifier's persistence evaluated in its clause.
#ifndef UDRS_REPLACE_HPP
#define UDRS_REPLACE_HPP

#include <optional>

#include "udrs/core.hpp"
#include "udrs/io.hpp"
#include "udrs/modelsem.hpp"
#include "udrs/polarity.hpp"
#include "udrs/rules.hpp"
#include "udrs/sexpr.hpp"

namespace udrs {

// A replayable derivation record.
struct Deriv {
  std::string rule;
  std::string detail;
  std::vector<Deriv> premises;

  Sexpr toSexpr() const;
};

// ---------------------------------------------------------------------------
// Lexical theory

class LexTheory {
 public:
  // Validates every entry against the bounded-model oracle at registration;
  // throws ConfigError for a semantically invalid rule or a hyponymy cycle.
  static LexTheory fromRaw(const RawLex& raw, const RuleOptions& opts);
  static LexTheory empty() { return LexTheory(); }

  // reflexive-transitive hyponymy: p at least as strong as q
  bool stronger(const std::string& p, const std::string& q) const;
  // determiner weakenings q1 >> q2 (validated), e.g. every >> more-than-half
  const std::vector<std::pair<std::string, std::string>>& detRules() const { return detrule_; }
  // quantifier pairs allowing a neighbourhood exchange (validated)
  bool piAllows(const std::string& q1, const std::string& q2) const;

  Constraints modelConstraints() const;

  const std::vector<std::pair<std::string, std::string>>& hypo() const { return hypo_; }

 private:
  std::vector<std::pair<std::string, std::string>> hypo_;
  std::vector<std::pair<std::string, std::string>> complement_;
  std::vector<std::pair<std::string, std::string>> pi_;
  std::vector<std::pair<std::string, std::string>> detrule_;
};

// ---------------------------------------------------------------------------
// Persistence relative to the clause

// The determiner's base class, demoted to none unless it survives every
// disambiguation: an undefined polarity, or a clause-mate / dominating
// quantifier without a persistence class, blocks restrictor replacement.
Pers persistentInClause(const Udrs& u, const Label& npLabel, const DeterminerTable& dt);

// ---------------------------------------------------------------------------
// Judgments

struct Judgment {
  bool holds = false;
  Deriv deriv;
};

// box-level: there is a referent map under which every condition of the
// weaker box is covered by a stronger condition of the left box
Judgment ggDrs(const Database& db, const LexTheory& lex, const Box& lhs, const Box& rhs,
               const RuleOptions& opts);

// negation bodies compare contravariantly; whole regions compare box-by-box
// with the sign of each position
Judgment ggRegion(const Database& db, const LexTheory& lex, const Udrs& lhs, const Udrs& rhs,
                  const RuleOptions& opts);

// condition-level: same determiner, restrictor compared per its persistence
// class in `u` (structural branch or bounded-model branch)
Judgment ggCond(const Database& db, const LexTheory& lex, const Udrs& u, const Label& nodeLabel,
                const Box& newResBox, const RuleOptions& opts);

// ---------------------------------------------------------------------------
// SUBST and the replacement rule

// What to put at a label: new box content, or a new determiner name.
struct ReplacementSpec {
  enum Kind { BoxContent, Determiner } kind = BoxContent;
  Box box;
  std::string determiner;
};

// Judgment "db |- u >> u[l := spec]" (or the converse at negative labels).
// Throws RuleRefused when the polarity is undefined or a gate fails.
Judgment subst(const Database& db, const LexTheory& lex, const Udrs& u, const Label& l,
               const ReplacementSpec& spec, const RuleOptions& opts);

// One derivable replacement of the entry.
struct Replacement {
  Udrs result;  // not yet freshened or indexed
  Deriv derivation;
  Label at;
  std::string kind;  // "atom" | "determiner" | "restrictor" | "exchange" | "table"
};

// All single-step replacements derivable for the entry, deterministic order.
std::vector<Replacement> rrCandidates(const Database& db, int entryIdx, const LexTheory& lex,
                                      const RuleOptions& opts);

struct RrOutcome {
  Udrs derived;  // freshened, correlation-tagged
  Database next;
  Deriv derivation;
};

// Adds the replacement to the database; the result shares the source's
// correlation tag when the structures stay alike (readings correspond), and
// otherwise receives a fresh one.
RrOutcome applyRr(const Database& db, int entryIdx, const Replacement& r);

// First derivable replacement, applied. Throws RuleRefused when none exists.
RrOutcome rr(const Database& db, int entryIdx, const LexTheory& lex, const RuleOptions& opts);

// ---------------------------------------------------------------------------
// Neighbourhood exchange

// Rewrites "l2 immediately inside l1" to "l1 immediately inside l2" when the
// registered exchange relation allows it against every node that could sit
// immediately inside l1 in some reading. Throws RuleRefused otherwise.
Judgment ggPi(const Database& db, const LexTheory& lex, const Udrs& u, const Label& l1,
              const Label& l2, const RuleOptions& opts);
Udrs applyPi(const Udrs& u, const Label& l1, const Label& l2);

// ---------------------------------------------------------------------------
// Lexical table rewrites at a condition

// The structural rewrites of a quantifier condition: determiner weakenings,
// instantiation of a universal at an individual that satisfies its
// restrictor, "no A B" to "every A not-B", and "some A not-B" to
// "not (every A B)". Results are whole rewritten entries.
std::vector<Replacement> ggLex(const Database& db, int entryIdx, const Label& nodeLabel,
                               const LexTheory& lex, const RuleOptions& opts);

// Removes a scope-bearing node: its restrictor subtree disappears, the given
// images replace its referents, and the scope material rehangs at the clause
// upper bound. Shared by instantiation and the goal-reduction rules.
Udrs stripNode(const Udrs& u, const Label& nodeLabel, const std::map<std::string, Term>& images);

}  // namespace udrs

#endif
