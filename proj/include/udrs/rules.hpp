// rules.hpp : forward inference rules over databases
#ifndef UDRS_RULES_HPP
#define UDRS_RULES_HPP

#include <optional>
#include <variant>

#include "udrs/core.hpp"
#include "udrs/disambig.hpp"
#include "udrs/modelsem.hpp"
#include "udrs/polarity.hpp"

namespace udrs {

// A guard or side condition blocked the application.
struct RuleRefused : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RuleOptions {
  int bound = 4;  // side-condition oracle bound
  Constraints constraints;
  DeterminerTable table = DeterminerTable::defaults();
};

// ---------------------------------------------------------------------------
// Non-empty universe: adds fresh referents to the top box.

Udrs neu(const Udrs& u, const std::vector<std::string>& refs);

// ---------------------------------------------------------------------------
// Embeddings of a restrictor region into the accessible context.

struct EmbeddingTargetRef {
  int entry;    // -1 for the source's own entry
  Label label;  // box or clause label hit
};

struct Embedding {
  std::map<Label, EmbeddingTargetRef> labelMap;
  std::map<std::string, Term> refMap;
  // entry holding the matched clause structure, when the source has one;
  // drives the correlation side condition of detachment
  std::optional<int> structureEntry;
};

// All embeddings of the restrictor of `condLabel` into the merge of the boxes
// above it plus the unconditional regions of the other entries. Deterministic
// order; empty when nothing matches.
std::vector<Embedding> findEmbeddings(const Database& db, int hostIdx, const Label& condLabel);

// ---------------------------------------------------------------------------
// Detachment

struct DetOutcome {
  Udrs derived;
  Database next;          // host possibly re-tagged with the shared index
  std::string sharedIndex;  // correlation between host consequent and result; "" if none
};

// Applies detachment at an implication or universal quantifier node. Throws
// RuleRefused when the polarity guard fails, no correlation/equivalence
// discharge is possible, or the detached material would be ambiguous without
// a clause of its own to carry the correlation.
DetOutcome det(const Database& db, int hostIdx, const Label& condLabel, const Embedding& f,
               const RuleOptions& opts);

// ---------------------------------------------------------------------------
// Ambiguity introduction

struct AiOutcome {
  Udrs derived;
  Database next;
};

// Merges two entries that differ only in their subordination into one entry
// ordered by the intersection, carrying a fresh index. Refuses when the
// intersection admits readings outside the union of the inputs.
AiOutcome ai(const Database& db, int i, int j, const RuleOptions& opts);

// ---------------------------------------------------------------------------
// Structural difference and ambiguity elimination

struct OrderDifference {
  enum Kind { Order, Falsity, ReadingSet } kind = Falsity;
  // pairs (wider, narrower) of the weakest order capturing the difference
  std::vector<std::pair<Label, Label>> order;
  std::vector<std::vector<Label>> readings;  // explicit set when not definable
};

// extensions(a) \ extensions(b) as a partial order when definable.
OrderDifference structuralDifference(const std::vector<std::vector<Label>>& extA,
                                     const std::vector<std::vector<Label>>& extB);

struct DiffOutcome {
  enum Kind { Narrowed, Inconsistent, ReadingSet } kind = Narrowed;
  std::optional<Udrs> narrowed;
  Database next;  // alpha replaced when narrowed
  std::vector<std::vector<Label>> readings;
};

// `negIdx` must hold a top-level negation of material content-isomorphic to
// `alphaIdx`. Narrows alpha to the readings the negation leaves open.
DiffOutcome diff(const Database& db, int alphaIdx, int negIdx, const RuleOptions& opts);

// Linear orders of one clause's nodes consistent with the closure, widest
// first (same order as enumerateScopings restricted to that clause).
std::vector<std::vector<Label>> clauseReadingOrders(const Udrs& u, const Label& clauseUpper);

}  // namespace udrs

#endif
