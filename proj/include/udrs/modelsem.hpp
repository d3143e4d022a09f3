// modelsem.hpp : fully scoped readings, finite models, bounded consequence
#ifndef UDRS_MODELSEM_HPP
#define UDRS_MODELSEM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "udrs/core.hpp"
#include "udrs/disambig.hpp"

namespace udrs {

// ---------------------------------------------------------------------------
// Determiners

enum class Mono { Up, Down, None };
enum class Pers { Persistent, AntiPersistent, None };

struct DeterminerInfo {
  enum Kind { Every, Some, No, AtMostK, MoreThanHalf } kind = Every;
  int k = 0;  // threshold for AtMostK
  Mono right = Mono::Up;
  Pers pers = Pers::AntiPersistent;

  // Truth over (|restrictor set|, |restrictor-and-scope set|). "more than
  // half" of an empty restrictor counts as true, which keeps the universal
  // determiner strictly stronger.
  bool truth(int nRes, int nBoth) const;
};

class DeterminerTable {
 public:
  // Built-in entries; the declared monotonicity/persistence flags are checked
  // against the truth functions over every pair of subsets of domains of size
  // <= 4 (throws std::logic_error on a mismatch).
  static DeterminerTable defaults(int fewK = 2);

  const DeterminerInfo* find(const std::string& name) const;
  const DeterminerInfo& at(const std::string& name) const;  // throws on unknown
  bool isRightDown(const std::string& name) const { return at(name).right == Mono::Down; }

 private:
  std::map<std::string, DeterminerInfo> table_;
  void verifyFlags() const;
};

// ---------------------------------------------------------------------------
// Fully scoped readings

struct SDrs;

struct SCond {
  enum Kind { KAtom, KNeg, KImpl, KQuant } kind = KAtom;
  Atom atom;
  std::string quant;                // for KQuant
  std::optional<std::string> var;   // bound referent for KQuant
  std::vector<SDrs> parts;          // KNeg: 1 (body); KImpl/KQuant: 2 (res, scope)
  Label origin;                     // label this condition came from
};

struct SDrs {
  std::vector<std::string> universe;
  std::vector<SCond> conds;
  Label origin;
};

// Nests the clause material according to the scoping (widest node outermost,
// lower bound innermost). The scoping must come from enumerateScopings.
SDrs resolveReading(const Udrs& u, const Scoping& s);

std::string printSDrs(const SDrs& d);

// ---------------------------------------------------------------------------
// Models

struct FiniteModel {
  std::vector<std::string> domain;
  std::map<std::string, std::string> constants;            // name -> individual
  std::map<std::string, int> arity;                        // predicate arities
  std::map<std::string, std::set<std::vector<std::string>>> ext;

  std::string str() const;
};

// True iff a verifying embedding of the top universe exists. Throws
// std::runtime_error on an uninterpreted predicate or constant.
bool evalModel(const FiniteModel& m, const SDrs& d);

// ---------------------------------------------------------------------------
// Bounded entailment

struct Vocab {
  std::vector<std::pair<std::string, int>> preds;
  std::vector<std::string> consts;
};
Vocab vocabOf(const std::vector<Udrs>& entries);

// Meaning postulates restricting the enumerated model space.
struct Constraints {
  std::vector<std::pair<std::string, std::string>> hypo;   // first subset of second
  std::vector<std::pair<std::string, std::string>> complement;  // first = complement of second
};

enum class Relation { R1, R3, R4, R8 };
Relation relationFromName(const std::string& name);  // "r1" | "r3" | "r4" | "r8"
std::string relationName(Relation r);

struct EntailOptions {
  int bound = 4;
  Constraints constraints;
  DeterminerTable table = DeterminerTable::defaults();
  // When set, entailment is checked against exactly these models instead of
  // the enumerated space.
  std::optional<std::vector<FiniteModel>> explicitModels;
};

struct EntailWitness {
  Assignment premise;        // scopings of the database entries
  Scoping goal;              // failing goal scoping
  FiniteModel countermodel;  // premises true, goal false
};

struct EntailVerdict {
  bool holds = false;
  Relation rel = Relation::R8;
  int bound = 0;
  std::optional<EntailWitness> witness;  // set when !holds
};

// Decides the relation at the given domain bound. For R8 the index tags of
// the database and the goal build the correlation registry; the other
// relations disambiguate every entry and the goal independently.
EntailVerdict entails(const Database& db, const Udrs& goal, Relation rel,
                      const EntailOptions& opts);

// Background-model helper shared by side-condition checks: every model of the
// database (under some correlated disambiguation) that verifies `lhs` under an
// assignment of the shared free referents also verifies `rhs`.
bool impliedOver(const Database& db, const SDrs& lhs, const SDrs& rhs,
                 const EntailOptions& opts);

// Database inconsistency at the bound: no model satisfies any correlated
// disambiguation of the entries.
bool inconsistentAt(const Database& db, const EntailOptions& opts);

}  // namespace udrs

#endif
