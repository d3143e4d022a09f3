// core.hpp : labelled scope-underspecified structures and their well-formedness
//
// A Udrs is a tree of clauses. Each clause has an upper-bound label, a
// lower-bound box holding the verb-level atoms, and a set of scope-bearing
// nodes (quantifiers, negations, implications). The stored subordination
// relation `ord` lists only the edges that are not forced by the structure;
// every query goes through the reflexive-transitive closure, which adds the
// structural edges (restrictor/scope below their node, nodes below the upper
// bound, lower bound below every node's scope, nested clause below its host
// box).
#ifndef UDRS_CORE_HPP
#define UDRS_CORE_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace udrs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Label = std::string;

// An argument of an atom. Variables are discourse referents declared in some
// universe of the same structure; everything else is a constant.
struct Term {
  enum Kind { Var, Const } kind = Const;
  std::string name;

  bool operator==(const Term& o) const { return kind == o.kind && name == o.name; }
  bool operator<(const Term& o) const {
    return kind != o.kind ? kind < o.kind : name < o.name;
  }
};

struct Atom {
  std::string pred;
  std::vector<Term> args;

  bool operator==(const Atom& o) const { return pred == o.pred && args == o.args; }
  bool operator<(const Atom& o) const {
    return pred != o.pred ? pred < o.pred : args < o.args;
  }
};

// Plain box content: referents it declares plus its atomic conditions.
struct Box {
  std::vector<std::string> universe;
  std::vector<Atom> atoms;

  bool empty() const { return universe.empty() && atoms.empty(); }
};

// A scope-bearing node of a clause. An implication is stored as a
// universal quantifier without a bound variable; the printer restores the
// implication syntax for that case.
struct Node {
  enum Kind { Quant, Neg } kind = Quant;
  Label label;
  std::string quant;               // determiner name; empty for Neg
  std::optional<std::string> var;  // bound referent; absent for implications
  Label res;                       // restrictor box (== body for Neg)
  Label scope;                     // scope box (== body for Neg)
  Box resBox;                      // inline restrictor content; unused for Neg

  bool isNeg() const { return kind == Neg; }
  bool isImplication() const { return kind == Quant && !var.has_value(); }
};

struct OrdEdge {
  Label lo, hi;  // lo <= hi
  bool operator==(const OrdEdge& o) const { return lo == o.lo && hi == o.hi; }
  bool operator<(const OrdEdge& o) const {
    return lo != o.lo ? lo < o.lo : hi < o.hi;
  }
};

struct Clause;

// A nested clause hanging below a host box (upper < host).
struct SubClause {
  Label host;
  std::vector<Clause> clause;  // exactly one element; vector breaks the cycle

  const Clause& get() const { return clause.front(); }
  Clause& get() { return clause.front(); }
};

struct Clause {
  Label upper;
  Label lower;
  std::optional<std::string> index;   // correlation tag for this clause
  std::vector<std::string> universe;  // referents of the upper box
  std::vector<Node> nodes;
  Box base;                           // content of the lower box
  std::vector<OrdEdge> ord;           // explicit subordination edges
  std::vector<SubClause> subs;

  const Node* findNode(const Label& l) const;
};

struct Udrs {
  Label top;
  Clause clause;  // clause.upper == top
  std::optional<std::string> index;
};

// ---------------------------------------------------------------------------
// Label-indexed views

enum class BoxRole { Upper, Lower, Res, Scope };

struct BoxRef {
  const Clause* clause = nullptr;
  const Node* node = nullptr;  // set for Res/Scope boxes
  BoxRole role = BoxRole::Upper;
};

// Flat index over one Udrs: every label, the node or box it names, the clause
// it belongs to, and the nested clauses attached below each box label.
struct LabelIndex {
  std::vector<Label> labels;  // pre-order over the tree
  std::map<Label, int> pos;
  std::map<Label, const Node*> nodeAt;
  std::map<Label, const Clause*> clauseOfNode;
  std::map<Label, const Clause*> clauseByUpper;
  std::map<Label, BoxRef> boxAt;
  std::map<Label, std::vector<const Clause*>> subsAt;
  std::vector<Label> duplicates;

  bool has(const Label& l) const { return pos.count(l) != 0; }
};

LabelIndex buildIndex(const Udrs& u);

// Clauses in pre-order (top clause first).
std::vector<const Clause*> collectClauses(const Udrs& u);

// Box content at a label; scope/body boxes are empty by construction.
Box boxContent(const LabelIndex& ix, const Label& l);

// ---------------------------------------------------------------------------
// Subordination closure

class Closure {
 public:
  // Throws std::runtime_error on a subordination cycle.
  Closure(const Udrs& u, const LabelIndex& ix);

  bool has(const Label& l) const { return pos_.count(l) != 0; }
  bool leq(const Label& a, const Label& b) const;
  bool lt(const Label& a, const Label& b) const { return leq(a, b) && a != b; }
  // Least upper bound, or nullopt when none exists.
  std::optional<Label> lub(const Label& a, const Label& b) const;
  // All (a <= b) pairs, sorted.
  std::vector<OrdEdge> pairs() const;
  const std::vector<Label>& labels() const { return labels_; }

 private:
  std::vector<Label> labels_;
  std::map<Label, int> pos_;
  std::vector<std::vector<bool>> reach_;
};

// Index + closure computed together.
struct Analysis {
  LabelIndex ix;
  Closure closure;
  Analysis(LabelIndex i, Closure c) : ix(std::move(i)), closure(std::move(c)) {}
};
Analysis analyze(const Udrs& u);

// ---------------------------------------------------------------------------
// Operations

struct Violation {
  std::string where;  // offending label or clause upper
  std::string what;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const;
};

ValidationReport validate(const Udrs& u);

// Reflexive-transitive closure of the stored order plus structural edges.
// Throws on a cycle ("not a partial order").
std::vector<OrdEdge> implicitClosure(const Udrs& u);

// The sub-structure dominated by `l`: all boxes/nodes at labels <= l, with
// the order restricted accordingly. Throws on an unknown label.
Udrs subUdrs(const Udrs& u, const Label& l);

// Promotes a trivial wrapper (no nodes, empty lower box, one nested clause
// right below the top) to the nested clause itself; repeats while possible.
Udrs flattenWrapper(Udrs u);

struct Renaming {
  std::map<Label, Label> labelMap;
  std::map<std::string, std::string> refMap;
};

// Issues fresh labels/referents; rules that create structure share one
// instance so traces replay deterministically.
class FreshNames {
 public:
  explicit FreshNames(unsigned seed = 0) : counter_(seed) {}
  void reserve(const Udrs& u);
  void reserveName(const std::string& n) { used_.insert(n); }
  Label freshLabel(const std::string& stem = "g");
  std::string freshRef(const std::string& stem = "v");
  std::string freshConst(const std::string& stem = "c");
  std::string freshIndex(const std::string& stem = "ix");
  unsigned counter() const { return counter_; }

 private:
  std::string next(const std::string& stem);
  unsigned counter_;
  std::set<std::string> used_;
};

struct FreshVariant {
  Udrs udrs;
  Renaming witness;
};

// Structure-isomorphic copy with fresh labels and referents.
FreshVariant freshVariant(const Udrs& u, FreshNames& names);

// Applies a renaming; names without an entry stay put.
Udrs rename(const Udrs& u, const Renaming& r);

// Replaces variable occurrences (not declarations) by arbitrary terms.
Udrs substTerms(const Udrs& u, const std::map<std::string, Term>& sub);

// Content equality up to the given correspondence. Index tags are ignored.
// With compareOrder the subordination closures must agree as well.
bool equalUnder(const Udrs& a, const Udrs& b, const Renaming& r, bool compareOrder = true);

std::set<std::string> declaredRefs(const Udrs& u);
std::set<std::string> mentionedConsts(const Udrs& u);

// ---------------------------------------------------------------------------
// Database

struct Database {
  std::vector<Udrs> entries;
  // Fresh-name state lives with the data so rule output replays byte-for-byte.
  FreshNames names;

  void add(Udrs u);
  std::set<std::string> indexTags() const;
};

}  // namespace udrs

#endif
