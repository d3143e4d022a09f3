// disambig.hpp : total scopings, type isomorphism, correlated disambiguation
#ifndef UDRS_DISAMBIG_HPP
#define UDRS_DISAMBIG_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "udrs/core.hpp"

namespace udrs {

// One total disambiguation: per clause (keyed by upper-bound label), the node
// labels in scope order, widest first.
struct Scoping {
  std::map<Label, std::vector<Label>> perClause;

  bool operator==(const Scoping& o) const { return perClause == o.perClause; }
  bool operator<(const Scoping& o) const { return perClause < o.perClause; }
};

// All scopings consistent with the subordination closure, in deterministic
// order (per clause, candidates are tried in label order).
std::vector<Scoping> enumerateScopings(const Udrs& u);

// Structural isomorphism: a label bijection preserving clause nesting,
// node kinds, determiner names and closure edges. Box content is not
// compared. Returns the label map a -> b, or nullopt.
std::optional<Renaming> sameType(const Udrs& a, const Udrs& b);

// Every structural bijection; with compareOrder false the closures need not
// agree (the alignment used by the rules that merge or subtract orders).
std::vector<Renaming> allTypeIsos(const Udrs& a, const Udrs& b, bool compareOrder);

// Extends a type isomorphism with a referent bijection under which the two
// structures have equal content; nullopt when contents differ.
std::optional<Renaming> contentIso(const Udrs& a, const Udrs& b, const Renaming& typeIso,
                                   bool compareOrder = true);

// Order-insensitive alignment with equal content: the correspondence used by
// the order-merging and order-subtracting rules.
std::optional<Renaming> alignContent(const Udrs& a, const Udrs& b);

// ---------------------------------------------------------------------------
// Correlation

// A correlation site: the clause subtree rooted at `subtreeTop` inside entry
// `entry`. Entry-level tags cover the whole entry; clause-level tags cover
// that nested clause.
struct Site {
  int entry;
  Label subtreeTop;
};

struct Registry {
  struct Group {
    std::string tag;
    std::vector<Site> sites;
    // align[k] maps labels of sites[0]'s subtree onto sites[k]'s subtree.
    std::vector<Renaming> align;
  };
  std::vector<Group> groups;

  const Group* find(const std::string& tag) const;
  bool hasTag(const std::string& tag) const { return find(tag) != nullptr; }
};

// Derives the registry from the :index tags. Throws ConfigError when
// coindexed sites are not of the same type.
Registry buildRegistry(const std::vector<Udrs>& entries);

// A joint disambiguation of a list of entries.
struct Assignment {
  std::vector<Scoping> perEntry;
};

// Every combination of per-entry scopings (no correlation).
std::vector<Assignment> allAssignments(const std::vector<Udrs>& entries);

// Only the combinations that respect every correlation group.
std::vector<Assignment> correlatedAssignments(const std::vector<Udrs>& entries,
                                              const Registry& reg);

bool respects(const Assignment& a, const std::vector<Udrs>& entries, const Registry::Group& g);

}  // namespace udrs

#endif
