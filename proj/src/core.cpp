#include "udrs/core.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace udrs {

const Node* Clause::findNode(const Label& l) const {
  for (const Node& n : nodes)
    if (n.label == l) return &n;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Index

namespace {

void indexClause(const Clause& c, LabelIndex& ix) {
  auto addLabel = [&](const Label& l) {
    if (ix.pos.count(l)) {
      ix.duplicates.push_back(l);
      return;
    }
    ix.pos[l] = static_cast<int>(ix.labels.size());
    ix.labels.push_back(l);
  };

  addLabel(c.upper);
  ix.clauseByUpper.emplace(c.upper, &c);
  ix.boxAt.emplace(c.upper, BoxRef{&c, nullptr, BoxRole::Upper});
  for (const Node& n : c.nodes) {
    addLabel(n.label);
    ix.nodeAt.emplace(n.label, &n);
    ix.clauseOfNode.emplace(n.label, &c);
    if (n.isNeg()) {
      addLabel(n.res);  // res == scope == body
      ix.boxAt.emplace(n.res, BoxRef{&c, &n, BoxRole::Scope});
    } else {
      addLabel(n.res);
      ix.boxAt.emplace(n.res, BoxRef{&c, &n, BoxRole::Res});
      addLabel(n.scope);
      ix.boxAt.emplace(n.scope, BoxRef{&c, &n, BoxRole::Scope});
    }
  }
  if (c.lower != c.upper) {
    // a lower bound that names a node is a well-formedness violation caught
    // later, not a duplicate label
    if (!ix.nodeAt.count(c.lower)) addLabel(c.lower);
    ix.boxAt.emplace(c.lower, BoxRef{&c, nullptr, BoxRole::Lower});
  }
  for (const SubClause& s : c.subs) {
    ix.subsAt[s.host].push_back(&s.get());
    indexClause(s.get(), ix);
  }
}

void collectClausesRec(const Clause& c, std::vector<const Clause*>& out) {
  out.push_back(&c);
  for (const SubClause& s : c.subs) collectClausesRec(s.get(), out);
}

}  // namespace

LabelIndex buildIndex(const Udrs& u) {
  LabelIndex ix;
  indexClause(u.clause, ix);
  return ix;
}

std::vector<const Clause*> collectClauses(const Udrs& u) {
  std::vector<const Clause*> out;
  collectClausesRec(u.clause, out);
  return out;
}

Box boxContent(const LabelIndex& ix, const Label& l) {
  auto it = ix.boxAt.find(l);
  if (it == ix.boxAt.end()) return {};
  const BoxRef& ref = it->second;
  switch (ref.role) {
    case BoxRole::Upper: {
      Box b;
      b.universe = ref.clause->universe;
      if (ref.clause->upper == ref.clause->lower) {
        Box merged = b;
        for (const auto& r : ref.clause->base.universe) merged.universe.push_back(r);
        merged.atoms = ref.clause->base.atoms;
        return merged;
      }
      return b;
    }
    case BoxRole::Lower:
      return ref.clause->base;
    case BoxRole::Res:
      return ref.node->resBox;
    case BoxRole::Scope:
      return {};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Closure

Closure::Closure(const Udrs& u, const LabelIndex& ix) {
  labels_ = ix.labels;
  for (size_t i = 0; i < labels_.size(); ++i) pos_[labels_[i]] = static_cast<int>(i);
  size_t n = labels_.size();
  reach_.assign(n, std::vector<bool>(n, false));

  auto edge = [&](const Label& a, const Label& b) {
    auto ia = pos_.find(a), ib = pos_.find(b);
    if (ia == pos_.end() || ib == pos_.end())
      throw std::runtime_error("subordination edge references unknown label: " +
                               (ia == pos_.end() ? a : b));
    reach_[ia->second][ib->second] = true;
  };

  for (size_t i = 0; i < n; ++i) reach_[i][i] = true;
  for (const Clause* c : collectClauses(u)) {
    for (const Node& nd : c->nodes) {
      edge(nd.label, c->upper);
      edge(nd.res, nd.label);
      edge(nd.scope, nd.label);
      edge(c->lower, nd.scope);
    }
    edge(c->lower, c->upper);
    for (const OrdEdge& e : c->ord) edge(e.lo, e.hi);
    for (const SubClause& s : c->subs) edge(s.get().upper, s.host);
  }

  // Warshall
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      if (reach_[i][k])
        for (size_t j = 0; j < n; ++j)
          if (reach_[k][j]) reach_[i][j] = true;

  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (reach_[i][j] && reach_[j][i])
        throw std::runtime_error("not a partial order: cycle through " + labels_[i] + " and " +
                                 labels_[j]);
}

bool Closure::leq(const Label& a, const Label& b) const {
  auto ia = pos_.find(a), ib = pos_.find(b);
  if (ia == pos_.end() || ib == pos_.end()) return false;
  return reach_[ia->second][ib->second];
}

std::optional<Label> Closure::lub(const Label& a, const Label& b) const {
  auto ia = pos_.find(a), ib = pos_.find(b);
  if (ia == pos_.end() || ib == pos_.end()) return std::nullopt;
  std::vector<int> uppers;
  for (size_t k = 0; k < labels_.size(); ++k)
    if (reach_[ia->second][k] && reach_[ib->second][k]) uppers.push_back(static_cast<int>(k));
  for (int cand : uppers) {
    bool least = true;
    for (int other : uppers)
      if (!reach_[cand][other]) {
        least = false;
        break;
      }
    if (least) return labels_[cand];
  }
  return std::nullopt;
}

std::vector<OrdEdge> Closure::pairs() const {
  std::vector<OrdEdge> out;
  for (size_t i = 0; i < labels_.size(); ++i)
    for (size_t j = 0; j < labels_.size(); ++j)
      if (reach_[i][j]) out.push_back({labels_[i], labels_[j]});
  std::sort(out.begin(), out.end());
  return out;
}

Analysis analyze(const Udrs& u) {
  LabelIndex ix = buildIndex(u);
  Closure cl(u, ix);
  return Analysis(std::move(ix), std::move(cl));
}

// ---------------------------------------------------------------------------
// Validation

std::string ValidationReport::str() const {
  if (ok()) return "ok";
  std::ostringstream ss;
  for (const Violation& v : violations) ss << v.where << ": " << v.what << "\n";
  return ss.str();
}

ValidationReport validate(const Udrs& u) {
  ValidationReport rep;
  auto bad = [&](const Label& where, const std::string& what) {
    rep.violations.push_back({where, what});
  };

  LabelIndex ix = buildIndex(u);
  for (const Label& l : ix.duplicates) bad(l, "label is used more than once");
  if (!rep.ok()) return rep;  // later checks assume unique labels

  if (u.top != u.clause.upper) bad(u.top, "top label differs from the outer clause upper bound");

  // referents declared at most once across the structure
  std::set<std::string> refs;
  auto declare = [&](const std::vector<std::string>& us, const Label& where) {
    for (const auto& r : us) {
      if (!refs.insert(r).second) bad(where, "referent '" + r + "' declared twice");
    }
  };
  for (const Clause* c : collectClauses(u)) {
    declare(c->universe, c->upper);
    declare(c->base.universe, c->lower);
    for (const Node& n : c->nodes) declare(n.resBox.universe, n.res);
  }

  for (const Clause* c : collectClauses(u)) {
    for (const Node& n : c->nodes) {
      if (n.isNeg()) {
        if (n.res != n.scope) bad(n.label, "negation must have a single body box");
      } else {
        if (n.res == n.scope) bad(n.label, "restrictor and scope must be distinct boxes");
        if (n.quant.empty()) bad(n.label, "quantifier node without a determiner name");
      }
      if (n.label == c->lower) bad(n.label, "lower bound carries a scope-bearing condition");
    }
    if (ix.nodeAt.count(c->lower)) bad(c->lower, "lower bound carries a scope-bearing condition");
    for (const SubClause& s : c->subs) {
      if (!ix.boxAt.count(s.host))
        bad(s.host, "nested clause attached to a label that is not a box");
      if (s.host == c->lower)
        bad(c->lower, "lower bound must not have anything below it (nested clause)");
      if (ix.nodeAt.count(s.host))
        bad(s.host, "nested clause attached to a scope-bearing node label");
    }
    for (const OrdEdge& e : c->ord) {
      if (!ix.has(e.lo) || !ix.has(e.hi)) {
        bad(c->upper, "order edge references unknown label " + (ix.has(e.lo) ? e.hi : e.lo));
        continue;
      }
      // a node may only be ordered through scope boxes: a node inside a
      // mate's restrictor has no scope-chain position
      if (c->findNode(e.lo)) {
        auto bx = ix.boxAt.find(e.hi);
        if (bx != ix.boxAt.end() && bx->second.role == BoxRole::Res &&
            c->findNode(bx->second.node->label))
          bad(e.lo, "node ordered below a clause-mate's restrictor");
      }
    }
  }
  if (!rep.ok()) return rep;

  try {
    Closure cl(u, ix);
    // nothing strictly below any lower bound
    for (const Clause* c : collectClauses(u)) {
      for (const Label& l : ix.labels)
        if (l != c->lower && cl.leq(l, c->lower))
          bad(c->lower, "lower bound must not have anything below it");
    }
    // greatest element and pairwise least upper bounds
    for (const Label& l : ix.labels)
      if (!cl.leq(l, u.top)) bad(l, "label is not below the top label");
    for (size_t i = 0; i < ix.labels.size(); ++i)
      for (size_t j = i + 1; j < ix.labels.size(); ++j)
        if (!cl.lub(ix.labels[i], ix.labels[j]))
          bad(ix.labels[i], "no least upper bound with " + ix.labels[j]);
  } catch (const std::exception& e) {
    bad(u.top, e.what());
  }
  return rep;
}

std::vector<OrdEdge> implicitClosure(const Udrs& u) {
  Analysis a = analyze(u);  // throws on cycles
  return a.closure.pairs();
}

// ---------------------------------------------------------------------------
// subUdrs

Udrs subUdrs(const Udrs& u, const Label& l) {
  if (l == u.top) return u;
  Analysis a = analyze(u);
  if (!a.ix.has(l)) throw std::runtime_error("unknown label: " + l);

  // A clause upper bound: that nested clause is the whole region.
  if (auto it = a.ix.clauseByUpper.find(l); it != a.ix.clauseByUpper.end()) {
    Udrs out;
    out.top = l;
    out.clause = *it->second;
    out.index = it->second->index;
    return out;
  }

  const Clause* owner = nullptr;
  if (auto nit = a.ix.clauseOfNode.find(l); nit != a.ix.clauseOfNode.end())
    owner = nit->second;
  else
    owner = a.ix.boxAt.at(l).clause;

  Clause nc;
  nc.upper = l;
  Box content = boxContent(a.ix, l);
  nc.universe = content.universe;
  for (const Node& n : owner->nodes)
    if (a.closure.leq(n.label, l)) nc.nodes.push_back(n);
  if (owner->lower != l && a.closure.leq(owner->lower, l)) {
    nc.lower = owner->lower;
    nc.base = owner->base;
  } else {
    nc.lower = l;
    nc.base.atoms = content.atoms;
    nc.universe = content.universe;
  }
  for (const OrdEdge& e : owner->ord)
    if (a.closure.leq(e.lo, l) && a.closure.leq(e.hi, l)) nc.ord.push_back(e);
  for (const SubClause& s : owner->subs)
    if (a.closure.leq(s.host, l)) nc.subs.push_back(s);

  Udrs out;
  out.top = l;
  out.clause = std::move(nc);
  return out;
}

Udrs flattenWrapper(Udrs u) {
  while (u.clause.nodes.empty() && u.clause.base.atoms.empty() && u.clause.subs.size() == 1 &&
         u.clause.subs[0].host == u.top) {
    Clause inner = u.clause.subs[0].get();
    for (const auto& v : u.clause.universe) inner.universe.push_back(v);
    if (inner.index && !u.index) u.index = inner.index;
    inner.index = std::nullopt;
    u.top = inner.upper;
    u.clause = std::move(inner);
  }
  return u;
}

// ---------------------------------------------------------------------------
// Fresh names, renaming, substitution

void FreshNames::reserve(const Udrs& u) {
  LabelIndex ix = buildIndex(u);
  for (const Label& l : ix.labels) used_.insert(l);
  for (const auto& r : declaredRefs(u)) used_.insert(r);
  for (const auto& c : mentionedConsts(u)) used_.insert(c);
  if (u.index) used_.insert(*u.index);
  for (const Clause* c : collectClauses(u))
    if (c->index) used_.insert(*c->index);
}

std::string FreshNames::next(const std::string& stem) {
  while (true) {
    std::string cand = stem + std::to_string(counter_++);
    if (used_.insert(cand).second) return cand;
  }
}

Label FreshNames::freshLabel(const std::string& stem) { return next(stem); }
std::string FreshNames::freshRef(const std::string& stem) { return next(stem); }
std::string FreshNames::freshConst(const std::string& stem) { return next(stem); }
std::string FreshNames::freshIndex(const std::string& stem) { return next(stem); }

namespace {

std::string mapped(const std::map<std::string, std::string>& m, const std::string& s) {
  auto it = m.find(s);
  return it == m.end() ? s : it->second;
}

Clause renameClause(const Clause& c, const Renaming& r) {
  Clause out;
  out.upper = mapped(r.labelMap, c.upper);
  out.lower = mapped(r.labelMap, c.lower);
  out.index = c.index;
  for (const auto& v : c.universe) out.universe.push_back(mapped(r.refMap, v));
  auto renameBox = [&](const Box& b) {
    Box nb;
    for (const auto& v : b.universe) nb.universe.push_back(mapped(r.refMap, v));
    for (const Atom& at : b.atoms) {
      Atom na;
      na.pred = at.pred;
      for (const Term& t : at.args)
        na.args.push_back(t.kind == Term::Var ? Term{Term::Var, mapped(r.refMap, t.name)} : t);
      nb.atoms.push_back(std::move(na));
    }
    return nb;
  };
  for (const Node& n : c.nodes) {
    Node nn = n;
    nn.label = mapped(r.labelMap, n.label);
    nn.res = mapped(r.labelMap, n.res);
    nn.scope = mapped(r.labelMap, n.scope);
    if (n.var) nn.var = mapped(r.refMap, *n.var);
    nn.resBox = renameBox(n.resBox);
    out.nodes.push_back(std::move(nn));
  }
  out.base = renameBox(c.base);
  for (const OrdEdge& e : c.ord)
    out.ord.push_back({mapped(r.labelMap, e.lo), mapped(r.labelMap, e.hi)});
  for (const SubClause& s : c.subs) {
    SubClause ns;
    ns.host = mapped(r.labelMap, s.host);
    ns.clause.push_back(renameClause(s.get(), r));
    out.subs.push_back(std::move(ns));
  }
  return out;
}

Clause substClause(const Clause& c, const std::map<std::string, Term>& sub) {
  Clause out = c;
  auto substBox = [&](Box& b) {
    for (Atom& at : b.atoms)
      for (Term& t : at.args)
        if (t.kind == Term::Var) {
          auto it = sub.find(t.name);
          if (it != sub.end()) t = it->second;
        }
  };
  for (Node& n : out.nodes) substBox(n.resBox);
  substBox(out.base);
  for (SubClause& s : out.subs) s.get() = substClause(s.get(), sub);
  return out;
}

}  // namespace

Udrs rename(const Udrs& u, const Renaming& r) {
  Udrs out;
  out.top = mapped(r.labelMap, u.top);
  out.clause = renameClause(u.clause, r);
  out.index = u.index;
  return out;
}

Udrs substTerms(const Udrs& u, const std::map<std::string, Term>& sub) {
  Udrs out = u;
  out.clause = substClause(u.clause, sub);
  return out;
}

FreshVariant freshVariant(const Udrs& u, FreshNames& names) {
  Renaming r;
  LabelIndex ix = buildIndex(u);
  for (const Label& l : ix.labels) r.labelMap[l] = names.freshLabel();
  for (const auto& v : declaredRefs(u)) r.refMap[v] = names.freshRef();
  return {rename(u, r), std::move(r)};
}

std::set<std::string> declaredRefs(const Udrs& u) {
  std::set<std::string> out;
  for (const Clause* c : collectClauses(u)) {
    out.insert(c->universe.begin(), c->universe.end());
    out.insert(c->base.universe.begin(), c->base.universe.end());
    for (const Node& n : c->nodes)
      out.insert(n.resBox.universe.begin(), n.resBox.universe.end());
  }
  return out;
}

std::set<std::string> mentionedConsts(const Udrs& u) {
  std::set<std::string> out;
  for (const Clause* c : collectClauses(u)) {
    auto scan = [&](const Box& b) {
      for (const Atom& a : b.atoms)
        for (const Term& t : a.args)
          if (t.kind == Term::Const) out.insert(t.name);
    };
    scan(c->base);
    for (const Node& n : c->nodes) scan(n.resBox);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural equality under a correspondence

namespace {

bool equalBoxUnder(const Box& a, const Box& b, const Renaming& r) {
  if (a.universe.size() != b.universe.size() || a.atoms.size() != b.atoms.size()) return false;
  std::multiset<std::string> ua, ub;
  for (const auto& v : a.universe) ua.insert(mapped(r.refMap, v));
  for (const auto& v : b.universe) ub.insert(v);
  if (ua != ub) return false;
  std::multiset<Atom> xa, xb;
  for (const Atom& at : a.atoms) {
    Atom na;
    na.pred = at.pred;
    for (const Term& t : at.args)
      na.args.push_back(t.kind == Term::Var ? Term{Term::Var, mapped(r.refMap, t.name)} : t);
    xa.insert(na);
  }
  for (const Atom& at : b.atoms) xb.insert(at);
  return xa == xb;
}

bool equalClauseUnder(const Clause& a, const Clause& b, const Renaming& r) {
  if (mapped(r.labelMap, a.upper) != b.upper) return false;
  if (mapped(r.labelMap, a.lower) != b.lower) return false;
  std::multiset<std::string> ua, ub;
  for (const auto& v : a.universe) ua.insert(mapped(r.refMap, v));
  for (const auto& v : b.universe) ub.insert(v);
  if (ua != ub) return false;
  if (a.nodes.size() != b.nodes.size()) return false;
  for (const Node& n : a.nodes) {
    const Node* m = b.findNode(mapped(r.labelMap, n.label));
    if (!m) return false;
    if (n.kind != m->kind || n.quant != m->quant) return false;
    if (n.var.has_value() != m->var.has_value()) return false;
    if (n.var && mapped(r.refMap, *n.var) != *m->var) return false;
    if (mapped(r.labelMap, n.res) != m->res || mapped(r.labelMap, n.scope) != m->scope)
      return false;
    if (!equalBoxUnder(n.resBox, m->resBox, r)) return false;
  }
  if (!equalBoxUnder(a.base, b.base, r)) return false;
  if (a.subs.size() != b.subs.size()) return false;
  for (const SubClause& s : a.subs) {
    const Label host = mapped(r.labelMap, s.host);
    const Label upper = mapped(r.labelMap, s.get().upper);
    bool found = false;
    for (const SubClause& t : b.subs)
      if (t.host == host && t.get().upper == upper) {
        if (!equalClauseUnder(s.get(), t.get(), r)) return false;
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace

bool equalUnder(const Udrs& a, const Udrs& b, const Renaming& r, bool compareOrder) {
  if (mapped(r.labelMap, a.top) != b.top) return false;
  if (!equalClauseUnder(a.clause, b.clause, r)) return false;
  if (!compareOrder) return true;
  // the subordination must agree as a closure: the stored edge sets may
  // differ in which implied edges they spell out
  try {
    Analysis aa = analyze(a);
    Analysis ab = analyze(b);
    for (const Label& x : aa.ix.labels)
      for (const Label& y : aa.ix.labels)
        if (aa.closure.leq(x, y) !=
            ab.closure.leq(mapped(r.labelMap, x), mapped(r.labelMap, y)))
          return false;
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

void Database::add(Udrs u) {
  for (const Udrs& e : entries)
    if (e.top == u.top)
      throw ConfigError("entries must have distinct top labels: " + u.top);
  names.reserve(u);
  entries.push_back(std::move(u));
}

std::set<std::string> Database::indexTags() const {
  std::set<std::string> out;
  for (const Udrs& u : entries) {
    if (u.index) out.insert(*u.index);
    for (const Clause* c : collectClauses(u))
      if (c->index) out.insert(*c->index);
  }
  return out;
}

}  // namespace udrs
