#include "udrs/rules.hpp"

#include <algorithm>
#include <functional>

namespace udrs {

// ---------------------------------------------------------------------------
// NeU

Udrs neu(const Udrs& u, const std::vector<std::string>& refs) {
  std::set<std::string> existing = declaredRefs(u);
  Udrs out = u;
  for (const std::string& r : refs) {
    if (!existing.insert(r).second)
      throw RuleRefused("referent '" + r + "' already declared");
    out.clause.universe.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embeddings

namespace {

// Accessible atom pool: (entry, box label, atom). For the host entry, boxes
// at labels above the node; for the others, boxes outside every quantifier
// and negation.
struct Pool {
  struct Item {
    int entry;
    Label label;
    const Atom* atom;
  };
  std::vector<Item> atoms;
  std::vector<std::pair<int, std::string>> refs;  // accessible referents
  std::vector<std::string> consts;

  // clause structures available for matching nested antecedents
  struct ClauseRef {
    int entry;
    const Clause* clause;
    const Udrs* owner;
  };
  std::vector<ClauseRef> clauses;
};

bool inUnconditionalRegion(const Analysis& a, const Udrs& u, const Label& l) {
  for (const Clause* c : collectClauses(u))
    for (const Node& n : c->nodes) {
      if (a.closure.leq(l, n.res) || a.closure.leq(l, n.scope)) return false;
    }
  return true;
}

Pool buildPool(const Database& db, int hostIdx, const Label& condLabel) {
  Pool pool;
  for (size_t e = 0; e < db.entries.size(); ++e) {
    const Udrs& u = db.entries[e];
    Analysis a = analyze(u);
    auto accessible = [&](const Label& l) {
      if ((int)e == hostIdx) return a.closure.leq(condLabel, l);
      return inUnconditionalRegion(a, u, l);
    };
    for (const Label& l : a.ix.labels) {
      if (!a.ix.boxAt.count(l)) continue;
      if (!accessible(l)) continue;
      Box b = boxContent(a.ix, l);
      for (const std::string& r : b.universe) pool.refs.emplace_back((int)e, r);
      // atoms live in the entry itself; take stable pointers
      const BoxRef& br = a.ix.boxAt.at(l);
      const std::vector<Atom>* atoms = nullptr;
      switch (br.role) {
        case BoxRole::Upper:
          atoms = (br.clause->upper == br.clause->lower) ? &br.clause->base.atoms : nullptr;
          break;
        case BoxRole::Lower: atoms = &br.clause->base.atoms; break;
        case BoxRole::Res: atoms = &br.node->resBox.atoms; break;
        case BoxRole::Scope: atoms = nullptr; break;
      }
      if (atoms)
        for (const Atom& at : *atoms) {
          pool.atoms.push_back({(int)e, l, &at});
          for (const Term& t : at.args)
            if (t.kind == Term::Const) pool.consts.push_back(t.name);
        }
    }
    // candidate clause structures: the top clause of other entries, plus any
    // nested clause hanging in an accessible region
    if ((int)e != hostIdx) {
      pool.clauses.push_back({(int)e, &u.clause, &u});
      for (const Clause* c : collectClauses(u))
        if (c->upper != u.top && inUnconditionalRegion(a, u, c->upper))
          pool.clauses.push_back({(int)e, c, &u});
    } else {
      for (const Clause* c : collectClauses(u))
        if (c->upper != u.top && a.closure.leq(condLabel, c->upper))
          pool.clauses.push_back({(int)e, c, &u});
    }
  }
  std::sort(pool.consts.begin(), pool.consts.end());
  pool.consts.erase(std::unique(pool.consts.begin(), pool.consts.end()), pool.consts.end());
  return pool;
}

// Does `sub` embed into `target` as a clause: same structure, restrictor and
// base atoms covered, referent map extended consistently and injectively.
bool clauseEmbeds(const Clause& sub, const Clause& target, const Closure& subCl,
                  const Closure& tgtCl, std::map<std::string, Term>& refMap,
                  std::map<Label, Label>& labelMap) {
  if (sub.nodes.size() != target.nodes.size()) return false;
  if (sub.subs.size() != target.subs.size()) return false;

  auto mapRefs = [&](const std::vector<std::string>& a, const std::vector<std::string>& b,
                     std::map<std::string, Term>& rm) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      auto it = rm.find(a[i]);
      if (it != rm.end()) {
        if (!(it->second == Term{Term::Var, b[i]})) return false;
      } else {
        rm[a[i]] = Term{Term::Var, b[i]};
      }
    }
    return true;
  };
  auto atomsCovered = [&](const std::vector<Atom>& src, const std::vector<Atom>& tgt,
                          const std::map<std::string, Term>& rm) {
    for (const Atom& a : src) {
      Atom mappedAtom;
      mappedAtom.pred = a.pred;
      for (const Term& t : a.args) {
        if (t.kind == Term::Var) {
          auto it = rm.find(t.name);
          if (it == rm.end()) return false;
          mappedAtom.args.push_back(it->second);
        } else {
          mappedAtom.args.push_back(t);
        }
      }
      if (std::find(tgt.begin(), tgt.end(), mappedAtom) == tgt.end()) return false;
    }
    return true;
  };

  std::function<bool(size_t)> matchNode = [&](size_t i) -> bool {
    if (i == sub.nodes.size()) {
      if (!atomsCovered(sub.base.atoms, target.base.atoms, refMap)) return false;
      // closure edges among mapped labels must be preserved
      for (const auto& [xa, xb] : labelMap)
        for (const auto& [ya, yb] : labelMap) {
          if (!subCl.has(xa) || !subCl.has(ya) || !tgtCl.has(xb) || !tgtCl.has(yb)) continue;
          if (subCl.leq(xa, ya) && !tgtCl.leq(xb, yb)) return false;
        }
      // nested clauses
      std::function<bool(size_t)> matchSub = [&](size_t k) -> bool {
        if (k == sub.subs.size()) return true;
        auto hostIt = labelMap.find(sub.subs[k].host);
        if (hostIt == labelMap.end()) return false;
        for (const SubClause& ts : target.subs) {
          if (ts.host != hostIt->second) continue;
          auto savedR = refMap;
          auto savedL = labelMap;
          labelMap[sub.subs[k].get().upper] = ts.get().upper;
          if (clauseEmbeds(sub.subs[k].get(), ts.get(), subCl, tgtCl, refMap, labelMap) &&
              matchSub(k + 1))
            return true;
          refMap = savedR;
          labelMap = savedL;
        }
        return false;
      };
      return matchSub(0);
    }
    const Node& sn = sub.nodes[i];
    for (const Node& tn : target.nodes) {
      bool taken = false;
      for (const auto& [k, v] : labelMap)
        if (v == tn.label) taken = true;
      if (taken) continue;
      if (sn.kind != tn.kind || sn.quant != tn.quant) continue;
      if (sn.var.has_value() != tn.var.has_value()) continue;
      auto savedR = refMap;
      auto savedL = labelMap;
      labelMap[sn.label] = tn.label;
      labelMap[sn.res] = tn.res;
      labelMap[sn.scope] = tn.scope;
      bool ok = true;
      if (sn.var && !mapRefs({*sn.var}, {*tn.var}, refMap)) ok = false;
      if (ok && !mapRefs(sn.resBox.universe, tn.resBox.universe, refMap)) ok = false;
      if (ok && !atomsCovered(sn.resBox.atoms, tn.resBox.atoms, refMap)) ok = false;
      if (ok && matchNode(i + 1)) return true;
      refMap = savedR;
      labelMap = savedL;
    }
    return false;
  };
  labelMap[sub.upper] = target.upper;
  labelMap[sub.lower] = target.lower;
  return matchNode(0);
}

}  // namespace

std::vector<Embedding> findEmbeddings(const Database& db, int hostIdx, const Label& condLabel) {
  const Udrs& host = db.entries[hostIdx];
  Analysis ha = analyze(host);
  auto nodeIt = ha.ix.nodeAt.find(condLabel);
  if (nodeIt == ha.ix.nodeAt.end())
    throw std::runtime_error("no scope-bearing node at label " + condLabel);
  const Node& node = *nodeIt->second;

  Pool pool = buildPool(db, hostIdx, condLabel);
  std::vector<Embedding> out;

  // source pieces: restrictor box atoms/universe + nested clauses at the
  // restrictor label
  const Box& resBox = node.resBox;
  std::vector<const Clause*> srcClauses;
  if (auto it = ha.ix.subsAt.find(node.res); it != ha.ix.subsAt.end())
    for (const Clause* c : it->second) srcClauses.push_back(c);

  // referent candidates: injective over the restrictor universe
  std::vector<std::string> srcRefs = resBox.universe;
  if (node.var && std::find(srcRefs.begin(), srcRefs.end(), *node.var) == srcRefs.end())
    srcRefs.push_back(*node.var);

  std::vector<Term> candidates;
  for (const auto& c : pool.consts) candidates.push_back({Term::Const, c});
  for (const auto& [e, r] : pool.refs) candidates.push_back({Term::Var, r});

  std::function<void(size_t, Embedding&)> tryAtoms;
  auto finish = [&](Embedding& emb) {
    // match nested clauses, if any
    if (srcClauses.empty()) {
      out.push_back(emb);
      return;
    }
    Udrs region = subUdrs(host, node.res);
    Analysis ra = analyze(region);
    for (const Pool::ClauseRef& cr : pool.clauses) {
      Embedding e2 = emb;
      std::map<Label, Label> lm;
      Analysis ta = analyze(*cr.owner);
      bool ok = true;
      for (const Clause* sc : srcClauses) {
        std::map<std::string, Term> rm = e2.refMap;
        if (!clauseEmbeds(*sc, *cr.clause, ra.closure, ta.closure, rm, lm)) {
          ok = false;
          break;
        }
        e2.refMap = rm;
      }
      if (!ok) continue;
      for (const auto& [a, b] : lm) e2.labelMap[a] = {cr.entry, b};
      e2.structureEntry = cr.entry;
      out.push_back(e2);
    }
  };

  // injectivity among restrictor referents
  auto consistent = [&](const Embedding& emb, const std::string& ref, const Term& img) {
    for (const auto& [r, t] : emb.refMap)
      if (r != ref && t == img) return false;
    return true;
  };

  std::function<void(size_t, Embedding&)> assignRef = [&](size_t i, Embedding& emb) {
    if (i == srcRefs.size()) {
      // every restrictor atom must occur in the pool under the map
      Embedding e2 = emb;
      bool ok = true;
      for (const Atom& a : resBox.atoms) {
        Atom mappedAtom;
        mappedAtom.pred = a.pred;
        for (const Term& t : a.args)
          mappedAtom.args.push_back(t.kind == Term::Var && e2.refMap.count(t.name)
                                        ? e2.refMap.at(t.name)
                                        : t);
        bool found = false;
        for (const Pool::Item& it : pool.atoms)
          if (*it.atom == mappedAtom) {
            e2.labelMap[node.res] = {it.entry, it.label};
            found = true;
            break;
          }
        if (!found) {
          ok = false;
          break;
        }
      }
      if (ok) finish(e2);
      return;
    }
    for (const Term& cand : candidates) {
      if (!consistent(emb, srcRefs[i], cand)) continue;
      emb.refMap[srcRefs[i]] = cand;
      assignRef(i + 1, emb);
      emb.refMap.erase(srcRefs[i]);
    }
  };

  Embedding emb;
  assignRef(0, emb);

  // deterministic order and no duplicates
  std::sort(out.begin(), out.end(), [](const Embedding& a, const Embedding& b) {
    if (a.refMap != b.refMap) return a.refMap < b.refMap;
    return a.structureEntry < b.structureEntry;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Embedding& a, const Embedding& b) {
                          return a.refMap == b.refMap && a.structureEntry == b.structureEntry;
                        }),
            out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Detachment

namespace {

// Readings of the restrictor region (its nested clauses drive the count).
int regionReadingCount(const Udrs& host, const Label& resLabel) {
  Udrs region = subUdrs(host, resLabel);
  return (int)enumerateScopings(region).size();
}

std::optional<std::string> regionIndexTag(const Udrs& host, const Label& resLabel) {
  Analysis a = analyze(host);
  if (auto it = a.ix.subsAt.find(resLabel); it != a.ix.subsAt.end())
    for (const Clause* c : it->second)
      if (c->index) return c->index;
  return std::nullopt;
}

}  // namespace

DetOutcome det(const Database& db, int hostIdx, const Label& condLabel, const Embedding& f,
               const RuleOptions& opts) {
  const Udrs& host = db.entries[hostIdx];
  Analysis ha = analyze(host);
  auto nodeIt = ha.ix.nodeAt.find(condLabel);
  if (nodeIt == ha.ix.nodeAt.end())
    throw std::runtime_error("no scope-bearing node at label " + condLabel);
  const Node node = *nodeIt->second;
  if (node.isNeg() || node.quant != "every")
    throw RuleRefused("detachment applies to implications and universal quantifiers only");

  PolarityMap pm = polarity(host, opts.table);
  if (pm.at(condLabel) != Pol::Positive)
    throw RuleRefused("polarity guard: node " + condLabel + " is " + polName(pm.at(condLabel)));

  // correlation side condition for ambiguous antecedents
  if (regionReadingCount(host, node.res) > 1) {
    if (!f.structureEntry)
      throw RuleRefused("ambiguous antecedent matched without a clause structure");
    int k = *f.structureEntry;
    std::optional<std::string> i = regionIndexTag(host, node.res);
    std::optional<std::string> kTag = db.entries[k].index;
    bool coindexed = i && kTag && *i == *kTag;
    if (!coindexed) {
      // crossed readings must be provably equivalent relative to the data:
      // each side, added with an independent tag, entails the other under
      // every disambiguation of everything
      Udrs ante = flattenWrapper(subUdrs(host, node.res));
      ante.index = std::nullopt;
      ante.clause.index = std::nullopt;
      Udrs minor = db.entries[k];
      minor.index = std::nullopt;
      std::function<void(Clause&)> untag = [&](Clause& c) {
        c.index = std::nullopt;
        for (SubClause& s : c.subs) untag(s.get());
      };
      untag(ante.clause);
      untag(minor.clause);
      EntailOptions eo;
      eo.bound = std::min(opts.bound, 3);
      eo.constraints = opts.constraints;
      eo.table = opts.table;
      // isolated equivalence implies equivalence relative to the data, so
      // the small check runs first and the full context only serves the
      // cases where the data itself supplies the readings
      auto mutual = [&](const Database& ctx) {
        Database left = ctx;
        left.add(freshVariant(ante, left.names).udrs);
        Database right = ctx;
        right.add(freshVariant(minor, right.names).udrs);
        return entails(left, minor, Relation::R8, eo).holds &&
               entails(right, ante, Relation::R8, eo).holds;
      };
      if (!mutual(Database{}) && !mutual(db))
        throw RuleRefused("contraindexed antecedent and premise are not equivalent");
    }
  }

  // rebuild the owning clause without the node and its restrictor
  const Clause* ownerPtr = nullptr;
  if (auto it = ha.ix.clauseOfNode.find(condLabel); it != ha.ix.clauseOfNode.end())
    ownerPtr = it->second;
  const Clause& owner = *ownerPtr;

  Database next = db;
  Clause stripped;
  stripped.upper = owner.upper;
  stripped.lower = owner.lower;
  stripped.universe = owner.universe;
  stripped.base = owner.base;
  for (const Node& n : owner.nodes)
    if (n.label != condLabel) stripped.nodes.push_back(n);
  for (const OrdEdge& e : owner.ord) {
    // drop edges inside the removed restrictor
    if (ha.closure.leq(e.lo, node.res) || ha.closure.leq(e.hi, node.res)) continue;
    stripped.ord.push_back(e);
  }
  for (const SubClause& s : owner.subs)
    if (!ha.closure.leq(s.host, node.res)) stripped.subs.push_back(s);

  Udrs strippedU;
  strippedU.top = stripped.upper;
  strippedU.clause = std::move(stripped);

  // referents of the restrictor map to their embedding images; the bound
  // variable follows the same map
  std::map<std::string, Term> sub;
  for (const auto& [r, t] : f.refMap) sub[r] = t;
  strippedU = substTerms(strippedU, sub);

  // image referents that occur in the detached material must stay
  // accessible: they join the result's top universe
  std::set<std::string> occurring;
  for (const Clause* c : collectClauses(strippedU)) {
    auto scan = [&](const Box& b) {
      for (const Atom& at : b.atoms)
        for (const Term& t : at.args)
          if (t.kind == Term::Var) occurring.insert(t.name);
    };
    scan(c->base);
    for (const Node& nn : c->nodes) scan(nn.resBox);
  }
  std::set<std::string> already = declaredRefs(strippedU);
  for (const auto& [r, t] : f.refMap)
    if (t.kind == Term::Var && occurring.count(t.name) && !already.count(t.name))
      strippedU.clause.universe.push_back(t.name);

  // relabel: clause upper, the node and its boxes collapse into the new top;
  // everything else is freshened
  Label newTop = next.names.freshLabel("l");
  Renaming rn;
  rn.labelMap[owner.upper] = newTop;
  rn.labelMap[node.label] = newTop;
  rn.labelMap[node.res] = newTop;
  rn.labelMap[node.scope] = newTop;
  LabelIndex si = buildIndex(strippedU);
  for (const Label& l : si.labels)
    if (!rn.labelMap.count(l)) rn.labelMap[l] = next.names.freshLabel("l");
  for (const std::string& r : declaredRefs(strippedU)) rn.refMap[r] = next.names.freshRef("u");
  // image referents keep their names: they refer to context individuals
  for (const auto& [r, t] : f.refMap)
    if (t.kind == Term::Var) rn.refMap[t.name] = t.name;
  Udrs derived = rename(strippedU, rn);
  derived.top = newTop;
  derived.index = std::nullopt;
  derived.clause.index = std::nullopt;

  // drop self-loop edges produced by the collapse
  {
    std::vector<OrdEdge> keep;
    for (const OrdEdge& e : derived.clause.ord)
      if (e.lo != e.hi) keep.push_back(e);
    derived.clause.ord = std::move(keep);
  }

  // flatten a trivial wrapper: no nodes, empty base, single nested clause at
  // the top
  bool flattened = false;
  std::optional<std::string> consequentTag;
  if (derived.clause.nodes.empty() && derived.clause.base.atoms.empty() &&
      derived.clause.subs.size() == 1 && derived.clause.subs[0].host == derived.top) {
    Clause inner = derived.clause.subs[0].get();
    for (const auto& v : derived.clause.universe) inner.universe.push_back(v);
    consequentTag = inner.index;
    inner.index = std::nullopt;
    derived.top = inner.upper;
    derived.clause = std::move(inner);
    flattened = true;
  }

  ValidationReport vr = validate(derived);
  if (!vr.ok()) throw std::runtime_error("detachment produced an ill-formed result:\n" + vr.str());

  DetOutcome out;
  out.next = std::move(next);

  // correlation with the host's consequent
  int resultReadings = (int)enumerateScopings(derived).size();
  if (resultReadings > 1) {
    if (!flattened)
      throw RuleRefused(
          "detached material is ambiguous but has no clause of its own to carry the correlation");
    // the consequent clause inside the host shares the result's index
    std::string tag;
    if (consequentTag) {
      tag = *consequentTag;
    } else {
      tag = out.next.names.freshIndex("cx");
      // retag the host's consequent clause in place
      Udrs& h = out.next.entries[hostIdx];
      std::function<bool(Clause&)> retag = [&](Clause& c) -> bool {
        for (SubClause& s : c.subs) {
          if (s.host == node.scope) {
            s.get().index = tag;
            return true;
          }
          if (retag(s.get())) return true;
        }
        return false;
      };
      retag(h.clause);
    }
    derived.index = tag;
    out.sharedIndex = tag;
  } else {
    derived.index = out.next.names.freshIndex("ix");
  }

  out.derived = derived;
  out.next.add(std::move(derived));
  return out;
}

// ---------------------------------------------------------------------------
// Ambiguity introduction

namespace {

std::map<Label, Label> invert(const std::map<Label, Label>& m) {
  std::map<Label, Label> out;
  for (const auto& [a, b] : m) out[b] = a;
  return out;
}

}  // namespace

std::vector<std::vector<Label>> clauseReadingOrders(const Udrs& u, const Label& clauseUpper) {
  std::vector<std::vector<Label>> out;
  std::set<std::vector<Label>> seen;
  for (const Scoping& s : enumerateScopings(u)) {
    auto it = s.perClause.find(clauseUpper);
    if (it == s.perClause.end()) continue;
    if (seen.insert(it->second).second) out.push_back(it->second);
  }
  return out;
}

AiOutcome ai(const Database& db, int i, int j, const RuleOptions& opts) {
  const Udrs& s1 = db.entries[i];
  const Udrs& s2 = db.entries[j];
  std::optional<Renaming> full = alignContent(s1, s2);
  if (!full) throw RuleRefused("entries differ in more than their subordination");

  // intersect the closures on s1's label space
  Analysis a1 = analyze(s1);
  Analysis a2 = analyze(s2);
  Udrs merged = s1;
  // explicit edges of the result: node-over-node facts present in both
  std::vector<OrdEdge> edges;
  for (const Clause* c : collectClauses(s1)) {
    for (const Node& x : c->nodes)
      for (const Node& y : c->nodes) {
        if (x.label == y.label) continue;
        bool in1 = a1.closure.leq(y.label, x.scope);
        bool in2 = a2.closure.leq(full->labelMap.at(y.label), full->labelMap.at(x.scope));
        if (in1 && in2) edges.push_back({y.label, x.scope});
      }
  }
  // distribute the kept edges to their clauses
  std::function<void(Clause&)> setOrd = [&](Clause& c) {
    c.ord.clear();
    for (const OrdEdge& e : edges) {
      if (c.findNode(e.lo) != nullptr) c.ord.push_back(e);
    }
    for (SubClause& s : c.subs) setOrd(s.get());
  };
  setOrd(merged.clause);

  // reading set must be exactly the union
  Analysis am = analyze(merged);
  auto readings = [&](const Udrs& u) {
    std::set<Scoping> out;
    for (const Scoping& s : enumerateScopings(u)) out.insert(s);
    return out;
  };
  std::set<Scoping> r1 = readings(s1);
  std::set<Scoping> rm = readings(merged);
  // transport s2's readings onto s1's labels
  std::map<Label, Label> back = invert(full->labelMap);
  std::set<Scoping> r2;
  for (const Scoping& s : enumerateScopings(s2)) {
    Scoping t;
    for (const auto& [cu, perm] : s.perClause) {
      std::vector<Label> mappedPerm;
      for (const Label& l : perm) mappedPerm.push_back(back.at(l));
      t.perClause[back.at(cu)] = mappedPerm;
    }
    r2.insert(t);
  }
  std::set<Scoping> uni = r1;
  uni.insert(r2.begin(), r2.end());
  if (rm != uni)
    throw RuleRefused("subordination intersection admits readings outside the two inputs");

  AiOutcome out;
  out.next = db;
  FreshVariant fv = freshVariant(merged, out.next.names);
  fv.udrs.index = out.next.names.freshIndex("ix");
  fv.udrs.clause.index = std::nullopt;
  out.derived = fv.udrs;
  out.next.add(std::move(fv.udrs));
  (void)opts;
  return out;
}

// ---------------------------------------------------------------------------
// Structural difference and DIFF

OrderDifference structuralDifference(const std::vector<std::vector<Label>>& extA,
                                     const std::vector<std::vector<Label>>& extB) {
  OrderDifference out;
  std::vector<std::vector<Label>> d;
  for (const auto& pi : extA)
    if (std::find(extB.begin(), extB.end(), pi) == extB.end()) d.push_back(pi);
  if (d.empty()) {
    out.kind = OrderDifference::Falsity;
    return out;
  }
  // pairs (a wider than b) holding in every remaining reading
  const std::vector<Label>& nodes = d.front();
  std::vector<std::pair<Label, Label>> pairs;
  for (const Label& a : nodes)
    for (const Label& b : nodes) {
      if (a == b) continue;
      bool always = true;
      for (const auto& pi : d) {
        auto pa = std::find(pi.begin(), pi.end(), a);
        auto pb = std::find(pi.begin(), pi.end(), b);
        if (!(pa < pb)) {
          always = false;
          break;
        }
      }
      if (always) pairs.emplace_back(a, b);
    }
  // extensions of that order
  std::vector<std::vector<Label>> ext;
  std::vector<Label> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Label> perm = sorted;
  do {
    bool ok = true;
    for (const auto& [a, b] : pairs) {
      auto pa = std::find(perm.begin(), perm.end(), a);
      auto pb = std::find(perm.begin(), perm.end(), b);
      if (!(pa < pb)) {
        ok = false;
        break;
      }
    }
    if (ok) ext.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  auto sortSet = [](std::vector<std::vector<Label>> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sortSet(ext) == sortSet(d)) {
    out.kind = OrderDifference::Order;
    // transitive reduction keeps the printed order tidy
    for (const auto& [a, b] : pairs) {
      bool redundant = false;
      for (const auto& [c, d2] : pairs)
        if (a == c && d2 != b) {
          for (const auto& [c2, e] : pairs)
            if (c2 == d2 && e == b) redundant = true;
        }
      if (!redundant) out.order.emplace_back(a, b);
    }
    return out;
  }
  out.kind = OrderDifference::ReadingSet;
  out.readings = d;
  return out;
}

DiffOutcome diff(const Database& db, int alphaIdx, int negIdx, const RuleOptions& opts) {
  const Udrs& alpha = db.entries[alphaIdx];
  const Udrs& negEntry = db.entries[negIdx];

  // the negation entry: a single negation node on top
  const Clause& nc = negEntry.clause;
  const Node* negNode = nullptr;
  for (const Node& n : nc.nodes)
    if (n.isNeg()) negNode = &n;
  if (!negNode || nc.nodes.size() != 1)
    throw RuleRefused("second entry is not a top-level negation");

  Udrs inner = subUdrs(negEntry, negNode->res);
  // the inner material may be a wrapper around one nested clause
  if (inner.clause.nodes.empty() && inner.clause.subs.size() == 1 &&
      inner.clause.base.atoms.empty()) {
    Clause c = inner.clause.subs[0].get();
    inner.top = c.upper;
    inner.clause = std::move(c);
  }
  inner.index = std::nullopt;
  inner.clause.index = std::nullopt;

  std::optional<Renaming> full = alignContent(alpha, inner);
  if (!full) throw RuleRefused("negated material differs in content");

  std::vector<std::vector<Label>> extA = clauseReadingOrders(alpha, alpha.top);
  std::vector<std::vector<Label>> extB;
  std::map<Label, Label> back = invert(full->labelMap);
  for (const auto& perm : clauseReadingOrders(inner, inner.top)) {
    std::vector<Label> mappedPerm;
    for (const Label& l : perm) mappedPerm.push_back(back.at(l));
    extB.push_back(mappedPerm);
  }

  OrderDifference d = structuralDifference(extA, extB);
  DiffOutcome out;
  out.next = db;
  if (d.kind == OrderDifference::Falsity) {
    out.kind = DiffOutcome::Inconsistent;
    return out;
  }
  if (d.kind == OrderDifference::ReadingSet) {
    out.kind = DiffOutcome::ReadingSet;
    out.readings = d.readings;
    return out;
  }

  Udrs narrowed = alpha;
  // keep non-top-clause edges, replace the top clause's node-over-node edges
  std::vector<OrdEdge> keep;
  for (const OrdEdge& e : alpha.clause.ord) keep.push_back(e);
  narrowed.clause.ord.clear();
  for (const auto& [wider, narrower] : d.order) {
    const Node* w = alpha.clause.findNode(wider);
    narrowed.clause.ord.push_back({narrower, w->scope});
  }
  // keep edges that do not order two top-clause nodes
  for (const OrdEdge& e : keep) {
    bool nodeOverNode = false;
    for (const Node& x : alpha.clause.nodes)
      if (e.hi == x.scope && alpha.clause.findNode(e.lo)) nodeOverNode = true;
    if (!nodeOverNode) narrowed.clause.ord.push_back(e);
  }

  // index bookkeeping: the narrowed entry keeps the tag only when no other
  // entry shares it
  if (alpha.index) {
    int sharers = 0;
    for (size_t e = 0; e < db.entries.size(); ++e)
      if ((int)e != alphaIdx && db.entries[e].index == alpha.index) ++sharers;
    if (sharers > 0) narrowed.index = out.next.names.freshIndex("ix");
  }

  ValidationReport vr = validate(narrowed);
  if (!vr.ok()) throw std::runtime_error("difference produced an ill-formed entry:\n" + vr.str());

  out.kind = DiffOutcome::Narrowed;
  out.narrowed = narrowed;
  out.next.entries[alphaIdx] = std::move(narrowed);
  (void)opts;
  return out;
}

}  // namespace udrs
