#include "udrs/replace.hpp"

#include <algorithm>
#include <functional>

namespace udrs {

Sexpr Deriv::toSexpr() const {
  Sexpr e = Sexpr::list({Sexpr::atom(rule)});
  if (!detail.empty()) e.items.push_back(Sexpr::atom(detail));
  for (const Deriv& p : premises) e.items.push_back(p.toSexpr());
  return e;
}

// ---------------------------------------------------------------------------
// Schema helpers for registration-time validation

namespace {

SDrs boxSDrs(const Box& b) {
  SDrs d;
  d.universe = b.universe;
  for (const Atom& a : b.atoms) {
    SCond c;
    c.kind = SCond::KAtom;
    c.atom = a;
    d.conds.push_back(std::move(c));
  }
  return d;
}

Atom mkAtom(const std::string& p, std::vector<std::string> vars) {
  Atom a;
  a.pred = p;
  for (auto& v : vars) a.args.push_back({Term::Var, std::move(v)});
  return a;
}

SDrs quantified(const std::string& q, const std::string& var, Box res, SDrs scope) {
  SCond c;
  c.kind = SCond::KQuant;
  c.quant = q;
  c.var = var;
  c.parts.push_back(boxSDrs(res));
  c.parts.push_back(std::move(scope));
  SDrs d;
  d.conds.push_back(std::move(c));
  return d;
}

SDrs negated(SDrs body) {
  SCond c;
  c.kind = SCond::KNeg;
  c.parts.push_back(std::move(body));
  SDrs d;
  d.conds.push_back(std::move(c));
  return d;
}

SDrs atomScope(const std::string& p, std::vector<std::string> vars) {
  SDrs d;
  SCond c;
  c.kind = SCond::KAtom;
  c.atom = mkAtom(p, std::move(vars));
  d.conds.push_back(std::move(c));
  return d;
}

bool schemaValid(const SDrs& lhs, const SDrs& rhs, const RuleOptions& opts) {
  Database empty;
  EntailOptions eo;
  eo.bound = std::min(opts.bound, 3);
  eo.constraints = opts.constraints;
  eo.table = opts.table;
  return impliedOver(empty, lhs, rhs, eo);
}

}  // namespace

// ---------------------------------------------------------------------------
// LexTheory

LexTheory LexTheory::fromRaw(const RawLex& raw, const RuleOptions& opts) {
  LexTheory t;
  t.hypo_ = raw.hypo;
  t.complement_ = raw.complement;

  // hyponymy must be cycle-free
  std::function<bool(const std::string&, const std::string&, std::set<std::string>&)> reaches =
      [&](const std::string& from, const std::string& to, std::set<std::string>& seen) -> bool {
    if (from == to) return true;
    if (!seen.insert(from).second) return false;
    for (const auto& [p, q] : t.hypo_)
      if (p == from && reaches(q, to, seen)) return true;
    return false;
  };
  for (const auto& [p, q] : t.hypo_) {
    std::set<std::string> seen;
    if (p == q || reaches(q, p, seen))
      throw ConfigError("hyponymy cycle through '" + p + "'");
  }

  // exchange pairs: q1 wide over q2 must entail q2 wide over q1
  for (const auto& [q1, q2] : raw.pi) {
    SDrs lhs = quantified(q1, "x", Box{{"x"}, {mkAtom("p-a", {"x"})}},
                          quantified(q2, "y", Box{{"y"}, {mkAtom("p-b", {"y"})}},
                                     atomScope("p-r", {"x", "y"})));
    SDrs rhs = quantified(q2, "y", Box{{"y"}, {mkAtom("p-b", {"y"})}},
                          quantified(q1, "x", Box{{"x"}, {mkAtom("p-a", {"x"})}},
                                     atomScope("p-r", {"x", "y"})));
    if (!schemaValid(lhs, rhs, opts))
      throw ConfigError("exchange pair (" + q1 + ", " + q2 + ") is not sound");
    t.pi_.push_back({q1, q2});
  }

  // determiner weakenings: q1(A,B) must entail q2(A,B)
  for (const auto& [q1, q2] : raw.detrule) {
    SDrs lhs = quantified(q1, "x", Box{{"x"}, {mkAtom("p-a", {"x"})}}, atomScope("p-b", {"x"}));
    SDrs rhs = quantified(q2, "x", Box{{"x"}, {mkAtom("p-a", {"x"})}}, atomScope("p-b", {"x"}));
    if (!schemaValid(lhs, rhs, opts))
      throw ConfigError("determiner rule (" + q1 + " to " + q2 + ") is not sound");
    t.detrule_.push_back({q1, q2});
  }

  // built-in structural rewrites, self-checked once
  {
    SDrs noAB =
        quantified("no", "x", Box{{"x"}, {mkAtom("p-a", {"x"})}}, atomScope("p-b", {"x"}));
    SDrs everyNotB = quantified("every", "x", Box{{"x"}, {mkAtom("p-a", {"x"})}},
                                negated(atomScope("p-b", {"x"})));
    if (!schemaValid(noAB, everyNotB, opts) || !schemaValid(everyNotB, noAB, opts))
      throw std::logic_error("negative determiner rewrite failed its self-check");
    SDrs someNotB = quantified("some", "x", Box{{"x"}, {mkAtom("p-a", {"x"})}},
                               negated(atomScope("p-b", {"x"})));
    SDrs notEvery = negated(
        quantified("every", "x", Box{{"x"}, {mkAtom("p-a", {"x"})}}, atomScope("p-b", {"x"})));
    if (!schemaValid(someNotB, notEvery, opts))
      throw std::logic_error("existential rewrite failed its self-check");
  }
  return t;
}

bool LexTheory::stronger(const std::string& p, const std::string& q) const {
  if (p == q) return true;
  std::set<std::string> seen;
  std::function<bool(const std::string&)> walk = [&](const std::string& cur) -> bool {
    if (cur == q) return true;
    if (!seen.insert(cur).second) return false;
    for (const auto& [a, b] : hypo_)
      if (a == cur && walk(b)) return true;
    return false;
  };
  return walk(p);
}

bool LexTheory::piAllows(const std::string& q1, const std::string& q2) const {
  for (const auto& [a, b] : pi_)
    if (a == q1 && b == q2) return true;
  return false;
}

Constraints LexTheory::modelConstraints() const {
  Constraints c;
  c.hypo = hypo_;
  c.complement = complement_;
  return c;
}

// ---------------------------------------------------------------------------
// Persistence in a clause

namespace {

Pers flipPers(Pers p) {
  switch (p) {
    case Pers::Persistent: return Pers::AntiPersistent;
    case Pers::AntiPersistent: return Pers::Persistent;
    case Pers::None: return Pers::None;
  }
  return Pers::None;
}

}  // namespace

Pers persistentInClause(const Udrs& u, const Label& npLabel, const DeterminerTable& dt) {
  Analysis a = analyze(u);
  auto it = a.ix.nodeAt.find(npLabel);
  if (it == a.ix.nodeAt.end()) throw std::runtime_error("no node at label " + npLabel);
  const Node& np = *it->second;
  if (np.isNeg()) return Pers::None;
  const DeterminerInfo* base = dt.find(np.quant);
  if (!base || base->pers == Pers::None) return Pers::None;

  PolarityMap pm = polarity(u, dt);
  Pol pol = pm.at(npLabel);
  if (pol == Pol::Undefined) return Pers::None;

  // clause-mates that may take scope over the NP must transmit the
  // replacement: quantifiers without a persistence or monotonicity class
  // block it (negations are already reflected in the polarity)
  const Clause* clause = a.ix.clauseOfNode.at(npLabel);
  for (const Node& y : clause->nodes) {
    if (y.label == npLabel) continue;
    if (a.closure.leq(y.label, np.scope)) continue;  // always below
    if (y.isNeg()) continue;
    const DeterminerInfo* d = dt.find(y.quant);
    if (!d || d->pers == Pers::None || d->right == Mono::None) return Pers::None;
  }
  // quantifiers dominating the whole clause from outside
  for (const Clause* c : collectClauses(u)) {
    for (const Node& y : c->nodes) {
      if (y.label == npLabel) continue;
      bool dominates = a.closure.lt(clause->upper, y.label);
      if (!dominates) continue;
      if (y.isNeg()) continue;
      const DeterminerInfo* d = dt.find(y.quant);
      if (!d || d->pers == Pers::None || d->right == Mono::None) return Pers::None;
    }
  }

  return pol == Pol::Negative ? flipPers(base->pers) : base->pers;
}

// ---------------------------------------------------------------------------
// Judgments

Judgment ggDrs(const Database& db, const LexTheory& lex, const Box& lhs, const Box& rhs,
               const RuleOptions& opts) {
  (void)db;
  (void)opts;
  Judgment j;
  // candidate referent maps, tried in deterministic order
  std::vector<std::string> targets = rhs.universe;
  std::sort(targets.begin(), targets.end());
  std::vector<std::string> src = lhs.universe;

  std::map<std::string, std::string> f;
  std::function<bool(size_t)> tryMap = [&](size_t i) -> bool {
    if (i == src.size()) {
      Deriv d{"ggDrs", "", {}};
      for (const Atom& want : rhs.atoms) {
        bool covered = false;
        for (const Atom& have : lhs.atoms) {
          if (have.args.size() != want.args.size()) continue;
          bool argsMatch = true;
          for (size_t k = 0; k < have.args.size(); ++k) {
            Term t = have.args[k];
            if (t.kind == Term::Var) {
              auto im = f.find(t.name);
              if (im != f.end()) t = {Term::Var, im->second};
            }
            if (!(t == want.args[k])) {
              argsMatch = false;
              break;
            }
          }
          if (!argsMatch) continue;
          if (!lex.stronger(have.pred, want.pred)) continue;
          Deriv step{"lex", have.pred + ">>" + want.pred, {}};
          d.premises.push_back(std::move(step));
          covered = true;
          break;
        }
        if (!covered) return false;
      }
      j.holds = true;
      j.deriv = std::move(d);
      return true;
    }
    if (targets.empty()) return false;
    for (const std::string& t : targets) {
      f[src[i]] = t;
      if (tryMap(i + 1)) return true;
      f.erase(src[i]);
    }
    return false;
  };
  if (src.empty() || !targets.empty()) tryMap(0);
  if (!j.holds) j.deriv = {"ggDrs", "no-covering-map", {}};
  return j;
}

namespace {

// sign of each box position inside a region whose top counts positive
void regionSigns(const Udrs& u, const DeterminerTable& dt, PolarityMap& out) {
  out = polarity(u, dt);
}

Judgment coverBox(const Database& db, const LexTheory& lex, const Box& strongSide,
                  const Box& weakSide, const RuleOptions& opts) {
  return ggDrs(db, lex, strongSide, weakSide, opts);
}

}  // namespace

Judgment ggRegion(const Database& db, const LexTheory& lex, const Udrs& lhs, const Udrs& rhs,
                  const RuleOptions& opts) {
  Judgment j;
  std::optional<Renaming> iso = sameType(lhs, rhs);
  if (!iso) {
    j.deriv = {"ggRegion", "structures-differ", {}};
    return j;
  }
  if (contentIso(lhs, rhs, *iso)) {
    j.holds = true;
    j.deriv = {"ggRegion", "identical", {}};
    return j;
  }

  PolarityMap signs;
  regionSigns(lhs, opts.table, signs);

  // align referents positionally per universe, then compare each box pair
  Renaming r = *iso;
  LabelIndex ixL = buildIndex(lhs);
  LabelIndex ixR = buildIndex(rhs);
  for (const Label& l : ixL.labels) {
    Box a = boxContent(ixL, l);
    auto m = r.labelMap.find(l);
    if (m == r.labelMap.end()) continue;
    Box b = boxContent(ixR, m->second);
    if (a.universe.size() != b.universe.size()) {
      j.deriv = {"ggRegion", "universe-mismatch:" + l, {}};
      return j;
    }
    for (size_t k = 0; k < a.universe.size(); ++k) r.refMap[a.universe[k]] = b.universe[k];
  }

  Deriv d{"ggRegion", "", {}};
  for (const Label& l : ixL.labels) {
    auto m = r.labelMap.find(l);
    if (m == r.labelMap.end()) continue;
    Box a = boxContent(ixL, l);
    Box b = boxContent(ixR, m->second);
    // map lhs referents into rhs space for the comparison
    Box aMapped;
    aMapped.universe = b.universe;
    for (const Atom& at : a.atoms) {
      Atom na;
      na.pred = at.pred;
      for (const Term& t : at.args) {
        if (t.kind == Term::Var && r.refMap.count(t.name))
          na.args.push_back({Term::Var, r.refMap.at(t.name)});
        else
          na.args.push_back(t);
      }
      aMapped.atoms.push_back(std::move(na));
    }
    if (aMapped.atoms == b.atoms) continue;
    Pol s = signs.count(l) ? signs.at(l) : Pol::Undefined;
    if (s == Pol::Undefined) {
      j.deriv = {"ggRegion", "undefined-sign:" + l, {}};
      return j;
    }
    Judgment sub = s == Pol::Positive ? coverBox(db, lex, aMapped, b, opts)
                                      : coverBox(db, lex, b, aMapped, opts);
    if (!sub.holds) {
      j.deriv = {"ggRegion", "uncovered:" + l, {std::move(sub.deriv)}};
      return j;
    }
    d.premises.push_back(std::move(sub.deriv));
  }
  j.holds = true;
  j.deriv = std::move(d);
  return j;
}

namespace {

Judgment ggCondOriented(const Database& db, const LexTheory& lex, const Udrs& u,
                        const Label& nodeLabel, const Box& newResBox, bool oldIsStrong,
                        const RuleOptions& opts) {
  Judgment j;
  LabelIndex ix = buildIndex(u);
  const Node& n = *ix.nodeAt.at(nodeLabel);
  if (n.isNeg()) throw std::runtime_error("restrictor judgment on a negation");

  Pers cls = persistentInClause(u, nodeLabel, opts.table);
  if (cls == Pers::None)
    throw RuleRefused("quantifier at " + nodeLabel + " has no persistence in its clause");
  Pers base = opts.table.at(n.quant).pers;

  const Box& oldBox = n.resBox;
  // which side must be the stronger restrictor
  // persistent: strong-side condition has the stronger... the weaker? The
  // judgment "cond >> cond'" for a persistent determiner needs res >> res'.
  const Box* strong;
  const Box* weak;
  if (base == Pers::Persistent) {
    strong = oldIsStrong ? &oldBox : &newResBox;
    weak = oldIsStrong ? &newResBox : &oldBox;
  } else {  // anti-persistent
    strong = oldIsStrong ? &newResBox : &oldBox;
    weak = oldIsStrong ? &oldBox : &newResBox;
  }

  Judgment structural = ggDrs(db, lex, *strong, *weak, opts);
  if (structural.holds) {
    j.holds = true;
    j.deriv = {"ggQuant", "structural:" + n.quant, {std::move(structural.deriv)}};
    return j;
  }
  // semantic branch: the implicational side condition over the data
  EntailOptions eo;
  eo.bound = opts.bound;
  eo.constraints = opts.constraints;
  eo.table = opts.table;
  if (impliedOver(db, boxSDrs(*strong), boxSDrs(*weak), eo)) {
    j.holds = true;
    j.deriv = {"ggQuant", "semantic:" + n.quant, {}};
    return j;
  }
  j.deriv = {"ggQuant", "no-branch", {std::move(structural.deriv)}};
  return j;
}

}  // namespace

Judgment ggCond(const Database& db, const LexTheory& lex, const Udrs& u, const Label& nodeLabel,
                const Box& newResBox, const RuleOptions& opts) {
  return ggCondOriented(db, lex, u, nodeLabel, newResBox, /*oldIsStrong=*/true, opts);
}

// ---------------------------------------------------------------------------
// SUBST

namespace {

Udrs withBox(const Udrs& u, const Label& l, const Box& b, bool& ok) {
  Udrs out = u;
  ok = false;
  std::function<void(Clause&)> walk = [&](Clause& c) {
    if (c.lower == l) {
      c.base = b;
      ok = true;
      return;
    }
    for (Node& n : c.nodes)
      if (!n.isNeg() && n.res == l) {
        n.resBox = b;
        ok = true;
        return;
      }
    for (SubClause& s : c.subs) {
      walk(s.get());
      if (ok) return;
    }
  };
  walk(out.clause);
  return out;
}

Udrs withDeterminer(const Udrs& u, const Label& nodeLabel, const std::string& q, bool& ok) {
  Udrs out = u;
  ok = false;
  std::function<void(Clause&)> walk = [&](Clause& c) {
    for (Node& n : c.nodes)
      if (n.label == nodeLabel) {
        n.quant = q;
        ok = true;
        return;
      }
    for (SubClause& s : c.subs) {
      walk(s.get());
      if (ok) return;
    }
  };
  walk(out.clause);
  return out;
}

}  // namespace

Judgment subst(const Database& db, const LexTheory& lex, const Udrs& u, const Label& l,
               const ReplacementSpec& spec, const RuleOptions& opts) {
  PolarityMap pm = polarity(u, opts.table);
  auto pit = pm.find(l);
  if (pit == pm.end()) throw std::runtime_error("unknown label " + l);
  Pol pol = pit->second;
  if (pol == Pol::Undefined)
    throw RuleRefused("undefined polarity at " + l + "; replacement blocked");

  LabelIndex ix = buildIndex(u);
  Judgment inner;

  if (spec.kind == ReplacementSpec::Determiner) {
    const Node* n = ix.nodeAt.count(l) ? ix.nodeAt.at(l) : nullptr;
    if (!n || n->isNeg()) throw RuleRefused("determiner replacement needs a quantifier node");
    bool okDir = false;
    for (const auto& [q1, q2] : lex.detRules()) {
      if (pol == Pol::Positive && q1 == n->quant && q2 == spec.determiner) okDir = true;
      if (pol == Pol::Negative && q1 == spec.determiner && q2 == n->quant) okDir = true;
    }
    if (!okDir)
      throw RuleRefused("no determiner rule licenses " + n->quant + " -> " + spec.determiner +
                        " at a " + polName(pol) + " label");
    inner.holds = true;
    inner.deriv = {"ggLex", n->quant + ">>" + spec.determiner, {}};
  } else if (ix.boxAt.count(l) && ix.boxAt.at(l).role == BoxRole::Res) {
    const Node* n = ix.boxAt.at(l).node;
    Pol npol = pm.at(n->label);
    if (npol == Pol::Undefined)
      throw RuleRefused("undefined polarity at " + n->label + "; replacement blocked");
    inner = ggCondOriented(db, lex, u, n->label, spec.box,
                           /*oldIsStrong=*/npol == Pol::Positive, opts);
  } else if (ix.boxAt.count(l) && ix.boxAt.at(l).role == BoxRole::Lower) {
    const Clause* c = ix.boxAt.at(l).clause;
    inner = pol == Pol::Positive ? ggDrs(db, lex, c->base, spec.box, opts)
                                 : ggDrs(db, lex, spec.box, c->base, opts);
  } else {
    throw RuleRefused("replacement at " + l + " is not supported");
  }

  Judgment j;
  j.holds = inner.holds;
  j.deriv = {"subst", l + ":" + polName(pol), {std::move(inner.deriv)}};
  return j;
}

// ---------------------------------------------------------------------------
// Exchange

Judgment ggPi(const Database& db, const LexTheory& lex, const Udrs& u, const Label& l1,
              const Label& l2, const RuleOptions& opts) {
  (void)db;
  Analysis a = analyze(u);
  const Node* n1 = a.ix.nodeAt.count(l1) ? a.ix.nodeAt.at(l1) : nullptr;
  const Node* n2 = a.ix.nodeAt.count(l2) ? a.ix.nodeAt.at(l2) : nullptr;
  if (!n1 || !n2) throw RuleRefused("exchange needs two scope-bearing nodes");
  if (n1->isNeg()) throw RuleRefused("exchange applies to quantifiers");
  const Clause* c1 = a.ix.clauseOfNode.at(l1);
  const Clause* c2 = a.ix.clauseOfNode.at(l2);
  if (c1 != c2) throw RuleRefused("exchange nodes must share a clause");

  if (!a.closure.leq(l2, n1->scope)) throw RuleRefused(l1 + " does not dominate " + l2);
  for (const Node& m : c1->nodes) {
    if (m.label == l1 || m.label == l2) continue;
    if (a.closure.leq(l2, m.scope) && a.closure.leq(m.label, n1->scope))
      throw RuleRefused(l1 + " does not immediately dominate " + l2);
  }

  PolarityMap pm = polarity(u, opts.table);
  Pol pol = pm.at(l1);
  if (pol == Pol::Undefined) throw RuleRefused("undefined polarity at " + l1);

  // every node that can sit immediately inside l1 in some reading
  std::set<Label> successors;
  for (const auto& order : clauseReadingOrders(u, c1->upper)) {
    for (size_t i = 0; i + 1 < order.size(); ++i)
      if (order[i] == l1) successors.insert(order[i + 1]);
  }

  Deriv d{"ggPi", l1 + ">" + l2, {}};
  for (const Label& s : successors) {
    const Node* ns = a.ix.nodeAt.at(s);
    if (ns->isNeg())
      throw RuleRefused("a negation may sit immediately inside " + l1 + "; exchange blocked");
    const std::string& qa = pol == Pol::Positive ? n1->quant : ns->quant;
    const std::string& qb = pol == Pol::Positive ? ns->quant : n1->quant;
    if (!lex.piAllows(qa, qb))
      throw RuleRefused("exchange pair (" + qa + ", " + qb + ") is not registered");
    d.premises.push_back({"pi", qa + ">>" + qb, {}});
  }

  Judgment j;
  j.holds = true;
  j.deriv = std::move(d);
  return j;
}

Udrs applyPi(const Udrs& u, const Label& l1, const Label& l2) {
  Udrs out = u;
  LabelIndex ix = buildIndex(u);
  const Node& n1 = *ix.nodeAt.at(l1);
  const Node& n2 = *ix.nodeAt.at(l2);
  std::function<bool(Clause&)> walk = [&](Clause& c) -> bool {
    if (c.findNode(l1)) {
      std::vector<OrdEdge> ord;
      for (const OrdEdge& e : c.ord)
        if (!(e.lo == l2 && e.hi == n1.scope)) ord.push_back(e);
      ord.push_back({l1, n2.scope});
      c.ord = std::move(ord);
      return true;
    }
    for (SubClause& s : c.subs)
      if (walk(s.get())) return true;
    return false;
  };
  walk(out.clause);
  ValidationReport vr = validate(out);
  if (!vr.ok()) throw RuleRefused("exchange is not expressible here:\n" + vr.str());
  return out;
}

// ---------------------------------------------------------------------------
// Lexical table rewrites

namespace {

// Every clause-mate ordered against the node in the closure; a free mate
// would have no determinate position relative to an inserted or removed
// operator.
bool positionDeterminate(const Analysis& a, const Clause& c, const Node& n) {
  for (const Node& y : c.nodes) {
    if (y.label == n.label) continue;
    bool above = a.closure.leq(n.label, y.scope);
    bool below = a.closure.leq(y.label, n.scope);
    if (!above && !below) return false;
  }
  return true;
}

}  // namespace

Udrs stripNode(const Udrs& u, const Label& nodeLabel, const std::map<std::string, Term>& images) {
  Analysis a = analyze(u);
  const Node n = *a.ix.nodeAt.at(nodeLabel);
  // a quantifier loses its restrictor subtree; a negation keeps its body
  const bool dropRes = !n.isNeg();
  Udrs out = u;
  std::function<bool(Clause&)> walk = [&](Clause& c) -> bool {
    if (!c.findNode(nodeLabel)) {
      for (SubClause& s : c.subs)
        if (walk(s.get())) return true;
      return false;
    }
    Clause nc;
    nc.upper = c.upper;
    nc.lower = c.lower;
    nc.index = c.index;
    nc.universe = c.universe;
    nc.base = c.base;
    for (const Node& x : c.nodes)
      if (x.label != nodeLabel) nc.nodes.push_back(x);
    for (const OrdEdge& e : c.ord) {
      if (dropRes && (a.closure.leq(e.lo, n.res) || a.closure.leq(e.hi, n.res))) continue;
      OrdEdge e2 = e;
      if (e2.hi == n.scope || e2.hi == n.res || e2.hi == n.label) e2.hi = c.upper;
      if (e2.lo == n.scope || e2.lo == n.res || e2.lo == n.label) continue;
      if (e2.lo == e2.hi) continue;
      nc.ord.push_back(e2);
    }
    for (const SubClause& s : c.subs) {
      if (dropRes && a.closure.leq(s.host, n.res)) continue;
      SubClause s2 = s;
      if (s2.host == n.scope || s2.host == n.res || s2.host == n.label) s2.host = c.upper;
      nc.subs.push_back(std::move(s2));
    }
    c = std::move(nc);
    return true;
  };
  walk(out.clause);
  return substTerms(out, images);
}

std::vector<Replacement> ggLex(const Database& db, int entryIdx, const Label& nodeLabel,
                               const LexTheory& lex, const RuleOptions& opts) {
  const Udrs& u = db.entries[entryIdx];
  Analysis a = analyze(u);
  std::vector<Replacement> out;
  auto nIt = a.ix.nodeAt.find(nodeLabel);
  if (nIt == a.ix.nodeAt.end()) return out;
  const Node& n = *nIt->second;
  if (n.isNeg()) return out;
  const Clause* clause = a.ix.clauseOfNode.at(nodeLabel);

  // (i) determiner weakenings
  if (n.var) {
    for (const auto& [q1, q2] : lex.detRules()) {
      if (q1 != n.quant) continue;
      bool ok = false;
      Udrs res = withDeterminer(u, nodeLabel, q2, ok);
      if (!ok) continue;
      out.push_back({res, {"ggLex", q1 + ">>" + q2, {}}, nodeLabel, "determiner"});
    }
  }

  // (ii) instantiation of a universal at an individual satisfying its
  // restrictor. Only for unambiguous restrictors (an ambiguous antecedent
  // carries a correlation side condition, which is detachment's job) and
  // only when the result is unambiguous, so no reading of the rewrite
  // escapes the original.
  if (n.quant == "every" && enumerateScopings(subUdrs(u, n.res)).size() == 1) {
    std::vector<Embedding> embs;
    try {
      embs = findEmbeddings(db, entryIdx, nodeLabel);
    } catch (const std::exception&) {
    }
    for (const Embedding& f : embs) {
      std::map<std::string, Term> images;
      for (const auto& [r, t] : f.refMap) images[r] = t;
      Udrs res = stripNode(u, nodeLabel, images);
      if (!validate(res).ok()) continue;
      if (enumerateScopings(res).size() != 1) continue;
      std::string who = n.var && images.count(*n.var) ? images.at(*n.var).name : "?";
      out.push_back({res, {"ggLex", "instance:" + who, {}}, nodeLabel, "table"});
    }
  }

  // (iii) "no A B" weakens to "every A not-B"
  if (n.quant == "no" && n.var && positionDeterminate(a, *clause, n)) {
    FreshNames local;
    local.reserve(u);
    Label negLabel = local.freshLabel("l");
    Label bodyLabel = local.freshLabel("l");
    Label newScope = local.freshLabel("l");
    Udrs res = u;
    std::function<bool(Clause&)> walk = [&](Clause& c) -> bool {
      for (Node& x : c.nodes) {
        if (x.label != nodeLabel) continue;
        x.quant = "every";
        Label oldScope = x.scope;
        x.scope = newScope;
        Node neg;
        neg.kind = Node::Neg;
        neg.label = negLabel;
        neg.res = neg.scope = bodyLabel;
        for (OrdEdge& e : c.ord)
          if (e.hi == oldScope) e.hi = bodyLabel;
        for (SubClause& s : c.subs)
          if (s.host == oldScope) s.host = bodyLabel;
        c.nodes.push_back(neg);
        c.ord.push_back({negLabel, newScope});
        return true;
      }
      for (SubClause& s : c.subs)
        if (walk(s.get())) return true;
      return false;
    };
    walk(res.clause);
    if (validate(res).ok())
      out.push_back({res, {"ggLex", "no>>every-not", {}}, nodeLabel, "table"});
  }

  // (iv) "some A not-B" weakens to "not (every A B)"
  if (n.quant == "some" && n.var && positionDeterminate(a, *clause, n)) {
    // pattern: a negation immediately and solely inside this node's scope
    const Node* negNode = nullptr;
    for (const Node& y : clause->nodes) {
      if (!y.isNeg()) continue;
      if (a.closure.leq(y.label, n.scope)) {
        bool immediate = true;
        for (const Node& m : clause->nodes) {
          if (m.label == y.label || m.label == n.label) continue;
          if (a.closure.leq(y.label, m.scope) && a.closure.leq(m.label, n.scope))
            immediate = false;
        }
        if (immediate) negNode = &y;
      }
    }
    if (negNode && positionDeterminate(a, *clause, *negNode)) {
      Udrs res = u;
      Label someLabel = n.label;
      Label negLabel = negNode->label;
      const Label negBody = negNode->res;
      const Label someScope = n.scope;
      std::function<bool(Clause&)> walk = [&](Clause& c) -> bool {
        Node* sn = nullptr;
        Node* nn = nullptr;
        for (Node& x : c.nodes) {
          if (x.label == someLabel) sn = &x;
          if (x.label == negLabel) nn = &x;
        }
        if (!sn || !nn) {
          for (SubClause& s : c.subs)
            if (walk(s.get())) return true;
          return false;
        }
        sn->quant = "every";
        // swap the two operators: negation on top, universal inside it
        std::vector<OrdEdge> ord;
        for (OrdEdge& e : c.ord) {
          if (e.lo == negLabel && e.hi == someScope) continue;   // old: neg inside some
          OrdEdge e2 = e;
          if (e2.hi == negBody) e2.hi = sn->scope;  // material under the old body
          ord.push_back(e2);
        }
        ord.push_back({someLabel, negBody});  // universal inside the negation
        c.ord = std::move(ord);
        for (SubClause& s : c.subs)
          if (s.host == negBody) s.host = sn->scope;
        return true;
      };
      walk(res.clause);
      if (validate(res).ok())
        out.push_back({res, {"ggLex", "some-not>>not-every", {}}, nodeLabel, "table"});
    }
  }

  (void)opts;
  return out;
}

// ---------------------------------------------------------------------------
// RR candidates

namespace {

std::vector<std::string> lexPredicates(const LexTheory& lex) {
  std::vector<std::string> out;
  for (const auto& [p, q] : lex.hypo()) {
    out.push_back(p);
    out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<Replacement> rrCandidates(const Database& db, int entryIdx, const LexTheory& lex,
                                      const RuleOptions& opts) {
  const Udrs& u = db.entries[entryIdx];
  std::vector<Replacement> out;
  PolarityMap pm = polarity(u, opts.table);
  Analysis a = analyze(u);
  std::vector<std::string> preds = lexPredicates(lex);

  auto tryBoxSwap = [&](const Label& boxLabel, const Box& oldBox, const std::string& kind) {
    for (size_t ai = 0; ai < oldBox.atoms.size(); ++ai) {
      for (const std::string& q : preds) {
        if (q == oldBox.atoms[ai].pred) continue;
        Box nb = oldBox;
        nb.atoms[ai].pred = q;
        try {
          Judgment j = subst(db, lex, u, boxLabel, {ReplacementSpec::BoxContent, nb, ""}, opts);
          if (!j.holds) continue;
          bool ok = false;
          Udrs res = withBox(u, boxLabel, nb, ok);
          if (!ok) continue;
          out.push_back({res, j.deriv, boxLabel, kind});
        } catch (const RuleRefused&) {
        }
      }
    }
  };

  for (const Clause* c : collectClauses(u)) {
    // verb-level atoms
    tryBoxSwap(c->lower, c->base, "atom");
    for (const Node& n : c->nodes) {
      if (n.isNeg()) continue;
      // restrictor atoms
      tryBoxSwap(n.res, n.resBox, "restrictor");
      // determiner swaps
      if (n.var) {
        Pol pol = pm.at(n.label);
        if (pol != Pol::Undefined) {
          for (const auto& [q1, q2] : lex.detRules()) {
            std::string target;
            if (pol == Pol::Positive && q1 == n.quant) target = q2;
            if (pol == Pol::Negative && q2 == n.quant) target = q1;
            if (target.empty()) continue;
            try {
              Judgment j = subst(db, lex, u, n.label,
                                 {ReplacementSpec::Determiner, {}, target}, opts);
              if (!j.holds) continue;
              bool ok = false;
              Udrs res = withDeterminer(u, n.label, target, ok);
              if (ok) out.push_back({res, j.deriv, n.label, "determiner"});
            } catch (const RuleRefused&) {
            }
          }
        }
      }
      // structural table rewrites are weakenings: positive labels only
      if (pm.at(n.label) == Pol::Positive) {
        for (Replacement& r : ggLex(db, entryIdx, n.label, lex, opts))
          if (r.kind == "table") out.push_back(std::move(r));
      }
      // exchanges
      for (const Node& m : c->nodes) {
        if (m.label == n.label) continue;
        try {
          Judgment j = ggPi(db, lex, u, n.label, m.label, opts);
          if (!j.holds) continue;
          Udrs res = applyPi(u, n.label, m.label);
          out.push_back({res, j.deriv, n.label, "exchange"});
        } catch (const RuleRefused&) {
        }
      }
    }
  }

  // drop duplicates and the identity
  std::set<std::string> seen;
  seen.insert(printUdrs(u));
  std::vector<Replacement> uniq;
  for (Replacement& r : out) {
    std::string key = printUdrs(r.result);
    if (seen.insert(key).second) uniq.push_back(std::move(r));
  }
  return uniq;
}

RrOutcome applyRr(const Database& db, int entryIdx, const Replacement& r) {
  RrOutcome out;
  out.next = db;
  out.derivation = r.derivation;
  const Udrs& source = db.entries[entryIdx];

  FreshVariant fv = freshVariant(r.result, out.next.names);
  Udrs derived = std::move(fv.udrs);
  // nested-clause tags stay with the material; the correlation of the whole
  // entry depends on the structures staying alike
  bool alike = sameType(source, r.result).has_value();
  if (alike) {
    if (source.index) {
      derived.index = source.index;
    } else if (enumerateScopings(source).size() > 1) {
      std::string tag = out.next.names.freshIndex("cx");
      out.next.entries[entryIdx].index = tag;
      derived.index = tag;
    } else {
      derived.index = out.next.names.freshIndex("ix");
    }
  } else {
    derived.index = out.next.names.freshIndex("ix");
  }
  out.derived = derived;
  out.next.add(std::move(derived));
  return out;
}

RrOutcome rr(const Database& db, int entryIdx, const LexTheory& lex, const RuleOptions& opts) {
  std::vector<Replacement> cands = rrCandidates(db, entryIdx, lex, opts);
  if (cands.empty()) throw RuleRefused("no replacement derivable for this entry");
  return applyRr(db, entryIdx, cands.front());
}

}  // namespace udrs
