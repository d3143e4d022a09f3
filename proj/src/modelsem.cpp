#include "udrs/modelsem.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace udrs {

// ---------------------------------------------------------------------------
// Determiners

bool DeterminerInfo::truth(int nRes, int nBoth) const {
  switch (kind) {
    case Every:
      return nBoth == nRes;
    case Some:
      return nBoth > 0;
    case No:
      return nBoth == 0;
    case AtMostK:
      return nBoth <= k;
    case MoreThanHalf:
      // vacuously true on an empty restrictor; see README notes
      return nRes == 0 || 2 * nBoth > nRes;
  }
  return false;
}

DeterminerTable DeterminerTable::defaults(int fewK) {
  DeterminerTable t;
  auto add = [&](const std::string& name, DeterminerInfo::Kind kind, Mono right, Pers pers,
                 int k = 0) {
    DeterminerInfo d;
    d.kind = kind;
    d.k = k;
    d.right = right;
    d.pers = pers;
    t.table_[name] = d;
  };
  add("every", DeterminerInfo::Every, Mono::Up, Pers::AntiPersistent);
  add("some", DeterminerInfo::Some, Mono::Up, Pers::Persistent);
  add("a", DeterminerInfo::Some, Mono::Up, Pers::Persistent);
  add("at-least-one", DeterminerInfo::Some, Mono::Up, Pers::Persistent);
  add("no", DeterminerInfo::No, Mono::Down, Pers::AntiPersistent);
  add("few", DeterminerInfo::AtMostK, Mono::Down, Pers::AntiPersistent, fewK);
  add("more-than-half", DeterminerInfo::MoreThanHalf, Mono::Up, Pers::None);
  t.verifyFlags();
  return t;
}

void DeterminerTable::verifyFlags() const {
  // exhaustive over subsets of domains of size <= 4
  for (const auto& [name, d] : table_) {
    for (int n = 0; n <= 4; ++n) {
      for (int a = 0; a < (1 << n); ++a)
        for (int b = 0; b < (1 << n); ++b) {
          auto count = [](int mask) { return __builtin_popcount(mask); };
          int nRes = count(a), nBoth = count(a & b);
          bool v = d.truth(nRes, nBoth);
          if (!v) continue;
          // right monotonicity: grow/shrink the scope set
          for (int b2 = 0; b2 < (1 << n); ++b2) {
            bool grow = (b & b2) == b;    // b subset of b2
            bool shrink = (b & b2) == b2;  // b2 subset of b
            bool v2 = d.truth(nRes, count(a & b2));
            if (d.right == Mono::Up && grow && !v2)
              throw std::logic_error("determiner '" + name + "' is not upward monotone");
            if (d.right == Mono::Down && shrink && !v2)
              throw std::logic_error("determiner '" + name + "' is not downward monotone");
          }
          // persistence: grow/shrink the restrictor set
          for (int a2 = 0; a2 < (1 << n); ++a2) {
            bool grow = (a & a2) == a;
            bool shrink = (a & a2) == a2;
            bool v2 = d.truth(count(a2), count(a2 & b));
            if (d.pers == Pers::Persistent && grow && !v2)
              throw std::logic_error("determiner '" + name + "' is not persistent");
            if (d.pers == Pers::AntiPersistent && shrink && !v2)
              throw std::logic_error("determiner '" + name + "' is not anti-persistent");
          }
        }
    }
  }
}

const DeterminerInfo* DeterminerTable::find(const std::string& name) const {
  auto it = table_.find(name);
  return it == table_.end() ? nullptr : &it->second;
}

const DeterminerInfo& DeterminerTable::at(const std::string& name) const {
  const DeterminerInfo* d = find(name);
  if (!d) throw std::runtime_error("unknown determiner: " + name);
  return *d;
}

// ---------------------------------------------------------------------------
// Resolution

namespace {

struct Resolver {
  const LabelIndex& ix;
  const Scoping& s;

  SDrs boxDrs(const Label& l) const {
    Box b = boxContent(ix, l);
    SDrs d;
    d.origin = l;
    d.universe = b.universe;
    for (const Atom& a : b.atoms) {
      SCond c;
      c.kind = SCond::KAtom;
      c.atom = a;
      c.origin = l;
      d.conds.push_back(std::move(c));
    }
    if (auto it = ix.subsAt.find(l); it != ix.subsAt.end())
      for (const Clause* sub : it->second) merge(d, clauseDrs(*sub));
    return d;
  }

  static void merge(SDrs& into, SDrs from) {
    for (auto& v : from.universe) into.universe.push_back(std::move(v));
    for (auto& c : from.conds) into.conds.push_back(std::move(c));
  }

  SDrs clauseDrs(const Clause& c) const {
    SDrs cur = boxDrs(c.lower);
    auto chainIt = s.perClause.find(c.upper);
    if (chainIt == s.perClause.end() && !c.nodes.empty())
      throw std::runtime_error("scoping misses clause " + c.upper);
    if (chainIt != s.perClause.end()) {
      const std::vector<Label>& chain = chainIt->second;
      if (chain.size() != c.nodes.size())
        throw std::runtime_error("scoping inconsistent with clause " + c.upper);
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const Node* n = c.findNode(*it);
        if (!n) throw std::runtime_error("scoping names unknown node " + *it);
        SDrs wrapped;
        wrapped.origin = n->label;
        SCond cond;
        cond.origin = n->label;
        if (n->isNeg()) {
          SDrs body = boxDrs(n->res);
          merge(body, std::move(cur));
          cond.kind = SCond::KNeg;
          cond.parts.push_back(std::move(body));
        } else {
          SDrs res = boxDrs(n->res);
          SDrs scope = boxDrs(n->scope);
          merge(scope, std::move(cur));
          cond.kind = n->isImplication() ? SCond::KImpl : SCond::KQuant;
          cond.quant = n->quant;
          cond.var = n->var;
          cond.parts.push_back(std::move(res));
          cond.parts.push_back(std::move(scope));
        }
        wrapped.conds.push_back(std::move(cond));
        cur = std::move(wrapped);
      }
    }
    // upper-box material sits at the clause's own level
    if (c.upper != c.lower) {
      SDrs top;
      top.origin = c.upper;
      top.universe = c.universe;
      if (auto it = ix.subsAt.find(c.upper); it != ix.subsAt.end())
        for (const Clause* sub : it->second) merge(top, clauseDrs(*sub));
      merge(top, std::move(cur));
      return top;
    }
    // upper == lower: boxDrs already carried the clause universe
    SDrs top = std::move(cur);
    top.origin = c.upper;
    return top;
  }
};

}  // namespace

SDrs resolveReading(const Udrs& u, const Scoping& s) {
  LabelIndex ix = buildIndex(u);
  Resolver r{ix, s};
  return r.clauseDrs(u.clause);
}

std::string printSDrs(const SDrs& d) {
  std::ostringstream ss;
  ss << "(drs (";
  for (size_t i = 0; i < d.universe.size(); ++i) ss << (i ? " " : "") << d.universe[i];
  ss << ") (";
  for (size_t i = 0; i < d.conds.size(); ++i) {
    const SCond& c = d.conds[i];
    if (i) ss << " ";
    switch (c.kind) {
      case SCond::KAtom: {
        ss << "(" << c.atom.pred;
        for (const Term& t : c.atom.args) ss << " " << t.name;
        ss << ")";
        break;
      }
      case SCond::KNeg:
        ss << "(not " << printSDrs(c.parts[0]) << ")";
        break;
      case SCond::KImpl:
        ss << "(if " << printSDrs(c.parts[0]) << " " << printSDrs(c.parts[1]) << ")";
        break;
      case SCond::KQuant:
        ss << "(" << c.quant << " " << (c.var ? *c.var : "_") << " " << printSDrs(c.parts[0])
           << " " << printSDrs(c.parts[1]) << ")";
        break;
    }
  }
  ss << "))";
  return ss.str();
}

// ---------------------------------------------------------------------------
// Models: named front end and compact evaluation core

std::string FiniteModel::str() const {
  std::ostringstream ss;
  ss << "(model (domain";
  for (const auto& d : domain) ss << " " << d;
  ss << ")";
  for (const auto& [n, v] : constants) ss << " (const " << n << " " << v << ")";
  for (const auto& [n, tuples] : ext) {
    ss << " (pred " << n << " " << arity.at(n) << " (";
    bool first = true;
    for (const auto& t : tuples) {
      if (!first) ss << " ";
      first = false;
      if (t.size() == 1) {
        ss << t[0];
      } else {
        ss << "(";
        for (size_t i = 0; i < t.size(); ++i) ss << (i ? " " : "") << t[i];
        ss << ")";
      }
    }
    ss << "))";
  }
  ss << ")";
  return ss.str();
}

namespace {

struct CModel {
  int n = 1;
  std::vector<uint64_t> masks;  // per vocab predicate
  std::vector<int> consts;      // per vocab constant
};

struct Env {
  std::vector<std::pair<std::string, int>> vals;

  int* find(const std::string& v) {
    for (auto& p : vals)
      if (p.first == v) return &p.second;
    return nullptr;
  }
  void push(const std::string& v, int d) { vals.emplace_back(v, d); }
  void popTo(size_t k) { vals.resize(k); }
};

class Evaluator {
 public:
  Evaluator(const Vocab& vocab, const DeterminerTable& dt) : vocab_(vocab), dt_(dt) {
    for (size_t i = 0; i < vocab.preds.size(); ++i) predIdx_[vocab.preds[i].first] = (int)i;
    for (size_t i = 0; i < vocab.consts.size(); ++i) constIdx_[vocab.consts[i]] = (int)i;
  }

  bool eval(const CModel& m, const SDrs& d) {
    m_ = &m;
    Env env;
    return verify(env, d);
  }

 private:
  bool verify(Env& env, const SDrs& d) {
    size_t mark = env.vals.size();
    bool r = assign(env, d, 0);
    env.popTo(mark);
    return r;
  }

  bool assign(Env& env, const SDrs& d, size_t i) {
    if (i == d.universe.size()) return allConds(env, d);
    for (int v = 0; v < m_->n; ++v) {
      env.push(d.universe[i], v);
      if (assign(env, d, i + 1)) {
        env.popTo(env.vals.size() - 1);
        return true;
      }
      env.popTo(env.vals.size() - 1);
    }
    return false;
  }

  bool allConds(Env& env, const SDrs& d) {
    for (const SCond& c : d.conds)
      if (!holds(env, c)) return false;
    return true;
  }

  bool holds(Env& env, const SCond& c) {
    switch (c.kind) {
      case SCond::KAtom:
        return atomTrue(env, c.atom);
      case SCond::KNeg:
        return !verify(env, c.parts[0]);
      case SCond::KImpl:
        return forAll(env, c.parts[0], c.parts[1]);
      case SCond::KQuant: {
        const DeterminerInfo& det = dt_.at(c.quant);
        const SDrs& res = c.parts[0];
        const SDrs& scope = c.parts[1];
        const std::string& var = *c.var;
        std::vector<std::string> rest;
        for (const auto& u : res.universe)
          if (u != var) rest.push_back(u);
        int nA = 0, nB = 0;
        for (int d0 = 0; d0 < m_->n; ++d0) {
          size_t mark = env.vals.size();
          env.push(var, d0);
          bool inA = false, inB = false;
          witnessSearch(env, res, scope, rest, 0, inA, inB);
          env.popTo(mark);
          nA += inA;
          nB += inB;
        }
        return det.truth(nA, nB);
      }
    }
    return false;
  }

  // inA: some assignment verifies the restrictor; inB: one of those also
  // verifies the scope.
  void witnessSearch(Env& env, const SDrs& res, const SDrs& scope,
                     const std::vector<std::string>& rest, size_t i, bool& inA, bool& inB) {
    if (inB) return;
    if (i == rest.size()) {
      if (!allConds(env, res)) return;
      inA = true;
      if (verify(env, scope)) inB = true;
      return;
    }
    for (int v = 0; v < m_->n; ++v) {
      env.push(rest[i], v);
      witnessSearch(env, res, scope, rest, i + 1, inA, inB);
      env.popTo(env.vals.size() - 1);
      if (inB) return;
    }
  }

  // every assignment verifying `ante` extends to one verifying `cons`
  bool forAll(Env& env, const SDrs& ante, const SDrs& cons) {
    std::function<bool(size_t)> rec = [&](size_t i) -> bool {
      if (i == ante.universe.size()) {
        if (!allConds(env, ante)) return true;
        return verify(env, cons);
      }
      for (int v = 0; v < m_->n; ++v) {
        env.push(ante.universe[i], v);
        bool ok = rec(i + 1);
        env.popTo(env.vals.size() - 1);
        if (!ok) return false;
      }
      return true;
    };
    size_t mark = env.vals.size();
    bool r = rec(0);
    env.popTo(mark);
    return r;
  }

  bool atomTrue(Env& env, const Atom& a) {
    auto it = predIdx_.find(a.pred);
    if (it == predIdx_.end()) throw std::runtime_error("uninterpreted predicate: " + a.pred);
    int arity = vocab_.preds[it->second].second;
    if ((int)a.args.size() != arity)
      throw std::runtime_error("arity mismatch for predicate " + a.pred);
    uint64_t idx = 0;
    for (const Term& t : a.args) {
      int v;
      if (t.kind == Term::Var) {
        int* p = env.find(t.name);
        if (!p) throw std::runtime_error("unbound referent: " + t.name);
        v = *p;
      } else {
        auto ci = constIdx_.find(t.name);
        if (ci == constIdx_.end()) throw std::runtime_error("uninterpreted constant: " + t.name);
        v = m_->consts[ci->second];
      }
      idx = idx * m_->n + v;
    }
    return (m_->masks[it->second] >> idx) & 1;
  }

  const Vocab& vocab_;
  const DeterminerTable& dt_;
  const CModel* m_ = nullptr;
  std::map<std::string, int> predIdx_;
  std::map<std::string, int> constIdx_;
};

uint64_t powu(uint64_t b, int e) {
  uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

// Enumerates the model space at sizes 1..bound, honouring the constraints.
// The visitor returns false to stop early.
void forEachModel(const Vocab& vocab, int bound, const Constraints& cons,
                  const std::function<bool(const CModel&)>& visit) {
  // complement-derived predicates are not enumerated freely
  std::map<std::string, std::string> derivedFrom;  // pred -> complement source
  for (const auto& [p, q] : cons.complement) derivedFrom[p] = q;

  // close the containment postulates transitively: a chain through a
  // predicate outside the vocabulary must still constrain its endpoints
  std::vector<std::pair<std::string, std::string>> hypo = cons.hypo;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [p, q] : std::vector<std::pair<std::string, std::string>>(hypo))
      for (const auto& [r, s] : std::vector<std::pair<std::string, std::string>>(hypo)) {
        if (q != r) continue;
        std::pair<std::string, std::string> edge{p, s};
        if (p != s && std::find(hypo.begin(), hypo.end(), edge) == hypo.end()) {
          hypo.push_back(edge);
          changed = true;
        }
      }
  }

  std::vector<int> freePreds, derivedPreds;
  std::map<std::string, int> predIdx;
  for (size_t i = 0; i < vocab.preds.size(); ++i) predIdx[vocab.preds[i].first] = (int)i;
  for (size_t i = 0; i < vocab.preds.size(); ++i) {
    if (derivedFrom.count(vocab.preds[i].first))
      derivedPreds.push_back((int)i);
    else
      freePreds.push_back((int)i);
  }

  for (int n = 1; n <= bound; ++n) {
    uint64_t totalBits = 0;
    for (int pi : freePreds) totalBits += powu(n, vocab.preds[pi].second);
    if (totalBits > 26)
      throw ConfigError("vocabulary too large for bounded model enumeration (" +
                        std::to_string(totalBits) + " extension bits at size " +
                        std::to_string(n) + ")");
    uint64_t constCombos = powu(n, (int)vocab.consts.size());
    if (constCombos > 4096) throw ConfigError("too many constants for model enumeration");

    CModel m;
    m.n = n;
    m.masks.assign(vocab.preds.size(), 0);
    m.consts.assign(vocab.consts.size(), 0);

    for (uint64_t cc = 0; cc < constCombos; ++cc) {
      uint64_t t = cc;
      for (size_t ci = 0; ci < vocab.consts.size(); ++ci) {
        m.consts[ci] = (int)(t % n);
        t /= n;
      }
      // odometer over the free predicate masks
      std::vector<uint64_t> limit(freePreds.size());
      for (size_t k = 0; k < freePreds.size(); ++k)
        limit[k] = powu(2, (int)powu(n, vocab.preds[freePreds[k]].second));
      std::vector<uint64_t> cur(freePreds.size(), 0);
      while (true) {
        for (size_t k = 0; k < freePreds.size(); ++k) m.masks[freePreds[k]] = cur[k];
        for (int di : derivedPreds) {
          const auto& src = derivedFrom.at(vocab.preds[di].first);
          auto sIt = predIdx.find(src);
          if (sIt == predIdx.end())
            throw ConfigError("complement postulate names unknown predicate " + src);
          uint64_t full = (powu(n, vocab.preds[di].second) >= 64)
                              ? ~0ull
                              : ((1ull << powu(n, vocab.preds[di].second)) - 1);
          m.masks[di] = full & ~m.masks[sIt->second];
        }
        bool ok = true;
        for (const auto& [p, q] : hypo) {
          auto pi = predIdx.find(p), qi = predIdx.find(q);
          if (pi == predIdx.end() || qi == predIdx.end()) continue;
          if (m.masks[pi->second] & ~m.masks[qi->second]) {
            ok = false;
            break;
          }
        }
        if (ok && !visit(m)) return;
        // advance
        size_t k = 0;
        for (; k < freePreds.size(); ++k) {
          if (++cur[k] < limit[k]) break;
          cur[k] = 0;
        }
        if (k == freePreds.size()) break;
      }
    }
  }
}

FiniteModel expandModel(const CModel& m, const Vocab& vocab) {
  FiniteModel out;
  for (int i = 0; i < m.n; ++i) out.domain.push_back("d" + std::to_string(i));
  for (size_t ci = 0; ci < vocab.consts.size(); ++ci)
    out.constants[vocab.consts[ci]] = out.domain[m.consts[ci]];
  for (size_t pi = 0; pi < vocab.preds.size(); ++pi) {
    const auto& [name, arity] = vocab.preds[pi];
    out.arity[name] = arity;
    auto& tuples = out.ext[name];
    uint64_t count = powu(m.n, arity);
    for (uint64_t idx = 0; idx < count; ++idx) {
      if (!((m.masks[pi] >> idx) & 1)) continue;
      std::vector<std::string> tuple(arity);
      uint64_t t = idx;
      for (int a = arity - 1; a >= 0; --a) {
        tuple[a] = out.domain[t % m.n];
        t /= m.n;
      }
      tuples.insert(std::move(tuple));
    }
  }
  return out;
}

CModel compactModel(const FiniteModel& fm, const Vocab& vocab) {
  CModel m;
  m.n = (int)fm.domain.size();
  std::map<std::string, int> dom;
  for (size_t i = 0; i < fm.domain.size(); ++i) dom[fm.domain[i]] = (int)i;
  for (const auto& c : vocab.consts) {
    auto it = fm.constants.find(c);
    if (it == fm.constants.end())
      throw std::runtime_error("model does not interpret constant " + c);
    m.consts.push_back(dom.at(it->second));
  }
  for (const auto& [name, arity] : vocab.preds) {
    auto it = fm.ext.find(name);
    if (it == fm.ext.end()) throw std::runtime_error("model does not interpret predicate " + name);
    uint64_t mask = 0;
    for (const auto& tuple : it->second) {
      uint64_t idx = 0;
      for (const auto& ind : tuple) idx = idx * m.n + dom.at(ind);
      mask |= 1ull << idx;
    }
    m.masks.push_back(mask);
  }
  return m;
}

}  // namespace

bool evalModel(const FiniteModel& m, const SDrs& d) {
  // vocabulary straight from the model
  Vocab v;
  for (const auto& [name, ar] : m.arity) v.preds.emplace_back(name, ar);
  for (const auto& [name, val] : m.constants) v.consts.push_back(name);
  static const DeterminerTable dt = DeterminerTable::defaults();
  Evaluator ev(v, dt);
  return ev.eval(compactModel(m, v), d);
}

Vocab vocabOf(const std::vector<Udrs>& entries) {
  std::map<std::string, int> preds;
  std::set<std::string> consts;
  for (const Udrs& u : entries) {
    for (const Clause* c : collectClauses(u)) {
      auto scan = [&](const Box& b) {
        for (const Atom& a : b.atoms) {
          auto it = preds.find(a.pred);
          if (it != preds.end() && it->second != (int)a.args.size())
            throw ConfigError("predicate '" + a.pred + "' used with two arities");
          preds[a.pred] = (int)a.args.size();
          for (const Term& t : a.args)
            if (t.kind == Term::Const) consts.insert(t.name);
        }
      };
      scan(c->base);
      for (const Node& n : c->nodes) scan(n.resBox);
    }
  }
  Vocab v;
  for (const auto& [n, a] : preds) v.preds.emplace_back(n, a);
  for (const auto& c : consts) v.consts.push_back(c);
  return v;
}

// ---------------------------------------------------------------------------
// Entailment

Relation relationFromName(const std::string& name) {
  if (name == "r1") return Relation::R1;
  if (name == "r3") return Relation::R3;
  if (name == "r4") return Relation::R4;
  if (name == "r8") return Relation::R8;
  throw ConfigError("unknown consequence relation: " + name);
}

std::string relationName(Relation r) {
  switch (r) {
    case Relation::R1: return "r1";
    case Relation::R3: return "r3";
    case Relation::R4: return "r4";
    case Relation::R8: return "r8";
  }
  return "?";
}

namespace {

struct ReadingSet {
  std::vector<Scoping> scopings;
  std::vector<SDrs> readings;
};

ReadingSet readingsOf(const Udrs& u) {
  ReadingSet rs;
  rs.scopings = enumerateScopings(u);
  for (const Scoping& s : rs.scopings) rs.readings.push_back(resolveReading(u, s));
  return rs;
}

int indexOfScoping(const std::vector<Scoping>& all, const Scoping& s) {
  for (size_t i = 0; i < all.size(); ++i)
    if (all[i] == s) return (int)i;
  return -1;
}

}  // namespace

EntailVerdict entails(const Database& db, const Udrs& goal, Relation rel,
                      const EntailOptions& opts) {
  const DeterminerTable& dt = opts.table;
  std::vector<Udrs> entries = db.entries;

  std::vector<ReadingSet> entryReadings;
  for (const Udrs& u : entries) entryReadings.push_back(readingsOf(u));
  ReadingSet goalReadings = readingsOf(goal);

  std::vector<Udrs> all = entries;
  all.push_back(goal);
  Vocab vocab = vocabOf(all);

  // premise assignments, uncorrelated
  std::vector<Assignment> premAssigns = allAssignments(entries);
  auto premIndexOf = [&](const Assignment& a) {
    std::vector<int> idx(entries.size());
    for (size_t i = 0; i < entries.size(); ++i)
      idx[i] = indexOfScoping(entryReadings[i].scopings, a.perEntry[i]);
    return idx;
  };

  size_t P = premAssigns.size(), G = goalReadings.readings.size();
  std::vector<std::vector<char>> E(P, std::vector<char>(G, 1));
  std::vector<std::vector<std::optional<FiniteModel>>> CM(
      P, std::vector<std::optional<FiniteModel>>(G));

  size_t undecided = P * G;
  Evaluator ev(vocab, dt);
  auto visit = [&](const CModel& m) -> bool {
    std::vector<std::vector<char>> truth(entries.size());
    for (size_t i = 0; i < entries.size(); ++i) {
      truth[i].resize(entryReadings[i].readings.size());
      for (size_t r = 0; r < entryReadings[i].readings.size(); ++r)
        truth[i][r] = ev.eval(m, entryReadings[i].readings[r]);
    }
    std::vector<char> goalTruth(G);
    for (size_t g = 0; g < G; ++g) goalTruth[g] = ev.eval(m, goalReadings.readings[g]);

    for (size_t p = 0; p < P; ++p) {
      std::vector<int> idx = premIndexOf(premAssigns[p]);
      bool allTrue = true;
      for (size_t i = 0; i < entries.size(); ++i)
        if (!truth[i][idx[i]]) {
          allTrue = false;
          break;
        }
      if (!allTrue) continue;
      for (size_t g = 0; g < G; ++g) {
        if (E[p][g] && !goalTruth[g]) {
          E[p][g] = 0;
          CM[p][g] = expandModel(m, vocab);
          --undecided;
        }
      }
    }
    return undecided > 0;
  };

  if (opts.explicitModels) {
    for (const FiniteModel& fm : *opts.explicitModels) {
      if (!visit(compactModel(fm, vocab))) break;
    }
  } else {
    forEachModel(vocab, opts.bound, opts.constraints, visit);
  }

  EntailVerdict v;
  v.rel = rel;
  v.bound = opts.bound;
  auto fail = [&](size_t p, size_t g) {
    v.holds = false;
    EntailWitness w;
    w.premise = premAssigns[p];
    w.goal = goalReadings.scopings[g];
    if (CM[p][g]) w.countermodel = *CM[p][g];
    v.witness = std::move(w);
  };

  switch (rel) {
    case Relation::R1: {
      for (size_t p = 0; p < P; ++p) {
        bool any = false;
        for (size_t g = 0; g < G && !any; ++g) any = E[p][g];
        if (!any) {
          fail(p, 0);
          return v;
        }
      }
      v.holds = true;
      return v;
    }
    case Relation::R3: {
      for (size_t p = 0; p < P; ++p)
        for (size_t g = 0; g < G; ++g)
          if (!E[p][g]) {
            fail(p, g);
            return v;
          }
      v.holds = true;
      return v;
    }
    case Relation::R4: {
      for (size_t p = 0; p < P; ++p)
        for (size_t g = 0; g < G; ++g)
          if (E[p][g]) {
            v.holds = true;
            return v;
          }
      fail(0, 0);
      return v;
    }
    case Relation::R8: {
      Registry reg = buildRegistry(all);
      std::vector<Assignment> joint = correlatedAssignments(all, reg);
      for (const Assignment& ja : joint) {
        Assignment prem;
        prem.perEntry.assign(ja.perEntry.begin(), ja.perEntry.end() - 1);
        int p = -1;
        for (size_t i = 0; i < premAssigns.size(); ++i) {
          bool eq = true;
          for (size_t k = 0; k < entries.size(); ++k)
            if (!(premAssigns[i].perEntry[k] == prem.perEntry[k])) {
              eq = false;
              break;
            }
          if (eq) {
            p = (int)i;
            break;
          }
        }
        int g = indexOfScoping(goalReadings.scopings, ja.perEntry.back());
        if (p < 0 || g < 0) throw std::logic_error("assignment bookkeeping failure");
        if (!E[p][g]) {
          fail(p, g);
          return v;
        }
      }
      v.holds = true;
      return v;
    }
  }
  return v;
}

bool impliedOver(const Database& db, const SDrs& lhs, const SDrs& rhs,
                 const EntailOptions& opts) {
  const DeterminerTable& dt = opts.table;
  std::vector<Udrs> entries = db.entries;
  std::vector<ReadingSet> entryReadings;
  for (const Udrs& u : entries) entryReadings.push_back(readingsOf(u));
  Registry reg = buildRegistry(entries);
  std::vector<Assignment> joint = correlatedAssignments(entries, reg);

  Vocab vocab = vocabOf(entries);
  // include symbols appearing only in the compared boxes
  std::function<void(const SDrs&)> scan = [&](const SDrs& d) {
    for (const SCond& c : d.conds) {
      if (c.kind == SCond::KAtom) {
        bool known = false;
        for (auto& [n, a] : vocab.preds)
          if (n == c.atom.pred) known = true;
        if (!known) vocab.preds.emplace_back(c.atom.pred, (int)c.atom.args.size());
        for (const Term& t : c.atom.args)
          if (t.kind == Term::Const &&
              std::find(vocab.consts.begin(), vocab.consts.end(), t.name) == vocab.consts.end())
            vocab.consts.push_back(t.name);
      }
      for (const SDrs& p : c.parts) scan(p);
    }
  };
  scan(lhs);
  scan(rhs);
  std::sort(vocab.preds.begin(), vocab.preds.end());
  std::sort(vocab.consts.begin(), vocab.consts.end());

  // free referents of the compared boxes
  std::set<std::string> freeVars;
  std::function<void(const SDrs&, std::set<std::string>)> collect =
      [&](const SDrs& d, std::set<std::string> bound) {
        for (const auto& u : d.universe) bound.insert(u);
        for (const SCond& c : d.conds) {
          if (c.kind == SCond::KAtom) {
            for (const Term& t : c.atom.args)
              if (t.kind == Term::Var && !bound.count(t.name)) freeVars.insert(t.name);
          }
          if (c.kind == SCond::KQuant && c.var) bound.insert(*c.var);
          for (const SDrs& p : c.parts) collect(p, bound);
        }
      };
  collect(lhs, {});
  collect(rhs, {});

  Evaluator ev(vocab, dt);
  bool implied = true;
  auto visit = [&](const CModel& m) -> bool {
    bool dataHolds = false;
    for (const Assignment& a : joint) {
      bool all = true;
      for (size_t i = 0; i < entries.size(); ++i) {
        int r = indexOfScoping(entryReadings[i].scopings, a.perEntry[i]);
        if (!ev.eval(m, entryReadings[i].readings[r])) {
          all = false;
          break;
        }
      }
      if (all) {
        dataHolds = true;
        break;
      }
    }
    if (!dataHolds && !entries.empty()) return true;

    // the free referents are universally bound by a wrapper implication;
    // right-hand referents shadowed by the left stay captured rather than
    // being re-quantified
    std::vector<std::string> fv(freeVars.begin(), freeVars.end());
    SDrs lwrap = lhs;
    for (const auto& v : fv)
      if (std::find(lwrap.universe.begin(), lwrap.universe.end(), v) == lwrap.universe.end())
        lwrap.universe.push_back(v);
    SDrs rwrap = rhs;
    rwrap.universe.clear();
    for (const auto& v : rhs.universe)
      if (std::find(lwrap.universe.begin(), lwrap.universe.end(), v) == lwrap.universe.end())
        rwrap.universe.push_back(v);
    SDrs wrapper;
    SCond impl;
    impl.kind = SCond::KImpl;
    impl.parts.push_back(lwrap);
    impl.parts.push_back(rwrap);
    wrapper.conds.push_back(std::move(impl));
    if (!ev.eval(m, wrapper)) {
      implied = false;
      return false;
    }
    return true;
  };

  if (opts.explicitModels) {
    for (const FiniteModel& fm : *opts.explicitModels)
      if (!visit(compactModel(fm, vocab))) break;
  } else {
    forEachModel(vocab, opts.bound, opts.constraints, visit);
  }
  return implied;
}

bool inconsistentAt(const Database& db, const EntailOptions& opts) {
  std::vector<Udrs> entries = db.entries;
  if (entries.empty()) return false;
  std::vector<ReadingSet> entryReadings;
  for (const Udrs& u : entries) entryReadings.push_back(readingsOf(u));
  Registry reg = buildRegistry(entries);
  std::vector<Assignment> joint = correlatedAssignments(entries, reg);
  Vocab vocab = vocabOf(entries);
  const DeterminerTable& dt = opts.table;
  Evaluator ev(vocab, dt);

  bool satisfiable = false;
  auto visit = [&](const CModel& m) -> bool {
    for (const Assignment& a : joint) {
      bool all = true;
      for (size_t i = 0; i < entries.size(); ++i) {
        int r = indexOfScoping(entryReadings[i].scopings, a.perEntry[i]);
        if (!ev.eval(m, entryReadings[i].readings[r])) {
          all = false;
          break;
        }
      }
      if (all) {
        satisfiable = true;
        return false;
      }
    }
    return true;
  };
  if (opts.explicitModels) {
    for (const FiniteModel& fm : *opts.explicitModels)
      if (!visit(compactModel(fm, vocab))) break;
  } else {
    forEachModel(vocab, opts.bound, opts.constraints, visit);
  }
  return !satisfiable;
}

}  // namespace udrs
