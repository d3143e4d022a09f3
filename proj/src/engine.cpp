#include "udrs/engine.hpp"

#include <algorithm>
#include <functional>

#include "udrs/io.hpp"

namespace udrs {

Sexpr ProofTrace::toSexpr() const {
  Sexpr e = Sexpr::list({Sexpr::atom("trace")});
  e.items.push_back(Sexpr::atom(":verdict"));
  e.items.push_back(Sexpr::atom(verdict == Proved    ? "proved"
                                : verdict == Refuted ? "refuted"
                                                     : "exhausted"));
  e.items.push_back(Sexpr::atom(":budget"));
  e.items.push_back(Sexpr::atom(std::to_string(budget)));
  for (const TraceStep& s : steps) {
    Sexpr st = Sexpr::list({Sexpr::atom("step"), Sexpr::atom(s.rule)});
    for (const std::string& a : s.args) st.items.push_back(Sexpr::atom(a));
    if (s.detail.isList && !s.detail.items.empty()) st.items.push_back(s.detail);
    e.items.push_back(std::move(st));
  }
  return e;
}

std::string ProofTrace::str() const { return printSexprPretty(toSexpr()); }

// ---------------------------------------------------------------------------
// Goal analysis

bool topOperatorUnambiguous(const Udrs& goal, bool wantNeg, Label* outLabel) {
  std::vector<Scoping> readings = enumerateScopings(goal);
  if (readings.empty()) return false;
  std::set<Label> tops;
  for (const Scoping& s : readings) {
    auto it = s.perClause.find(goal.top);
    if (it == s.perClause.end() || it->second.empty()) return false;
    tops.insert(it->second.front());
  }
  if (tops.size() != 1) return false;
  const Node* n = goal.clause.findNode(*tops.begin());
  if (!n) return false;
  if (wantNeg != n->isNeg()) return false;
  if (!wantNeg && n->quant != "every") return false;
  if (outLabel) *outLabel = n->label;
  return true;
}

// ---------------------------------------------------------------------------
// Goal reduction

CondOutcome condRule(const Database& db, const Udrs& goal, const EngineOptions& opts) {
  (void)opts;
  Label t;
  if (!topOperatorUnambiguous(goal, /*wantNeg=*/false, &t))
    throw RuleRefused("goal reduction needs an implication on top in every reading");
  LabelIndex ix = buildIndex(goal);
  const Node& n = *ix.nodeAt.at(t);

  CondOutcome out;
  out.next = db;

  // the antecedent instance: restrictor referents become fresh constants
  std::map<std::string, Term> images;
  for (const std::string& r : n.resBox.universe)
    images[r] = {Term::Const, out.next.names.freshConst("k")};
  if (n.var && !images.count(*n.var))
    images[*n.var] = {Term::Const, out.next.names.freshConst("k")};

  Label T = out.next.names.freshLabel("l");
  Label B = out.next.names.freshLabel("l");
  Clause ante;
  ante.upper = T;
  ante.lower = B;
  for (const Atom& a : n.resBox.atoms) {
    Atom na = a;
    for (Term& tm : na.args)
      if (tm.kind == Term::Var && images.count(tm.name)) tm = images.at(tm.name);
    ante.base.atoms.push_back(std::move(na));
  }
  // nested antecedent material comes along, keeping its correlation tag
  if (auto sIt = ix.subsAt.find(n.res); sIt != ix.subsAt.end()) {
    Udrs region = subUdrs(goal, n.res);
    for (const SubClause& s : region.clause.subs) {
      SubClause moved = s;
      moved.host = T;
      ante.subs.push_back(std::move(moved));
    }
  }
  Udrs anteU;
  anteU.top = T;
  anteU.clause = std::move(ante);
  ValidationReport vr = validate(anteU);
  if (!vr.ok())
    throw std::runtime_error("goal reduction produced an ill-formed antecedent:\n" + vr.str());
  out.next.add(std::move(anteU));

  out.subgoal = stripNode(goal, t, images);
  out.subgoal.index = std::nullopt;
  return out;
}

RaaOutcome raaRule(const Database& db, const Udrs& goal, const EngineOptions& opts) {
  (void)opts;
  Label t;
  if (!topOperatorUnambiguous(goal, /*wantNeg=*/true, &t))
    throw RuleRefused("goal reduction needs a negation on top in every reading");

  RaaOutcome out;
  out.next = db;
  Udrs body = flattenWrapper(stripNode(goal, t, {}));
  body.index = std::nullopt;
  FreshVariant fv = freshVariant(body, out.next.names);
  ValidationReport vr = validate(fv.udrs);
  if (!vr.ok())
    throw std::runtime_error("goal reduction produced an ill-formed body:\n" + vr.str());
  out.next.add(std::move(fv.udrs));
  return out;
}

// ---------------------------------------------------------------------------
// Search

namespace {

struct State {
  Database db;
  Goal goal;
};

std::string stateKey(const State& s) {
  std::string k = printDatabase(s.db);
  k += "|";
  if (s.goal.udrs) k += printUdrs(*s.goal.udrs);
  if (s.goal.inconsistency) k += "#inconsistent";
  return k;
}

struct Searcher {
  const EngineOptions& opts;
  RuleOptions ropts;
  std::vector<TraceStep> path;
  std::set<std::string> visited;

  explicit Searcher(const EngineOptions& o) : opts(o), ropts(o.ruleOptions()) {}

  std::optional<int> directMatch(const Database& db, const Udrs& goal) {
    std::set<std::string> tags = db.indexTags();
    for (size_t e = 0; e < db.entries.size(); ++e) {
      std::optional<Renaming> iso = sameType(goal, db.entries[e]);
      if (!iso) continue;
      if (!contentIso(goal, db.entries[e], *iso)) continue;
      if (goal.index && tags.count(*goal.index) && db.entries[e].index != goal.index) continue;
      return (int)e;
    }
    return std::nullopt;
  }

  bool dischargeInconsistency(const Database& db, TraceStep& step) {
    for (size_t i = 0; i < db.entries.size(); ++i)
      for (size_t j = 0; j < db.entries.size(); ++j) {
        if (i == j) continue;
        try {
          DiffOutcome d = diff(db, (int)i, (int)j, ropts);
          if (d.kind == DiffOutcome::Inconsistent) {
            step = {"closed",
                    {"diff", std::to_string(i), std::to_string(j)},
                    Sexpr::list({Sexpr::atom("difference-is-falsity")})};
            return true;
          }
        } catch (const RuleRefused&) {
        }
      }
    EntailOptions eo = opts.entailOptions();
    try {
      if (inconsistentAt(db, eo)) {
        step = {"closed",
                {"oracle", std::to_string(eo.bound)},
                Sexpr::list({Sexpr::atom("no-model-at-bound")})};
        return true;
      }
    } catch (const ConfigError&) {
    }
    return false;
  }

  bool dfs(const State& s, int depthLeft, std::vector<TraceStep>& steps) {
    if (s.goal.inconsistency) {
      TraceStep st;
      if (dischargeInconsistency(s.db, st)) {
        steps.push_back(std::move(st));
        return true;
      }
    } else if (s.goal.udrs) {
      if (std::optional<int> e = directMatch(s.db, *s.goal.udrs)) {
        steps.push_back({"direct", {std::to_string(*e)}, Sexpr::list()});
        return true;
      }
    }
    if (depthLeft == 0) return false;
    std::string key = stateKey(s);
    if (!visited.insert(key).second) return false;

    bool found = tryInstances(s, depthLeft, steps);
    visited.erase(key);
    return found;
  }

  bool tryInstances(const State& s, int depthLeft, std::vector<TraceStep>& steps) {
    // goal reduction first, then the forward rules in canonical order
    if (s.goal.udrs) {
      try {
        CondOutcome c = condRule(s.db, *s.goal.udrs, opts);
        steps.push_back({"cond", {}, Sexpr::list()});
        if (dfs({c.next, Goal::of(c.subgoal)}, depthLeft - 1, steps)) return true;
        steps.pop_back();
      } catch (const RuleRefused&) {
      }
      try {
        RaaOutcome r = raaRule(s.db, *s.goal.udrs, opts);
        steps.push_back({"raa", {}, Sexpr::list()});
        if (dfs({r.next, Goal::contradiction()}, depthLeft - 1, steps)) return true;
        steps.pop_back();
      } catch (const RuleRefused&) {
      }
    }

    // diff
    for (size_t i = 0; i < s.db.entries.size(); ++i)
      for (size_t j = 0; j < s.db.entries.size(); ++j) {
        if (i == j) continue;
        try {
          DiffOutcome d = diff(s.db, (int)i, (int)j, ropts);
          if (d.kind != DiffOutcome::Narrowed) continue;
          steps.push_back({"diff", {std::to_string(i), std::to_string(j)}, Sexpr::list()});
          if (dfs({d.next, s.goal}, depthLeft - 1, steps)) return true;
          steps.pop_back();
        } catch (const RuleRefused&) {
        }
      }

    // det
    for (size_t e = 0; e < s.db.entries.size(); ++e) {
      LabelIndex ix = buildIndex(s.db.entries[e]);
      for (const Label& l : ix.labels) {
        auto nIt = ix.nodeAt.find(l);
        if (nIt == ix.nodeAt.end() || nIt->second->isNeg() || nIt->second->quant != "every")
          continue;
        std::vector<Embedding> embs;
        try {
          embs = findEmbeddings(s.db, (int)e, l);
        } catch (const std::exception&) {
          continue;
        }
        for (size_t fi = 0; fi < embs.size(); ++fi) {
          try {
            DetOutcome d = det(s.db, (int)e, l, embs[fi], ropts);
            steps.push_back({"det",
                             {std::to_string(e), l, std::to_string(fi)},
                             Sexpr::list({Sexpr::atom("added"), Sexpr::atom(d.derived.top)})});
            if (dfs({d.next, s.goal}, depthLeft - 1, steps)) return true;
            steps.pop_back();
          } catch (const RuleRefused&) {
          }
        }
      }
    }

    // rr
    for (size_t e = 0; e < s.db.entries.size(); ++e) {
      std::vector<Replacement> cands;
      try {
        cands = rrCandidates(s.db, (int)e, opts.lex, ropts);
      } catch (const std::exception&) {
        continue;
      }
      for (size_t c = 0; c < cands.size(); ++c) {
        RrOutcome r = applyRr(s.db, (int)e, cands[c]);
        steps.push_back(
            {"rr", {std::to_string(e), std::to_string(c)}, cands[c].derivation.toSexpr()});
        if (dfs({r.next, s.goal}, depthLeft - 1, steps)) return true;
        steps.pop_back();
      }
    }

    // ai
    for (size_t i = 0; i < s.db.entries.size(); ++i)
      for (size_t j = i + 1; j < s.db.entries.size(); ++j) {
        try {
          AiOutcome a = ai(s.db, (int)i, (int)j, ropts);
          steps.push_back({"ai", {std::to_string(i), std::to_string(j)}, Sexpr::list()});
          if (dfs({a.next, s.goal}, depthLeft - 1, steps)) return true;
          steps.pop_back();
        } catch (const RuleRefused&) {
        }
      }

    return false;
  }
};

// applies one recorded step; returns the new state
State applyStep(const State& s, const TraceStep& st, const EngineOptions& opts,
                Database* outPrior, Udrs* outAdded) {
  RuleOptions ropts = opts.ruleOptions();
  State next = s;
  if (st.rule == "cond") {
    CondOutcome c = condRule(s.db, *s.goal.udrs, opts);
    if (outPrior) *outPrior = s.db;
    if (outAdded) *outAdded = c.next.entries.back();
    next.db = c.next;
    next.goal = Goal::of(c.subgoal);
  } else if (st.rule == "raa") {
    RaaOutcome r = raaRule(s.db, *s.goal.udrs, opts);
    if (outPrior) *outPrior = s.db;
    if (outAdded) *outAdded = r.next.entries.back();
    next.db = r.next;
    next.goal = Goal::contradiction();
  } else if (st.rule == "diff") {
    DiffOutcome d = diff(s.db, std::stoi(st.args[0]), std::stoi(st.args[1]), ropts);
    if (d.kind != DiffOutcome::Narrowed) throw std::runtime_error("trace step out of date");
    if (outPrior) *outPrior = s.db;
    if (outAdded) *outAdded = *d.narrowed;
    next.db = d.next;
  } else if (st.rule == "det") {
    int e = std::stoi(st.args[0]);
    std::vector<Embedding> embs = findEmbeddings(s.db, e, st.args[1]);
    DetOutcome d = det(s.db, e, st.args[1], embs.at(std::stoul(st.args[2])), ropts);
    if (outPrior) *outPrior = s.db;
    if (outAdded) *outAdded = d.derived;
    next.db = d.next;
  } else if (st.rule == "rr") {
    int e = std::stoi(st.args[0]);
    std::vector<Replacement> cands = rrCandidates(s.db, e, opts.lex, ropts);
    RrOutcome r = applyRr(s.db, e, cands.at(std::stoul(st.args[1])));
    if (outPrior) *outPrior = s.db;
    if (outAdded) *outAdded = r.derived;
    next.db = r.next;
  } else if (st.rule == "ai") {
    AiOutcome a = ai(s.db, std::stoi(st.args[0]), std::stoi(st.args[1]), ropts);
    if (outPrior) *outPrior = s.db;
    if (outAdded) *outAdded = a.derived;
    next.db = a.next;
  } else if (st.rule == "direct" || st.rule == "closed") {
    // discharge steps do not change the database
  } else {
    throw std::runtime_error("unknown trace step: " + st.rule);
  }
  return next;
}

}  // namespace

std::vector<std::optional<Udrs>> traceGoals(const Database& db0, const Udrs& goal,
                                            const ProofTrace& trace, const EngineOptions& opts) {
  std::vector<std::optional<Udrs>> out;
  State cur{db0, Goal::of(goal)};
  for (const TraceStep& st : trace.steps) {
    out.push_back(cur.goal.udrs);
    cur = applyStep(cur, st, opts, nullptr, nullptr);
  }
  return out;
}

ProofTrace prove(const Database& db, const Udrs& goal, const EngineOptions& opts) {
  for (const Udrs& u : db.entries) {
    ValidationReport vr = validate(u);
    if (!vr.ok()) throw ConfigError("database entry is ill-formed:\n" + vr.str());
  }
  {
    ValidationReport vr = validate(goal);
    if (!vr.ok()) throw ConfigError("goal is ill-formed:\n" + vr.str());
  }

  ProofTrace trace;
  trace.budget = opts.budget;
  State s0{db, Goal::of(goal)};

  Searcher searcher(opts);
  for (int depth = 0; depth <= opts.budget; ++depth) {
    std::vector<TraceStep> steps;
    searcher.visited.clear();
    if (searcher.dfs(s0, depth, steps)) {
      trace.verdict = ProofTrace::Proved;
      trace.steps = std::move(steps);
      // rebuild the final database by replaying
      State cur = s0;
      for (const TraceStep& st : trace.steps) cur = applyStep(cur, st, opts, nullptr, nullptr);
      trace.finalDb = cur.db;
      return trace;
    }
  }

  // distinguish a genuine refutation from an exhausted budget: refuted means
  // no reading combination supports the goal at the bound, witnessed by a
  // countermodel; a goal some readings support merely exhausts the search
  try {
    EntailVerdict v = entails(db, goal, Relation::R4, opts.entailOptions());
    if (!v.holds) {
      trace.verdict = ProofTrace::Refuted;
      trace.refutation = v.witness;
      trace.finalDb = db;
      return trace;
    }
  } catch (const ConfigError&) {
  }
  trace.verdict = ProofTrace::Exhausted;
  trace.finalDb = db;
  return trace;
}

Database replayTrace(const Database& db0, const Udrs& goal, const ProofTrace& trace,
                     const EngineOptions& opts) {
  State cur{db0, Goal::of(goal)};
  for (const TraceStep& st : trace.steps) cur = applyStep(cur, st, opts, nullptr, nullptr);
  return cur.db;
}

std::vector<std::pair<Database, Udrs>> traceDerivations(const Database& db0, const Udrs& goal,
                                                        const ProofTrace& trace,
                                                        const EngineOptions& opts) {
  std::vector<std::pair<Database, Udrs>> out;
  State cur{db0, Goal::of(goal)};
  for (const TraceStep& st : trace.steps) {
    Database prior;
    Udrs added;
    // forward inference steps only: additions made by the goal reductions
    // are assumptions of a subproof, not derived consequences
    bool produces =
        st.rule == "diff" || st.rule == "det" || st.rule == "rr" || st.rule == "ai";
    cur = applyStep(cur, st, opts, produces ? &prior : nullptr, produces ? &added : nullptr);
    if (produces) out.emplace_back(std::move(prior), std::move(added));
  }
  return out;
}

}  // namespace udrs
