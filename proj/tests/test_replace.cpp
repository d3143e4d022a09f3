#include "udrs/replace.hpp"

#include <functional>

#include "doctest.h"
#include "test_util.hpp"
#include "udrs/io.hpp"

using namespace udrs;
using test::loadDbFixture;
using test::loadFixture;

namespace {

RuleOptions ruleOpts(int bound = 3) {
  RuleOptions r;
  r.bound = bound;
  return r;
}

LexTheory snoreLex() {
  RawLex raw;
  raw.hypo.push_back({"snore", "sleep"});
  return LexTheory::fromRaw(raw, ruleOpts());
}

Box boxOf(const std::string& drsText) {
  // parse "(drs (vars) (atoms))" through a one-box structure
  Udrs u = parseUdrsText("(udrs :top t (clause :upper t :lower b"
                         " (comp :label n (quant some zz :res r " +
                         drsText + " :scope s)) (base :label b ((q zz))) (ord)))");
  return u.clause.nodes[0].resBox;
}

Box atomBox(const std::string& pred, const Term& arg) {
  Box b;
  b.atoms.push_back({pred, {arg}});
  return b;
}

}  // namespace

TEST_CASE("registration validates the lexical theory") {
  RawLex ok;
  ok.hypo.push_back({"snore", "sleep"});
  ok.pi.push_back({"a", "every"});
  ok.detrule.push_back({"every", "more-than-half"});
  CHECK_NOTHROW(LexTheory::fromRaw(ok, ruleOpts()));

  RawLex cyc;
  cyc.hypo.push_back({"p", "q"});
  cyc.hypo.push_back({"q", "p"});
  CHECK_THROWS_AS(LexTheory::fromRaw(cyc, ruleOpts()), ConfigError);

  RawLex badPi;  // universal wide does not entail existential wide
  badPi.pi.push_back({"every", "some"});
  CHECK_THROWS_AS(LexTheory::fromRaw(badPi, ruleOpts()), ConfigError);

  RawLex badDet;  // the majority determiner does not strengthen to the universal
  badDet.detrule.push_back({"more-than-half", "every"});
  CHECK_THROWS_AS(LexTheory::fromRaw(badDet, ruleOpts()), ConfigError);
}

TEST_CASE("hyponymy closure is reflexive and transitive") {
  RawLex raw;
  raw.hypo.push_back({"snore", "sleep"});
  raw.hypo.push_back({"sleep", "rest"});
  LexTheory lex = LexTheory::fromRaw(raw, ruleOpts());
  CHECK(lex.stronger("snore", "snore"));
  CHECK(lex.stronger("snore", "sleep"));
  CHECK(lex.stronger("snore", "rest"));
  CHECK_FALSE(lex.stronger("rest", "snore"));
}

TEST_CASE("box covering with a lexical step") {
  Database db;
  LexTheory lex = snoreLex();
  Judgment j = ggDrs(db, lex, boxOf("(drs (x) ((snore x)))"), boxOf("(drs (x) ((sleep x)))"),
                     ruleOpts());
  CHECK(j.holds);
  Judgment rev = ggDrs(db, lex, boxOf("(drs (x) ((sleep x)))"), boxOf("(drs (x) ((snore x)))"),
                       ruleOpts());
  CHECK_FALSE(rev.holds);
}

TEST_CASE("an unmatched extra condition on the weak side fails") {
  Database db;
  LexTheory lex = snoreLex();
  Judgment j = ggDrs(db, lex, boxOf("(drs (x) ((snore x)))"),
                     boxOf("(drs (x) ((sleep x) (tall x)))"), ruleOpts());
  CHECK_FALSE(j.holds);
}

TEST_CASE("dropping conditions weakens a box") {
  Database db;
  LexTheory lex = LexTheory::empty();
  Judgment j = ggDrs(db, lex, boxOf("(drs (x) ((pa x) (pb x)))"), boxOf("(drs (x) ((pa x)))"),
                     ruleOpts());
  CHECK(j.holds);
}

TEST_CASE("negation bodies compare contravariantly") {
  Database db;
  LexTheory lex = snoreLex();
  Udrs negSleep = parseUdrsText(
      "(udrs :top t (clause :upper t :lower b (comp :label n (neg :body nb))"
      " (base :label b ((sleep c0))) (ord (leq b (scope n)))))");
  Udrs negSnore = parseUdrsText(
      "(udrs :top t2 (clause :upper t2 :lower b2 (comp :label m (neg :body mb))"
      " (base :label b2 ((snore c0))) (ord (leq b2 (scope m)))))");
  // not-sleep is the stronger side: it entails not-snore
  CHECK(ggRegion(db, lex, negSleep, negSnore, ruleOpts()).holds);
  CHECK_FALSE(ggRegion(db, lex, negSnore, negSleep, ruleOpts()).holds);
}

TEST_CASE("restrictor weakening follows the persistence class") {
  Database db;
  RawLex raw;
  raw.hypo.push_back({"tall-man", "man"});
  LexTheory lex = LexTheory::fromRaw(raw, ruleOpts());

  // anti-persistent: the restrictor may shrink
  Udrs every = parseUdrsText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n (quant every x :res r (drs (x) ((man x))) :scope s))"
      " (base :label b ((runs x))) (ord)))");
  Judgment shrink =
      ggCond(db, lex, every, "n", boxOf("(drs (x) ((tall-man x)))"), ruleOpts());
  CHECK(shrink.holds);
  Judgment grow = ggCond(db, lex, every, "n", boxOf("(drs (x) ((p-any x)))"), ruleOpts());
  CHECK_FALSE(grow.holds);

  // persistent: the restrictor may grow
  Udrs someTall = parseUdrsText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n (quant some x :res r (drs (x) ((tall-man x))) :scope s))"
      " (base :label b ((runs x))) (ord)))");
  Judgment growSome = ggCond(db, lex, someTall, "n", boxOf("(drs (x) ((man x)))"), ruleOpts());
  CHECK(growSome.holds);
}

TEST_CASE("the semantic branch discharges the side condition from the data") {
  // the data states that every winner is a runner, so the restrictor of a
  // persistent determiner may grow from winner to runner
  Database db = parseDatabaseText(
      "(udrs :top dt (clause :upper dt :lower d0"
      " (comp :label d1 (impl :ante dr1 (drs (w) ((winner w))) :cons ds1))"
      " (base :label d0 ((runner w))) (ord (leq d0 (scope d1)))))");
  LexTheory lex = LexTheory::empty();
  Udrs someWinner = parseUdrsText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n (quant some x :res r (drs (x) ((winner x))) :scope s))"
      " (base :label b ((smiles x))) (ord)))");
  Judgment j = ggCond(db, lex, someWinner, "n", boxOf("(drs (x) ((runner x)))"), ruleOpts());
  CHECK(j.holds);
  CHECK(j.deriv.premises.empty());  // semantic branch carries no sub-derivation
}

TEST_CASE("persistence in context matches the clause judgments") {
  DeterminerTable dt = DeterminerTable::defaults();
  CHECK(persistentInClause(loadFixture("p19e.udrs"), "k2", dt) == Pers::AntiPersistent);
  CHECK(persistentInClause(loadFixture("p19a.udrs"), "k1", dt) == Pers::None);
  CHECK(persistentInClause(loadFixture("p19c.udrs"), "k2", dt) == Pers::None);
  CHECK(persistentInClause(loadFixture("p19d.udrs"), "k1", dt) == Pers::None);
}

TEST_CASE("claimed persistence classes are confirmed by brute force") {
  // when the classifier assigns a class, shrinking (anti-persistent) or
  // growing (persistent) the restrictor preserves truth reading by reading
  // over every bounded model; the converse direction is deliberately
  // conservative (a class-less mate in p19c demotes a semantically safe NP)
  DeterminerTable dt = DeterminerTable::defaults();
  EntailOptions eo;
  eo.bound = 3;

  auto shrunk = [](const Udrs& u, const Label& np) {
    Udrs out = u;
    std::function<void(Clause&)> walk = [&](Clause& c) {
      for (Node& n : c.nodes)
        if (n.label == np) {
          std::string var = n.var ? *n.var : n.resBox.universe.front();
          n.resBox.atoms.push_back({"p-extra", {{Term::Var, var}}});
        }
      for (SubClause& s : c.subs) walk(s.get());
    };
    walk(out.clause);
    return out;
  };
  auto antiOk = [&](const Udrs& u, const Label& np) {
    Udrs small = shrunk(u, np);
    Database empty;
    for (const Scoping& s : enumerateScopings(u))
      if (!impliedOver(empty, resolveReading(u, s), resolveReading(small, s), eo)) return false;
    return true;
  };

  Udrs p19e = loadFixture("p19e.udrs");
  CHECK(persistentInClause(p19e, "k2", dt) == Pers::AntiPersistent);
  CHECK(antiOk(p19e, "k2"));

  Udrs p19a = loadFixture("p19a.udrs");
  CHECK(persistentInClause(p19a, "k1", dt) == Pers::None);
  CHECK_FALSE(antiOk(p19a, "k1"));  // the wide-negation reading breaks it

  Udrs p19d = loadFixture("p19d.udrs");
  CHECK(persistentInClause(p19d, "k1", dt) == Pers::None);
  CHECK_FALSE(antiOk(p19d, "k1"));

  // the conservative case: semantically safe, still demoted
  Udrs p19c = loadFixture("p19c.udrs");
  CHECK(persistentInClause(p19c, "k2", dt) == Pers::None);
  CHECK(antiOk(p19c, "k2"));
}

TEST_CASE("a forced negation flips the persistence class") {
  // the negation always outscopes the universal here
  Udrs u = parseUdrsText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n1 (quant every x :res r1 (drs (x) ()) :scope s1))"
      " (comp :label n2 (neg :body nb))"
      " (base :label b ((came x)))"
      " (ord (leq n1 (scope n2)))))");
  CHECK(persistentInClause(u, "n1", DeterminerTable::defaults()) == Pers::Persistent);
}

TEST_CASE("substitution direction flips with the polarity") {
  LexTheory lex = snoreLex();
  Database db;

  // negative label: the replacement must be the stronger side
  Udrs negSleep = loadFixture("sleep_goal_fresh.udrs");
  Judgment j = subst(db, lex, negSleep, "n3",
                     {ReplacementSpec::BoxContent, atomBox("snore", {Term::Var, "z"}), ""},
                     ruleOpts());
  CHECK(j.holds);
  Judgment wrongWay = subst(db, lex, negSleep, "n3",
                            {ReplacementSpec::BoxContent, atomBox("rest", {Term::Var, "z"}), ""},
                            ruleOpts());
  CHECK_FALSE(wrongWay.holds);

  // positive label: the replacement must be the weaker side
  Udrs snores = parseUdrsText(
      "(udrs :top t (clause :upper t :lower b (base :label b ((snore john))) (ord)))");
  Judgment pos = subst(db, lex, snores, "b",
                       {ReplacementSpec::BoxContent, atomBox("sleep", {Term::Const, "john"}), ""},
                       ruleOpts());
  CHECK(pos.holds);
}

TEST_CASE("undefined polarity blocks substitution") {
  LexTheory lex = snoreLex();
  Database db;
  Database few = loadDbFixture("preoccupy_few_db.udrs");
  // the universal under a floating downward mate is undefined
  CHECK_THROWS_AS(subst(db, lex, few.entries[0], "ar2",
                        {ReplacementSpec::BoxContent, boxOf("(drs (y) ((p-any y)))"), ""},
                        ruleOpts()),
                  RuleRefused);
}

TEST_CASE("replacement candidates derive the negative-side hyponym swap") {
  Database db = loadDbFixture("sleep_db.udrs");
  LexTheory lex = snoreLex();
  std::vector<Replacement> cands = rrCandidates(db, 0, lex, ruleOpts());
  REQUIRE_FALSE(cands.empty());
  bool found = false;
  for (const Replacement& r : cands) {
    if (r.kind != "atom") continue;
    if (r.result.clause.base.atoms[0].pred == "snore") found = true;
  }
  CHECK(found);
}

TEST_CASE("applying a replacement keeps the source correlation") {
  Database db = loadDbFixture("sleep_db.udrs");
  LexTheory lex = snoreLex();
  std::vector<Replacement> cands = rrCandidates(db, 0, lex, ruleOpts());
  const Replacement* swap = nullptr;
  for (const Replacement& r : cands)
    if (r.kind == "atom" && r.result.clause.base.atoms[0].pred == "snore") swap = &r;
  REQUIRE(swap != nullptr);
  RrOutcome out = applyRr(db, 0, *swap);
  CHECK(out.derived.index == db.entries[0].index);
  CHECK(validate(out.derived).ok());
  // readings correspond one to one through the registry
  Registry reg = buildRegistry(out.next.entries);
  CHECK(correlatedAssignments(out.next.entries, reg).size() == 2);
}

TEST_CASE("idempotent replacement leaves the database unchanged") {
  Database db = loadDbFixture("sleep_db.udrs");
  LexTheory lex = snoreLex();
  for (const Replacement& r : rrCandidates(db, 0, lex, ruleOpts()))
    CHECK(printUdrs(r.result) != printUdrs(db.entries[0]));
}

TEST_CASE("determiner table rewrites") {
  Database db = parseDatabaseText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n (quant every x :res r (drs (x) ((politician x))) :scope s))"
      " (base :label b ((grumbles x))) (ord)))");
  RawLex raw;
  raw.detrule.push_back({"every", "more-than-half"});
  LexTheory lex = LexTheory::fromRaw(raw, ruleOpts());
  std::vector<Replacement> cands = ggLex(db, 0, "n", lex, ruleOpts());
  bool weakened = false;
  for (const Replacement& r : cands)
    if (r.result.clause.nodes[0].quant == "more-than-half") weakened = true;
  CHECK(weakened);
}

TEST_CASE("negative determiner rewrites to a universal over a negated scope") {
  Database db = parseDatabaseText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n (quant no x :res r (drs (x) ((problem x))) :scope s))"
      " (base :label b ((preoccupy x john))) (ord)))");
  LexTheory lex = LexTheory::empty();
  std::vector<Replacement> cands = ggLex(db, 0, "n", lex, ruleOpts());
  REQUIRE_FALSE(cands.empty());
  const Udrs& res = cands.front().result;
  CHECK(validate(res).ok());
  REQUIRE(res.clause.nodes.size() == 2);
  bool hasEvery = false, hasNeg = false;
  for (const Node& nd : res.clause.nodes) {
    if (nd.isNeg()) hasNeg = true;
    if (!nd.isNeg() && nd.quant == "every") hasEvery = true;
  }
  CHECK(hasEvery);
  CHECK(hasNeg);
  // the universal is forced above the negation
  CHECK(enumerateScopings(res).size() == 1);
}

TEST_CASE("existential over a negation rewrites to a negated universal") {
  Database db = parseDatabaseText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n (quant some x :res r (drs (x) ((student x))) :scope s))"
      " (comp :label m (neg :body mb))"
      " (base :label b ((passed x)))"
      " (ord (leq m (scope n)))))");
  LexTheory lex = LexTheory::empty();
  std::vector<Replacement> cands = ggLex(db, 0, "n", lex, ruleOpts());
  bool found = false;
  for (const Replacement& r : cands) {
    if (!validate(r.result).ok()) continue;
    std::vector<std::vector<Label>> orders = clauseReadingOrders(r.result, r.result.top);
    if (orders.size() == 1 && orders[0] == std::vector<Label>{"m", "n"}) found = true;
  }
  CHECK(found);
}

TEST_CASE("instantiating a universal at a context individual") {
  Database db = loadDbFixture("preoccupy_db.udrs");
  LexTheory lex = LexTheory::empty();
  std::vector<Replacement> cands = ggLex(db, 0, "a2", lex, ruleOpts());
  bool found = false;
  for (const Replacement& r : cands) {
    for (const Atom& a : r.result.clause.base.atoms)
      if (a.pred == "preoccupy" && a.args[1] == Term{Term::Const, "john"}) found = true;
  }
  CHECK(found);
}

TEST_CASE("neighbourhood exchange licenses the non-specific reading") {
  RawLex raw;
  raw.pi.push_back({"a", "every"});
  LexTheory lex = LexTheory::fromRaw(raw, ruleOpts());
  Database db = parseDatabaseText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n1 (quant a x :res r1 (drs (x) ((problem x))) :scope s1))"
      " (comp :label n2 (quant every y :res r2 (drs (y) ((student y))) :scope s2))"
      " (base :label b ((solves y x)))"
      " (ord (leq n2 (scope n1)))))");
  Judgment j = ggPi(db, lex, db.entries[0], "n1", "n2", ruleOpts());
  CHECK(j.holds);
  Udrs swapped = applyPi(db.entries[0], "n1", "n2");
  CHECK(validate(swapped).ok());
  std::vector<std::vector<Label>> orders = clauseReadingOrders(swapped, swapped.top);
  REQUIRE(orders.size() == 1);
  CHECK(orders[0] == std::vector<Label>{"n2", "n1"});
}

TEST_CASE("an intervening universal keeps the exchange; a negation blocks it") {
  RawLex raw;
  raw.pi.push_back({"a", "every"});
  LexTheory lex = LexTheory::fromRaw(raw, ruleOpts());
  // a second universal may end up immediately inside the indefinite
  Database okDb = parseDatabaseText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n1 (quant a x :res r1 (drs (x) ((problem x))) :scope s1))"
      " (comp :label n2 (quant every y :res r2 (drs (y) ((student y))) :scope s2))"
      " (comp :label n3 (quant every z :res r3 (drs (z) ((tutor z))) :scope s3))"
      " (base :label b ((solves y x)))"
      " (ord (leq n2 (scope n1)) (leq n3 (scope n1)))))");
  CHECK(ggPi(okDb, lex, okDb.entries[0], "n1", "n2", ruleOpts()).holds);

  Database blocked = parseDatabaseText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n1 (quant a x :res r1 (drs (x) ((problem x))) :scope s1))"
      " (comp :label n2 (quant every y :res r2 (drs (y) ((student y))) :scope s2))"
      " (comp :label n3 (neg :body nb))"
      " (base :label b ((solves y x)))"
      " (ord (leq n2 (scope n1)) (leq n3 (scope n1)))))");
  CHECK_THROWS_AS(ggPi(blocked, lex, blocked.entries[0], "n1", "n2", ruleOpts()), RuleRefused);
}
