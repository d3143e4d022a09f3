#include "udrs/modelsem.hpp"

#include "doctest.h"
#include "test_util.hpp"
#include "udrs/io.hpp"

using namespace udrs;
using test::loadDbFixture;
using test::loadFixture;

namespace {

FiniteModel toFiniteModel(const RawModel& rm) {
  FiniteModel m;
  m.domain = rm.domain;
  for (const auto& [n, v] : rm.constants) m.constants[n] = v;
  for (const auto& p : rm.preds) {
    m.arity[p.name] = p.arity;
    auto& ext = m.ext[p.name];
    for (const auto& t : p.tuples) ext.insert(t);
  }
  return m;
}

FiniteModel fixtureModel(const std::string& name) {
  return toFiniteModel(parseModelText(test::fixtureText("models/" + name)));
}

SDrs readingOf(const Udrs& u, size_t i) {
  std::vector<Scoping> ss = enumerateScopings(u);
  REQUIRE(i < ss.size());
  return resolveReading(u, ss[i]);
}

}  // namespace

TEST_CASE("determiner table flags survive their own exhaustive check") {
  CHECK_NOTHROW(DeterminerTable::defaults());
  CHECK_NOTHROW(DeterminerTable::defaults(1));
}

TEST_CASE("resolution nests the chain in scope order") {
  Udrs u = loadFixture("pay_attention.udrs");
  SDrs wideEvery = readingOf(u, 0);  // <l1, l2>
  REQUIRE(wideEvery.conds.size() == 1);
  CHECK(wideEvery.conds[0].kind == SCond::KQuant);
  CHECK(wideEvery.conds[0].quant == "every");
  const SDrs& inner = wideEvery.conds[0].parts[1];
  REQUIRE(inner.conds.size() == 1);
  CHECK(inner.conds[0].kind == SCond::KNeg);

  SDrs wideNeg = readingOf(u, 1);  // <l2, l1>
  REQUIRE(wideNeg.conds.size() == 1);
  CHECK(wideNeg.conds[0].kind == SCond::KNeg);

  // the constrained variants resolve to exactly those shapes
  Udrs u11 = loadFixture("pay_attention_wide_every.udrs");
  CHECK(printSDrs(readingOf(u11, 0)) == printSDrs(wideEvery));
  Udrs u12 = loadFixture("pay_attention_wide_neg.udrs");
  CHECK(printSDrs(readingOf(u12, 0)) == printSDrs(wideNeg));
}

TEST_CASE("a single-atom structure resolves to the atom itself") {
  Udrs u = loadFixture("mp_goal.udrs");
  SDrs d = readingOf(u, 0);
  REQUIRE(d.conds.size() == 1);
  CHECK(d.conds[0].kind == SCond::KAtom);
  CHECK(d.conds[0].atom.pred == "buy-books");
}

TEST_CASE("evaluation of the two readings in concrete models") {
  Udrs u = loadFixture("pay_attention.udrs");
  // rename the verb so the fixture models apply
  Udrs sleeps = parseUdrsText(
      "(udrs :top lt (clause :upper lt :lower l0"
      " (comp :label l1 (quant every x :res r1 (drs (x) ()) :scope s1))"
      " (comp :label l2 (neg :body b2))"
      " (base :label l0 ((sleep x)))"
      " (ord (leq l0 (scope l1)) (leq l0 (scope l2)))))");
  SDrs wideEvery = readingOf(sleeps, 0);
  SDrs wideNeg = readingOf(sleeps, 1);

  FiniteModel everyoneSleeps = fixtureModel("m_sleepers.model");
  CHECK_FALSE(evalModel(everyoneSleeps, wideEvery));
  CHECK_FALSE(evalModel(everyoneSleeps, wideNeg));

  FiniteModel nobodySleeps = fixtureModel("m_nosleep.model");
  CHECK(evalModel(nobodySleeps, wideEvery));
  CHECK(evalModel(nobodySleeps, wideNeg));
  (void)u;
}

TEST_CASE("the two readings come apart in the witness model") {
  Udrs sleeps = parseUdrsText(
      "(udrs :top lt (clause :upper lt :lower l0"
      " (comp :label l1 (quant every x :res r1 (drs (x) ()) :scope s1))"
      " (comp :label l2 (neg :body b2))"
      " (base :label l0 ((sleep x)))"
      " (ord (leq l0 (scope l1)) (leq l0 (scope l2)))))");
  FiniteModel half = fixtureModel("m_half.model");
  CHECK_FALSE(evalModel(half, readingOf(sleeps, 0)));  // wide universal
  CHECK(evalModel(half, readingOf(sleeps, 1)));        // wide negation
}

TEST_CASE("a degenerate one-box clause resolves with its universe intact") {
  Udrs u = parseUdrsText(
      "(udrs :top t (clause :upper t :lower t (univ x) (base :label t ((sleep x))) (ord)))");
  REQUIRE(validate(u).ok());
  SDrs d = readingOf(u, 0);
  CHECK(d.universe == std::vector<std::string>{"x"});
  REQUIRE(d.conds.size() == 1);
}

TEST_CASE("an empty structure is true in any model") {
  Udrs u = parseUdrsText("(udrs :top t (clause :upper t :lower b (base :label b ()) (ord)))");
  SDrs d = readingOf(u, 0);
  FiniteModel m = fixtureModel("m_sleepers.model");
  CHECK(evalModel(m, d));
}

TEST_CASE("evaluation rejects uninterpreted symbols") {
  Udrs u = loadFixture("mp_goal.udrs");
  FiniteModel m = fixtureModel("m_sleepers.model");
  CHECK_THROWS_AS(evalModel(m, readingOf(u, 0)), std::runtime_error);
}

TEST_CASE("the wide-universal reading entails the wide-negation reading") {
  // with a nonempty domain, if everyone fails to sleep then not everyone
  // sleeps; checked by the bounded oracle
  Database db = parseDatabaseText(test::fixtureText("pay_attention_wide_every.udrs"));
  Udrs goal = loadFixture("pay_attention_wide_neg.udrs");
  EntailOptions eo;
  eo.bound = 3;
  CHECK(entails(db, goal, Relation::R8, eo).holds);
  // and not conversely
  Database db2 = parseDatabaseText(test::fixtureText("pay_attention_wide_neg.udrs"));
  Udrs goal2 = loadFixture("pay_attention_wide_every.udrs");
  EntailVerdict v = entails(db2, goal2, Relation::R8, eo);
  CHECK_FALSE(v.holds);
  REQUIRE(v.witness.has_value());
  // the countermodel genuinely falsifies: premises true, goal false
  const FiniteModel& cm = v.witness->countermodel;
  SDrs prem = resolveReading(db2.entries[0], v.witness->premise.perEntry[0]);
  SDrs g = resolveReading(goal2, v.witness->goal);
  CHECK(evalModel(cm, prem));
  CHECK_FALSE(evalModel(cm, g));
}

TEST_CASE("complement postulate separates the candidate relations") {
  Database db = parseDatabaseText(test::fixtureText("sleep_db.udrs"));
  db.entries.pop_back();  // keep only "everybody didn't sleep"
  Udrs goal = loadFixture("awake_goal.udrs");
  EntailOptions eo;
  eo.bound = 4;
  eo.constraints.complement.push_back({"awake", "sleep"});
  CHECK(entails(db, goal, Relation::R4, eo).holds);
  CHECK_FALSE(entails(db, goal, Relation::R8, eo).holds);
  CHECK_FALSE(entails(db, goal, Relation::R3, eo).holds);
}

TEST_CASE("direct re-occurrence holds under the correlated relation only") {
  Database db = loadDbFixture("sleep_awake_db.udrs");
  EntailOptions eo;
  eo.bound = 4;
  eo.constraints.complement.push_back({"awake", "sleep"});
  Udrs sameTag = loadFixture("sleep_goal_same_index.udrs");
  Udrs freshTag = loadFixture("sleep_goal_fresh.udrs");
  CHECK(entails(db, sameTag, Relation::R8, eo).holds);
  CHECK_FALSE(entails(db, freshTag, Relation::R8, eo).holds);
  // the uncorrelated relation that picks a goal reading per premise reading
  // accepts it; the doubly universal one does not
  CHECK(entails(db, freshTag, Relation::R1, eo).holds);
  CHECK_FALSE(entails(db, freshTag, Relation::R3, eo).holds);
}

TEST_CASE("correlated modus ponens at the semantic level") {
  Database db = loadDbFixture("mp_coindexed_db.udrs");
  Udrs goal = loadFixture("mp_goal.udrs");
  EntailOptions eo;
  eo.bound = 3;
  CHECK(entails(db, goal, Relation::R8, eo).holds);

  // crossing the readings breaks it
  Database crossed = loadDbFixture("mp_crossed_db.udrs");
  CHECK_FALSE(entails(crossed, goal, Relation::R8, eo).holds);
}

TEST_CASE("explicit model sets restrict the check") {
  Database db = parseDatabaseText(test::fixtureText("pay_attention_wide_neg.udrs"));
  Udrs goal = loadFixture("pay_attention_wide_every.udrs");
  EntailOptions eo;
  eo.bound = 2;
  FiniteModel m;
  m.domain = {"a"};
  m.arity["pay-attention"] = 1;
  m.ext["pay-attention"] = {};
  eo.explicitModels = std::vector<FiniteModel>{m};
  // over that single model both readings hold, so the entailment passes even
  // though the enumerated space refutes it
  CHECK(entails(db, goal, Relation::R8, eo).holds);
  eo.explicitModels.reset();
  CHECK_FALSE(entails(db, goal, Relation::R8, eo).holds);
}

TEST_CASE("monotone growth of the scope set never flips truth downward") {
  // property of the evaluator: for right-upward determiners, adding tuples to
  // the verb extension preserves truth
  Udrs u = parseUdrsText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n (quant some x :res r (drs (x) ((p x))) :scope s))"
      " (base :label b ((q x))) (ord)))");
  SDrs d = readingOf(u, 0);
  for (int pMask = 0; pMask < 8; ++pMask)
    for (int qMask = 0; qMask < 8; ++qMask) {
      auto mk = [&](int pm, int qm) {
        FiniteModel m;
        m.domain = {"d0", "d1", "d2"};
        m.arity["p"] = 1;
        m.arity["q"] = 1;
        for (int i = 0; i < 3; ++i) {
          if (pm & (1 << i)) m.ext["p"].insert({m.domain[i]});
          if (qm & (1 << i)) m.ext["q"].insert({m.domain[i]});
        }
        m.ext["p"];
        m.ext["q"];
        return m;
      };
      bool before = evalModel(mk(pMask, qMask), d);
      for (int grow = 0; grow < 8; ++grow) {
        if ((qMask | grow) == qMask) continue;
        bool after = evalModel(mk(pMask, qMask | grow), d);
        if (before) CHECK(after);
      }
    }
}
