#include "udrs/polarity.hpp"

#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "udrs/disambig.hpp"
#include "udrs/io.hpp"

using namespace udrs;
using test::loadDbFixture;
using test::loadFixture;

namespace {

// Enumeration-based oracle: walk every reading, counting the downward-
// monotone operators above each label; positive/negative when the parity is
// constant, undefined when it varies (or a class-less position intervenes).
struct OracleMark {
  bool seen = false;
  bool varies = false;
  bool broken = false;  // under a monotonicity-less position
  int parity = 0;
};

void oracleWalkClause(const Udrs& u, const LabelIndex& ix, const DeterminerTable& dt,
                      const Clause& c, const Scoping& s, int parity, bool broken,
                      std::map<Label, OracleMark>& out);

void mark(std::map<Label, OracleMark>& out, const Label& l, int parity, bool broken) {
  OracleMark& m = out[l];
  if (broken) {
    m.broken = true;
    return;
  }
  if (m.seen && m.parity != parity) m.varies = true;
  m.seen = true;
  m.parity = parity;
}

void oracleWalkBox(const Udrs& u, const LabelIndex& ix, const DeterminerTable& dt,
                   const Label& box, const Scoping& s, int parity, bool broken,
                   std::map<Label, OracleMark>& out) {
  mark(out, box, parity, broken);
  if (auto it = ix.subsAt.find(box); it != ix.subsAt.end())
    for (const Clause* sub : it->second)
      oracleWalkClause(u, ix, dt, *sub, s, parity, broken, out);
}

void oracleWalkClause(const Udrs& u, const LabelIndex& ix, const DeterminerTable& dt,
                      const Clause& c, const Scoping& s, int parity, bool broken,
                      std::map<Label, OracleMark>& out) {
  mark(out, c.upper, parity, broken);
  if (auto it = ix.subsAt.find(c.upper); it != ix.subsAt.end())
    for (const Clause* sub : it->second)
      oracleWalkClause(u, ix, dt, *sub, s, parity, broken, out);

  int p = parity;
  bool b = broken;
  auto chainIt = s.perClause.find(c.upper);
  const std::vector<Label> chain =
      chainIt == s.perClause.end() ? std::vector<Label>{} : chainIt->second;
  for (const Label& nl : chain) {
    const Node* n = c.findNode(nl);
    mark(out, nl, p, b);
    if (n->isNeg()) {
      oracleWalkBox(u, ix, dt, n->res, s, p + 1, b, out);
      p += 1;  // everything deeper in the chain sits under the negation
    } else {
      const DeterminerInfo* d = dt.find(n->quant);
      // restrictor: by the left class
      int rp = p;
      bool rb = b;
      if (!d || d->pers == Pers::None)
        rb = true;
      else if (d->pers == Pers::AntiPersistent)
        rp += 1;
      oracleWalkBox(u, ix, dt, n->res, s, rp, rb, out);
      // scope: by the right class
      if (!d || d->right == Mono::None)
        b = true;
      else if (d->right == Mono::Down)
        p += 1;
      oracleWalkBox(u, ix, dt, n->scope, s, p, b, out);
    }
  }
  if (c.lower != c.upper) oracleWalkBox(u, ix, dt, c.lower, s, p, b, out);
}

PolarityMap oraclePolarity(const Udrs& u, const DeterminerTable& dt) {
  LabelIndex ix = buildIndex(u);
  std::map<Label, OracleMark> marks;
  for (const Scoping& s : enumerateScopings(u))
    oracleWalkClause(u, ix, dt, u.clause, s, 0, false, marks);
  PolarityMap out;
  for (const auto& [l, m] : marks) {
    if (m.broken || m.varies || !m.seen)
      out[l] = Pol::Undefined;
    else
      out[l] = m.parity % 2 ? Pol::Negative : Pol::Positive;
  }
  return out;
}

Udrs randomPolarityClause(std::mt19937& rng) {
  static const char* dets[] = {"every", "some", "no", "few", "more-than-half"};
  int n = 1 + (int)(rng() % 3);
  std::string text = "(udrs :top t (clause :upper t :lower b ";
  int negs = 0;
  for (int i = 0; i < n; ++i) {
    if (rng() % 4 == 0) {
      text += "(comp :label n" + std::to_string(i) + " (neg :body nb" + std::to_string(i) + ")) ";
      ++negs;
    } else {
      std::string d = dets[rng() % 5];
      std::string xi = "x" + std::to_string(i);
      text += "(comp :label n" + std::to_string(i) + " (quant " + d + " " + xi + " :res r" +
              std::to_string(i) + " (drs (" + xi + ") ((p" + std::to_string(i) + " " + xi +
              "))) :scope s" + std::to_string(i) + ")) ";
    }
  }
  text += "(base :label b ((q c0))) (ord";
  std::uniform_int_distribution<int> coin(0, 2);
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i)
      if (coin(rng) == 0)
        text += " (leq n" + std::to_string(i) + " (scope n" + std::to_string(j) + "))";
  text += ")))";
  (void)negs;
  return parseUdrsText(text);
}

}  // namespace

TEST_CASE("an upward mate leaves the universal positive") {
  Database db = loadDbFixture("preoccupy_db.udrs");
  PolarityMap pm = polarity(db.entries[0], DeterminerTable::defaults());
  CHECK(pm.at("a2") == Pol::Positive);
  CHECK(pm.at("a1") == Pol::Positive);
  CHECK(pm.at("a0") == Pol::Positive);  // verb under two upward operators
}

TEST_CASE("a floating downward mate makes the universal undefined") {
  Database db = loadDbFixture("preoccupy_few_db.udrs");
  PolarityMap pm = polarity(db.entries[0], DeterminerTable::defaults());
  CHECK(pm.at("a2") == Pol::Undefined);
  // the few-node itself is positive: the universal transmits upward
  CHECK(pm.at("a1") == Pol::Positive);
}

TEST_CASE("a floating negation makes the universal undefined") {
  Database db = loadDbFixture("every_neg_sleep_db.udrs");
  PolarityMap pm = polarity(db.entries[0], DeterminerTable::defaults());
  CHECK(pm.at("a1") == Pol::Undefined);
  CHECK(pm.at("a2") == Pol::Positive);
}

TEST_CASE("atom-only structures are positive throughout") {
  Udrs u = loadFixture("mp_goal.udrs");
  PolarityMap pm = polarity(u, DeterminerTable::defaults());
  for (const auto& [l, p] : pm) CHECK(p == Pol::Positive);
}

TEST_CASE("the verb has a definite polarity whenever the clause top does") {
  Udrs u = loadFixture("pay_attention.udrs");
  PolarityMap pm = polarity(u, DeterminerTable::defaults());
  // one negation always above the verb
  CHECK(pm.at("l0") == Pol::Negative);
  // and the restrictor of the universal flips once more
  CHECK(pm.at("r1") == Pol::Undefined);  // universal itself is undefined here
  CHECK(pm.at("l1") == Pol::Undefined);
  CHECK(pm.at("l2") == Pol::Positive);
}

TEST_CASE("polarity descends through nested clauses") {
  Udrs u = loadFixture("p19d.udrs");
  PolarityMap pm = polarity(u, DeterminerTable::defaults());
  CHECK(pm.at("on") == Pol::Positive);
  CHECK(pm.at("ob") == Pol::Negative);
  CHECK(pm.at("s4") == Pol::Negative);   // nested clause inherits the body sign
  CHECK(pm.at("k0") == Pol::Positive);   // flipped again by the inner negation
  CHECK(pm.at("k1") == Pol::Undefined);  // inner universal floats against it
}

TEST_CASE("path rule agrees with the enumeration oracle on fixtures") {
  DeterminerTable dt = DeterminerTable::defaults();
  for (const char* name : {"pay_attention.udrs", "pay_attention_wide_every.udrs",
                           "pay_attention_wide_neg.udrs", "p19a.udrs", "p19c.udrs", "p19d.udrs",
                           "p19e.udrs", "chairman_goal.udrs", "nested_cond.udrs"}) {
    Udrs u = loadFixture(name);
    PolarityMap fast = polarity(u, dt);
    PolarityMap slow = oraclePolarity(u, dt);
    for (const auto& [l, p] : slow)
      CHECK_MESSAGE(fast.at(l) == p, name, " at ", l, ": path=", polName(fast.at(l)),
                    " oracle=", polName(p));
  }
}

TEST_CASE("path rule agrees with the enumeration oracle on random clauses") {
  DeterminerTable dt = DeterminerTable::defaults();
  std::mt19937 rng(97531);
  for (int round = 0; round < 300; ++round) {
    Udrs u = randomPolarityClause(rng);
    REQUIRE(validate(u).ok());
    PolarityMap fast = polarity(u, dt);
    PolarityMap slow = oraclePolarity(u, dt);
    for (const auto& [l, p] : slow)
      REQUIRE_MESSAGE(fast.at(l) == p, "round ", round, " at ", l, " in ", printUdrs(u));
  }
}
