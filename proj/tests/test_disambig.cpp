#include "udrs/disambig.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "udrs/io.hpp"

using namespace udrs;
using test::loadDbFixture;
using test::loadFixture;

namespace {

// Brute-force oracle: all permutations of the top-clause nodes, filtered by
// the closure constraint, independent of the backtracking generator.
std::vector<std::vector<Label>> bruteForceOrders(const Udrs& u) {
  Analysis a = analyze(u);
  std::vector<Label> nodes;
  for (const Node& n : u.clause.nodes) nodes.push_back(n.label);
  std::sort(nodes.begin(), nodes.end());
  std::vector<std::vector<Label>> out;
  if (nodes.empty()) {
    out.push_back({});
    return out;
  }
  std::vector<Label> perm = nodes;
  do {
    bool ok = true;
    for (size_t i = 0; i < perm.size() && ok; ++i) {
      const Node* ni = u.clause.findNode(perm[i]);
      for (size_t j = 0; j < i && ok; ++j)
        // perm[j] is wider; if the closure forces perm[j] inside perm[i]'s
        // scope the order is inconsistent
        if (a.closure.leq(perm[j], ni->scope)) ok = false;
    }
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Random single-clause structure with n nodes and a random consistent set of
// extra subordination edges.
Udrs randomClause(std::mt19937& rng, int n) {
  std::string text = "(udrs :top t (clause :upper t :lower b ";
  for (int i = 0; i < n; ++i) {
    std::string xi = "x" + std::to_string(i);
    text += "(comp :label n" + std::to_string(i) + " (quant some " + xi + " :res r" +
            std::to_string(i) + " (drs (" + xi + ") ((p" + std::to_string(i) + " " + xi +
            "))) :scope s" + std::to_string(i) + ")) ";
  }
  text += "(base :label b ((q x0))) (ord";
  // random edges ni <= scope(nj) for i > j keep the order acyclic
  std::uniform_int_distribution<int> coin(0, 3);
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i)
      if (coin(rng) == 0)
        text += " (leq n" + std::to_string(i) + " (scope n" + std::to_string(j) + "))";
  text += ")))";
  return parseUdrsText(text);
}

}  // namespace

TEST_CASE("the underspecified fixture has exactly two readings") {
  Udrs u = loadFixture("pay_attention.udrs");
  std::vector<Scoping> ss = enumerateScopings(u);
  REQUIRE(ss.size() == 2);
  CHECK(ss[0].perClause.at("lt") == std::vector<Label>{"l1", "l2"});
  CHECK(ss[1].perClause.at("lt") == std::vector<Label>{"l2", "l1"});
}

TEST_CASE("one-node and constrained clauses") {
  Udrs g = loadFixture("preoccupy_goal.udrs");
  CHECK(enumerateScopings(g).size() == 1);
  Udrs wide = loadFixture("pay_attention_wide_every.udrs");
  CHECK(enumerateScopings(wide).size() == 1);
}

TEST_CASE("three free nodes give six readings; one edge cuts them to three") {
  Udrs free3 = parseUdrsText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n0 (quant some x0 :res r0 (drs (x0) ((p0 x0))) :scope s0))"
      " (comp :label n1 (quant some x1 :res r1 (drs (x1) ((p1 x1))) :scope s1))"
      " (comp :label n2 (quant some x2 :res r2 (drs (x2) ((p2 x2))) :scope s2))"
      " (base :label b ((q x0))) (ord)))");
  CHECK(enumerateScopings(free3).size() == 6);
  Udrs edged = parseUdrsText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n0 (quant some x0 :res r0 (drs (x0) ((p0 x0))) :scope s0))"
      " (comp :label n1 (quant some x1 :res r1 (drs (x1) ((p1 x1))) :scope s1))"
      " (comp :label n2 (quant some x2 :res r2 (drs (x2) ((p2 x2))) :scope s2))"
      " (base :label b ((q x0))) (ord (leq n1 (scope n0)))))");
  CHECK(enumerateScopings(edged).size() == 3);
}

TEST_CASE("enumeration matches the brute-force count on random clauses") {
  std::mt19937 rng(20240817);
  for (int round = 0; round < 220; ++round) {
    int n = 1 + (int)(rng() % 5);
    Udrs u = randomClause(rng, n);
    REQUIRE(validate(u).ok());
    std::vector<Scoping> fast = enumerateScopings(u);
    std::vector<std::vector<Label>> slow = bruteForceOrders(u);
    REQUIRE_MESSAGE(fast.size() == slow.size(), "round ", round, " n=", n);
    // every returned scoping satisfies its own consistency requirement
    std::set<std::vector<Label>> fastSet;
    for (const Scoping& s : fast) fastSet.insert(s.perClause.at("t"));
    std::set<std::vector<Label>> slowSet(slow.begin(), slow.end());
    CHECK(fastSet == slowSet);
  }
}

TEST_CASE("readings multiply across nested clauses") {
  Database db = loadDbFixture("mp_coindexed_db.udrs");
  // one reading for the wrapper times two for the nested antecedent
  CHECK(enumerateScopings(db.entries[0]).size() == 2);
}

TEST_CASE("type isomorphism finds a fresh variant") {
  Udrs u = loadFixture("pay_attention.udrs");
  FreshNames names;
  names.reserve(u);
  FreshVariant v = freshVariant(u, names);
  auto iso = sameType(u, v.udrs);
  REQUIRE(iso.has_value());
  CHECK(iso->labelMap.at("l1") == v.witness.labelMap.at("l1"));
}

TEST_CASE("type isomorphism rejects different node counts") {
  Udrs u = loadFixture("pay_attention.udrs");
  Udrs g = loadFixture("preoccupy_goal.udrs");
  CHECK_FALSE(sameType(u, g).has_value());
}

TEST_CASE("type isomorphism ignores verb-level content") {
  Udrs a = loadFixture("sleep_goal_fresh.udrs");   // every + neg over sleep
  Udrs b = loadFixture("pay_attention.udrs");      // every + neg over pay-attention
  CHECK(sameType(a, b).has_value());
  CHECK(enumerateScopings(a).size() == enumerateScopings(b).size());
  // content-sensitive comparison still tells them apart
  CHECK_FALSE(contentIso(a, b, *sameType(a, b)).has_value());
}

TEST_CASE("type isomorphism requires matching determiners") {
  Udrs a = parseUdrsText(
      "(udrs :top t (clause :upper t :lower b"
      " (comp :label n0 (quant some x :res r0 (drs (x) ((p x))) :scope s0))"
      " (base :label b ((q x))) (ord)))");
  Udrs b = parseUdrsText(
      "(udrs :top t2 (clause :upper t2 :lower b2"
      " (comp :label m0 (quant every y :res r2 (drs (y) ((p y))) :scope s2))"
      " (base :label b2 ((q y))) (ord)))");
  CHECK_FALSE(sameType(a, b).has_value());
}

TEST_CASE("coindexed entries disambiguate together") {
  // two structurally alike two-reading entries under one tag
  Database db = parseDatabaseText(
      "(udrs :top t :index i (clause :upper t :lower b"
      " (comp :label n0 (quant every x :res r0 (drs (x) ()) :scope s0))"
      " (comp :label n1 (neg :body b1))"
      " (base :label b ((came x))) (ord)))"
      "(udrs :top t2 :index i (clause :upper t2 :lower c"
      " (comp :label m0 (quant every y :res r2 (drs (y) ()) :scope s2))"
      " (comp :label m1 (neg :body c1))"
      " (base :label c ((came y))) (ord)))");
  Registry reg = buildRegistry(db.entries);
  CHECK(correlatedAssignments(db.entries, reg).size() == 2);
  CHECK(allAssignments(db.entries).size() == 4);
}

TEST_CASE("distinct tags stay independent") {
  Database db = parseDatabaseText(
      "(udrs :top t :index i (clause :upper t :lower b"
      " (comp :label n0 (quant every x :res r0 (drs (x) ()) :scope s0))"
      " (comp :label n1 (neg :body b1))"
      " (base :label b ((came x))) (ord)))"
      "(udrs :top t2 :index j (clause :upper t2 :lower c"
      " (comp :label m0 (quant every y :res r2 (drs (y) ()) :scope s2))"
      " (comp :label m1 (neg :body c1))"
      " (base :label c ((came y))) (ord)))");
  Registry reg = buildRegistry(db.entries);
  CHECK(correlatedAssignments(db.entries, reg).size() == 4);
}

TEST_CASE("one unambiguous entry has one assignment") {
  Database db = loadDbFixture("mp_goal.udrs");
  Registry reg = buildRegistry(db.entries);
  CHECK(correlatedAssignments(db.entries, reg).size() == 1);
}

TEST_CASE("coindexing never increases the assignment count") {
  Database same = parseDatabaseText(test::fixtureText("sleep_awake_db.udrs"));
  Registry reg = buildRegistry(same.entries);
  CHECK(correlatedAssignments(same.entries, reg).size() <=
        allAssignments(same.entries).size());
}

TEST_CASE("coindexed entries of different shapes are a configuration error") {
  Database db = parseDatabaseText(
      "(udrs :top t :index i (clause :upper t :lower b"
      " (comp :label n0 (quant every x :res r0 (drs (x) ()) :scope s0))"
      " (base :label b ((came x))) (ord)))"
      "(udrs :top t2 :index i (clause :upper t2 :lower c"
      " (base :label c ((came john))) (ord)))");
  CHECK_THROWS_AS(buildRegistry(db.entries), ConfigError);
}

TEST_CASE("a nested clause can share a tag with a whole entry") {
  Database db = loadDbFixture("mp_coindexed_db.udrs");
  Registry reg = buildRegistry(db.entries);
  const Registry::Group* g = reg.find("i6");
  REQUIRE(g != nullptr);
  CHECK(g->sites.size() == 2);
  // the correlated pair cuts four combinations to two
  CHECK(correlatedAssignments(db.entries, reg).size() == 2);
}
