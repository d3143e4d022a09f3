#include "udrs/disambig.hpp"

#include <algorithm>

namespace udrs {

// ---------------------------------------------------------------------------
// Scoping enumeration

namespace {

// All linear orders of `labels` such that mustPrecede constraints hold;
// candidates are tried in the order given (callers pass sorted labels).
void linearOrders(const std::vector<Label>& labels,
                  const std::vector<std::vector<bool>>& mustPrecede,
                  std::vector<Label>& acc, std::vector<bool>& placed,
                  std::vector<std::vector<Label>>& out) {
  if (acc.size() == labels.size()) {
    out.push_back(acc);
    return;
  }
  for (size_t i = 0; i < labels.size(); ++i) {
    if (placed[i]) continue;
    bool ready = true;
    for (size_t j = 0; j < labels.size(); ++j)
      if (!placed[j] && j != i && mustPrecede[j][i]) {
        ready = false;
        break;
      }
    if (!ready) continue;
    placed[i] = true;
    acc.push_back(labels[i]);
    linearOrders(labels, mustPrecede, acc, placed, out);
    acc.pop_back();
    placed[i] = false;
  }
}

std::vector<std::vector<Label>> clauseOrders(const Clause& c, const Closure& cl) {
  std::vector<Label> labels;
  for (const Node& n : c.nodes) labels.push_back(n.label);
  std::sort(labels.begin(), labels.end());
  size_t n = labels.size();
  std::vector<std::vector<bool>> mustPrecede(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i) {
    const Node* ni = c.findNode(labels[i]);
    for (size_t j = 0; j < n; ++j)
      if (i != j && cl.leq(labels[j], ni->scope)) mustPrecede[i][j] = true;
  }
  std::vector<std::vector<Label>> out;
  std::vector<Label> acc;
  std::vector<bool> placed(n, false);
  linearOrders(labels, mustPrecede, acc, placed, out);
  return out;
}

}  // namespace

std::vector<Scoping> enumerateScopings(const Udrs& u) {
  Analysis a = analyze(u);
  std::vector<const Clause*> clauses = collectClauses(u);
  std::vector<std::vector<std::vector<Label>>> perClause;
  for (const Clause* c : clauses) perClause.push_back(clauseOrders(*c, a.closure));

  std::vector<Scoping> out;
  Scoping cur;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == clauses.size()) {
      out.push_back(cur);
      return;
    }
    for (const auto& perm : perClause[i]) {
      cur.perClause[clauses[i]->upper] = perm;
      rec(i + 1);
    }
    cur.perClause.erase(clauses[i]->upper);
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Type isomorphism

namespace {

struct IsoCtx {
  const Closure& ca;
  const Closure& cb;
  bool compareOrder;
  bool collectAll;
  std::vector<Renaming> found;
};

bool clauseIso(const Clause& a, const Clause& b, IsoCtx& ctx, Renaming& r);

// Closure edges among the mapped labels must agree in both directions.
bool edgesAgree(IsoCtx& ctx, const Renaming& r) {
  if (!ctx.compareOrder) return true;
  for (const auto& [xa, xb] : r.labelMap)
    for (const auto& [ya, yb] : r.labelMap) {
      if (!ctx.ca.has(xa) || !ctx.ca.has(ya)) continue;
      if (ctx.ca.leq(xa, ya) != ctx.cb.leq(xb, yb)) return false;
    }
  return true;
}

bool matchNodes(const Clause& a, const Clause& b, IsoCtx& ctx, Renaming& r, size_t i) {
  if (i == a.nodes.size()) {
    if (a.subs.size() != b.subs.size()) return false;
    // nested clauses: hosts must correspond, then recurse
    std::vector<bool> used(b.subs.size(), false);
    std::function<bool(size_t)> matchSubs = [&](size_t k) -> bool {
      if (k == a.subs.size()) {
        if (!edgesAgree(ctx, r)) return false;
        if (ctx.collectAll) {
          ctx.found.push_back(r);
          return false;  // keep searching
        }
        return true;
      }
      auto hostIt = r.labelMap.find(a.subs[k].host);
      if (hostIt == r.labelMap.end()) return false;
      for (size_t m = 0; m < b.subs.size(); ++m) {
        if (used[m] || b.subs[m].host != hostIt->second) continue;
        Renaming save = r;
        used[m] = true;
        if (clauseIso(a.subs[k].get(), b.subs[m].get(), ctx, r) && matchSubs(k + 1)) return true;
        used[m] = false;
        r = save;
      }
      return false;
    };
    return matchSubs(0);
  }
  const Node& na = a.nodes[i];
  for (const Node& nb : b.nodes) {
    bool taken = false;
    for (const auto& [k, v] : r.labelMap)
      if (v == nb.label) taken = true;
    if (taken) continue;
    if (na.kind != nb.kind || na.quant != nb.quant) continue;
    if (na.var.has_value() != nb.var.has_value()) continue;
    Renaming save = r;
    r.labelMap[na.label] = nb.label;
    r.labelMap[na.res] = nb.res;
    r.labelMap[na.scope] = nb.scope;
    if (matchNodes(a, b, ctx, r, i + 1)) return true;
    r = save;
  }
  return false;
}

bool clauseIso(const Clause& a, const Clause& b, IsoCtx& ctx, Renaming& r) {
  if (a.nodes.size() != b.nodes.size()) return false;
  r.labelMap[a.upper] = b.upper;
  r.labelMap[a.lower] = b.lower;
  return matchNodes(a, b, ctx, r, 0);
}

}  // namespace

std::optional<Renaming> sameType(const Udrs& a, const Udrs& b) {
  Analysis aa = analyze(a);
  Analysis ab = analyze(b);
  IsoCtx ctx{aa.closure, ab.closure, /*compareOrder=*/true, /*collectAll=*/false, {}};
  Renaming r;
  if (clauseIso(a.clause, b.clause, ctx, r)) return r;
  return std::nullopt;
}

std::vector<Renaming> allTypeIsos(const Udrs& a, const Udrs& b, bool compareOrder) {
  Analysis aa = analyze(a);
  Analysis ab = analyze(b);
  IsoCtx ctx{aa.closure, ab.closure, compareOrder, /*collectAll=*/true, {}};
  Renaming r;
  clauseIso(a.clause, b.clause, ctx, r);
  return std::move(ctx.found);
}

std::optional<Renaming> alignContent(const Udrs& a, const Udrs& b) {
  for (const Renaming& iso : allTypeIsos(a, b, /*compareOrder=*/false)) {
    std::optional<Renaming> full = contentIso(a, b, iso, /*compareOrder=*/false);
    if (full) return full;
  }
  return std::nullopt;
}

namespace {

// Backtracking extension of the referent map, box by box.
bool extendRefs(const std::vector<std::pair<const Box*, const Box*>>& boxes, size_t i,
                const Udrs& a, const Udrs& b, Renaming& r, bool compareOrder) {
  if (i == boxes.size()) return equalUnder(a, b, r, compareOrder);
  const Box* ba = boxes[i].first;
  const Box* bb = boxes[i].second;
  if (ba->universe.size() != bb->universe.size()) return false;
  std::vector<std::string> perm = bb->universe;
  std::sort(perm.begin(), perm.end());
  do {
    Renaming save = r;
    bool fine = true;
    for (size_t k = 0; k < ba->universe.size(); ++k) {
      auto it = r.refMap.find(ba->universe[k]);
      if (it != r.refMap.end() && it->second != perm[k]) {
        fine = false;
        break;
      }
      r.refMap[ba->universe[k]] = perm[k];
    }
    if (fine && extendRefs(boxes, i + 1, a, b, r, compareOrder)) return true;
    r = save;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

void pairBoxes(const Clause& a, const Clause& b, const Renaming& iso,
               std::vector<std::pair<const Box*, const Box*>>& out) {
  auto find = [&](const Clause& c, const Label& l) -> const Node* { return c.findNode(l); };
  for (const Node& na : a.nodes) {
    auto it = iso.labelMap.find(na.label);
    if (it == iso.labelMap.end()) continue;
    const Node* nb = find(b, it->second);
    if (nb) out.emplace_back(&na.resBox, &nb->resBox);
  }
  out.emplace_back(&a.base, &b.base);
  for (const SubClause& sa : a.subs) {
    auto hostIt = iso.labelMap.find(sa.host);
    if (hostIt == iso.labelMap.end()) continue;
    auto upIt = iso.labelMap.find(sa.get().upper);
    for (const SubClause& sb : b.subs)
      if (sb.host == hostIt->second && upIt != iso.labelMap.end() &&
          sb.get().upper == upIt->second)
        pairBoxes(sa.get(), sb.get(), iso, out);
  }
}

}  // namespace

std::optional<Renaming> contentIso(const Udrs& a, const Udrs& b, const Renaming& typeIso,
                                   bool compareOrder) {
  // clause universes first
  std::vector<std::pair<const Box*, const Box*>> boxes;
  // upper-box universes are matched through Box pairs too
  static thread_local std::vector<Box> scratch;
  scratch.clear();
  scratch.reserve(collectClauses(a).size() * 2 + 2);
  std::vector<const Clause*> cas = collectClauses(a);
  for (const Clause* ca : cas) {
    auto it = typeIso.labelMap.find(ca->upper);
    if (it == typeIso.labelMap.end()) return std::nullopt;
    const Clause* cb = nullptr;
    for (const Clause* c : collectClauses(b))
      if (c->upper == it->second) cb = c;
    if (!cb) return std::nullopt;
    scratch.push_back(Box{ca->universe, {}});
    scratch.push_back(Box{cb->universe, {}});
    boxes.emplace_back(&scratch[scratch.size() - 2], &scratch[scratch.size() - 1]);
  }
  pairBoxes(a.clause, b.clause, typeIso, boxes);
  Renaming r = typeIso;
  if (extendRefs(boxes, 0, a, b, r, compareOrder)) return r;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Correlation registry

const Registry::Group* Registry::find(const std::string& tag) const {
  for (const Group& g : groups)
    if (g.tag == tag) return &g;
  return nullptr;
}

namespace {

Udrs subtreeOf(const Udrs& u, const Label& top) {
  if (top == u.top) return u;
  return subUdrs(u, top);
}

void collectSites(const std::vector<Udrs>& entries,
                  std::map<std::string, std::vector<Site>>& sites) {
  for (size_t i = 0; i < entries.size(); ++i) {
    const Udrs& u = entries[i];
    if (u.index) sites[*u.index].push_back({static_cast<int>(i), u.top});
    for (const Clause* c : collectClauses(u)) {
      if (c->index && c->upper != u.top)
        sites[*c->index].push_back({static_cast<int>(i), c->upper});
    }
  }
}

}  // namespace

Registry buildRegistry(const std::vector<Udrs>& entries) {
  std::map<std::string, std::vector<Site>> sites;
  collectSites(entries, sites);
  Registry reg;
  for (auto& [tag, ss] : sites) {
    Registry::Group g;
    g.tag = tag;
    g.sites = ss;
    Udrs ref = subtreeOf(entries[ss[0].entry], ss[0].subtreeTop);
    for (const Site& s : ss) {
      Udrs sub = subtreeOf(entries[s.entry], s.subtreeTop);
      std::optional<Renaming> iso = sameType(ref, sub);
      if (!iso)
        throw ConfigError("coindexed structures are not of the same type (tag '" + tag + "')");
      g.align.push_back(*iso);
    }
    reg.groups.push_back(std::move(g));
  }
  return reg;
}

// ---------------------------------------------------------------------------
// Assignments

std::vector<Assignment> allAssignments(const std::vector<Udrs>& entries) {
  std::vector<std::vector<Scoping>> per;
  for (const Udrs& u : entries) per.push_back(enumerateScopings(u));
  std::vector<Assignment> out;
  Assignment cur;
  cur.perEntry.resize(entries.size());
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == entries.size()) {
      out.push_back(cur);
      return;
    }
    for (const Scoping& s : per[i]) {
      cur.perEntry[i] = s;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

bool respects(const Assignment& a, const std::vector<Udrs>& entries, const Registry::Group& g) {
  const Site& ref = g.sites[0];
  Udrs refSub = subtreeOf(entries[ref.entry], ref.subtreeTop);
  std::vector<const Clause*> refClauses = collectClauses(refSub);
  for (size_t k = 1; k < g.sites.size(); ++k) {
    const Site& st = g.sites[k];
    const Renaming& al = g.align[k];
    for (const Clause* rc : refClauses) {
      auto rIt = a.perEntry[ref.entry].perClause.find(rc->upper);
      auto mappedUpper = al.labelMap.find(rc->upper);
      if (rIt == a.perEntry[ref.entry].perClause.end() || mappedUpper == al.labelMap.end())
        continue;
      auto sIt = a.perEntry[st.entry].perClause.find(mappedUpper->second);
      if (sIt == a.perEntry[st.entry].perClause.end()) return false;
      std::vector<Label> expected;
      for (const Label& l : rIt->second) {
        auto m = al.labelMap.find(l);
        if (m == al.labelMap.end()) return false;
        expected.push_back(m->second);
      }
      if (expected != sIt->second) return false;
    }
  }
  return true;
}

std::vector<Assignment> correlatedAssignments(const std::vector<Udrs>& entries,
                                              const Registry& reg) {
  std::vector<Assignment> all = allAssignments(entries);
  std::vector<Assignment> out;
  for (const Assignment& a : all) {
    bool ok = true;
    for (const Registry::Group& g : reg.groups)
      if (!respects(a, entries, g)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(a);
  }
  return out;
}

}  // namespace udrs
