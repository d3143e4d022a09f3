#include "udrs/polarity.hpp"

namespace udrs {

Pol flip(Pol p) {
  switch (p) {
    case Pol::Positive: return Pol::Negative;
    case Pol::Negative: return Pol::Positive;
    case Pol::Undefined: return Pol::Undefined;
  }
  return Pol::Undefined;
}

std::string polName(Pol p) {
  switch (p) {
    case Pol::Positive: return "positive";
    case Pol::Negative: return "negative";
    case Pol::Undefined: return "undefined";
  }
  return "?";
}

namespace {

struct Marker {
  const DeterminerTable& dt;
  const LabelIndex& ix;
  const Closure& cl;
  PolarityMap out;

  // negations and downward determiners flip; a determiner without a table
  // entry gives no parity at all
  enum Effect { Keeps, Flips, Unknown };
  Effect effect(const Node& n) const {
    if (n.isNeg()) return Flips;
    const DeterminerInfo* d = dt.find(n.quant);
    if (!d || d->right == Mono::None) return Unknown;
    return d->right == Mono::Down ? Flips : Keeps;
  }

  // Parity of the polarity-changing mates forced above `member`; Undefined
  // when a changing mate floats.
  Pol memberPol(const Clause& c, const Label& member, const Label& memberScope, Pol upper) {
    if (upper == Pol::Undefined) return Pol::Undefined;
    int flips = 0;
    for (const Node& y : c.nodes) {
      if (y.label == member) continue;
      bool alwaysAbove = cl.leq(member, y.scope);
      bool alwaysBelow = !memberScope.empty() && cl.leq(y.label, memberScope);
      if (alwaysAbove) {
        Effect e = effect(y);
        if (e == Unknown) return Pol::Undefined;
        if (e == Flips) ++flips;
      } else if (!alwaysBelow) {
        if (effect(y) != Keeps) return Pol::Undefined;
      }
    }
    return flips % 2 ? flip(upper) : upper;
  }

  void markBoxAndSubs(const Label& box, Pol p) {
    out[box] = p;
    if (auto it = ix.subsAt.find(box); it != ix.subsAt.end())
      for (const Clause* sub : it->second) markClause(*sub, p);
  }

  void markClause(const Clause& c, Pol upper) {
    out[c.upper] = upper;
    if (auto it = ix.subsAt.find(c.upper); it != ix.subsAt.end())
      for (const Clause* sub : it->second) markClause(*sub, upper);

    for (const Node& n : c.nodes) {
      Pol p = memberPol(c, n.label, n.scope, upper);
      out[n.label] = p;
      if (n.isNeg()) {
        markBoxAndSubs(n.res, flip(p));
      } else {
        const DeterminerInfo* d = dt.find(n.quant);
        Pol resPol = Pol::Undefined;
        Pol scopePol = Pol::Undefined;
        if (d) {
          switch (d->pers) {
            case Pers::AntiPersistent: resPol = flip(p); break;
            case Pers::Persistent: resPol = p; break;
            case Pers::None: resPol = Pol::Undefined; break;
          }
          switch (d->right) {
            case Mono::Up: scopePol = p; break;
            case Mono::Down: scopePol = flip(p); break;
            case Mono::None: scopePol = Pol::Undefined; break;
          }
        }
        markBoxAndSubs(n.res, resPol);
        markBoxAndSubs(n.scope, scopePol);
      }
    }
    // the verb box sits below every node of its clause
    Pol lowerPol = memberPol(c, c.lower, "", upper);
    if (c.lower != c.upper) markBoxAndSubs(c.lower, lowerPol);
  }
};

}  // namespace

PolarityMap polarity(const Udrs& u, const DeterminerTable& dt) {
  Analysis a = analyze(u);
  Marker m{dt, a.ix, a.closure, {}};
  m.markClause(u.clause, Pol::Positive);
  return std::move(m.out);
}

}  // namespace udrs
