#include "udrs/io.hpp"

#include <set>

namespace udrs {

namespace {

ParseError err(const Sexpr& e, const std::string& msg) { return ParseError(msg, e.line, e.col); }

void expectHead(const Sexpr& e, const std::string& h) {
  if (!e.isList || e.head() != h) throw err(e, "expected (" + h + " ...)");
}

// First pass: every VAR declared by any universe of the file form.
void collectVars(const Sexpr& e, std::set<std::string>& vars) {
  if (!e.isList) return;
  if (e.head() == "drs" && e.size() >= 2 && e.at(1).isList) {
    for (const Sexpr& v : e.at(1).items) vars.insert(v.sym);
  } else if (e.head() == "univ") {
    for (size_t i = 1; i < e.size(); ++i) vars.insert(e.symAt(i));
  } else if (e.head() == "quant" && e.size() >= 3) {
    vars.insert(e.symAt(2));
  }
  for (const Sexpr& x : e.items) collectVars(x, vars);
}

struct Ctx {
  std::set<std::string> vars;
  // deferred scope-of references: resolved once all nodes are known
  struct PendingEdge {
    Label lo;
    std::string form;  // "", "scope", "res"
    Label ref;
  };

  Term term(const Sexpr& e) const {
    if (e.isList) throw err(e, "expected a term");
    return vars.count(e.sym) ? Term{Term::Var, e.sym} : Term{Term::Const, e.sym};
  }

  Atom atom(const Sexpr& e) const {
    if (!e.isList || e.items.empty()) throw err(e, "expected an atom");
    Atom a;
    a.pred = e.symAt(0);
    if (e.size() < 2) throw err(e, "atom needs at least one argument");
    for (size_t i = 1; i < e.size(); ++i) a.args.push_back(term(e.at(i)));
    return a;
  }

  Box drs(const Sexpr& e) const {
    expectHead(e, "drs");
    Box b;
    const Sexpr& us = e.at(1);
    if (!us.isList) throw err(us, "expected a universe list");
    for (const Sexpr& v : us.items) b.universe.push_back(v.sym);
    const Sexpr& as = e.at(2);
    if (!as.isList) throw err(as, "expected an atom list");
    for (const Sexpr& a : as.items) b.atoms.push_back(atom(a));
    return b;
  }

  Clause clause(const Sexpr& e) const;
};

Clause Ctx::clause(const Sexpr& e) const {
  expectHead(e, "clause");
  Clause c;
  const Sexpr* up = e.keyword(":upper");
  const Sexpr* lo = e.keyword(":lower");
  if (!up || up->isList) throw err(e, "clause needs :upper LABEL");
  if (!lo || lo->isList) throw err(e, "clause needs :lower LABEL");
  c.upper = up->sym;
  c.lower = lo->sym;
  if (const Sexpr* ix = e.keyword(":index")) {
    if (ix->isList) throw err(*ix, ":index needs a name");
    c.index = ix->sym;
  }

  bool sawBase = false, sawOrd = false;
  std::vector<Ctx::PendingEdge> pending;
  for (size_t i = 1; i < e.size(); ++i) {
    const Sexpr& item = e.at(i);
    if (!item.isList) {  // keyword tokens handled above
      if (!item.sym.empty() && item.sym[0] == ':') ++i;
      continue;
    }
    const std::string& h = item.head();
    if (h == "univ") {
      for (size_t k = 1; k < item.size(); ++k) c.universe.push_back(item.symAt(k));
    } else if (h == "comp") {
      const Sexpr* lab = item.keyword(":label");
      if (!lab || lab->isList) throw err(item, "comp needs :label LABEL");
      const Sexpr& kind = item.items.back();
      if (!kind.isList) throw err(item, "comp needs a kind form");
      if (kind.head() == "quant") {
        Node n;
        n.kind = Node::Quant;
        n.label = lab->sym;
        n.quant = kind.symAt(1);
        n.var = kind.symAt(2);
        const Sexpr* res = kind.keyword(":res");
        const Sexpr* sc = kind.keyword(":scope");
        if (!res || res->isList) throw err(kind, "quant needs :res LABEL");
        if (!sc || sc->isList) throw err(kind, "quant needs :scope LABEL");
        n.res = res->sym;
        n.scope = sc->sym;
        // the drs follows the :res label
        bool found = false;
        for (size_t k = 0; k + 1 < kind.size(); ++k)
          if (kind.at(k).isSym(":res")) {
            if (k + 2 >= kind.size() || !kind.at(k + 2).isList)
              throw err(kind, "quant restrictor needs an inline drs");
            n.resBox = drs(kind.at(k + 2));
            found = true;
          }
        if (!found) throw err(kind, "quant restrictor needs an inline drs");
        c.nodes.push_back(std::move(n));
      } else if (kind.head() == "neg") {
        Node n;
        n.kind = Node::Neg;
        n.label = lab->sym;
        const Sexpr* body = kind.keyword(":body");
        if (!body || body->isList) throw err(kind, "neg needs :body LABEL");
        n.res = n.scope = body->sym;
        c.nodes.push_back(std::move(n));
      } else if (kind.head() == "impl") {
        Node n;
        n.kind = Node::Quant;
        n.label = lab->sym;
        n.quant = "every";
        n.var = std::nullopt;
        const Sexpr* ante = kind.keyword(":ante");
        const Sexpr* cons = kind.keyword(":cons");
        if (!ante || ante->isList) throw err(kind, "impl needs :ante LABEL");
        if (!cons || cons->isList) throw err(kind, "impl needs :cons LABEL");
        n.res = ante->sym;
        n.scope = cons->sym;
        bool found = false;
        for (size_t k = 0; k + 1 < kind.size(); ++k)
          if (kind.at(k).isSym(":ante")) {
            if (k + 2 >= kind.size() || !kind.at(k + 2).isList)
              throw err(kind, "impl antecedent needs an inline drs");
            n.resBox = drs(kind.at(k + 2));
            found = true;
          }
        if (!found) throw err(kind, "impl antecedent needs an inline drs");
        c.nodes.push_back(std::move(n));
      } else if (kind.head() == "sub") {
        SubClause s;
        s.host = lab->sym;
        s.clause.push_back(clause(kind.at(1)));
        c.subs.push_back(std::move(s));
      } else {
        throw err(kind, "unknown component kind '" + kind.head() + "'");
      }
    } else if (h == "base") {
      const Sexpr* lab = item.keyword(":label");
      if (!lab || lab->isList) throw err(item, "base needs :label LABEL");
      if (lab->sym != c.lower)
        throw err(item, "base label differs from the clause :lower label");
      const Sexpr& as = item.items.back();
      if (!as.isList || as.head() == ":label")
        throw err(item, "base needs an atom list");
      for (const Sexpr& a : as.items) c.base.atoms.push_back(atom(a));
      sawBase = true;
    } else if (h == "ord") {
      for (size_t k = 1; k < item.size(); ++k) {
        const Sexpr& ed = item.at(k);
        expectHead(ed, "leq");
        PendingEdge pe;
        pe.lo = ed.symAt(1);
        const Sexpr& rhs = ed.at(2);
        if (rhs.isList) {
          if (rhs.head() != "scope" && rhs.head() != "res")
            throw err(rhs, "expected LABEL, (scope LABEL) or (res LABEL)");
          pe.form = rhs.head();
          pe.ref = rhs.symAt(1);
        } else {
          pe.ref = rhs.sym;
        }
        pending.push_back(pe);
      }
      sawOrd = true;
    } else {
      throw err(item, "unexpected form '" + h + "' inside clause");
    }
  }
  if (!sawBase) throw err(e, "clause needs a base form");
  if (!sawOrd) throw err(e, "clause needs an ord form");

  for (const auto& pe : pending) {
    Label hi = pe.ref;
    if (!pe.form.empty()) {
      const Node* n = c.findNode(pe.ref);
      if (!n) throw err(e, "order edge names unknown node '" + pe.ref + "'");
      hi = pe.form == "scope" ? n->scope : n->res;
    }
    c.ord.push_back({pe.lo, hi});
  }
  return c;
}

}  // namespace

Udrs parseUdrs(const Sexpr& e) {
  expectHead(e, "udrs");
  const Sexpr* top = e.keyword(":top");
  if (!top || top->isList) throw err(e, "udrs needs :top LABEL");
  Udrs u;
  u.top = top->sym;
  if (const Sexpr* ix = e.keyword(":index")) {
    if (ix->isList) throw err(*ix, ":index needs a name");
    u.index = ix->sym;
  }
  const Sexpr& cl = e.items.back();
  if (!cl.isList || cl.head() != "clause") throw err(e, "udrs needs a clause form");
  Ctx ctx;
  collectVars(e, ctx.vars);
  u.clause = ctx.clause(cl);
  if (u.clause.upper != u.top)
    throw err(cl, "outer clause :upper must equal the udrs :top label");
  return u;
}

Udrs parseUdrsText(const std::string& text) { return parseUdrs(parseSexpr(text)); }

namespace {

Sexpr atomSx(const Atom& a) {
  Sexpr e = Sexpr::list();
  e.items.push_back(Sexpr::atom(a.pred));
  for (const Term& t : a.args) e.items.push_back(Sexpr::atom(t.name));
  return e;
}

Sexpr drsSx(const Box& b) {
  Sexpr e = Sexpr::list({Sexpr::atom("drs")});
  Sexpr us = Sexpr::list();
  for (const auto& v : b.universe) us.items.push_back(Sexpr::atom(v));
  Sexpr as = Sexpr::list();
  for (const Atom& a : b.atoms) as.items.push_back(atomSx(a));
  e.items.push_back(us);
  e.items.push_back(as);
  return e;
}

Sexpr clauseSx(const Clause& c) {
  Sexpr e = Sexpr::list({Sexpr::atom("clause"), Sexpr::atom(":upper"), Sexpr::atom(c.upper),
                         Sexpr::atom(":lower"), Sexpr::atom(c.lower)});
  if (c.index) {
    e.items.push_back(Sexpr::atom(":index"));
    e.items.push_back(Sexpr::atom(*c.index));
  }
  if (!c.universe.empty()) {
    Sexpr uv = Sexpr::list({Sexpr::atom("univ")});
    for (const auto& v : c.universe) uv.items.push_back(Sexpr::atom(v));
    e.items.push_back(uv);
  }
  for (const Node& n : c.nodes) {
    Sexpr kind;
    if (n.isNeg()) {
      kind = Sexpr::list({Sexpr::atom("neg"), Sexpr::atom(":body"), Sexpr::atom(n.res)});
    } else if (n.isImplication()) {
      kind = Sexpr::list({Sexpr::atom("impl"), Sexpr::atom(":ante"), Sexpr::atom(n.res),
                          drsSx(n.resBox), Sexpr::atom(":cons"), Sexpr::atom(n.scope)});
    } else {
      kind = Sexpr::list({Sexpr::atom("quant"), Sexpr::atom(n.quant), Sexpr::atom(*n.var),
                          Sexpr::atom(":res"), Sexpr::atom(n.res), drsSx(n.resBox),
                          Sexpr::atom(":scope"), Sexpr::atom(n.scope)});
    }
    e.items.push_back(Sexpr::list(
        {Sexpr::atom("comp"), Sexpr::atom(":label"), Sexpr::atom(n.label), std::move(kind)}));
  }
  for (const SubClause& s : c.subs) {
    Sexpr kind = Sexpr::list({Sexpr::atom("sub"), clauseSx(s.get())});
    e.items.push_back(Sexpr::list(
        {Sexpr::atom("comp"), Sexpr::atom(":label"), Sexpr::atom(s.host), std::move(kind)}));
  }
  Sexpr as = Sexpr::list();
  for (const Atom& a : c.base.atoms) as.items.push_back(atomSx(a));
  e.items.push_back(Sexpr::list(
      {Sexpr::atom("base"), Sexpr::atom(":label"), Sexpr::atom(c.lower), std::move(as)}));
  Sexpr ord = Sexpr::list({Sexpr::atom("ord")});
  for (const OrdEdge& ed : c.ord) {
    Sexpr rhs = Sexpr::atom(ed.hi);
    for (const Node& n : c.nodes) {
      if (!n.isNeg() && n.res == ed.hi) {
        rhs = Sexpr::list({Sexpr::atom("res"), Sexpr::atom(n.label)});
        break;
      }
      if (n.scope == ed.hi) {
        rhs = Sexpr::list({Sexpr::atom("scope"), Sexpr::atom(n.label)});
        break;
      }
    }
    ord.items.push_back(Sexpr::list({Sexpr::atom("leq"), Sexpr::atom(ed.lo), std::move(rhs)}));
  }
  e.items.push_back(std::move(ord));
  return e;
}

}  // namespace

Sexpr udrsToSexpr(const Udrs& u) {
  Sexpr e = Sexpr::list({Sexpr::atom("udrs"), Sexpr::atom(":top"), Sexpr::atom(u.top)});
  if (u.index) {
    e.items.push_back(Sexpr::atom(":index"));
    e.items.push_back(Sexpr::atom(*u.index));
  }
  e.items.push_back(clauseSx(u.clause));
  return e;
}

std::string printUdrs(const Udrs& u) { return printSexprPretty(udrsToSexpr(u)); }

Database parseDatabaseText(const std::string& text) {
  Database db;
  for (const Sexpr& e : parseSexprs(text)) db.add(parseUdrs(e));
  return db;
}

std::string printDatabase(const Database& db) {
  std::string out;
  for (const Udrs& u : db.entries) {
    out += printUdrs(u);
    out += "\n";
  }
  return out;
}

RawModel parseModelText(const std::string& text) {
  Sexpr e = parseSexpr(text);
  expectHead(e, "model");
  RawModel m;
  for (size_t i = 1; i < e.size(); ++i) {
    const Sexpr& item = e.at(i);
    if (!item.isList) throw err(item, "expected a model clause");
    if (item.head() == "domain") {
      for (size_t k = 1; k < item.size(); ++k) m.domain.push_back(item.symAt(k));
    } else if (item.head() == "const") {
      m.constants.emplace_back(item.symAt(1), item.symAt(2));
    } else if (item.head() == "pred") {
      RawModel::Pred p;
      p.name = item.symAt(1);
      try {
        p.arity = std::stoi(item.symAt(2));
      } catch (const std::exception&) {
        throw err(item, "predicate arity must be a number");
      }
      const Sexpr& tl = item.at(3);
      if (!tl.isList) throw err(tl, "expected a tuple list");
      for (const Sexpr& t : tl.items) {
        std::vector<std::string> tuple;
        if (p.arity == 1 && !t.isList) {
          tuple.push_back(t.sym);
        } else {
          if (!t.isList) throw err(t, "expected a tuple");
          for (const Sexpr& x : t.items) tuple.push_back(x.sym);
        }
        if (static_cast<int>(tuple.size()) != p.arity)
          throw err(t, "tuple arity mismatch for predicate " + p.name);
        p.tuples.push_back(std::move(tuple));
      }
      m.preds.push_back(std::move(p));
    } else {
      throw err(item, "unknown model clause '" + item.head() + "'");
    }
  }
  return m;
}

RawLex parseLexText(const std::string& text) {
  Sexpr e = parseSexpr(text);
  expectHead(e, "lex");
  RawLex lx;
  for (size_t i = 1; i < e.size(); ++i) {
    const Sexpr& item = e.at(i);
    if (!item.isList) throw err(item, "expected a lex clause");
    auto pairOf = [&](const Sexpr& it) {
      return std::make_pair(it.symAt(1), it.symAt(2));
    };
    if (item.head() == "hypo")
      lx.hypo.push_back(pairOf(item));
    else if (item.head() == "compl")
      lx.complement.push_back(pairOf(item));
    else if (item.head() == "pi")
      lx.pi.push_back(pairOf(item));
    else if (item.head() == "detrule")
      lx.detrule.push_back(pairOf(item));
    else
      throw err(item, "unknown lex clause '" + item.head() + "'");
  }
  return lx;
}

}  // namespace udrs
