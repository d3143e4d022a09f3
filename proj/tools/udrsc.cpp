// udrsc : command-line front end
//
// Exit codes: 0 proved/holds, 1 refuted/fails, 2 exhausted/inapplicable,
// 3 input error. Verdicts go to standard output as s-expressions.
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "udrs/engine.hpp"
#include "udrs/io.hpp"

using namespace udrs;

namespace {

constexpr int kOk = 0, kFails = 1, kInapplicable = 2, kInputError = 3;

Udrs loadUdrs(const std::string& path) { return parseUdrsText(readFile(path)); }

Database loadDb(const std::string& path) { return parseDatabaseText(readFile(path)); }

LexTheory loadLex(const std::string& path, const RuleOptions& ropts) {
  if (path.empty()) return LexTheory::empty();
  return LexTheory::fromRaw(parseLexText(readFile(path)), ropts);
}

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

std::vector<FiniteModel> loadModelDir(const std::string& dir) {
  std::vector<FiniteModel> out;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back(toFiniteModel(parseModelText(readFile(f.string()))));
  return out;
}

Sexpr scopingSexpr(const Scoping& s) {
  Sexpr e = Sexpr::list({Sexpr::atom("scoping")});
  for (const auto& [cu, perm] : s.perClause) {
    Sexpr c = Sexpr::list({Sexpr::atom("clause"), Sexpr::atom(cu)});
    Sexpr p = Sexpr::list();
    for (const Label& l : perm) p.items.push_back(Sexpr::atom(l));
    c.items.push_back(std::move(p));
    e.items.push_back(std::move(c));
  }
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scope-underspecified representation calculus"};
  app.require_subcommand(1);
  app.fallthrough();

  int bound = 4, budget = 8, fewK = 2;
  app.add_option("--bound", bound, "model domain bound")->capture_default_str();
  app.add_option("--budget", budget, "rule application budget")->capture_default_str();
  app.add_option("--few-k", fewK, "threshold for the 'few' determiner")->capture_default_str();

  std::string lexPath, modelsDir, tracePath, relName = "r8";

  auto* readings = app.add_subcommand("readings", "enumerate the readings of a structure");
  std::string readingsFile;
  readings->add_option("file", readingsFile)->required();

  auto* validateCmd = app.add_subcommand("validate", "check well-formedness");
  std::string validateFile;
  validateCmd->add_option("file", validateFile)->required();

  auto* polarityCmd = app.add_subcommand("polarity", "print the polarity marking");
  std::string polarityFile;
  polarityCmd->add_option("file", polarityFile)->required();

  auto* entailCmd = app.add_subcommand("entail", "decide a consequence relation");
  std::string entailDb, entailGoal;
  entailCmd->add_option("--rel", relName, "r1|r3|r4|r8")->capture_default_str();
  entailCmd->add_option("db", entailDb)->required();
  entailCmd->add_option("goal", entailGoal)->required();
  entailCmd->add_option("--models", modelsDir, "directory of explicit model files");
  entailCmd->add_option("--lex", lexPath, "lexicon file");

  auto* proveCmd = app.add_subcommand("prove", "search for a derivation");
  std::string proveDb, proveGoal;
  proveCmd->add_option("db", proveDb)->required();
  proveCmd->add_option("goal", proveGoal)->required();
  proveCmd->add_option("--trace", tracePath, "write the trace here");
  proveCmd->add_option("--lex", lexPath, "lexicon file");

  auto* diffCmd = app.add_subcommand("diff", "narrow entries against negated material");
  std::string diffDb;
  diffCmd->add_option("db", diffDb)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kInputError : kOk;
  }

  try {
    DeterminerTable table = DeterminerTable::defaults(fewK);
    EngineOptions opts;
    opts.bound = bound;
    opts.budget = budget;
    opts.table = table;

    if (readings->parsed()) {
      Udrs u = loadUdrs(readingsFile);
      ValidationReport vr = validate(u);
      if (!vr.ok()) {
        std::cout << "(invalid " << vr.violations.size() << ")\n" << vr.str();
        return kFails;
      }
      std::vector<Scoping> ss = enumerateScopings(u);
      Sexpr out = Sexpr::list({Sexpr::atom("readings"), Sexpr::atom(":count"),
                               Sexpr::atom(std::to_string(ss.size()))});
      for (const Scoping& s : ss) {
        Sexpr r = scopingSexpr(s);
        Sexpr resolved = parseSexpr(printSDrs(resolveReading(u, s)));
        r.items.push_back(std::move(resolved));
        out.items.push_back(std::move(r));
      }
      std::cout << printSexprPretty(out) << "\n";
      return kOk;
    }

    if (validateCmd->parsed()) {
      Udrs u = loadUdrs(validateFile);
      ValidationReport vr = validate(u);
      if (vr.ok()) {
        std::cout << "(valid)\n";
        return kOk;
      }
      Sexpr out = Sexpr::list({Sexpr::atom("invalid")});
      for (const Violation& v : vr.violations)
        out.items.push_back(
            Sexpr::list({Sexpr::atom("at"), Sexpr::atom(v.where), Sexpr::atom("\"" + v.what + "\"")}));
      std::cout << printSexprPretty(out) << "\n";
      return kFails;
    }

    if (polarityCmd->parsed()) {
      Udrs u = loadUdrs(polarityFile);
      ValidationReport vr = validate(u);
      if (!vr.ok()) {
        std::cout << vr.str();
        return kFails;
      }
      PolarityMap pm = polarity(u, table);
      Sexpr out = Sexpr::list({Sexpr::atom("polarity")});
      for (const auto& [l, p] : pm)
        out.items.push_back(Sexpr::list({Sexpr::atom(l), Sexpr::atom(polName(p))}));
      std::cout << printSexprPretty(out) << "\n";
      return kOk;
    }

    if (entailCmd->parsed()) {
      Database db = loadDb(entailDb);
      Udrs goal = loadUdrs(entailGoal);
      RuleOptions ropts;
      ropts.bound = bound;
      ropts.table = table;
      LexTheory lex = loadLex(lexPath, ropts);
      EntailOptions eo;
      eo.bound = bound;
      eo.constraints = lex.modelConstraints();
      eo.table = table;
      if (!modelsDir.empty()) eo.explicitModels = loadModelDir(modelsDir);
      EntailVerdict v = entails(db, goal, relationFromName(relName), eo);
      Sexpr out = Sexpr::list({Sexpr::atom("verdict"), Sexpr::atom(v.holds ? "holds" : "fails"),
                               Sexpr::atom(":relation"), Sexpr::atom(relationName(v.rel)),
                               Sexpr::atom(":bound"), Sexpr::atom(std::to_string(v.bound))});
      if (v.witness) {
        Sexpr w = Sexpr::list({Sexpr::atom("witness")});
        Sexpr prem = Sexpr::list({Sexpr::atom("premises")});
        for (const Scoping& s : v.witness->premise.perEntry)
          prem.items.push_back(scopingSexpr(s));
        w.items.push_back(std::move(prem));
        w.items.push_back(
            Sexpr::list({Sexpr::atom("goal"), scopingSexpr(v.witness->goal)}));
        if (!v.witness->countermodel.domain.empty())
          w.items.push_back(parseSexpr(v.witness->countermodel.str()));
        out.items.push_back(std::move(w));
      }
      std::cout << printSexprPretty(out) << "\n";
      return v.holds ? kOk : kFails;
    }

    if (proveCmd->parsed()) {
      Database db = loadDb(proveDb);
      Udrs goal = loadUdrs(proveGoal);
      RuleOptions ropts;
      ropts.bound = bound;
      ropts.table = table;
      opts.lex = loadLex(lexPath, ropts);
      ProofTrace trace = prove(db, goal, opts);
      if (!tracePath.empty()) writeFile(tracePath, trace.str() + "\n");
      Sexpr out = Sexpr::list(
          {Sexpr::atom("result"),
           Sexpr::atom(trace.verdict == ProofTrace::Proved    ? "proved"
                       : trace.verdict == ProofTrace::Refuted ? "refuted"
                                                              : "exhausted"),
           Sexpr::atom(":steps"), Sexpr::atom(std::to_string(trace.steps.size())),
           Sexpr::atom(":bound"), Sexpr::atom(std::to_string(bound))});
      std::cout << printSexprPretty(out) << "\n";
      switch (trace.verdict) {
        case ProofTrace::Proved: return kOk;
        case ProofTrace::Refuted: return kFails;
        case ProofTrace::Exhausted: return kInapplicable;
      }
    }

    if (diffCmd->parsed()) {
      Database db = loadDb(diffDb);
      RuleOptions ropts;
      ropts.bound = bound;
      ropts.table = table;
      for (size_t i = 0; i < db.entries.size(); ++i)
        for (size_t j = 0; j < db.entries.size(); ++j) {
          if (i == j) continue;
          try {
            DiffOutcome d = diff(db, (int)i, (int)j, ropts);
            if (d.kind == DiffOutcome::Narrowed) {
              std::cout << "(narrowed :entry " << i << ")\n" << printUdrs(*d.narrowed) << "\n";
              return kOk;
            }
            if (d.kind == DiffOutcome::Inconsistent) {
              std::cout << "(inconsistent :entry " << i << " :against " << j << ")\n";
              return kFails;
            }
            if (d.kind == DiffOutcome::ReadingSet) {
              Sexpr out = Sexpr::list({Sexpr::atom("narrowed-readings"), Sexpr::atom(":flag"),
                                       Sexpr::atom("not-order-definable")});
              for (const auto& r : d.readings) {
                Sexpr p = Sexpr::list();
                for (const Label& l : r) p.items.push_back(Sexpr::atom(l));
                out.items.push_back(std::move(p));
              }
              std::cout << printSexprPretty(out) << "\n";
              return kOk;
            }
          } catch (const RuleRefused&) {
          }
        }
      std::cout << "(no-difference-applicable)\n";
      return kInapplicable;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kInputError;
  } catch (const RuleRefused& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kInapplicable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
