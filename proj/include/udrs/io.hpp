// io.hpp : parsing and printing of the textual formats
//
// Grammar of structure files:
//
//   udrs   := "(" "udrs" ":top" LABEL [":index" IDENT] clause ")"
//   clause := "(" "clause" ":upper" LABEL ":lower" LABEL [":index" IDENT]
//                 ["(" "univ" VAR* ")"] comp* base ord ")"
//   comp   := "(" "comp" ":label" LABEL kind ")"
//   kind   := "(" "quant" NAME VAR ":res" LABEL drs ":scope" LABEL ")"
//           | "(" "neg" ":body" LABEL ")"
//           | "(" "impl" ":ante" LABEL drs ":cons" LABEL ")"
//           | "(" "sub" clause ")"
//   base   := "(" "base" ":label" LABEL "(" atom* ")" ")"
//   drs    := "(" "drs" "(" VAR* ")" "(" atom* ")" ")"
//   atom   := "(" NAME term+ ")" ;  term := VAR | CONST
//   ord    := "(" "ord" edge* ")" ; edge := "(" "leq" LABEL scopeof ")"
//   scopeof:= LABEL | "(" "scope" LABEL ")" | "(" "res" LABEL ")"
//
// A term is a variable exactly when its name is declared in some universe of
// the same structure; other names are constants. The optional "(univ ...)"
// block and the clause-level ":index" extend the baseline grammar: the first
// carries top-box referents created by rules, the second tags a nested clause
// as a correlation site.
#ifndef UDRS_IO_HPP
#define UDRS_IO_HPP

#include <string>
#include <vector>

#include "udrs/core.hpp"
#include "udrs/sexpr.hpp"

namespace udrs {

Udrs parseUdrs(const Sexpr& e);
Udrs parseUdrsText(const std::string& text);
Sexpr udrsToSexpr(const Udrs& u);
std::string printUdrs(const Udrs& u);

// A database file is a sequence of udrs forms.
Database parseDatabaseText(const std::string& text);
std::string printDatabase(const Database& db);

// Model files: (model (domain a b) (const john a)
//                     (pred sleep 1 (a b)) (pred like 2 ((a b))))
struct RawModel {
  std::vector<std::string> domain;
  std::vector<std::pair<std::string, std::string>> constants;
  struct Pred {
    std::string name;
    int arity;
    std::vector<std::vector<std::string>> tuples;
  };
  std::vector<Pred> preds;
};
RawModel parseModelText(const std::string& text);

// Lexicon files: (lex (hypo snore sleep) (compl awake sleep)
//                     (pi a every) (detrule every more-than-half))
struct RawLex {
  std::vector<std::pair<std::string, std::string>> hypo;
  std::vector<std::pair<std::string, std::string>> complement;
  std::vector<std::pair<std::string, std::string>> pi;
  std::vector<std::pair<std::string, std::string>> detrule;
};
RawLex parseLexText(const std::string& text);

}  // namespace udrs

#endif
