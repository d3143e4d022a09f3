// sexpr.hpp : small s-expression reader/writer used by every file format
#ifndef UDRS_SEXPR_HPP
#define UDRS_SEXPR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace udrs {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line(line), col(col) {}
};

// A node is either an atom (symbol token) or a list of nodes.
struct Sexpr {
  bool isList = false;
  std::string sym;
  std::vector<Sexpr> items;
  int line = 0, col = 0;

  static Sexpr atom(std::string s) {
    Sexpr e;
    e.sym = std::move(s);
    return e;
  }
  static Sexpr list(std::vector<Sexpr> xs = {}) {
    Sexpr e;
    e.isList = true;
    e.items = std::move(xs);
    return e;
  }

  bool isSym(const std::string& s) const { return !isList && sym == s; }
  // Head symbol of a list, or "" for atoms/empty lists.
  const std::string& head() const;
  size_t size() const { return items.size(); }
  const Sexpr& at(size_t i) const;

  // Requires the atom at position i; error otherwise.
  const std::string& symAt(size_t i) const;
  // Looks up the value following keyword ":kw"; nullptr when absent.
  const Sexpr* keyword(const std::string& kw) const;
};

// Parses one s-expression from text (must consume all non-space input).
Sexpr parseSexpr(const std::string& text);
// Parses a sequence of top-level s-expressions.
std::vector<Sexpr> parseSexprs(const std::string& text);

std::string printSexpr(const Sexpr& e);
// Pretty printer: lists whose printed width exceeds the margin break per item.
std::string printSexprPretty(const Sexpr& e, int indent = 0);

std::string readFile(const std::string& path);
void writeFile(const std::string& path, const std::string& content);

}  // namespace udrs

#endif
