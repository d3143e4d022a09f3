#include "udrs/sexpr.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace udrs {

static const std::string kEmpty;

const std::string& Sexpr::head() const {
  if (!isList || items.empty() || items[0].isList) return kEmpty;
  return items[0].sym;
}

const Sexpr& Sexpr::at(size_t i) const {
  if (i >= items.size())
    throw ParseError("missing element " + std::to_string(i) + " in (" + head() + " ...)", line, col);
  return items[i];
}

const std::string& Sexpr::symAt(size_t i) const {
  const Sexpr& e = at(i);
  if (e.isList) throw ParseError("expected symbol in (" + head() + " ...)", e.line, e.col);
  return e.sym;
}

const Sexpr* Sexpr::keyword(const std::string& kw) const {
  for (size_t i = 0; i + 1 < items.size(); ++i)
    if (items[i].isSym(kw)) return &items[i + 1];
  return nullptr;
}

namespace {

struct Reader {
  const std::string& s;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Reader(const std::string& s) : s(s) {}

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  char get() {
    char c = s[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }

  void skipSpace() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {  // comment to end of line
        while (!eof() && peek() != '\n') get();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else {
        return;
      }
    }
  }

  Sexpr read() {
    skipSpace();
    if (eof()) throw ParseError("unexpected end of input", line, col);
    int l = line, c = col;
    if (peek() == '(') {
      get();
      Sexpr e = Sexpr::list();
      e.line = l;
      e.col = c;
      while (true) {
        skipSpace();
        if (eof()) throw ParseError("unterminated list", l, c);
        if (peek() == ')') {
          get();
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (peek() == ')') throw ParseError("unexpected ')'", line, col);
    Sexpr e;
    e.line = l;
    e.col = c;
    while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != '(' &&
           peek() != ')' && peek() != ';')
      e.sym.push_back(get());
    return e;
  }
};

}  // namespace

Sexpr parseSexpr(const std::string& text) {
  Reader r(text);
  Sexpr e = r.read();
  r.skipSpace();
  if (!r.eof()) throw ParseError("trailing input after expression", r.line, r.col);
  return e;
}

std::vector<Sexpr> parseSexprs(const std::string& text) {
  Reader r(text);
  std::vector<Sexpr> out;
  r.skipSpace();
  while (!r.eof()) {
    out.push_back(r.read());
    r.skipSpace();
  }
  return out;
}

std::string printSexpr(const Sexpr& e) {
  if (!e.isList) return e.sym;
  std::string out = "(";
  for (size_t i = 0; i < e.items.size(); ++i) {
    if (i) out += ' ';
    out += printSexpr(e.items[i]);
  }
  out += ')';
  return out;
}

std::string printSexprPretty(const Sexpr& e, int indent) {
  std::string flat = printSexpr(e);
  if (!e.isList || static_cast<int>(flat.size()) + indent <= 100) return flat;
  std::string pad(indent + 2, ' ');
  std::string out = "(";
  bool first = true;
  size_t i = 0;
  // keep the head and any leading :keyword pairs on the first line
  while (i < e.items.size() && !e.items[i].isList) {
    if (!first) out += ' ';
    out += e.items[i].sym;
    first = false;
    ++i;
    if (i < e.items.size() && !e.items[i].isList && !e.items[i - 1].sym.empty() &&
        e.items[i - 1].sym[0] == ':') {
      out += ' ' + e.items[i].sym;
      ++i;
    }
  }
  for (; i < e.items.size(); ++i) {
    out += '\n' + pad;
    out += printSexprPretty(e.items[i], indent + 2);
  }
  out += ')';
  return out;
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace udrs
