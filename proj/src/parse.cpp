#include "sforge/parse.hpp"

#include <cctype>

namespace sforge {

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
};

struct Parser {
  Lexer lex;
  const std::set<std::string>& allowed;

  Expr parse_expr() {
    Expr e = parse_term();
    while (true) {
      char c = lex.peek();
      if (c == '+') {
        ++lex.pos;
        e = add(e, parse_term());
      } else if (c == '-') {
        ++lex.pos;
        e = sub(e, parse_term());
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    while (true) {
      char c = lex.peek();
      if (c == '*') {
        ++lex.pos;
        e = mul(e, parse_factor());
      } else if (c == '/') {
        ++lex.pos;
        e = div(e, parse_factor());
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    Expr b = parse_base();
    if (lex.peek() == '^') {
      ++lex.pos;
      Expr e = parse_factor();
      return pow_general(b, e);
    }
    return b;
  }

  Expr parse_base() {
    char c = lex.peek();
    if (c == '-') {
      ++lex.pos;
      return neg(parse_base());
    }
    if (c == '(') {
      ++lex.pos;
      Expr e = parse_expr();
      if (!lex.consume(')')) throw ParseError(lex.pos, "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    if (c == '\0') throw ParseError(lex.pos, "unexpected end of expression");
    throw ParseError(lex.pos, std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    std::size_t start = lex.pos;
    while (lex.pos < lex.text.size() && std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
      ++lex.pos;
    Rational value(lex.text.substr(start, lex.pos - start));
    if (lex.pos < lex.text.size() && lex.text[lex.pos] == '.') {
      ++lex.pos;
      std::size_t fstart = lex.pos;
      while (lex.pos < lex.text.size() &&
             std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
        ++lex.pos;
      if (lex.pos == fstart) throw ParseError(lex.pos, "expected digits after decimal point");
      std::string frac = lex.text.substr(fstart, lex.pos - fstart);
      Rational den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      value += Rational(frac) / den;
    }
    return num(value);
  }

  Expr parse_ident() {
    std::size_t start = lex.pos;
    while (lex.pos < lex.text.size() &&
           (std::isalnum(static_cast<unsigned char>(lex.text[lex.pos])) ||
            lex.text[lex.pos] == '_'))
      ++lex.pos;
    std::string name = lex.text.substr(start, lex.pos - start);
    if (lex.peek() == '(') {
      ++lex.pos;
      std::vector<Expr> args;
      args.push_back(parse_expr());
      while (lex.consume(',')) args.push_back(parse_expr());
      if (!lex.consume(')')) throw ParseError(lex.pos, "expected ')'");
      if (args.size() != 1)
        throw ParseError(start, "function '" + name + "' takes one argument");
      const Expr& a = args[0];
      if (name == "exp") return exp_e(a);
      if (name == "ln") return ln_e(a);
      if (name == "sin") return sin_e(a);
      if (name == "cos") return cos_e(a);
      if (name == "tan") return tan_e(a);
      if (name == "sqrt") return sqrt_e(a);
      throw ParseError(start, "unknown function '" + name + "'");
    }
    if (name == "pi") return pi_const();
    if (name == "e") return exp_e(num(1));
    if (!allowed.count(name)) throw ParseError(start, "unknown identifier '" + name + "'");
    return sym(name);
  }
};

}  // namespace

Expr parse_expression(const std::string& text, const std::set<std::string>& allowed_symbols) {
  Parser p{Lexer{text}, allowed_symbols};
  Expr e = p.parse_expr();
  p.lex.skip_ws();
  if (p.lex.pos != text.size())
    throw ParseError(p.lex.pos, "trailing input after expression");
  return e;
}

}  // namespace sforge
