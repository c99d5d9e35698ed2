#ifndef SFORGE_PARSE_HPP
#define SFORGE_PARSE_HPP

#include "sforge/expr.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace sforge {

struct ParseError : std::runtime_error {
  std::size_t position;  // byte offset into the input text
  ParseError(std::size_t pos, const std::string& msg)
      : std::runtime_error(msg), position(pos) {}
};

/// Parses the scalar expression grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' factor)?
///   base   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')'
///           | '(' expr ')' | '-' base
/// Builtin functions: exp, ln, sin, cos, tan, sqrt. Builtin constants: e, pi.
/// Every other identifier must be listed in allowed_symbols.
Expr parse_expression(const std::string& text, const std::set<std::string>& allowed_symbols);

}  // namespace sforge

#endif
