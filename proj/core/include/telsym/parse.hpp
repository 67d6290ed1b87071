#pragma once

#include "telsym/expr.hpp"

#include <stdexcept>
#include <string>

namespace telsym {

struct ParseError : std::runtime_error {
  size_t offset;
  ParseError(const std::string& msg, size_t off)
      : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"),
        offset(off) {}
};

// Parses the expression grammar: identifiers, integer literals, + - * / ^,
// parentheses, function application, builtin functions (exp ln sin cos tan
// cot sinh cosh tanh coth atan sqrt abs), total derivative operators dt(...)
// and dx(...), jet variables (u, u_t, u_xx, ...), and atom derivative
// suffixes (f_x, H_u).
Expr parse(const std::string& text);

} // namespace telsym
