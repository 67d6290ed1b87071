#pragma once

#include "telsym/expr.hpp"

#include <map>
#include <string>
#include <vector>

namespace telsym {

// Substitution bindings. Keys name a leaf (base variable, parameter, jet) or
// a function atom. Atom bindings give the closed form in the signature
// variables; instances are differentiated per their multi-index, then their
// arguments are substituted (bind-then-differentiate confluence).
// Bindings chain: the right-hand sides are substituted recursively, and a
// cyclic chain raises ExprError.
using Bindings = std::map<std::string, Expr>;

Expr substitute(const Expr& e, const Bindings& b);

// One simultaneous pass: every binding value is taken literally, with no
// chain resolution. The right semantics when the values are coordinate
// expressions of the keys themselves (changes of variables).
Expr substitute_simultaneous(const Expr& e, const Bindings& b);

// Rewrite rule for an atom derivative: d^order A / d(arg)^order equals rhs,
// with rhs written in the atom's signature variables and lower derivatives.
// Higher multi-indices are handled by differentiating rhs.
struct DerivRule {
  std::string atom;
  size_t arg_index = 0;
  int order = 2;
  Expr rhs;
};

// Rewrite rule for a kernel power: kernel^order equals rhs. Factors whose
// rational exponent reaches the order are reduced until it no longer does.
struct PowerRule {
  Expr kernel;  // normal form holding exactly one kernel factor
  int order = 2;
  Expr rhs;
};

struct RuleSet {
  std::vector<DerivRule> deriv;
  std::vector<PowerRule> power;
};

// Applies the rules to a fixed point. Throws if the rules do not terminate
// within an iteration budget.
Expr rewrite(const Expr& e, const RuleSet& rules);

} // namespace telsym
