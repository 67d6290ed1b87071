#pragma once

#include "telsym/expr.hpp"

#include <string>

namespace telsym {

// Renders a normal form in the input grammar; parse(to_text(e)) normal-equals
// e for every expression the engine can produce.
std::string to_text(const Expr& e);
std::string to_text(const Poly& p);

// Display name of an atom kernel including its derivative suffix (f_x, H_uu).
std::string atom_display(const Kernel& k);

} // namespace telsym
