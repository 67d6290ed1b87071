#pragma once

#include "telsym/expr.hpp"
#include "telsym/rewrite.hpp"

namespace telsym {

// Wave-diffusion family  f(x) u_tt = (g(x) H(u) u_x)_x + h(x) K(u) u_x.
// The five structure slots default to opaque function atoms; a concrete
// instance pins some or all of them to closed forms.
struct PDEInstance {
  Expr f, g, h;  // coefficient functions of x
  Expr H, K;     // constitutive functions of u

  static PDEInstance generic();

  Expr lhs() const;         // f u_tt
  Expr flux_rhs() const;    // Dx(g H u_x) + h K u_x, expanded
  Expr delta() const;       // lhs - flux_rhs
  Expr utt_solved() const;  // flux_rhs / f
};

// Bindings that specialize the generic atoms f, g, h, H, K (and through the
// chain rule their derivatives) to this instance's expressions.
Bindings instance_bindings(const PDEInstance& pde);

// Replace every jet carrying two or more t-derivatives using
// u_tt = flux_rhs/f together with its total-derivative consequences.
Expr on_solution_manifold(const Expr& e, const PDEInstance& pde);

enum class CharDir { T, X };

// Replace u_t (dir T) or u_x (dir X), and every higher jet containing that
// derivative, by `rhs` and its total-derivative consequences. `rhs` must be
// free of jets differentiated in the constrained direction.
Expr constrain_derivative(const Expr& e, CharDir dir, const Expr& rhs);

} // namespace telsym
