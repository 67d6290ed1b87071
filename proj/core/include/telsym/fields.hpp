#pragma once

#include "telsym/expr.hpp"
#include "telsym/jet.hpp"

#include <vector>

namespace telsym {

// Point vector field  q = tau d/dt + xi d/dx + eta d/du  with components
// depending on (t, x, u).
struct VectorField {
  Expr tau, xi, eta;
  bool is_zero() const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& c, const VectorField& q);

// Prolongation coefficients on first and second jets, by the recursion
//   eta^{Ji} = D_i eta^J - (D_i tau) u_{J,t} - (D_i xi) u_{J,x}.
struct Prolongation2 {
  Expr eta_t, eta_x, eta_tt, eta_tx, eta_xx;
};

Prolongation2 prolong2(const VectorField& q);

// Second prolongation of q applied to a function on the second jet.
Expr apply_prolonged(const VectorField& q, const Expr& e);

// apply_prolonged on the family's defining expression, pulled back to its
// solution manifold. Vanishes identically exactly when q generates point
// symmetries of the instance.
Expr lie_residual(const VectorField& q, const PDEInstance& pde);

// Commutator of point vector fields.
VectorField bracket(const VectorField& a, const VectorField& b);

// Coefficients of the distinct monomials in jets of order >= 1 appearing in
// the numerator of e, in a deterministic order. Throws when such a jet sits
// in a non-polynomial position (inside a function argument, an exponent, or
// a multi-term power base) or in the denominator.
std::vector<Expr> split_by_jets(const Expr& e);

// Rational-span membership and equality of component tuples.
bool in_span(const std::vector<VectorField>& a,
             const std::vector<VectorField>& b);
bool same_span(const std::vector<VectorField>& a,
               const std::vector<VectorField>& b);

} // namespace telsym
