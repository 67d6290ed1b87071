#pragma once

#include "telsym/fields.hpp"
#include "telsym/jet.hpp"
#include "telsym/rewrite.hpp"
#include "telsym/zero_test.hpp"

#include <optional>

namespace telsym {

// Point transformation (t, x, u) -> (t_new, x_new, u_new), components given
// as expressions in the source variables.
struct PointTransform {
  Expr t_new, x_new, u_new;
};

// Derivatives of u_new with respect to (t_new, x_new) expressed through the
// source jet, obtained by solving the total-derivative chain rule. The base
// Jacobian lands in denominators, so it must not vanish.
struct JetPullback {
  Expr ut, ux, utt, utx, uxx;
};

JetPullback pullback_jets(const PointTransform& pt);

// Bindings sending an expression written in the image coordinates (same
// symbol names) to the source coordinates: t, x, u and jets up to order 2.
Bindings pullback_bindings(const PointTransform& pt);

// Pull an expression on the image second jet back to the source jet.
Expr pull_back(const Expr& e, const PointTransform& pt);

// Components of the pushed-forward field in image coordinates. `inverse`
// re-expresses the source base point through the image one.
VectorField push_forward(const VectorField& q, const PointTransform& pt,
                         const PointTransform& inverse);

// Checks that inverse is actually pt's inverse (composition gives the
// identity on (t, x, u)).
bool verify_inverse(const PointTransform& pt, const PointTransform& inverse,
                    const ZeroOptions& opt = {});

// Density/flux pair of a conservation law: Dt(density) + Dx(flux) vanishes
// on solutions.
struct ConservedPair {
  Expr density, flux;
};

// Conserved pairs transform with the base total-derivative Jacobian:
//   density' = (density Dt(t_new) + flux Dx(t_new)) / J,
//   flux'    = (density Dt(x_new) + flux Dx(x_new)) / J.
// The result is expressed in source coordinates (push forward afterwards to
// read it in image coordinates).
ConservedPair transform_conserved(const ConservedPair& v,
                                  const PointTransform& pt);

// Pulls the image family's defining expression back along pt and compares
// with the source expression up to a factor: pull_back(image.delta(), pt)
// must equal factor * source.delta() with the factor free of jets. Returns
// the factor on success.
std::optional<Expr> maps_equation(const PDEInstance& source,
                                  const PDEInstance& image,
                                  const PointTransform& pt,
                                  const ZeroOptions& opt = {});

} // namespace telsym
