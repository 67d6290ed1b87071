#pragma once

#include "telsym/database.hpp"
#include "telsym/report.hpp"

namespace telsym {

// Density/flux/characteristic/classifying-expression of the multiplier beta
// on the generic family member in the gauge g = 1, built over the opaque
// slot atoms and the antiderivative atoms IntH(u), IntK(u).
struct ConservedBundle {
  Expr density;      // beta f u_t - Dt(beta) f u
  Expr flux;         // -beta H u_x + Dx(beta) IntH - beta h IntK
  Expr lambda;       // the characteristic is the multiplier itself
  Expr classifying;  // Dx^2(beta) H - Dx(beta h) K - Dt^2(beta) f
};

ConservedBundle conserved_bundle(const Expr& beta);

// Structural identity behind the classification: for an arbitrary smooth
// multiplier sigma(t, x) the divergence of the pair misses sigma * Delta by
// exactly  Dt^2(sigma) f u - Dx^2(sigma) IntH + Dx(sigma h) IntK.
Report check_generic_divergence_identity(const ZeroPolicy& policy);

// Every recorded multiplier of the row yields an on-the-nose divergence
// identity and annihilates the classifying expression; recorded controls
// must be rejected. Rows marked as duplicates re-run their source content;
// reconstructed rows are rebuilt from their source through the recorded
// multiplicative change of the x chart and certified in source coordinates.
Report check_conservation_row(const Database& db, const ConservationRow& row,
                              const ZeroPolicy& policy);

// Pinned multiplier mutations whose classifying expression must be
// decisively nonzero.
Report check_conservation_mutations(const Database& db);

Report check_conservation(const Database& db);

} // namespace telsym
