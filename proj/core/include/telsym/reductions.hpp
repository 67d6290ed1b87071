#pragma once

#include "telsym/database.hpp"
#include "telsym/report.hpp"

namespace telsym {

// Certifies one reduction row: every listed operator generates a symmetry of
// the bound equation, and substituting the ansatz (through the invariant when
// one is recorded) turns the equation residual into exactly the recorded
// multiplier times the reduced equation. Variant reduced equations recorded
// as controls must be rejected.
Report check_reduction_row(const ReductionTable& table, const ReductionRow& row,
                           const ZeroPolicy& policy);

Report check_reductions(const Database& db);

// Certifies one closed-form solution: the residual of the equation on the
// candidate vanishes identically, and evaluates below the grid tolerance at
// every node of the recorded validity box. Entries marked for the series
// evaluator route their special-function values through it on the grid.
Report check_solution(const SolutionEntry& sol, const ZeroPolicy& policy);

Report check_solutions(const Database& db, bool gated_only);

} // namespace telsym
