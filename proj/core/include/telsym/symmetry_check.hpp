#pragma once

#include "telsym/database.hpp"
#include "telsym/report.hpp"
#include "telsym/zero_test.hpp"

#include <string>
#include <vector>

namespace telsym {

// Zero-test options assembled from the database policy plus per-row extras.
ZeroOptions zero_options(const ZeroPolicy& policy,
                         const std::vector<Expr>& positive = {},
                         const NamedExprs& derived = {});

// Symmetry residual of one operator on one family member, pushed through the
// row's rewrite rules and ordered substitutions before testing.
ZeroReport operator_residual(const PDEInstance& pde, const VectorField& q,
                             const RuleSet& rules, const NamedExprs& subst,
                             const ZeroOptions& opt);

// Every basis operator of the row must generate a symmetry; every control
// must behave as recorded.
Report check_symmetry_row(const SymmetryRow& row, const ZeroPolicy& policy);

// gated_only restricts to rows that participate in the acceptance gate.
Report check_symmetry_tables(const std::vector<SymmetryTable>& tables,
                             const ZeroPolicy& policy, bool gated_only);

// Time translation generates a symmetry of every member of the class,
// certified structurally on randomly drawn concrete instances.
Report check_kernel(const Database& db);

// The generic symmetry residual splits by jet monomials exactly as the
// database records it: the mixed-jet coefficients are certified on fully
// generic components, the remaining six on components with the forced
// reduced dependence, together with completeness of the split, the
// derivation of the divided form of line 3, and the differential identity
// that makes the final line redundant.
Report check_determining_split(const Database& db);

// Exact closure of a basis under the commutator. Pinned brackets are
// certified symbolically against their recorded structure coefficients;
// every remaining pair must be an exact rational combination of the basis,
// symbolically when possible and otherwise at several exact rational
// parameter draws.
Report check_algebra_closure(const std::string& id,
                             const std::vector<VectorField>& basis,
                             const std::vector<AlgebraPin>& pins,
                             const std::vector<std::string>& nonzero,
                             const ZeroPolicy& policy);

// Closure for every classification row basis and every reduction algebra.
Report check_all_closures(const Database& db);

// One recorded equivalence: the map must send the source member onto the
// target member up to a jet-free factor, and must push the source basis
// onto the span of the target basis.
Report check_equivalence(const EquivalenceCert& cert, const ZeroPolicy& policy);
Report check_equivalences(const Database& db);

} // namespace telsym
