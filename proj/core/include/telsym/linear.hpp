#pragma once

#include "telsym/expr.hpp"

#include <optional>
#include <vector>

namespace telsym {

// Exact linear algebra over the rationals.

// Solves A c = b. Returns a particular solution (free unknowns set to zero),
// or nothing when the system is inconsistent.
std::optional<std::vector<Rational>> solve_linear(
    std::vector<std::vector<Rational>> a, std::vector<Rational> b);

int matrix_rank(std::vector<std::vector<Rational>> a);

// Groups the numerator terms of e by their monomial in every kernel other
// than the given parameter kernels, reading off one affine equation
//   row[0] p_0 + ... + row[n-1] p_{n-1} + row[n] = 0
// per group. Throws when e is not affine in those parameters (including
// occurrences nested inside other kernels or in the denominator).
std::vector<std::vector<Rational>> affine_system(
    const Expr& e, const std::vector<KernelId>& params);

// Rational coefficients c with  sum_i c_i * tuples[i][k] == target[k]  as
// normal forms for every slot k. Every tuple must have the target's length.
std::optional<std::vector<Rational>> rational_combination(
    const std::vector<std::vector<Expr>>& tuples,
    const std::vector<Expr>& target);

} // namespace telsym
