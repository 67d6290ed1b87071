#pragma once

#include "telsym/expr.hpp"

#include <set>

namespace telsym {

// Partial derivative with respect to one kernel. Every other kernel is held
// constant; function atoms chain through their arguments, and atoms carrying
// a defining derivative rule apply it instead of a multi-index increment.
Expr diff_kernel(const Expr& e, KernelId v);

Expr diff(const Expr& e, Var v);
Expr diff(const Expr& e, JetVar j);
Expr diff_u(const Expr& e);
Expr diff_param(const Expr& e, const std::string& name);

// Total derivatives on the jet space: D = d/dvar + sum over jet variables of
// the next-order jet times the partial with respect to that jet.
Expr Dt(const Expr& e);
Expr Dx(const Expr& e);

// Every kernel reachable from e, including kernels nested inside atom
// arguments, function arguments, power bases, and symbolic exponents.
void collect_kernels_deep(const Expr& e, std::set<KernelId>& out);
std::set<KernelId> kernels_deep(const Expr& e);

// Highest jet order appearing anywhere in e; 'none' when e has no jets.
std::optional<int> max_jet_order(const Expr& e);

} // namespace telsym
