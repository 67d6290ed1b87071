#include "telsym/reductions.hpp"

#include "telsym/airy.hpp"
#include "telsym/calculus.hpp"
#include "telsym/jet.hpp"
#include "telsym/numeric.hpp"
#include "telsym/parse.hpp"
#include "telsym/printer.hpp"
#include "telsym/rewrite.hpp"
#include "telsym/symbols.hpp"
#include "telsym/symmetry_check.hpp"
#include "telsym/zero_test.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace telsym {

namespace {

// Definitions expand first so that parameter pins also reach the expanded
// right-hand sides.
NamedExprs row_context(const ReductionRow& row) {
  NamedExprs ctx = row.defs;
  ctx.insert(ctx.end(), row.bind.begin(), row.bind.end());
  return ctx;
}

// The six jets the family residual can contain, after substituting u = U(t,x).
Bindings jet_bindings(const Expr& U) {
  Bindings jb;
  jb["u"] = U;
  Expr Ut = Dt(U), Ux = Dx(U);
  jb["u_t"] = Ut;
  jb["u_x"] = Ux;
  jb["u_tt"] = Dt(Ut);
  jb["u_tx"] = Dx(Ut);
  jb["u_xx"] = Dx(Ux);
  return jb;
}

Expr reduction_residual(const Expr& delta_on_U, const Expr& multiplier,
                        const Expr& reduced, const NamedExprs& ctx,
                        const Expr* invariant) {
  Expr ode = apply_named(reduced, ctx);
  if (invariant) ode = substitute(ode, {{"w", *invariant}});
  return delta_on_U - apply_named(multiplier, ctx) * ode;
}

} // namespace

Report check_reduction_row(const ReductionTable& table, const ReductionRow& row,
                           const ZeroPolicy& policy) {
  Report rep("reductions");
  const NamedExprs ctx = row_context(row);
  const ZeroOptions opt = zero_options(policy);
  const PDEInstance eq = apply_named(table.equation, ctx);

  for (size_t i = 0; i < row.operators.size(); ++i) {
    const VectorField q = apply_named(row.operators[i], ctx);
    ZeroReport zr = operator_residual(eq, q, {}, {}, opt);
    CheckResult r = from_zero(row.id + "@op" + std::to_string(i),
                              "reduction-operator", zr, true);
    if (r.ok && zr.verdict != Verdict::ProvedZero) {
      r.ok = false;
      r.detail = "expected a structural zero";
    }
    rep.add(std::move(r));
  }

  Expr U;
  std::optional<Expr> omega;
  if (row.ansatz_xu) {
    U = apply_named(*row.ansatz_xu, ctx);
  } else if (row.ansatz && row.invariant) {
    omega = apply_named(*row.invariant, ctx);
    U = substitute(apply_named(*row.ansatz, ctx), {{"w", *omega}});
  } else {
    CheckResult r;
    r.id = row.id;
    r.kind = "reduction";
    r.ok = false;
    r.detail = "row records neither a full ansatz nor a direct closed form";
    rep.add(std::move(r));
    return rep;
  }

  const Expr delta_on_U = substitute(eq.delta(), jet_bindings(U));
  const Expr* inv = omega ? &*omega : nullptr;

  {
    ZeroReport zr =
        test_zero(reduction_residual(delta_on_U, row.multiplier, row.ode, ctx, inv), opt);
    CheckResult r = from_zero(row.id, "reduction", zr, true);
    if (r.ok && zr.verdict != Verdict::ProvedZero) {
      r.ok = false;
      r.detail = "expected a structural zero";
    }
    rep.add(std::move(r));
  }

  for (size_t i = 0; i < row.controls.size(); ++i) {
    const DbControl& ctl = row.controls[i];
    if (!ctl.ode) continue;
    ZeroReport zr =
        test_zero(reduction_residual(delta_on_U, row.multiplier, *ctl.ode, ctx, inv), opt);
    rep.add(from_zero(row.id + "!" + std::to_string(i), "control(" + ctl.kind + ")",
                      zr, ctl.expect_pass));
  }
  return rep;
}

Report check_reductions(const Database& db) {
  Report rep("reductions");
  for (const auto& table : db.reductions)
    for (const auto& row : table.rows)
      rep.merge(check_reduction_row(table, row, db.zero));
  return rep;
}

namespace {

// Numeric values of the special-function instances left in a grid residual.
// Only the two solutions of y'' = z*y (first derivatives included) are
// meaningful here; anything else is reported as a failure by the caller.
bool airy_env(const std::set<KernelId>& deep, const Env& base, Env& env,
              std::string* err) {
  for (KernelId id : deep) {
    const Kernel& k = kernel(id);
    if (k.kind == KernelKind::Jet) {
      *err = "jet left in grid residual: " + jet_name(k.jet);
      return false;
    }
    if (k.kind != KernelKind::Atom) continue;
    const AtomSig& sig = Symbols::instance().sig(k.atom);
    if (sig.name != "Ai" && sig.name != "Bi") {
      *err = "unexpected atom in grid residual: " + sig.name;
      return false;
    }
    if (k.args.size() != 1 || k.deriv.size() != 1 || k.deriv[0] > 1) {
      *err = "unreduced derivative of " + sig.name + " in grid residual";
      return false;
    }
    double z = eval_numeric(Expr(k.args[0]), base);
    double v;
    if (sig.name == "Ai")
      v = k.deriv[0] ? airy_ai_prime(z) : airy_ai(z);
    else
      v = k.deriv[0] ? airy_bi_prime(z) : airy_bi(z);
    env[id] = v;
  }
  return true;
}

CheckResult grid_check(const SolutionEntry& sol, const Expr& residual,
                       const ZeroPolicy& policy) {
  CheckResult r;
  r.id = sol.id;
  r.kind = "solution-grid";
  r.ok = false;

  Expr rg = apply_named(residual, sol.grid_binds);
  std::set<KernelId> deep = kernels_deep(rg);

  Env base;
  KernelId t_id = 0, x_id = 0;
  bool has_t = false, has_x = false;
  // Any parameter the binds left untouched gets a fixed, reproducible value.
  std::vector<std::pair<std::string, KernelId>> params;
  for (KernelId id : deep) {
    const Kernel& k = kernel(id);
    if (k.kind == KernelKind::Base) {
      if (k.base == Var::T) { t_id = id; has_t = true; }
      if (k.base == Var::X) { x_id = id; has_x = true; }
    } else if (k.kind == KernelKind::Param) {
      params.emplace_back(Symbols::instance().param_name(k.param), id);
    }
  }
  std::sort(params.begin(), params.end());
  for (size_t i = 0; i < params.size(); ++i)
    base[params[i].second] = 0.5 + 0.0625 * static_cast<double>(3 + i);

  const int n = policy.grid_points;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double tv = sol.t_lo + (sol.t_hi - sol.t_lo) * i / (n - 1);
      double xv = sol.x_lo + (sol.x_hi - sol.x_lo) * j / (n - 1);
      if (has_t) base[t_id] = tv;
      if (has_x) base[x_id] = xv;
      Env env = base;
      std::string err;
      if (!airy_env(deep, base, env, &err)) {
        r.detail = err;
        return r;
      }
      double scale = 0.0, val = 0.0;
      try {
        val = eval_numeric(rg, env, &scale);
      } catch (const EvalError& e) {
        std::ostringstream os;
        os << "evaluation failed at t=" << tv << ", x=" << xv << ": " << e.what();
        r.detail = os.str();
        return r;
      }
      worst = std::max(worst, std::fabs(val) / (1.0 + scale));
    }
  }
  r.worst = worst;
  r.ok = worst < policy.grid_tol;
  std::ostringstream os;
  os << n << "x" << n << " grid, worst relative residual " << worst;
  r.detail = os.str();
  return r;
}

} // namespace

Report check_solution(const SolutionEntry& sol, const ZeroPolicy& policy) {
  Report rep("solutions");
  const Expr U = apply_named(sol.u, sol.arg);
  Expr residual = substitute(sol.equation.delta(), jet_bindings(U));
  if (!sol.rules.deriv.empty() || !sol.rules.power.empty())
    residual = rewrite(residual, sol.rules);

  ZeroReport zr = test_zero(residual, zero_options(policy));
  rep.add(from_zero(sol.id, "solution", zr, true));
  rep.add(grid_check(sol, residual, policy));
  return rep;
}

Report check_solutions(const Database& db, bool gated_only) {
  Report rep("solutions");
  for (const auto& sol : db.solutions) {
    if (gated_only && !sol.gated) continue;
    rep.merge(check_solution(sol, db.zero));
  }
  return rep;
}

} // namespace telsym
