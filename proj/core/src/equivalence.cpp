#include "telsym/equivalence.hpp"

#include "telsym/calculus.hpp"

namespace telsym {

namespace {

// Solves  Dt(F) = a*Dt(T) + b*Dt(X),  Dx(F) = a*Dx(T) + b*Dx(X)  for (a, b):
// the derivatives of F with respect to the image base coordinates.
struct ChainSolve {
  Expr wrt_t, wrt_x;
};

ChainSolve chain_solve(const Expr& f, const PointTransform& pt) {
  Expr tt = Dt(pt.t_new), tx = Dx(pt.t_new);
  Expr xt = Dt(pt.x_new), xx = Dx(pt.x_new);
  Expr jac = tt * xx - tx * xt;
  if (jac.is_zero_form())
    throw ExprError("point transformation has a degenerate base Jacobian");
  Expr ft = Dt(f), fx = Dx(f);
  return {(ft * xx - fx * xt) / jac, (tt * fx - tx * ft) / jac};
}

} // namespace

JetPullback pullback_jets(const PointTransform& pt) {
  JetPullback jp;
  ChainSolve first = chain_solve(pt.u_new, pt);
  jp.ut = first.wrt_t;
  jp.ux = first.wrt_x;
  ChainSolve st = chain_solve(jp.ut, pt);
  ChainSolve sx = chain_solve(jp.ux, pt);
  jp.utt = st.wrt_t;
  jp.utx = st.wrt_x;
  jp.uxx = sx.wrt_x;
  return jp;
}

Bindings pullback_bindings(const PointTransform& pt) {
  JetPullback jp = pullback_jets(pt);
  Bindings b;
  b["t"] = pt.t_new;
  b["x"] = pt.x_new;
  b["u"] = pt.u_new;
  b[jet_name(JetVar{1, 0})] = jp.ut;
  b[jet_name(JetVar{0, 1})] = jp.ux;
  b[jet_name(JetVar{2, 0})] = jp.utt;
  b[jet_name(JetVar{1, 1})] = jp.utx;
  b[jet_name(JetVar{0, 2})] = jp.uxx;
  return b;
}

Expr pull_back(const Expr& e, const PointTransform& pt) {
  for (KernelId id : kernels_deep(e)) {
    const Kernel& k = kernel(id);
    if (k.kind == KernelKind::Jet && k.jet.total() > 2)
      throw ExprError("pullback handles jets up to second order");
  }
  return substitute_simultaneous(e, pullback_bindings(pt));
}

VectorField push_forward(const VectorField& q, const PointTransform& pt,
                         const PointTransform& inverse) {
  auto act = [&](const Expr& f) {
    return q.tau * diff(f, Var::T) + q.xi * diff(f, Var::X) +
           q.eta * diff_u(f);
  };
  Bindings back;
  back["t"] = inverse.t_new;
  back["x"] = inverse.x_new;
  back["u"] = inverse.u_new;
  return {substitute_simultaneous(act(pt.t_new), back),
          substitute_simultaneous(act(pt.x_new), back),
          substitute_simultaneous(act(pt.u_new), back)};
}

bool verify_inverse(const PointTransform& pt, const PointTransform& inverse,
                    const ZeroOptions& opt) {
  Bindings fwd;
  fwd["t"] = pt.t_new;
  fwd["x"] = pt.x_new;
  fwd["u"] = pt.u_new;
  Expr rt = substitute_simultaneous(inverse.t_new, fwd) - base_var(Var::T);
  Expr rx = substitute_simultaneous(inverse.x_new, fwd) - base_var(Var::X);
  Expr ru = substitute_simultaneous(inverse.u_new, fwd) - dep_u();
  return numeric_zero(rt, opt) && numeric_zero(rx, opt) &&
         numeric_zero(ru, opt);
}

ConservedPair transform_conserved(const ConservedPair& v,
                                  const PointTransform& pt) {
  Expr tt = Dt(pt.t_new), tx = Dx(pt.t_new);
  Expr xt = Dt(pt.x_new), xx = Dx(pt.x_new);
  Expr jac = tt * xx - tx * xt;
  if (jac.is_zero_form())
    throw ExprError("point transformation has a degenerate base Jacobian");
  return {(v.density * tt + v.flux * tx) / jac,
          (v.density * xt + v.flux * xx) / jac};
}

std::optional<Expr> maps_equation(const PDEInstance& source,
                                  const PDEInstance& image,
                                  const PointTransform& pt,
                                  const ZeroOptions& opt) {
  Expr pulled = pull_back(image.delta(), pt);
  Expr src = source.delta();
  // Both sides are affine in u_tt with coefficients free of second jets, so
  // the factor is the ratio of the u_tt coefficients.
  Expr factor = diff(pulled, JetVar{2, 0}) / diff(src, JetVar{2, 0});
  Expr residual = pulled - factor * src;
  if (numeric_zero(residual, opt)) return factor;
  return std::nullopt;
}

} // namespace telsym
