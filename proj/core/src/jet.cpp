#include "telsym/jet.hpp"

#include "telsym/calculus.hpp"

#include <algorithm>

namespace telsym {

PDEInstance PDEInstance::generic() {
  PDEInstance p;
  p.f = atom("f");
  p.g = atom("g");
  p.h = atom("h");
  p.H = atom("H");
  p.K = atom("K");
  return p;
}

Expr PDEInstance::lhs() const { return f * jet_var(JetVar{2, 0}); }

Expr PDEInstance::flux_rhs() const {
  Expr ux = jet_var(JetVar{0, 1});
  return Dx(g * H * ux) + h * K * ux;
}

Expr PDEInstance::delta() const { return lhs() - flux_rhs(); }

Expr PDEInstance::utt_solved() const { return flux_rhs() / f; }

Bindings instance_bindings(const PDEInstance& pde) {
  Bindings b;
  b["f"] = pde.f;
  b["g"] = pde.g;
  b["h"] = pde.h;
  b["H"] = pde.H;
  b["K"] = pde.K;
  return b;
}

namespace {

// One simultaneous replacement round for all jets selected by `pick`;
// `expand` produces the replacement for one such jet. The maximal order in
// the picked direction strictly decreases each round, so iteration is finite
// for well-formed right-hand sides.
template <typename Pick, typename Expand>
Expr replace_jets_to_fixpoint(const Expr& e, Pick pick, Expand expand,
                              const char* what) {
  Expr cur = e;
  for (int round = 0; round < 64; ++round) {
    std::vector<JetVar> hits;
    for (KernelId id : kernels_deep(cur)) {
      const Kernel& k = kernel(id);
      if (k.kind != KernelKind::Jet) continue;
      if (k.jet.total() > 40)
        throw ExprError(std::string("jet order overflow in ") + what);
      if (pick(k.jet)) hits.push_back(k.jet);
    }
    if (hits.empty()) return cur;
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end(),
                           [](JetVar a, JetVar b) { return a == b; }),
               hits.end());
    Bindings b;
    for (JetVar j : hits) b[jet_name(j)] = expand(j);
    cur = substitute(cur, b);
  }
  throw ExprError(std::string(what) + " did not terminate");
}

} // namespace

Expr on_solution_manifold(const Expr& e, const PDEInstance& pde) {
  Expr rhs = pde.utt_solved();
  auto pick = [](JetVar j) { return j.t_order >= 2; };
  auto expand = [&](JetVar j) {
    Expr r = rhs;
    for (int i = 2; i < j.t_order; ++i) r = Dt(r);
    for (int i = 0; i < j.x_order; ++i) r = Dx(r);
    return r;
  };
  return replace_jets_to_fixpoint(e, pick, expand,
                                  "solution-manifold substitution");
}

Expr constrain_derivative(const Expr& e, CharDir dir, const Expr& rhs) {
  {
    // Reject right-hand sides that would make the replacement grow.
    for (KernelId id : kernels_deep(rhs)) {
      const Kernel& k = kernel(id);
      if (k.kind != KernelKind::Jet) continue;
      int bad = dir == CharDir::T ? k.jet.t_order : k.jet.x_order;
      if (bad > 0)
        throw ExprError("constraint right-hand side depends on the "
                        "constrained derivative");
    }
  }
  auto pick = [&](JetVar j) {
    return (dir == CharDir::T ? j.t_order : j.x_order) >= 1;
  };
  auto expand = [&](JetVar j) {
    Expr r = rhs;
    int nt = j.t_order, nx = j.x_order;
    if (dir == CharDir::T)
      --nt;
    else
      --nx;
    for (int i = 0; i < nt; ++i) r = Dt(r);
    for (int i = 0; i < nx; ++i) r = Dx(r);
    return r;
  };
  return replace_jets_to_fixpoint(e, pick, expand, "derivative constraint");
}

} // namespace telsym
