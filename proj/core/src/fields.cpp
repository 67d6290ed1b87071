#include "telsym/fields.hpp"

#include "telsym/calculus.hpp"
#include "telsym/linear.hpp"

#include <map>

namespace telsym {

bool VectorField::is_zero() const {
  return tau.is_zero_form() && xi.is_zero_form() && eta.is_zero_form();
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  return {a.tau + b.tau, a.xi + b.xi, a.eta + b.eta};
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  return {a.tau - b.tau, a.xi - b.xi, a.eta - b.eta};
}

VectorField operator*(const Expr& c, const VectorField& q) {
  return {c * q.tau, c * q.xi, c * q.eta};
}

Prolongation2 prolong2(const VectorField& q) {
  Expr ut = jet_var(JetVar{1, 0});
  Expr ux = jet_var(JetVar{0, 1});
  Expr utt = jet_var(JetVar{2, 0});
  Expr utx = jet_var(JetVar{1, 1});
  Expr uxx = jet_var(JetVar{0, 2});
  Prolongation2 p;
  p.eta_t = Dt(q.eta) - Dt(q.tau) * ut - Dt(q.xi) * ux;
  p.eta_x = Dx(q.eta) - Dx(q.tau) * ut - Dx(q.xi) * ux;
  p.eta_tt = Dt(p.eta_t) - Dt(q.tau) * utt - Dt(q.xi) * utx;
  p.eta_tx = Dx(p.eta_t) - Dx(q.tau) * utt - Dx(q.xi) * utx;
  p.eta_xx = Dx(p.eta_x) - Dx(q.tau) * utx - Dx(q.xi) * uxx;
  return p;
}

Expr apply_prolonged(const VectorField& q, const Expr& e) {
  Prolongation2 p = prolong2(q);
  return q.tau * diff(e, Var::T) + q.xi * diff(e, Var::X) +
         q.eta * diff_u(e) + p.eta_t * diff(e, JetVar{1, 0}) +
         p.eta_x * diff(e, JetVar{0, 1}) + p.eta_tt * diff(e, JetVar{2, 0}) +
         p.eta_tx * diff(e, JetVar{1, 1}) + p.eta_xx * diff(e, JetVar{0, 2});
}

Expr lie_residual(const VectorField& q, const PDEInstance& pde) {
  return on_solution_manifold(apply_prolonged(q, pde.delta()), pde);
}

VectorField bracket(const VectorField& a, const VectorField& b) {
  auto act = [](const VectorField& q, const Expr& F) {
    return q.tau * diff(F, Var::T) + q.xi * diff(F, Var::X) +
           q.eta * diff_u(F);
  };
  return {act(a, b.tau) - act(b, a.tau), act(a, b.xi) - act(b, a.xi),
          act(a, b.eta) - act(b, a.eta)};
}

namespace {

bool is_proper_jet(KernelId id) {
  const Kernel& k = kernel(id);
  return k.kind == KernelKind::Jet && k.jet.total() >= 1;
}

void require_jet_free(const Expr& e, const char* where) {
  for (KernelId id : kernels_deep(e))
    if (is_proper_jet(id))
      throw ExprError(std::string("derivative in non-polynomial position: ") +
                      where);
}

} // namespace

std::vector<Expr> split_by_jets(const Expr& e) {
  if (!e.frac().den.is_one())
    require_jet_free(Expr(make_frac(e.frac().den, poly_const(Rational(1)))),
                     "denominator");

  // Group key: the jet factors of the term, serialized.
  std::map<std::string, Poly> groups;
  for (const Term& t : e.frac().num.terms) {
    std::string key;
    Term rest{t.coeff, {}};
    for (const Factor& fac : t.mono) {
      const Kernel& k = kernel(fac.k);
      if (is_proper_jet(fac.k)) {
        key += k.order_key;
        key += '^';
        key += expo_key(fac.e);
        key += ';';
        continue;
      }
      if (k.kind == KernelKind::Func || k.kind == KernelKind::SumPow)
        require_jet_free(Expr(k.arg), "argument");
      if (k.kind == KernelKind::Atom)
        for (const FracPtr& argp : k.args) require_jet_free(Expr(argp), "argument");
      if (fac.e.sym) require_jet_free(Expr(fac.e.sym), "exponent");
      rest.mono.push_back(fac);
    }
    Poly one;
    one.terms.push_back(std::move(rest));
    auto [it, fresh] = groups.try_emplace(key, Poly{});
    it->second = fresh ? std::move(one) : poly_add(it->second, one);
  }
  std::vector<Expr> out;
  out.reserve(groups.size());
  for (auto& [k, p] : groups)
    out.push_back(Expr(make_frac(std::move(p), poly_const(Rational(1)))));
  return out;
}

bool in_span(const std::vector<VectorField>& a,
             const std::vector<VectorField>& b) {
  std::vector<std::vector<Expr>> tuples;
  tuples.reserve(b.size());
  for (const VectorField& q : b) tuples.push_back({q.tau, q.xi, q.eta});
  for (const VectorField& q : a) {
    auto sol = rational_combination(tuples, {q.tau, q.xi, q.eta});
    if (!sol) return false;
  }
  return true;
}

bool same_span(const std::vector<VectorField>& a,
               const std::vector<VectorField>& b) {
  return in_span(a, b) && in_span(b, a);
}

} // namespace telsym
