#include "telsym/calculus.hpp"

#include <unordered_set>

namespace telsym {

namespace {

Expr kernel_as_expr(KernelId id) {
  const Kernel& k = kernel(id);
  if (k.kind == KernelKind::SumPow) return Expr(k.arg);
  if (k.kind == KernelKind::NumPow) return Expr(k.numbase);
  return Expr(make_frac(poly_kernel(id), poly_const(Rational(1))));
}

Expr expo_as_expr(const Expo& e) {
  Expr r(e.rat);
  if (e.sym) r = r + Expr(e.sym);
  return r;
}

Expr rule_rhs(AtomRule rule, const Expr& arg) {
  switch (rule) {
    case AtomRule::None:
      throw ExprError("rule atom without a rule");
    case AtomRule::IntH:
      return atom("H", {0}, {arg});
    case AtomRule::IntK:
      return atom("K", {0}, {arg});
    case AtomRule::IntHx:
      return atom("h", {0}, {arg});
    case AtomRule::ExpIntH:
      return param("eps") * atom("h", {0}, {arg}) * atom("ExpIntH", {0}, {arg});
    case AtomRule::IntExpIntH:
      return atom("ExpIntH", {0}, {arg});
    case AtomRule::IntSqrtF:
      return pow(atom("f", {0}, {arg}), Expr(Rational(1, 2)));
    case AtomRule::IntG:
      return atom("g", {0}, {arg});
    case AtomRule::FExp:
      return (param("fa1") * arg + param("fa0")) /
             (param("fb2") * arg * arg + param("fb1") * arg + param("fb0")) *
             atom("FExp", {0}, {arg});
  }
  throw ExprError("unreachable atom rule");
}

// Derivative of the kernel value itself with respect to kernel v.
Expr kernel_deriv(KernelId id, KernelId v) {
  if (id == v) return Expr(Rational(1));
  const Kernel& k = kernel(id);
  switch (k.kind) {
    case KernelKind::Base:
    case KernelKind::Param:
    case KernelKind::Jet:
      return Expr(Rational(0));
    case KernelKind::NumPow:
      return Expr(Rational(0));
    case KernelKind::SumPow:
      return diff_kernel(Expr(k.arg), v);
    case KernelKind::Func: {
      Expr arg(k.arg);
      Expr da = diff_kernel(arg, v);
      if (da.is_zero_form()) return da;
      Expr outer;
      switch (k.func) {
        case FuncKind::Exp:
          outer = Expr(make_frac(poly_kernel(id), poly_const(Rational(1))));
          break;
        case FuncKind::Ln:
          outer = Expr(Rational(1)) / arg;
          break;
        case FuncKind::Sin:
          outer = func(FuncKind::Cos, arg);
          break;
        case FuncKind::Cos:
          outer = -func(FuncKind::Sin, arg);
          break;
        case FuncKind::Tan: {
          Expr tn = func(FuncKind::Tan, arg);
          outer = Expr(Rational(1)) + tn * tn;
          break;
        }
        case FuncKind::Sinh:
          outer = func(FuncKind::Cosh, arg);
          break;
        case FuncKind::Cosh:
          outer = func(FuncKind::Sinh, arg);
          break;
        case FuncKind::Tanh: {
          Expr th = func(FuncKind::Tanh, arg);
          outer = Expr(Rational(1)) - th * th;
          break;
        }
        case FuncKind::Cot: {
          Expr ct = func(FuncKind::Cot, arg);
          outer = -(Expr(Rational(1)) + ct * ct);
          break;
        }
        case FuncKind::Coth: {
          Expr ch = func(FuncKind::Coth, arg);
          outer = Expr(Rational(1)) - ch * ch;
          break;
        }
        case FuncKind::Atan:
          outer = Expr(Rational(1)) / (Expr(Rational(1)) + arg * arg);
          break;
      }
      return outer * da;
    }
    case KernelKind::Atom: {
      const AtomSig& sig = Symbols::instance().sig(k.atom);
      Expr total(Rational(0));
      for (size_t i = 0; i < k.args.size(); ++i) {
        Expr da = diff_kernel(Expr(k.args[i]), v);
        if (da.is_zero_form()) continue;
        Expr inner;
        if (sig.rule != AtomRule::None) {
          inner = rule_rhs(sig.rule, Expr(k.args[i]));
        } else {
          std::vector<std::uint8_t> d2(k.deriv.begin(), k.deriv.end());
          if (d2[i] == 255) throw ExprError("atom derivative order overflow");
          d2[i] += 1;
          std::vector<Expr> args;
          args.reserve(k.args.size());
          for (const auto& a : k.args) args.emplace_back(a);
          inner = atom(sig.name, d2, args);
        }
        total = total + inner * da;
      }
      return total;
    }
  }
  throw ExprError("unreachable kernel kind");
}

// d(k^e)/dv = e * k^(e-1) * dk/dv + k^e * ln(k) * de/dv.
Expr factor_deriv(const Factor& f, KernelId v) {
  Expr result(Rational(0));
  Expr kd = kernel_deriv(f.k, v);
  if (!kd.is_zero_form()) {
    Expo em1 = f.e;
    em1.rat -= 1;
    Expr kpow = pow(kernel_as_expr(f.k), expo_as_expr(em1));
    result = result + expo_as_expr(f.e) * kpow * kd;
  }
  if (f.e.sym) {
    Expr ed = diff_kernel(Expr(f.e.sym), v);
    if (!ed.is_zero_form()) {
      Expr kpow = pow(kernel_as_expr(f.k), expo_as_expr(f.e));
      result = result + kpow * func(FuncKind::Ln, kernel_as_expr(f.k)) * ed;
    }
  }
  return result;
}

Expr poly_diff(const Poly& p, KernelId v) {
  Expr sum(Rational(0));
  for (const auto& t : p.terms) {
    for (size_t i = 0; i < t.mono.size(); ++i) {
      Expr fd = factor_deriv(t.mono[i], v);
      if (fd.is_zero_form()) continue;
      Poly rest;
      Monomial m;
      for (size_t j = 0; j < t.mono.size(); ++j)
        if (j != i) m.push_back(t.mono[j]);
      rest.terms.push_back(Term{t.coeff, std::move(m)});
      sum = sum + Expr(make_frac(std::move(rest), poly_const(Rational(1)))) * fd;
    }
  }
  return sum;
}

KernelId leaf_kernel(Var v) {
  Expr e = base_var(v);
  return e.frac().num.terms.front().mono.front().k;
}

KernelId leaf_kernel(JetVar j) {
  Expr e = jet_var(j);
  return e.frac().num.terms.front().mono.front().k;
}

} // namespace

Expr diff_kernel(const Expr& e, KernelId v) {
  const PolyFrac& f = e.frac();
  Expr dn = poly_diff(f.num, v);
  if (f.den.is_one()) return dn;
  Expr dd = poly_diff(f.den, v);
  Expr num(make_frac(f.num, poly_const(Rational(1))));
  Expr den(make_frac(f.den, poly_const(Rational(1))));
  return dn / den - num * dd / (den * den);
}

Expr diff(const Expr& e, Var v) { return diff_kernel(e, leaf_kernel(v)); }

Expr diff(const Expr& e, JetVar j) { return diff_kernel(e, leaf_kernel(j)); }

Expr diff_u(const Expr& e) { return diff(e, JetVar{0, 0}); }

Expr diff_param(const Expr& e, const std::string& name) {
  Expr p = param(name);
  return diff_kernel(e, p.frac().num.terms.front().mono.front().k);
}

namespace {

void collect_poly(const Poly& p, std::set<KernelId>& out,
                  std::unordered_set<const PolyFrac*>& seen);

void collect_frac(const FracPtr& f, std::set<KernelId>& out,
                  std::unordered_set<const PolyFrac*>& seen) {
  if (!f) return;
  if (!seen.insert(f.get()).second) return;
  collect_poly(f->num, out, seen);
  collect_poly(f->den, out, seen);
}

void collect_poly(const Poly& p, std::set<KernelId>& out,
                  std::unordered_set<const PolyFrac*>& seen) {
  for (const auto& t : p.terms) {
    for (const auto& fac : t.mono) {
      out.insert(fac.k);
      const Kernel& k = kernel(fac.k);
      switch (k.kind) {
        case KernelKind::Atom:
          for (const auto& a : k.args) collect_frac(a, out, seen);
          break;
        case KernelKind::Func:
        case KernelKind::SumPow:
          collect_frac(k.arg, out, seen);
          break;
        default:
          break;
      }
      if (fac.e.sym) collect_frac(fac.e.sym, out, seen);
    }
  }
}

} // namespace

void collect_kernels_deep(const Expr& e, std::set<KernelId>& out) {
  std::unordered_set<const PolyFrac*> seen;
  collect_frac(e.ptr(), out, seen);
}

std::set<KernelId> kernels_deep(const Expr& e) {
  std::set<KernelId> out;
  collect_kernels_deep(e, out);
  return out;
}

std::optional<int> max_jet_order(const Expr& e) {
  std::optional<int> best;
  for (KernelId id : kernels_deep(e)) {
    const Kernel& k = kernel(id);
    if (k.kind != KernelKind::Jet) continue;
    int o = k.jet.total();
    if (!best || o > *best) best = o;
  }
  return best;
}

namespace {

Expr total_deriv(const Expr& e, Var base) {
  Expr r = diff(e, base);
  for (KernelId id : kernels_deep(e)) {
    const Kernel& k = kernel(id);
    if (k.kind != KernelKind::Jet) continue;
    JetVar j = k.jet;
    JetVar j2 = j;
    if (base == Var::T) {
      if (j2.t_order == 255) throw ExprError("jet order overflow");
      j2.t_order += 1;
    } else {
      if (j2.x_order == 255) throw ExprError("jet order overflow");
      j2.x_order += 1;
    }
    Expr pd = diff_kernel(e, id);
    if (pd.is_zero_form()) continue;
    r = r + jet_var(j2) * pd;
  }
  return r;
}

} // namespace

Expr Dt(const Expr& e) { return total_deriv(e, Var::T); }
Expr Dx(const Expr& e) { return total_deriv(e, Var::X); }

} // namespace telsym
