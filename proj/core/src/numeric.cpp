#include "telsym/numeric.hpp"

#include "telsym/printer.hpp"

#include <cmath>

namespace telsym {

namespace {

constexpr double kTiny = 1e-300;

void bump(double* scale, double v) {
  if (scale && v > *scale) *scale = v;
}

template <typename S>
struct Traits;

template <>
struct Traits<double> {
  static const std::map<KernelId, double>& env_cast(const Env& e) { return e; }
  static double from_rational(const Rational& r) { return to_double(r); }
  static double my_pow(double b, double e, const std::string& where) {
    if (std::abs(b) < kTiny && e < 0)
      throw EvalError(EvalError::Kind::Domain, "zero base under negative power in " + where);
    if (b < 0) {
      double ri = std::round(e);
      if (std::abs(e - ri) > 1e-12)
        throw EvalError(EvalError::Kind::Domain,
                        "negative base under fractional power in " + where);
      return std::pow(b, ri);
    }
    return std::pow(b, e);
  }
  static double my_ln(double v, const std::string& where) {
    if (v <= 0)
      throw EvalError(EvalError::Kind::Domain, "ln of nonpositive value in " + where);
    return std::log(v);
  }
  static double abs_of(double v) { return std::abs(v); }
};

template <>
struct Traits<std::complex<double>> {
  using S = std::complex<double>;
  static double from_rational(const Rational& r) { return to_double(r); }
  static S my_pow(S b, S e, const std::string& where) {
    if (std::abs(b) < kTiny) {
      if (e.real() < 0)
        throw EvalError(EvalError::Kind::Domain, "zero base under negative power in " + where);
      if (std::abs(e) < kTiny) return S(1.0, 0.0);
      return S(0.0, 0.0);
    }
    return std::pow(b, e);
  }
  static S my_ln(S v, const std::string& where) {
    if (std::abs(v) < kTiny)
      throw EvalError(EvalError::Kind::Domain, "ln of zero in " + where);
    return std::log(v);
  }
  static double abs_of(S v) { return std::abs(v); }
};

template <typename S>
S eval_frac(const PolyFrac& f, const std::map<KernelId, S>& env, double* scale);

template <typename S>
S eval_func(FuncKind k, S a) {
  switch (k) {
    case FuncKind::Exp: return std::exp(a);
    case FuncKind::Ln: return Traits<S>::my_ln(a, "ln");
    case FuncKind::Sin: return std::sin(a);
    case FuncKind::Cos: return std::cos(a);
    case FuncKind::Tan: return std::tan(a);
    case FuncKind::Sinh: return std::sinh(a);
    case FuncKind::Cosh: return std::cosh(a);
    case FuncKind::Tanh: return std::tanh(a);
    case FuncKind::Cot: {
      S tn = std::tan(a);
      if (std::abs(tn) < 1e-12)
        throw EvalError(EvalError::Kind::Domain, "cot at a zero of tan");
      return S(1.0) / tn;
    }
    case FuncKind::Coth: {
      S th = std::tanh(a);
      if (std::abs(th) < 1e-12)
        throw EvalError(EvalError::Kind::Domain, "coth at a zero of tanh");
      return S(1.0) / th;
    }
    case FuncKind::Atan: return std::atan(a);
  }
  throw EvalError(EvalError::Kind::Domain, "unknown function kind");
}

template <typename S>
S eval_kernel(KernelId id, const std::map<KernelId, S>& env, double* scale) {
  auto it = env.find(id);
  if (it != env.end()) return it->second;
  const Kernel& k = kernel(id);
  switch (k.kind) {
    case KernelKind::Base:
    case KernelKind::Param:
    case KernelKind::Jet:
    case KernelKind::Atom: {
      std::string name;
      if (k.kind == KernelKind::Atom) {
        name = atom_display(k);
      } else if (k.kind == KernelKind::Jet) {
        name = jet_name(k.jet);
      } else if (k.kind == KernelKind::Param) {
        name = Symbols::instance().param_name(k.param);
      } else {
        name = std::string(1, "txwy"[static_cast<int>(k.base)]);
      }
      throw EvalError(EvalError::Kind::MissingKernel,
                      "no value bound for kernel " + name);
    }
    case KernelKind::Func:
      return eval_func<S>(k.func, eval_frac<S>(*k.arg, env, scale));
    case KernelKind::NumPow:
      return S(Traits<S>::from_rational(k.numbase));
    case KernelKind::SumPow:
      return eval_frac<S>(*k.arg, env, scale);
  }
  throw EvalError(EvalError::Kind::Domain, "unknown kernel kind");
}

template <typename S>
S eval_factor(const Factor& fac, const std::map<KernelId, S>& env, double* scale) {
  S base = eval_kernel<S>(fac.k, env, scale);
  S e = S(Traits<S>::from_rational(fac.e.rat));
  if (fac.e.sym) e += eval_frac<S>(*fac.e.sym, env, scale);
  S v = Traits<S>::my_pow(base, e, "power");
  bump(scale, Traits<S>::abs_of(v));
  return v;
}

template <typename S>
S eval_poly(const Poly& p, const std::map<KernelId, S>& env, double* scale) {
  S sum = S(0.0);
  for (const auto& t : p.terms) {
    S v = S(Traits<S>::from_rational(t.coeff));
    for (const auto& fac : t.mono) v *= eval_factor<S>(fac, env, scale);
    bump(scale, Traits<S>::abs_of(v));
    sum += v;
  }
  bump(scale, Traits<S>::abs_of(sum));
  return sum;
}

template <typename S>
S eval_frac(const PolyFrac& f, const std::map<KernelId, S>& env, double* scale) {
  S n = eval_poly<S>(f.num, env, scale);
  if (f.den.is_one()) return n;
  S d = eval_poly<S>(f.den, env, scale);
  if (Traits<S>::abs_of(d) < 1e-12)
    throw EvalError(EvalError::Kind::Domain, "denominator evaluates to ~0");
  S q = n / d;
  bump(scale, Traits<S>::abs_of(q));
  return q;
}

} // namespace

double eval_numeric(const Expr& e, const Env& env, double* scale) {
  double v = eval_frac<double>(e.frac(), env, scale);
  if (!std::isfinite(v))
    throw EvalError(EvalError::Kind::Domain, "non-finite evaluation result");
  return v;
}

std::complex<double> eval_complex(const Expr& e, const CEnv& env, double* scale) {
  std::complex<double> v = eval_frac<std::complex<double>>(e.frac(), env, scale);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw EvalError(EvalError::Kind::Domain, "non-finite evaluation result");
  return v;
}

} // namespace telsym
