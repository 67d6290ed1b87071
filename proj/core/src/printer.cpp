#include "telsym/printer.hpp"

namespace telsym {

namespace {

char arg_letter(ArgVar v) {
  switch (v) {
    case ArgVar::T: return 't';
    case ArgVar::X: return 'x';
    case ArgVar::U: return 'u';
    case ArgVar::W: return 'w';
    case ArgVar::Y: return 'y';
  }
  return '?';
}

bool is_default_arg(const FracPtr& a, ArgVar v) {
  Expr def = [&] {
    switch (v) {
      case ArgVar::T: return base_var(Var::T);
      case ArgVar::X: return base_var(Var::X);
      case ArgVar::U: return dep_u();
      case ArgVar::W: return base_var(Var::W);
      case ArgVar::Y: return base_var(Var::Y);
    }
    throw ExprError("unreachable arg var");
  }();
  return a->key == def.frac().key;
}

std::string frac_text(const PolyFrac& f);

std::string expo_text(const Expo& e) {
  if (e.is_rational()) {
    if (is_integer(e.rat)) return to_string(e.rat);
    return "(" + to_string(e.rat) + ")";
  }
  Expr x(e.rat);
  x = x + Expr(e.sym);
  return "(" + frac_text(x.frac()) + ")";
}

std::string factor_text(const Factor& fac) {
  const Kernel& k = kernel(fac.k);
  std::string base;
  bool atomic = true;  // whether base can take ^ without extra parens
  switch (k.kind) {
    case KernelKind::Base:
      switch (k.base) {
        case Var::T: base = "t"; break;
        case Var::X: base = "x"; break;
        case Var::W: base = "w"; break;
        case Var::Y: base = "y"; break;
      }
      break;
    case KernelKind::Param:
      base = Symbols::instance().param_name(k.param);
      break;
    case KernelKind::Jet:
      base = jet_name(k.jet);
      break;
    case KernelKind::Atom: {
      base = atom_display(k);
      const AtomSig& sig = Symbols::instance().sig(k.atom);
      bool defaults = true;
      for (size_t i = 0; i < k.args.size(); ++i)
        if (!is_default_arg(k.args[i], sig.args[i])) defaults = false;
      if (!defaults) {
        base += "(";
        for (size_t i = 0; i < k.args.size(); ++i) {
          if (i) base += ", ";
          base += frac_text(*k.args[i]);
        }
        base += ")";
      }
      break;
    }
    case KernelKind::Func: {
      if (k.func == FuncKind::Exp) {
        // Fold the exponent back into the argument: exp(M)^e is exp(e*M).
        Expr ex(fac.e.rat);
        if (fac.e.sym) ex = ex + Expr(fac.e.sym);
        Expr arg = ex * Expr(k.arg);
        return std::string("exp(") + frac_text(arg.frac()) + ")";
      }
      base = std::string(func_name(k.func)) + "(" + frac_text(*k.arg) + ")";
      break;
    }
    case KernelKind::NumPow:
      if (k.numbase < 0 || !is_integer(k.numbase)) {
        base = "(" + to_string(k.numbase) + ")";
      } else {
        base = to_string(k.numbase);
      }
      break;
    case KernelKind::SumPow:
      base = "(" + to_text(k.arg->num) + ")";
      break;
  }
  (void)atomic;
  Expo one;
  one.rat = Rational(1);
  if (expo_cmp(fac.e, one) == 0) return base;
  return base + "^" + expo_text(fac.e);
}

// One term without its sign; the caller renders signs between terms.
std::string term_text(const Term& t, bool leading) {
  Rational c = t.coeff;
  bool neg = c < 0;
  if (neg) c = -c;
  std::string s;
  bool need_star = false;
  bool coeff_shown = false;
  if (t.mono.empty() || c != 1) {
    if (is_integer(c)) {
      s += to_string(c);
    } else {
      // Print p/q as p/q only when it cannot bind to a following factor.
      s += to_string(numerator(c));
      if (!t.mono.empty()) {
        // place denominator after the factors: (p*mono)/q handled below
      } else {
        s += "/" + to_string(denominator(c));
      }
    }
    coeff_shown = true;
    need_star = true;
  }
  for (const auto& fac : t.mono) {
    if (need_star) s += "*";
    s += factor_text(fac);
    need_star = true;
  }
  if (coeff_shown && !t.mono.empty() && !is_integer(c))
    s += "/" + to_string(denominator(c));
  if (neg) s = (leading ? "-" : "") + s;
  return s;
}

std::string poly_text(const Poly& p) {
  if (p.terms.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& t : p.terms) {
    if (first) {
      s += term_text(t, true);
      first = false;
      continue;
    }
    s += t.coeff < 0 ? " - " : " + ";
    s += term_text(t, false);
  }
  return s;
}

std::string frac_text(const PolyFrac& f) {
  if (f.den.is_one()) return poly_text(f.num);
  std::string n = poly_text(f.num);
  std::string d = poly_text(f.den);
  std::string s;
  if (f.num.terms.size() > 1) {
    s = "(" + n + ")";
  } else {
    s = n;
  }
  s += "/(" + d + ")";
  return s;
}

} // namespace

std::string atom_display(const Kernel& k) {
  const AtomSig& sig = Symbols::instance().sig(k.atom);
  std::string s = sig.name;
  bool any = false;
  for (auto o : k.deriv)
    if (o) any = true;
  if (any) {
    s += "_";
    for (size_t i = 0; i < k.deriv.size(); ++i)
      s.append(k.deriv[i], arg_letter(sig.args[i]));
  }
  return s;
}

std::string to_text(const Expr& e) { return frac_text(e.frac()); }

std::string to_text(const Poly& p) { return poly_text(p); }

} // namespace telsym
