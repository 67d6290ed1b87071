#include "telsym/rewrite.hpp"

#include "telsym/calculus.hpp"

#include <functional>
#include <optional>

namespace telsym {

namespace {

thread_local int g_subst_depth = 0;
struct SubstGuard {
  SubstGuard() {
    if (++g_subst_depth > 128) {
      --g_subst_depth;
      throw ExprError("cyclic binding chain");
    }
  }
  ~SubstGuard() { --g_subst_depth; }
};

using KernelHook = std::function<std::optional<Expr>(const Kernel&)>;

Expr map_kernels(const Expr& e, const KernelHook& hook);

Expr map_frac(const FracPtr& f, const KernelHook& hook) {
  return map_kernels(Expr(f), hook);
}

Expr rebuild_factor(const Factor& fac, const KernelHook& hook) {
  const Kernel& k = kernel(fac.k);
  Expo e2 = fac.e;
  if (e2.sym) {
    Expr s = map_frac(e2.sym, hook);
    Expr full = Expr(e2.rat) + s;
    Expr base = rebuild_factor(Factor{fac.k, Expo{Rational(1), nullptr}}, hook);
    return pow(base, full);
  }
  Expr expo_expr(e2.rat);
  Expr base;
  switch (k.kind) {
    case KernelKind::Base:
    case KernelKind::Param:
    case KernelKind::Jet: {
      if (auto r = hook(k)) {
        base = *r;
      } else {
        base = Expr(make_frac(poly_kernel(fac.k), poly_const(Rational(1))));
      }
      break;
    }
    case KernelKind::NumPow: {
      if (auto r = hook(k)) {
        base = *r;
      } else {
        return pow(Expr(k.numbase), expo_expr);
      }
      break;
    }
    case KernelKind::Atom: {
      Kernel k2 = k;
      std::vector<Expr> new_args;
      bool changed = false;
      for (auto& a : k2.args) {
        Expr na = map_frac(a, hook);
        if (na.ptr() != a) changed = true;
        new_args.push_back(na);
        a = na.ptr();
      }
      if (auto r = hook(k2)) {
        base = *r;
      } else if (changed) {
        const AtomSig& sig = Symbols::instance().sig(k.atom);
        base = atom(sig.name, std::vector<std::uint8_t>(k.deriv.begin(), k.deriv.end()),
                    new_args);
      } else {
        base = Expr(make_frac(poly_kernel(fac.k), poly_const(Rational(1))));
      }
      break;
    }
    case KernelKind::Func: {
      Kernel k2 = k;
      Expr na = map_frac(k.arg, hook);
      k2.arg = na.ptr();
      if (auto r = hook(k2)) {
        base = *r;
      } else if (na.ptr() != k.arg) {
        base = func(k.func, na);
      } else {
        base = Expr(make_frac(poly_kernel(fac.k), poly_const(Rational(1))));
      }
      break;
    }
    case KernelKind::SumPow: {
      Expr nb = map_frac(k.arg, hook);
      return pow(nb, expo_expr);
    }
  }
  return pow(base, expo_expr);
}

Expr map_poly(const Poly& p, const KernelHook& hook) {
  Expr sum(Rational(0));
  for (const auto& t : p.terms) {
    Expr prod(t.coeff);
    for (const auto& fac : t.mono) prod = prod * rebuild_factor(fac, hook);
    sum = sum + prod;
  }
  return sum;
}

Expr map_kernels(const Expr& e, const KernelHook& hook) {
  const PolyFrac& f = e.frac();
  Expr n = map_poly(f.num, hook);
  if (f.den.is_one()) return n;
  Expr d = map_poly(f.den, hook);
  return n / d;
}

char arg_letter_of(ArgVar v) { return "txuwy"[static_cast<int>(v)]; }

std::string leaf_name(const Kernel& k) {
  switch (k.kind) {
    case KernelKind::Base:
      switch (k.base) {
        case Var::T: return "t";
        case Var::X: return "x";
        case Var::W: return "w";
        case Var::Y: return "y";
      }
      return "";
    case KernelKind::Param:
      return Symbols::instance().param_name(k.param);
    case KernelKind::Jet:
      return jet_name(k.jet);
    default:
      return "";
  }
}

KernelId sigvar_kernel(ArgVar v) {
  Expr e = [&] {
    switch (v) {
      case ArgVar::T: return base_var(Var::T);
      case ArgVar::X: return base_var(Var::X);
      case ArgVar::U: return dep_u();
      case ArgVar::W: return base_var(Var::W);
      case ArgVar::Y: return base_var(Var::Y);
    }
    throw ExprError("unreachable arg var");
  }();
  return e.frac().num.terms.front().mono.front().k;
}

// One simultaneous substitution pass with pre-resolved bindings.
Expr one_pass(const Expr& e, const Bindings& b) {
  KernelHook hook = [&b](const Kernel& k) -> std::optional<Expr> {
    if (k.kind == KernelKind::Atom) {
      const AtomSig& sig = Symbols::instance().sig(k.atom);
      auto it = b.find(sig.name);
      if (it == b.end()) return std::nullopt;
      SubstGuard guard;
      // Differentiate the bound form per the multi-index, then replace the
      // signature variables by the (already substituted) arguments.
      Expr form = it->second;
      for (size_t i = 0; i < k.deriv.size(); ++i)
        for (int d = 0; d < k.deriv[i]; ++d)
          form = diff_kernel(form, sigvar_kernel(sig.args[i]));
      Bindings argmap;
      for (size_t i = 0; i < sig.args.size(); ++i) {
        std::string nm(1, arg_letter_of(sig.args[i]));
        argmap[nm] = Expr(k.args[i]);
      }
      return one_pass(form, argmap);
    }
    std::string nm = leaf_name(k);
    if (nm.empty()) return std::nullopt;
    auto it = b.find(nm);
    if (it == b.end()) return std::nullopt;
    return it->second;
  };
  return map_kernels(e, hook);
}

// Names referenced by an expression that occur as binding keys.
bool references_key(const Expr& e, const std::string& key) {
  for (KernelId id : kernels_deep(e)) {
    const Kernel& k = kernel(id);
    if (k.kind == KernelKind::Atom) {
      if (Symbols::instance().sig(k.atom).name == key) return true;
    } else {
      if (leaf_name(k) == key) return true;
    }
  }
  return false;
}

} // namespace

Expr substitute(const Expr& e, const Bindings& b) {
  if (b.empty()) return e;
  // Resolve acyclic chains among the bindings so {u -> phi(w), w -> x+t}
  // yields phi(x+t). Self-referential and mutually cyclic bindings are left
  // literal and applied simultaneously.
  Bindings resolved = b;
  for (size_t round = 0; round <= b.size(); ++round) {
    bool changed = false;
    for (auto& [key, rhs] : resolved) {
      Bindings others;
      for (const auto& [k2, v2] : resolved)
        if (k2 != key && !references_key(v2, key)) others.emplace(k2, v2);
      if (others.empty()) continue;
      Expr next = one_pass(rhs, others);
      if (!(next.ptr() == rhs.ptr() || next.key() == rhs.key())) {
        rhs = next;
        changed = true;
      }
    }
    if (!changed) break;
    if (round == b.size()) {
      // Did not stabilize: fall back to one simultaneous pass of the
      // original bindings.
      resolved = b;
      break;
    }
  }
  return one_pass(e, resolved);
}

Expr substitute_simultaneous(const Expr& e, const Bindings& b) {
  return one_pass(e, b);
}

Expr rewrite(const Expr& e, const RuleSet& rules) {
  // Power rules run on factor exponents; derivative rules run on atom
  // kernels, differentiating the rule right-hand side for higher orders.
  Expr cur = e;
  for (int pass = 0; pass < 256; ++pass) {
    Expr before = cur;

    for (const auto& pr : rules.power) {
      const PolyFrac& kf = pr.kernel.frac();
      if (kf.num.terms.size() != 1 || kf.num.terms[0].mono.size() != 1 ||
          kf.num.terms[0].coeff != 1 || !kf.den.is_one())
        throw ExprError("power rule kernel must be a single kernel factor");
      KernelId target = kf.num.terms[0].mono[0].k;
      // Reduce factors with rational exponent at or above the rule order.
      bool again = true;
      int guard = 0;
      while (again) {
        if (++guard > 256) throw ExprError("power rule did not terminate");
        again = false;
        const PolyFrac& f = cur.frac();
        auto scan = [&](const Poly& p, bool den) -> bool {
          for (const auto& t : p.terms) {
            for (const auto& fac : t.mono) {
              if (fac.k != target) continue;
              if (fac.e.rat < pr.order) continue;
              // term = rest * k^e -> rest * k^(e-order) * rhs
              Expo e2 = fac.e;
              e2.rat -= pr.order;
              Poly single;
              Term t2 = t;
              for (auto& ff : t2.mono)
                if (ff.k == target) ff.e = e2;
              // Drop zero exponents.
              Monomial m2;
              for (auto& ff : t2.mono)
                if (!ff.e.is_zero()) m2.push_back(ff);
              t2.mono = std::move(m2);
              single.terms.push_back(t2);
              Expr replaced = Expr(make_frac(single, poly_const(Rational(1)))) * pr.rhs;
              Poly rest = p;
              for (auto it = rest.terms.begin(); it != rest.terms.end(); ++it) {
                if (monomial_cmp(it->mono, t.mono) == 0) {
                  rest.terms.erase(it);
                  break;
                }
              }
              Expr rest_e(make_frac(rest, poly_const(Rational(1))));
              Expr whole = rest_e + replaced;
              if (den) {
                Expr num_e(make_frac(f.num, poly_const(Rational(1))));
                cur = num_e / whole;
              } else if (f.den.is_one()) {
                cur = whole;
              } else {
                Expr den_e(make_frac(f.den, poly_const(Rational(1))));
                cur = whole / den_e;
              }
              return true;
            }
          }
          return false;
        };
        if (scan(cur.frac().num, false)) {
          again = true;
          continue;
        }
        if (!cur.frac().den.is_one() && scan(cur.frac().den, true)) {
          again = true;
          continue;
        }
      }
    }

    for (const auto& dr : rules.deriv) {
      auto aid = Symbols::instance().find_atom(dr.atom);
      if (!aid) throw ExprError("derivative rule names unknown atom " + dr.atom);
      const AtomSig& sig = Symbols::instance().sig(*aid);
      KernelHook hook = [&](const Kernel& k) -> std::optional<Expr> {
        if (k.kind != KernelKind::Atom || k.atom != *aid) return std::nullopt;
        if (dr.arg_index >= k.deriv.size()) return std::nullopt;
        if (k.deriv[dr.arg_index] < dr.order) return std::nullopt;
        Expr form = dr.rhs;
        for (size_t i = 0; i < k.deriv.size(); ++i) {
          int extra = k.deriv[i] - (i == dr.arg_index ? dr.order : 0);
          for (int d = 0; d < extra; ++d)
            form = diff_kernel(form, sigvar_kernel(sig.args[i]));
        }
        Bindings argmap;
        for (size_t i = 0; i < sig.args.size(); ++i) {
          std::string nm(1, arg_letter_of(sig.args[i]));
          argmap[nm] = Expr(k.args[i]);
        }
        return one_pass(form, argmap);
      };
      cur = map_kernels(cur, hook);
    }

    if (cur.key() == before.key()) return cur;
  }
  throw ExprError("rewrite did not reach a fixed point");
}

} // namespace telsym
