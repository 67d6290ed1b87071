#include "telsym/expr.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace telsym {

namespace {

// Length-prefixed segment; keeps concatenated keys unambiguous.
void put(std::string& out, const std::string& s) {
  out += std::to_string(s.size());
  out += ':';
  out += s;
}

std::string rat_str(const Rational& r) { return to_string(r); }

thread_local int g_depth = 0;
struct DepthGuard {
  DepthGuard() {
    if (++g_depth > 64) {
      --g_depth;
      throw ExprError("expression nesting exceeds supported depth");
    }
  }
  ~DepthGuard() { --g_depth; }
};

} // namespace

std::string jet_name(JetVar j) {
  std::string s = "u";
  if (j.total() > 0) {
    s += "_";
    s.append(j.t_order, 't');
    s.append(j.x_order, 'x');
  }
  return s;
}

// ---------------------------------------------------------------------------
// Kernel interning
// ---------------------------------------------------------------------------

namespace {

struct KernelStore {
  std::shared_mutex mtx;
  std::deque<Kernel> items;
  std::unordered_map<std::string, KernelId> by_key;
};

KernelStore& kstore() {
  static KernelStore s;
  return s;
}

std::string kernel_make_key(const Kernel& k) {
  std::string s;
  switch (k.kind) {
    case KernelKind::Base:
      s = "0";
      s += std::to_string(static_cast<int>(k.base));
      break;
    case KernelKind::Param:
      s = "1";
      put(s, Symbols::instance().param_name(k.param));
      break;
    case KernelKind::Jet:
      s = "2";
      s += std::to_string(k.jet.total());
      s += '.';
      s += std::to_string(static_cast<int>(k.jet.t_order));
      s += '.';
      s += std::to_string(static_cast<int>(k.jet.x_order));
      break;
    case KernelKind::Atom: {
      s = "3";
      put(s, Symbols::instance().sig(k.atom).name);
      std::string d;
      for (auto o : k.deriv) d += std::to_string(static_cast<int>(o)) + ",";
      put(s, d);
      for (const auto& a : k.args) put(s, a->key);
      break;
    }
    case KernelKind::Func:
      s = "4";
      s += std::to_string(static_cast<int>(k.func));
      put(s, k.arg->key);
      break;
    case KernelKind::NumPow:
      s = "5";
      put(s, rat_str(k.numbase));
      break;
    case KernelKind::SumPow:
      s = "6";
      put(s, k.arg->key);
      break;
  }
  return s;
}

KernelId intern_kernel(Kernel k) {
  k.order_key = kernel_make_key(k);
  auto& st = kstore();
  {
    std::shared_lock rd(st.mtx);
    auto it = st.by_key.find(k.order_key);
    if (it != st.by_key.end()) return it->second;
  }
  std::unique_lock wr(st.mtx);
  auto it = st.by_key.find(k.order_key);
  if (it != st.by_key.end()) return it->second;
  KernelId id = static_cast<KernelId>(st.items.size());
  st.by_key.emplace(k.order_key, id);
  st.items.push_back(std::move(k));
  return id;
}

} // namespace

const Kernel& kernel(KernelId id) {
  auto& st = kstore();
  std::shared_lock rd(st.mtx);
  return st.items.at(id);
}

int kernel_cmp(KernelId a, KernelId b) {
  if (a == b) return 0;
  const std::string& ka = kernel(a).order_key;
  const std::string& kb = kernel(b).order_key;
  int c = ka.compare(kb);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

// ---------------------------------------------------------------------------
// Exponents
// ---------------------------------------------------------------------------

Expo expo_add(const Expo& a, const Expo& b) {
  Expo r;
  r.rat = a.rat + b.rat;
  if (!a.sym && !b.sym) return r;
  if (a.sym && !b.sym) {
    r.sym = a.sym;
    return r;
  }
  if (!a.sym && b.sym) {
    r.sym = b.sym;
    return r;
  }
  Expr s = Expr(a.sym) + Expr(b.sym);
  // The symbolic parts carry no rational constant, so their sum may only
  // regain one through cancellation down to a pure constant.
  auto c = s.as_rational();
  if (c) {
    r.rat += *c;
    return r;
  }
  r.sym = s.ptr();
  return r;
}

Expo expo_neg(const Expo& a) {
  Expo r;
  r.rat = -a.rat;
  if (a.sym) r.sym = (-Expr(a.sym)).ptr();
  return r;
}

int expo_cmp(const Expo& a, const Expo& b) {
  if (a.rat != b.rat) return a.rat < b.rat ? -1 : 1;
  if (!a.sym && !b.sym) return 0;
  if (!a.sym) return -1;
  if (!b.sym) return 1;
  int c = a.sym->key.compare(b.sym->key);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::string expo_key(const Expo& e) {
  std::string s;
  put(s, rat_str(e.rat));
  if (e.sym) {
    s += 'S';
    put(s, e.sym->key);
  }
  return s;
}

namespace {

// Exponent scaled by a rational.
Expo expo_scale(const Expo& e, const Rational& c) {
  Expo r;
  r.rat = e.rat * c;
  if (e.sym && c != 0) r.sym = (Expr(e.sym) * Expr(c)).ptr();
  return r;
}

// Split a scalar normal form into rational constant plus remainder.
Expo split_expo(const Expr& e) {
  Expo r;
  auto c = e.as_rational();
  if (c) {
    r.rat = *c;
    return r;
  }
  const PolyFrac& f = e.frac();
  if (f.den.is_one()) {
    Poly rest = f.num;
    for (auto it = rest.terms.begin(); it != rest.terms.end(); ++it) {
      if (it->mono.empty()) {
        r.rat = it->coeff;
        rest.terms.erase(it);
        break;
      }
    }
    r.sym = make_frac(std::move(rest), poly_const(Rational(1)));
    return r;
  }
  r.sym = e.ptr();
  return r;
}

Expo expo_mul(const Expo& a, const Expo& b) {
  if (!a.sym) return expo_scale(b, a.rat);
  if (!b.sym) return expo_scale(a, b.rat);
  Expr prod = (Expr(a.sym) + Expr(a.rat)) * (Expr(b.sym) + Expr(b.rat));
  return split_expo(prod);
}

} // namespace

// ---------------------------------------------------------------------------
// Monomials and terms
// ---------------------------------------------------------------------------

int monomial_cmp(const Monomial& a, const Monomial& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    int kc = kernel_cmp(a[i].k, b[i].k);
    if (kc != 0) return kc;
    int ec = expo_cmp(a[i].e, b[i].e);
    if (ec != 0) return ec;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

namespace {

std::string mono_key(const Monomial& m) {
  std::string s;
  for (const auto& f : m) {
    s += '(';
    put(s, kernel(f.k).order_key);
    s += '^';
    s += expo_key(f.e);
    s += ')';
  }
  return s;
}

std::string poly_key(const Poly& p) {
  std::string s;
  for (const auto& t : p.terms) {
    s += '{';
    put(s, rat_str(t.coeff));
    s += '|';
    put(s, mono_key(t.mono));
    s += '}';
  }
  return s;
}

bool term_less(const Term& a, const Term& b) {
  return monomial_cmp(a.mono, b.mono) > 0;  // descending
}

} // namespace

bool Poly::is_one() const {
  return terms.size() == 1 && terms[0].mono.empty() && terms[0].coeff == 1;
}

std::optional<Rational> Poly::as_rational() const {
  if (terms.empty()) return Rational(0);
  if (terms.size() == 1 && terms[0].mono.empty()) return terms[0].coeff;
  return std::nullopt;
}

Poly poly_zero() { return Poly{}; }

Poly poly_const(const Rational& c) {
  Poly p;
  if (c != 0) p.terms.push_back(Term{c, {}});
  return p;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r;
  r.terms.reserve(a.terms.size() + b.terms.size());
  size_t i = 0, j = 0;
  while (i < a.terms.size() && j < b.terms.size()) {
    int c = monomial_cmp(a.terms[i].mono, b.terms[j].mono);
    if (c > 0) {
      r.terms.push_back(a.terms[i++]);
    } else if (c < 0) {
      r.terms.push_back(b.terms[j++]);
    } else {
      Rational s = a.terms[i].coeff + b.terms[j].coeff;
      if (s != 0) r.terms.push_back(Term{s, a.terms[i].mono});
      ++i;
      ++j;
    }
  }
  while (i < a.terms.size()) r.terms.push_back(a.terms[i++]);
  while (j < b.terms.size()) r.terms.push_back(b.terms[j++]);
  return r;
}

Poly poly_neg(const Poly& a) {
  Poly r = a;
  for (auto& t : r.terms) t.coeff = -t.coeff;
  return r;
}

Poly poly_scale(const Poly& a, const Rational& c) {
  if (c == 0) return poly_zero();
  Poly r = a;
  for (auto& t : r.terms) t.coeff *= c;
  return r;
}

bool poly_equal(const Poly& a, const Poly& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (size_t i = 0; i < a.terms.size(); ++i) {
    if (a.terms[i].coeff != b.terms[i].coeff) return false;
    if (monomial_cmp(a.terms[i].mono, b.terms[i].mono) != 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Factor normalization. Resolves integer powers of NumPow and SumPow kernels
// so no monomial carries one, which keeps products path independent.
// ---------------------------------------------------------------------------

namespace {

struct Raw {
  Poly num;
  Poly den;
};

Raw raw_one() { return Raw{poly_const(Rational(1)), poly_const(Rational(1))}; }
Raw raw_of(Poly p) { return Raw{std::move(p), poly_const(Rational(1))}; }

Raw mul_pp(const Poly& a, const Poly& b);
Raw raw_add(const Raw& A, const Raw& B);
Raw raw_mul(const Raw& A, const Raw& B);
Raw raw_div(const Raw& A, const Raw& B);

struct FactorNorm {
  Rational coeff{1};
  std::optional<Factor> fac;
  bool has_extra = false;
  Poly extra_num;  // expansion contributed to the numerator
  Poly extra_den;  // expansion contributed to the denominator
};

BigInt floor_div(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (numerator(r) < 0 && q * denominator(r) != numerator(r)) q -= 1;
  return q;
}

Rational int_pow_rational(const Rational& base, const BigInt& e) {
  if (e == 0) return Rational(1);
  BigInt n = e < 0 ? BigInt(-e) : e;
  Rational acc(1), b = base;
  while (n > 0) {
    if ((n & 1) != 0) acc *= b;
    b *= b;
    n >>= 1;
  }
  if (e < 0) {
    if (acc == 0) throw ExprError("zero base with negative exponent");
    acc = Rational(1) / acc;
  }
  return acc;
}

FactorNorm normalize_factor(KernelId k, const Expo& e) {
  FactorNorm out;
  if (e.is_zero()) return out;
  const Kernel& kn = kernel(k);
  switch (kn.kind) {
    case KernelKind::Jet:
    case KernelKind::Base:
    case KernelKind::Param:
    case KernelKind::Atom:
    case KernelKind::Func:
      out.fac = Factor{k, e};
      return out;
    case KernelKind::NumPow: {
      if (e.is_integer()) {
        out.coeff = int_pow_rational(kn.numbase, numerator(e.rat));
        return out;
      }
      // Reduce the rational part into [0, 1); the integer part becomes an
      // exact rational coefficient.
      BigInt f = floor_div(e.rat);
      Rational rem = e.rat - Rational(f);
      out.coeff = int_pow_rational(kn.numbase, f);
      if (rem == 0 && !e.sym) return out;
      Expo re;
      re.rat = rem;
      re.sym = e.sym;
      out.fac = Factor{k, re};
      return out;
    }
    case KernelKind::SumPow: {
      const Poly& base = kn.arg->num;
      auto expand = [&](const BigInt& n) {
        if (n == 0) return;
        out.has_extra = true;
        std::uint64_t mag = static_cast<std::uint64_t>(n < 0 ? BigInt(-n) : n);
        Poly ex = poly_pow_uint(base, mag);
        if (n > 0) {
          out.extra_num = std::move(ex);
        } else {
          out.extra_den = std::move(ex);
        }
      };
      if (e.is_integer()) {
        expand(numerator(e.rat));
        return out;
      }
      BigInt f = floor_div(e.rat);
      Rational rem = e.rat - Rational(f);
      expand(f);
      Expo re;
      re.rat = rem;
      re.sym = e.sym;
      if (!(rem == 0) || re.sym) out.fac = Factor{k, re};
      return out;
    }
  }
  throw ExprError("unreachable kernel kind");
}

} // namespace

TermProduct term_mul(const Term& a, const Term& b) {
  Rational coeff = a.coeff * b.coeff;
  Monomial merged;
  merged.reserve(a.mono.size() + b.mono.size());
  size_t i = 0, j = 0;
  std::vector<FactorNorm> extras;
  auto push = [&](KernelId k, const Expo& e) {
    FactorNorm fn = normalize_factor(k, e);
    coeff *= fn.coeff;
    if (fn.fac) merged.push_back(*fn.fac);
    if (fn.has_extra) extras.push_back(std::move(fn));
  };
  while (i < a.mono.size() && j < b.mono.size()) {
    int c = kernel_cmp(a.mono[i].k, b.mono[j].k);
    if (c < 0) {
      merged.push_back(a.mono[i++]);
    } else if (c > 0) {
      merged.push_back(b.mono[j++]);
    } else {
      push(a.mono[i].k, expo_add(a.mono[i].e, b.mono[j].e));
      ++i;
      ++j;
    }
  }
  while (i < a.mono.size()) merged.push_back(a.mono[i++]);
  while (j < b.mono.size()) merged.push_back(b.mono[j++]);

  TermProduct tp;
  if (coeff == 0) {
    tp.num = poly_zero();
    tp.den = poly_const(Rational(1));
    return tp;
  }
  Poly p;
  p.terms.push_back(Term{coeff, std::move(merged)});
  if (extras.empty()) {
    tp.num = std::move(p);
    tp.den = poly_const(Rational(1));
    return tp;
  }
  Raw acc = raw_of(std::move(p));
  for (const auto& ex : extras) {
    if (!ex.extra_num.is_zero() && !ex.extra_num.is_one())
      acc = raw_mul(acc, raw_of(ex.extra_num));
    if (!ex.extra_den.is_zero() && !ex.extra_den.is_one())
      acc = raw_div(acc, raw_of(ex.extra_den));
  }
  tp.num = std::move(acc.num);
  tp.den = std::move(acc.den);
  return tp;
}

namespace {

Raw mul_pp(const Poly& a, const Poly& b) {
  DepthGuard guard;
  Raw acc{poly_zero(), poly_const(Rational(1))};
  // Fast path: accumulate denominator-free term products directly.
  Poly plain = poly_zero();
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      TermProduct tp = term_mul(ta, tb);
      if (tp.den.is_one()) {
        plain = poly_add(plain, tp.num);
      } else {
        acc = raw_add(acc, Raw{std::move(tp.num), std::move(tp.den)});
      }
    }
  }
  if (!plain.is_zero()) acc = raw_add(acc, raw_of(std::move(plain)));
  if (acc.num.is_zero()) acc.den = poly_const(Rational(1));
  return acc;
}

Raw raw_add(const Raw& A, const Raw& B) {
  if (A.num.is_zero()) return B;
  if (B.num.is_zero()) return A;
  if (A.den.is_one() && B.den.is_one())
    return raw_of(poly_add(A.num, B.num));
  if (poly_equal(A.den, B.den)) return Raw{poly_add(A.num, B.num), A.den};
  DepthGuard guard;
  Raw x = mul_pp(A.num, B.den);
  Raw y = mul_pp(B.num, A.den);
  Raw d = mul_pp(A.den, B.den);
  Raw s = raw_add(x, y);
  return raw_div(s, d);
}

Raw raw_mul(const Raw& A, const Raw& B) {
  DepthGuard guard;
  Raw n = mul_pp(A.num, B.num);
  Raw d = mul_pp(A.den, B.den);
  return raw_div(n, d);
}

Raw raw_div(const Raw& A, const Raw& B) {
  if (B.num.is_zero()) throw ExprError("division by zero");
  if (B.num.is_one() && B.den.is_one()) return A;
  DepthGuard guard;
  Raw t = mul_pp(A.num, B.den);
  Raw u = mul_pp(A.den, B.num);
  if (t.den.is_one() && u.den.is_one()) return Raw{t.num, u.num};
  return raw_div(t, u);
}

} // namespace

Poly poly_kernel(KernelId k, Expo e) {
  FactorNorm fn = normalize_factor(k, e);
  if (fn.has_extra)
    throw ExprError("poly_kernel cannot represent an expanded power");
  Poly p;
  if (fn.coeff == 0) return p;
  Monomial m;
  if (fn.fac) m.push_back(*fn.fac);
  p.terms.push_back(Term{fn.coeff, std::move(m)});
  return p;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Raw r = mul_pp(a, b);
  if (!r.den.is_one())
    throw ExprError("polynomial product produced a denominator");
  return std::move(r.num);
}

Poly poly_pow_uint(const Poly& a, std::uint64_t n) {
  Poly acc = poly_const(Rational(1));
  Poly base = a;
  while (n > 0) {
    if (n & 1) acc = poly_mul(acc, base);
    n >>= 1;
    if (n) base = poly_mul(base, base);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Canonical fractions
// ---------------------------------------------------------------------------

namespace {

struct FracStore {
  std::shared_mutex mtx;
  std::unordered_map<std::string, FracPtr> by_key;
};

FracStore& fstore() {
  static FracStore s;
  return s;
}

FracPtr intern_frac(Poly num, Poly den) {
  std::string key = "N";
  key += poly_key(num);
  key += 'D';
  key += poly_key(den);
  auto& st = fstore();
  {
    std::shared_lock rd(st.mtx);
    auto it = st.by_key.find(key);
    if (it != st.by_key.end()) return it->second;
  }
  std::unique_lock wr(st.mtx);
  auto it = st.by_key.find(key);
  if (it != st.by_key.end()) return it->second;
  auto p = std::make_shared<PolyFrac>();
  p->num = std::move(num);
  p->den = std::move(den);
  p->key = key;
  st.by_key.emplace(p->key, p);
  return p;
}

// a / b as one Laurent term, or nullopt when the inversion would re-expand
// a radical power.
std::optional<Term> term_quotient(const Term& a, const Term& b) {
  Term inv;
  inv.coeff = Rational(1) / b.coeff;
  for (const auto& f : b.mono) {
    FactorNorm fn = normalize_factor(f.k, expo_neg(f.e));
    if (fn.has_extra) return std::nullopt;
    inv.coeff *= fn.coeff;
    if (fn.fac) inv.mono.push_back(*fn.fac);
  }
  std::sort(inv.mono.begin(), inv.mono.end(),
            [](const Factor& x, const Factor& y) { return kernel_cmp(x.k, y.k) < 0; });
  TermProduct tp = term_mul(a, inv);
  if (!tp.den.is_one() || tp.num.terms.size() != 1) return std::nullopt;
  return tp.num.terms.front();
}

// Common content of a polynomial: positive rational content plus the widest
// monomial dividing every term. Exponents with symbolic parts join the common
// factor only when every term carries the identical symbolic part.
struct Content {
  Rational c{1};
  Monomial m;
};

Content poly_content(const Poly& p) {
  Content out;
  if (p.terms.empty()) return out;
  // Rational content: gcd of numerators over lcm of denominators.
  BigInt gnum = 0, lden = 1;
  for (const auto& t : p.terms) {
    BigInt n = numerator(t.coeff);
    if (n < 0) n = -n;
    gnum = boost::multiprecision::gcd(gnum, n);
    lden = boost::multiprecision::lcm(lden, denominator(t.coeff));
  }
  if (gnum != 0) out.c = Rational(gnum, lden);

  // Kernel content: intersect factor sets across terms.
  std::map<KernelId, Expo> common;
  std::map<KernelId, bool> valid;
  bool first = true;
  for (const auto& t : p.terms) {
    if (first) {
      for (const auto& f : t.mono) {
        common[f.k] = f.e;
        valid[f.k] = true;
      }
      first = false;
      continue;
    }
    std::map<KernelId, Expo> present;
    for (const auto& f : t.mono) present[f.k] = f.e;
    for (auto& [k, e] : common) {
      if (!valid[k]) continue;
      auto it = present.find(k);
      Expo here;
      if (it != present.end()) here = it->second;
      bool same_sym = (!e.sym && !here.sym) ||
                      (e.sym && here.sym && e.sym->key == here.sym->key);
      if (!same_sym) {
        valid[k] = false;
        continue;
      }
      if (here.rat < e.rat) e.rat = here.rat;
    }
  }
  for (auto& [k, e] : common) {
    if (!valid[k]) continue;
    if (e.is_zero()) continue;
    // A positive common exponent requires presence in every term; absence
    // counted as zero, so only strictly negative or all-present survive.
    out.m.push_back(Factor{k, e});
  }
  return out;
}

// Divides every term of p by c and by monomial m. Exact by construction.
Poly poly_extract(const Poly& p, const Content& ct) {
  Poly r;
  r.terms.reserve(p.terms.size());
  for (const auto& t : p.terms) {
    Term nt;
    nt.coeff = t.coeff / ct.c;
    size_t i = 0, j = 0;
    while (i < t.mono.size() || j < ct.m.size()) {
      if (j == ct.m.size()) {
        nt.mono.push_back(t.mono[i++]);
        continue;
      }
      int c = i == t.mono.size() ? 1 : kernel_cmp(t.mono[i].k, ct.m[j].k);
      if (c < 0) {
        nt.mono.push_back(t.mono[i++]);
      } else if (c == 0) {
        Expo e = expo_add(t.mono[i].e, expo_neg(ct.m[j].e));
        if (!e.is_zero()) nt.mono.push_back(Factor{t.mono[i].k, e});
        ++i;
        ++j;
      } else {
        // m factor missing in this term: exponent was zero, result negative.
        nt.mono.push_back(Factor{ct.m[j].k, expo_neg(ct.m[j].e)});
        ++j;
      }
    }
    // Removing factors cannot break kernel ordering, but inserted negative
    // factors can land out of place; restore order.
    std::sort(nt.mono.begin(), nt.mono.end(), [](const Factor& a, const Factor& b) {
      return kernel_cmp(a.k, b.k) < 0;
    });
    r.terms.push_back(std::move(nt));
  }
  std::sort(r.terms.begin(), r.terms.end(), term_less);
  return r;
}

FracPtr canon(Raw r) {
  for (int rounds = 0; rounds < 64; ++rounds) {
    if (r.den.is_zero()) throw ExprError("division by zero");
    if (r.num.is_zero()) return intern_frac(poly_zero(), poly_const(Rational(1)));
    if (r.den.is_one()) return intern_frac(std::move(r.num), std::move(r.den));

    Content ct = poly_content(r.den);
    bool trivial = ct.c == 1 && ct.m.empty();
    if (!trivial) {
      Poly den2 = poly_extract(r.den, ct);
      // num := num * (1/c) * m^{-1}. Inverting a radical factor can re-expand
      // its base; numerator expansions multiply num, denominator ones den2.
      Term inv;
      inv.coeff = Rational(1) / ct.c;
      Poly extra_num = poly_const(Rational(1));
      for (const auto& f : ct.m) {
        FactorNorm fn = normalize_factor(f.k, expo_neg(f.e));
        inv.coeff *= fn.coeff;
        if (fn.fac) inv.mono.push_back(*fn.fac);
        if (fn.has_extra) {
          if (!fn.extra_num.is_zero() && !fn.extra_num.is_one())
            extra_num = poly_mul(extra_num, fn.extra_num);
          if (!fn.extra_den.is_zero() && !fn.extra_den.is_one())
            den2 = poly_mul(den2, fn.extra_den);
        }
      }
      std::sort(inv.mono.begin(), inv.mono.end(), [](const Factor& a, const Factor& b) {
        return kernel_cmp(a.k, b.k) < 0;
      });
      Poly invp;
      invp.terms.push_back(std::move(inv));
      if (!extra_num.is_one()) invp = poly_mul(invp, extra_num);
      Raw num2 = mul_pp(r.num, invp);
      r.num = std::move(num2.num);
      if (!num2.den.is_one()) {
        r.den = poly_mul(den2, num2.den);
        continue;
      }
      r.den = std::move(den2);
      if (!ct.m.empty()) continue;
    }
    if (r.den.is_one()) return intern_frac(std::move(r.num), std::move(r.den));
    if (r.den.terms.size() == 1) {
      // Single-term denominator after extraction must be a bare constant.
      const Term& t = r.den.terms[0];
      if (t.mono.empty()) {
        r.num = poly_scale(r.num, Rational(1) / t.coeff);
        r.den = poly_const(Rational(1));
        return intern_frac(std::move(r.num), std::move(r.den));
      }
      // A radical factor survived extraction; fold it and loop.
      continue;
    }
    // Exact quotient check: when num is a single-term multiple of den the
    // fraction collapses. This stands in for a full polynomial gcd on the
    // one shape that arithmetic produces routinely (p * (1/p) and scalings).
    if (r.num.terms.size() == r.den.terms.size()) {
      auto q = term_quotient(r.num.terms.front(), r.den.terms.front());
      if (q) {
        Poly qp;
        qp.terms.push_back(*q);
        Raw prod = mul_pp(r.den, qp);
        if (prod.den.is_one() && poly_equal(prod.num, r.num))
          return intern_frac(std::move(qp), poly_const(Rational(1)));
      }
    }
    if (r.den.terms.front().coeff < 0) {
      r.num = poly_neg(r.num);
      r.den = poly_neg(r.den);
    }
    return intern_frac(std::move(r.num), std::move(r.den));
  }
  throw ExprError("fraction normalization did not converge");
}

} // namespace

FracPtr make_frac(Poly num, Poly den) {
  return canon(Raw{std::move(num), std::move(den)});
}

FracPtr frac_const(const Rational& c) {
  return intern_frac(poly_const(c), poly_const(Rational(1)));
}

// ---------------------------------------------------------------------------
// Expr arithmetic
// ---------------------------------------------------------------------------

bool Expr::is_one_form() const {
  return p_->den.is_one() && p_->num.is_one();
}

std::optional<Rational> Expr::as_rational() const {
  if (!p_->den.is_one()) return std::nullopt;
  return p_->num.as_rational();
}

Expr Expr::operator-() const {
  return Expr(intern_frac(poly_neg(p_->num), p_->den));
}

Expr operator+(const Expr& a, const Expr& b) {
  Raw ra{a.frac().num, a.frac().den};
  Raw rb{b.frac().num, b.frac().den};
  return Expr(canon(raw_add(ra, rb)));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  Raw ra{a.frac().num, a.frac().den};
  Raw rb{b.frac().num, b.frac().den};
  return Expr(canon(raw_mul(ra, rb)));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero_form()) throw ExprError("division by zero");
  Raw ra{a.frac().num, a.frac().den};
  Raw rb{b.frac().num, b.frac().den};
  return Expr(canon(raw_div(ra, rb)));
}

bool normal_equal(const Expr& a, const Expr& b) {
  if (a.same_as(b)) return true;
  return (a - b).is_zero_form();
}

// ---------------------------------------------------------------------------
// Leaf constructors
// ---------------------------------------------------------------------------

namespace {

Expr expr_of_kernel(Kernel k) {
  KernelId id = intern_kernel(std::move(k));
  return Expr(make_frac(poly_kernel(id), poly_const(Rational(1))));
}

} // namespace

Expr base_var(Var v) {
  Kernel k;
  k.kind = KernelKind::Base;
  k.base = v;
  return expr_of_kernel(std::move(k));
}

Expr jet_var(JetVar j) {
  Kernel k;
  k.kind = KernelKind::Jet;
  k.jet = j;
  return expr_of_kernel(std::move(k));
}

Expr dep_u() { return jet_var(JetVar{0, 0}); }

Expr param(const std::string& name) {
  Kernel k;
  k.kind = KernelKind::Param;
  k.param = Symbols::instance().param(name);
  return expr_of_kernel(std::move(k));
}

namespace {

FracPtr default_arg(ArgVar v) {
  switch (v) {
    case ArgVar::T: return base_var(Var::T).ptr();
    case ArgVar::X: return base_var(Var::X).ptr();
    case ArgVar::U: return dep_u().ptr();
    case ArgVar::W: return base_var(Var::W).ptr();
    case ArgVar::Y: return base_var(Var::Y).ptr();
  }
  throw ExprError("unreachable arg var");
}

} // namespace

Expr atom(const std::string& name, const std::vector<std::uint8_t>& deriv,
          const std::vector<Expr>& args) {
  auto id = Symbols::instance().find_atom(name);
  if (!id) throw ExprError("unknown atom " + name);
  const AtomSig& sig = Symbols::instance().sig(*id);
  Kernel k;
  k.kind = KernelKind::Atom;
  k.atom = *id;
  k.deriv.assign(sig.args.size(), 0);
  for (size_t i = 0; i < deriv.size() && i < k.deriv.size(); ++i)
    k.deriv[i] = deriv[i];
  if (deriv.size() > sig.args.size())
    throw ExprError("derivative index arity mismatch for atom " + name);
  if (!args.empty() && args.size() != sig.args.size())
    throw ExprError("argument arity mismatch for atom " + name);
  for (size_t i = 0; i < sig.args.size(); ++i) {
    k.args.push_back(args.empty() ? default_arg(sig.args[i]) : args[i].ptr());
  }
  return expr_of_kernel(std::move(k));
}

namespace {

bool func_is_odd(FuncKind k) {
  switch (k) {
    case FuncKind::Sin:
    case FuncKind::Tan:
    case FuncKind::Sinh:
    case FuncKind::Tanh:
    case FuncKind::Cot:
    case FuncKind::Coth:
    case FuncKind::Atan:
      return true;
    default:
      return false;
  }
}

bool func_is_even(FuncKind k) { return k == FuncKind::Cos || k == FuncKind::Cosh; }

Expr func_kernel(FuncKind fk, FracPtr arg) {
  Kernel k;
  k.kind = KernelKind::Func;
  k.func = fk;
  k.arg = std::move(arg);
  return expr_of_kernel(std::move(k));
}

// exp factors split over sums and shed scalar multipliers into exponents so
// products of exponentials collapse by plain exponent addition.
Expr build_exp(const Expr& arg) {
  const PolyFrac& f = arg.frac();
  if (!f.den.is_one()) {
    Expo e;
    e.rat = Rational(1);
    Kernel k;
    k.kind = KernelKind::Func;
    k.func = FuncKind::Exp;
    k.arg = arg.ptr();
    return expr_of_kernel(std::move(k));
  }
  Expr prod = Expr(Rational(1));
  for (const auto& t : f.num.terms) {
    // Split t = s * R, s the scalar slice (coefficient and param factors).
    Expo expo;
    expo.rat = Rational(0);
    Poly spoly = poly_const(t.coeff);
    Monomial rest;
    for (const auto& fac : t.mono) {
      if (kernel(fac.k).kind == KernelKind::Param && fac.e.is_rational()) {
        spoly = poly_mul(spoly, poly_kernel(fac.k, fac.e));
      } else {
        rest.push_back(fac);
      }
    }
    Expr scalar = Expr(make_frac(std::move(spoly), poly_const(Rational(1))));
    Expo e = split_expo(scalar);
    if (rest.empty()) {
      // Pure scalar exponent: exp(s) with natural base kernel exp(1).
      Kernel k;
      k.kind = KernelKind::Func;
      k.func = FuncKind::Exp;
      k.arg = frac_const(Rational(1));
      KernelId id = intern_kernel(std::move(k));
      FactorNorm fn = normalize_factor(id, e);
      Poly p = poly_const(fn.coeff);
      if (fn.fac) {
        Monomial m{*fn.fac};
        Poly q;
        q.terms.push_back(Term{Rational(1), m});
        p = poly_mul(p, q);
      }
      prod = prod * Expr(make_frac(std::move(p), poly_const(Rational(1))));
      continue;
    }
    // ln cancellation: exp of c*ln(A) is A^c.
    if (rest.size() == 1 && kernel(rest[0].k).kind == KernelKind::Func &&
        kernel(rest[0].k).func == FuncKind::Ln && rest[0].e.is_integer() &&
        rest[0].e.rat == 1) {
      Expr lnarg = Expr(kernel(rest[0].k).arg);
      Expr ex = e.sym ? Expr(e.sym) + Expr(e.rat) : Expr(e.rat);
      prod = prod * pow(lnarg, ex);
      continue;
    }
    Poly mono;
    mono.terms.push_back(Term{Rational(1), rest});
    Kernel k;
    k.kind = KernelKind::Func;
    k.func = FuncKind::Exp;
    k.arg = make_frac(std::move(mono), poly_const(Rational(1)));
    KernelId id = intern_kernel(std::move(k));
    FactorNorm fn = normalize_factor(id, e);
    Poly p = poly_const(fn.coeff);
    if (fn.fac) {
      Monomial m{*fn.fac};
      Poly q;
      q.terms.push_back(Term{Rational(1), m});
      p = poly_mul(p, q);
    }
    prod = prod * Expr(make_frac(std::move(p), poly_const(Rational(1))));
  }
  return prod;
}

} // namespace

Expr func(FuncKind fk, const Expr& arg) {
  if (fk == FuncKind::Exp) {
    if (arg.is_zero_form()) return Expr(Rational(1));
    return build_exp(arg);
  }
  if (fk == FuncKind::Ln) {
    if (arg.is_zero_form()) throw ExprError("ln of zero");
    if (arg.is_one_form()) return Expr(Rational(0));
    // ln of a pure product of exponentials collapses to the exponent sum.
    const PolyFrac& f = arg.frac();
    if (f.den.is_one() && f.num.terms.size() == 1 &&
        f.num.terms[0].coeff == 1 && !f.num.terms[0].mono.empty()) {
      bool all_exp = true;
      for (const auto& fac : f.num.terms[0].mono) {
        const Kernel& k = kernel(fac.k);
        if (k.kind != KernelKind::Func || k.func != FuncKind::Exp) {
          all_exp = false;
          break;
        }
      }
      if (all_exp) {
        Expr sum(Rational(0));
        for (const auto& fac : f.num.terms[0].mono) {
          Expr ex(fac.e.rat);
          if (fac.e.sym) ex = ex + Expr(fac.e.sym);
          sum = sum + ex * Expr(kernel(fac.k).arg);
        }
        return sum;
      }
    }
    return func_kernel(fk, arg.ptr());
  }
  // Parity normalization for trig and hyperbolic kernels.
  if (arg.is_zero_form()) {
    if (fk == FuncKind::Cot || fk == FuncKind::Coth)
      throw ExprError("cot/coth of zero");
    if (func_is_even(fk)) return Expr(Rational(1));
    return Expr(Rational(0));
  }
  const PolyFrac& f = arg.frac();
  bool flip = !f.num.terms.empty() && f.num.terms.front().coeff < 0;
  if (!flip) return func_kernel(fk, arg.ptr());
  Expr pos = -arg;
  Expr k = func_kernel(fk, pos.ptr());
  return func_is_odd(fk) ? -k : k;
}

Expr sqrt(const Expr& arg) { return pow(arg, Expr(Rational(1, 2))); }

namespace {

// Rational base raised to a general exponent, via prime factorization.
Raw rational_power(const Rational& base, const Expo& e) {
  if (base == 0) {
    if (!e.sym && e.rat > 0) return Raw{poly_zero(), poly_const(Rational(1))};
    throw ExprError("zero base with nonpositive exponent");
  }
  Raw out = raw_one();
  auto apply = [&](const Rational& b, const Expo& ex) {
    Kernel k;
    k.kind = KernelKind::NumPow;
    k.numbase = b;
    KernelId id = intern_kernel(std::move(k));
    FactorNorm fn = normalize_factor(id, ex);
    Poly p = poly_const(fn.coeff);
    if (fn.fac) {
      Poly q;
      q.terms.push_back(Term{Rational(1), Monomial{*fn.fac}});
      p = poly_mul(p, q);
    }
    out = raw_mul(out, raw_of(std::move(p)));
  };
  Rational mag = base < 0 ? Rational(-base) : base;
  if (base < 0) apply(Rational(-1), e);
  // Factor numerator and denominator magnitudes over small primes.
  auto factor_int = [&](BigInt n, int sign) {
    for (BigInt p = 2; p * p <= n && p < 100000; ++p) {
      int c = 0;
      while (n % p == 0) {
        n /= p;
        ++c;
      }
      if (c) apply(Rational(p), expo_scale(e, Rational(sign * c)));
    }
    if (n > 1) apply(Rational(n), expo_scale(e, Rational(sign)));
  };
  factor_int(numerator(mag), 1);
  factor_int(denominator(mag), -1);
  return out;
}

// poly^e for non-integer or symbolic e.
Raw pow_poly(const Poly& p, const Expo& e) {
  if (p.is_zero()) {
    if (!e.sym && e.rat > 0) return Raw{poly_zero(), poly_const(Rational(1))};
    throw ExprError("zero base with nonpositive exponent");
  }
  if (p.terms.size() == 1) {
    const Term& t = p.terms[0];
    Raw out = rational_power(t.coeff, e);
    for (const auto& f : t.mono) {
      Expo fe = expo_mul(f.e, e);
      FactorNorm fn = normalize_factor(f.k, fe);
      Poly q = poly_const(fn.coeff);
      if (fn.fac) {
        Poly m;
        m.terms.push_back(Term{Rational(1), Monomial{*fn.fac}});
        q = poly_mul(q, m);
      }
      out = raw_mul(out, raw_of(std::move(q)));
      if (fn.has_extra) {
        if (!fn.extra_num.is_zero() && !fn.extra_num.is_one())
          out = raw_mul(out, raw_of(fn.extra_num));
        if (!fn.extra_den.is_zero() && !fn.extra_den.is_one())
          out = raw_div(out, raw_of(fn.extra_den));
      }
    }
    return out;
  }
  // Multi-term base: strip content, wrap the primitive core.
  Content ct = poly_content(p);
  Poly core = poly_extract(p, ct);
  Raw out = rational_power(ct.c, e);
  for (const auto& f : ct.m) {
    Expo fe = expo_mul(f.e, e);
    FactorNorm fn = normalize_factor(f.k, fe);
    Poly q = poly_const(fn.coeff);
    if (fn.fac) {
      Poly m;
      m.terms.push_back(Term{Rational(1), Monomial{*fn.fac}});
      q = poly_mul(q, m);
    }
    out = raw_mul(out, raw_of(std::move(q)));
    if (fn.has_extra) {
      if (!fn.extra_num.is_zero() && !fn.extra_num.is_one())
        out = raw_mul(out, raw_of(fn.extra_num));
      if (!fn.extra_den.is_zero() && !fn.extra_den.is_one())
        out = raw_div(out, raw_of(fn.extra_den));
    }
  }
  Kernel k;
  k.kind = KernelKind::SumPow;
  k.arg = intern_frac(std::move(core), poly_const(Rational(1)));
  KernelId id = intern_kernel(std::move(k));
  FactorNorm fn = normalize_factor(id, e);
  Poly q = poly_const(fn.coeff);
  if (fn.fac) {
    Poly m;
    m.terms.push_back(Term{Rational(1), Monomial{*fn.fac}});
    q = poly_mul(q, m);
  }
  out = raw_mul(out, raw_of(std::move(q)));
  if (fn.has_extra) {
    if (!fn.extra_num.is_zero() && !fn.extra_num.is_one())
      out = raw_mul(out, raw_of(fn.extra_num));
    if (!fn.extra_den.is_zero() && !fn.extra_den.is_one())
      out = raw_div(out, raw_of(fn.extra_den));
  }
  return out;
}

} // namespace

Expr pow_int(const Expr& base, long n) {
  if (n == 0) return Expr(Rational(1));
  bool neg = n < 0;
  std::uint64_t m = neg ? static_cast<std::uint64_t>(-(n + 1)) + 1
                        : static_cast<std::uint64_t>(n);
  Raw acc = raw_one();
  Raw b{base.frac().num, base.frac().den};
  if (neg) std::swap(b.num, b.den);
  if (b.num.is_zero() && neg)
    throw ExprError("zero base with negative exponent");
  std::uint64_t k = m;
  while (k > 0) {
    if (k & 1) acc = raw_mul(acc, b);
    k >>= 1;
    if (k) b = raw_mul(b, b);
  }
  return Expr(canon(std::move(acc)));
}

Expr pow(const Expr& base, const Expr& exponent) {
  Expo e = split_expo(exponent);
  if (!e.sym && is_integer(e.rat)) {
    BigInt n = numerator(e.rat);
    if (n >= -1024 && n <= 1024)
      return pow_int(base, static_cast<long>(n));
    throw ExprError("integer exponent out of range");
  }
  Raw rn = pow_poly(base.frac().num, e);
  Raw rd = pow_poly(base.frac().den, e);
  return Expr(canon(raw_div(rn, rd)));
}

// ---------------------------------------------------------------------------
// Kernel enumeration
// ---------------------------------------------------------------------------

std::vector<KernelId> kernels_of(const Poly& p) {
  std::vector<KernelId> out;
  for (const auto& t : p.terms)
    for (const auto& f : t.mono) out.push_back(f.k);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<KernelId> kernels_of(const Expr& e) {
  std::vector<KernelId> a = kernels_of(e.frac().num);
  std::vector<KernelId> b = kernels_of(e.frac().den);
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

} // namespace telsym
