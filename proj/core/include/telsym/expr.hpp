#pragma once

#include "telsym/rational.hpp"
#include "telsym/symbols.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace telsym {

struct PolyFrac;
using FracPtr = std::shared_ptr<const PolyFrac>;

class Expr;

// ---------------------------------------------------------------------------
// Kernels: the irreducible multiplicative building blocks of normal forms.
// A normal form is a ratio of canonical polynomials whose monomials are
// products of kernel powers. Kernel order is intrinsic (by canonical key),
// never by interning sequence, so output is deterministic.
// ---------------------------------------------------------------------------

enum class KernelKind : std::uint8_t {
  Jet,     // u and its derivatives u_{t^a x^b}
  Base,    // t, x, w, y
  Param,   // named scalar parameter
  Atom,    // function atom application with derivative multi-index
  Func,    // exp, ln, trig, hyperbolic of a normalized argument
  NumPow,  // rational base raised to non-integer powers (e.g. 2^(1/3), (-1)^p)
  SumPow,  // non-monomial base raised to non-integer/symbolic powers
};

struct JetVar {
  std::uint8_t t_order = 0;
  std::uint8_t x_order = 0;
  int total() const { return t_order + x_order; }
  friend bool operator==(JetVar a, JetVar b) {
    return a.t_order == b.t_order && a.x_order == b.x_order;
  }
  // Lexicographic on (total order, t_order).
  friend bool operator<(JetVar a, JetVar b) {
    if (a.total() != b.total()) return a.total() < b.total();
    return a.t_order < b.t_order;
  }
};

std::string jet_name(JetVar j);

struct Kernel {
  KernelKind kind;
  JetVar jet{};                      // Jet
  Var base = Var::T;                 // Base
  ParamId param = 0;                 // Param
  AtomId atom = 0;                   // Atom
  std::vector<std::uint8_t> deriv;   // Atom: per-argument derivative orders
  std::vector<FracPtr> args;         // Atom: argument expressions
  FuncKind func = FuncKind::Exp;     // Func
  FracPtr arg;                       // Func / SumPow payload
  Rational numbase;                  // NumPow

  std::string order_key;             // canonical comparison key
};

using KernelId = std::uint32_t;

const Kernel& kernel(KernelId id);
int kernel_cmp(KernelId a, KernelId b);

// ---------------------------------------------------------------------------
// Exponents: rational part plus optional symbolic part (a scalar normal form).
// u^(mu+1) carries {rat: 1, sym: mu}. Purely rational exponents are the
// common case and integer ones give plain polynomial structure.
// ---------------------------------------------------------------------------

struct Expo {
  Rational rat{0};
  FracPtr sym;  // nullptr when absent; never a rational constant when present

  bool is_rational() const { return sym == nullptr; }
  bool is_integer() const { return sym == nullptr && telsym::is_integer(rat); }
  bool is_zero() const { return sym == nullptr && rat == 0; }
};

Expo expo_add(const Expo& a, const Expo& b);
Expo expo_neg(const Expo& a);
int expo_cmp(const Expo& a, const Expo& b);
std::string expo_key(const Expo& e);

struct Factor {
  KernelId k;
  Expo e;
};

// Sorted by kernel order; no zero exponents; kernels unique.
using Monomial = std::vector<Factor>;

int monomial_cmp(const Monomial& a, const Monomial& b);

struct Term {
  Rational coeff;
  Monomial mono;
};

// Terms sorted descending by monomial, unique monomials, nonzero coefficients.
struct Poly {
  std::vector<Term> terms;
  bool is_zero() const { return terms.empty(); }
  bool is_one() const;
  std::optional<Rational> as_rational() const;
};

Poly poly_zero();
Poly poly_const(const Rational& c);
Poly poly_kernel(KernelId k, Expo e = Expo{Rational(1), nullptr});
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_neg(const Poly& a);
Poly poly_scale(const Poly& a, const Rational& c);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_pow_uint(const Poly& a, std::uint64_t n);
bool poly_equal(const Poly& a, const Poly& b);

// Product of two terms. Usually one term, but exponent collisions on SumPow
// or NumPow kernels can expand (e.g. (x+t)^(1/2) * (x+t)^(3/2) -> (x+t)^2).
// A resulting negative integer SumPow power lands in `den`.
struct TermProduct {
  Poly num;
  Poly den;  // 1 unless a SumPow folded into the denominator
};
TermProduct term_mul(const Term& a, const Term& b);

// ---------------------------------------------------------------------------
// PolyFrac: canonical num/den pair. Denominator is 1 or a multi-term
// polynomial with integer primitive coefficients and positive leading
// coefficient. Single-term denominators are folded into the numerator via
// negative exponents. Fractions are not reduced by polynomial GCD; equality
// testing goes through subtraction.
// ---------------------------------------------------------------------------

struct PolyFrac {
  Poly num;
  Poly den;
  std::string key;  // canonical serialization, used for structural equality
};

FracPtr make_frac(Poly num, Poly den);
FracPtr frac_const(const Rational& c);

// ---------------------------------------------------------------------------
// Expr: immutable handle to a normal form. All construction normalizes.
// ---------------------------------------------------------------------------

class Expr {
 public:
  Expr() : p_(frac_const(Rational(0))) {}
  explicit Expr(FracPtr p) : p_(std::move(p)) {}
  explicit Expr(const Rational& c) : p_(frac_const(c)) {}
  static Expr integer(long v) { return Expr(Rational(v)); }

  const PolyFrac& frac() const { return *p_; }
  const FracPtr& ptr() const { return p_; }
  const std::string& key() const { return p_->key; }

  bool same_as(const Expr& o) const { return p_ == o.p_ || p_->key == o.p_->key; }
  bool is_zero_form() const { return p_->num.is_zero(); }
  bool is_one_form() const;
  std::optional<Rational> as_rational() const;

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);

 private:
  FracPtr p_;
};

// Leaf constructors.
Expr base_var(Var v);
Expr jet_var(JetVar j);
Expr dep_u();  // jet (0,0)
Expr param(const std::string& name);
// Atom with explicit derivative multi-index and argument expressions. When
// `args` is empty the signature's own variables are used (H -> H(u)).
Expr atom(const std::string& name, const std::vector<std::uint8_t>& deriv = {},
          const std::vector<Expr>& args = {});
Expr func(FuncKind k, const Expr& arg);
Expr pow(const Expr& base, const Expr& exponent);
Expr pow_int(const Expr& base, long n);
Expr sqrt(const Expr& arg);

// normal_equal(a, b) <=> numerator of a-b is the zero polynomial.
bool normal_equal(const Expr& a, const Expr& b);

struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iteration helpers used by calculus, substitution and sampling.
std::vector<KernelId> kernels_of(const Poly& p);
std::vector<KernelId> kernels_of(const Expr& e);

} // namespace telsym
