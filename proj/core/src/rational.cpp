#include "telsym/rational.hpp"

#include <limits>
#include <stdexcept>

namespace telsym {

std::optional<std::int64_t> as_small_int(const Rational& r) {
  if (!is_integer(r)) return std::nullopt;
  const BigInt n = num(r);
  if (n > std::numeric_limits<std::int64_t>::max() ||
      n < std::numeric_limits<std::int64_t>::min()) {
    return std::nullopt;
  }
  return static_cast<std::int64_t>(n);
}

Rational rational_pow(const Rational& r, std::int64_t n) {
  if (n == 0) return Rational(1);
  if (r == 0 && n < 0) throw std::domain_error("rational_pow: 0 to a negative power");
  bool neg = n < 0;
  std::uint64_t e = neg ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  Rational base = r;
  Rational acc(1);
  while (e != 0) {
    if (e & 1u) acc *= base;
    base *= base;
    e >>= 1u;
  }
  if (neg) acc = Rational(1) / acc;
  return acc;
}

namespace {

std::optional<BigInt> integer_root(const BigInt& v, std::uint32_t n) {
  if (v < 0) return std::nullopt;
  if (v == 0 || v == 1 || n == 1) return v;
  // Newton iteration on integers, then verify exactly.
  BigInt x = BigInt(1) << static_cast<unsigned>((boost::multiprecision::msb(v) / n) + 1);
  BigInt prev = x + 1;
  while (x < prev) {
    prev = x;
    BigInt p = boost::multiprecision::pow(x, n - 1);
    x = ((n - 1) * x + v / p) / n;
  }
  if (boost::multiprecision::pow(prev, n) == v) return prev;
  return std::nullopt;
}

} // namespace

std::optional<Rational> exact_root(const Rational& r, std::uint32_t n) {
  if (r < 0) return std::nullopt;
  auto rn = integer_root(num(r), n);
  if (!rn) return std::nullopt;
  auto rd = integer_root(den(r), n);
  if (!rd) return std::nullopt;
  return Rational(*rn, *rd);
}

std::string to_string(const Rational& r) {
  if (is_integer(r)) return num(r).str();
  return num(r).str() + "/" + den(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

} // namespace telsym
