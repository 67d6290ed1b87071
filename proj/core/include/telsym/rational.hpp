#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace telsym {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rational& r) { return den(r) == 1; }

// Fits in int64 and has denominator 1.
std::optional<std::int64_t> as_small_int(const Rational& r);

// r^n for integer n (n may be negative; r must be nonzero then).
Rational rational_pow(const Rational& r, std::int64_t n);

// Exact n-th root if it exists (r >= 0, n >= 1).
std::optional<Rational> exact_root(const Rational& r, std::uint32_t n);

std::string to_string(const Rational& r);
double to_double(const Rational& r);

} // namespace telsym
