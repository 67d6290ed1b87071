#pragma once

#include "telsym/expr.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace telsym {

// Identity testing. Structural zero is decided exactly by the normal form;
// everything else is sampled at random rational points under complex
// evaluation, so fractional powers of intermediate values and explicit
// imaginary units go through one uniform code path.
enum class Verdict {
  ProvedZero,     // numerator of the normal form is the zero polynomial
  NumericZero,    // every sampled trial vanished within tolerance
  ProvedNonzero,  // exact nonzero constant, or some sample clearly nonzero
  Unknown,        // mixed trials, or sampling kept hitting singular points
};

std::string verdict_name(Verdict v);

struct ZeroReport {
  Verdict verdict = Verdict::Unknown;
  // Near 1.0 for a comfortable margin, approaching 0 near the tolerance.
  double confidence = 0.0;
  // Largest |value| / (1 + scale) over accepted trials; scale is the largest
  // absolute subterm seen while evaluating, so cancellation-heavy expressions
  // are judged relative to their own magnitude.
  double worst = 0.0;
  // Nonvanishing assumptions introduced by clearing the top denominator.
  std::vector<std::string> side_conditions;
  std::string detail;
  bool holds() const {
    return verdict == Verdict::ProvedZero || verdict == Verdict::NumericZero;
  }
};

struct ZeroOptions {
  int trials = 20;
  std::uint64_t seed = 20260819ULL;
  double zero_tol = 1e-9;     // scaled by (1 + largest evaluated subterm)
  double nonzero_tol = 1e-6;  // scaled likewise
  // Expressions whose sampled value must be strictly positive; violating
  // draws are rejected and redrawn.
  std::vector<Expr> positive;
  // Parameters pinned to a function of the sampled leaves, applied in order
  // (later entries may reference earlier ones), e.g. a square-root branch
  // or an explicit imaginary unit.
  std::vector<std::pair<std::string, Expr>> derived;
};

ZeroReport test_zero(const Expr& e, const ZeroOptions& opt = {});

// Convenience: ProvedZero or NumericZero.
bool numeric_zero(const Expr& e, const ZeroOptions& opt = {});

} // namespace telsym
