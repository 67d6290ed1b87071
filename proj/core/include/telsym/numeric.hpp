#pragma once

#include "telsym/expr.hpp"

#include <complex>
#include <map>
#include <stdexcept>

namespace telsym {

struct EvalError : std::runtime_error {
  enum class Kind { MissingKernel, Domain };
  Kind kind;
  EvalError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Values for leaf kernels (base variables, parameters, jets, atoms). Any
// kernel id may be pinned, including function kernels, which then skip
// their structural evaluation.
using Env = std::map<KernelId, double>;
using CEnv = std::map<KernelId, std::complex<double>>;

// IEEE double evaluation. scale, when given, accumulates the largest
// absolute value of any evaluated subterm. Throws EvalError for missing
// leaves and for singular operations (division by ~0, ln of <= 0, negative
// base under a fractional power).
double eval_numeric(const Expr& e, const Env& env, double* scale = nullptr);

// Complex evaluation; negative bases under fractional powers are valid here.
std::complex<double> eval_complex(const Expr& e, const CEnv& env,
                                  double* scale = nullptr);

} // namespace telsym
