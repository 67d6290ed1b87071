#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace telsym {

// Base variables of the analysis: time t, space x, dependent u (order-(0,0) jet),
// reduction invariant w, auxiliary chart variable y.
enum class Var : std::uint8_t { T, X, W, Y };

const char* var_name(Var v);
std::optional<Var> var_from_name(const std::string& s);

enum class FuncKind : std::uint8_t {
  Exp, Ln, Sin, Cos, Tan, Sinh, Cosh, Tanh, Cot, Coth, Atan
};

const char* func_name(FuncKind k);
std::optional<FuncKind> func_from_name(const std::string& s);

// Formal argument slot of a function atom. U stands for the dependent variable.
enum class ArgVar : std::uint8_t { T, X, U, W, Y };

const char* arg_name(ArgVar a);

// Atoms with built-in derivative rules:
//   IntH(u):      d/du IntH = H(u)
//   IntK(u):      d/du IntK = K(u)
//   IntHx(x):     d/dx IntHx = h(x)
//   ExpIntH(x):   d/dx ExpIntH = eps*h(x)*ExpIntH(x)
//   IntExpIntH(x): d/dx IntExpIntH = ExpIntH(x)
//   IntSqrtF(x):  d/dx IntSqrtF = f(x)^(1/2)
//   IntG(x):      d/dx IntG = g(x)
//   FExp(x):      d/dx FExp = (fa1*x+fa0)/(fb2*x^2+fb1*x+fb0) * FExp(x),
//                 a family of exp-of-rational-antiderivative coefficients
enum class AtomRule : std::uint8_t {
  None, IntH, IntK, IntHx, ExpIntH, IntExpIntH, IntSqrtF, IntG, FExp
};

struct AtomSig {
  std::string name;
  std::vector<ArgVar> args;
  AtomRule rule = AtomRule::None;
};

using AtomId = std::uint32_t;
using ParamId = std::uint32_t;

// Process-wide interning of atom signatures and parameter names. Canonical
// ordering everywhere is by name, never by id, so results do not depend on
// registration order.
class Symbols {
 public:
  static Symbols& instance();

  // Registers or returns the existing atom. Throws if re-registered with a
  // different signature.
  AtomId atom(const std::string& name, const std::vector<ArgVar>& args,
              AtomRule rule = AtomRule::None);
  std::optional<AtomId> find_atom(const std::string& name) const;
  const AtomSig& sig(AtomId id) const;

  ParamId param(const std::string& name);
  std::optional<ParamId> find_param(const std::string& name) const;
  const std::string& param_name(ParamId id) const;

  std::vector<std::string> known_names() const;

 private:
  Symbols();
  struct Impl;
  Impl* impl_;
};

} // namespace telsym
