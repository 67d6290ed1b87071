#include "telsym/symbols.hpp"

#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace telsym {

const char* var_name(Var v) {
  switch (v) {
    case Var::T: return "t";
    case Var::X: return "x";
    case Var::W: return "w";
    case Var::Y: return "y";
  }
  return "?";
}

std::optional<Var> var_from_name(const std::string& s) {
  if (s == "t") return Var::T;
  if (s == "x") return Var::X;
  if (s == "w") return Var::W;
  if (s == "y") return Var::Y;
  return std::nullopt;
}

const char* func_name(FuncKind k) {
  switch (k) {
    case FuncKind::Exp: return "exp";
    case FuncKind::Ln: return "ln";
    case FuncKind::Sin: return "sin";
    case FuncKind::Cos: return "cos";
    case FuncKind::Tan: return "tan";
    case FuncKind::Sinh: return "sinh";
    case FuncKind::Cosh: return "cosh";
    case FuncKind::Tanh: return "tanh";
    case FuncKind::Cot: return "cot";
    case FuncKind::Coth: return "coth";
    case FuncKind::Atan: return "atan";
  }
  return "?";
}

std::optional<FuncKind> func_from_name(const std::string& s) {
  if (s == "exp") return FuncKind::Exp;
  if (s == "ln") return FuncKind::Ln;
  if (s == "sin") return FuncKind::Sin;
  if (s == "cos") return FuncKind::Cos;
  if (s == "tan") return FuncKind::Tan;
  if (s == "sinh") return FuncKind::Sinh;
  if (s == "cosh") return FuncKind::Cosh;
  if (s == "tanh") return FuncKind::Tanh;
  if (s == "cot") return FuncKind::Cot;
  if (s == "coth") return FuncKind::Coth;
  if (s == "atan") return FuncKind::Atan;
  return std::nullopt;
}

const char* arg_name(ArgVar a) {
  switch (a) {
    case ArgVar::T: return "t";
    case ArgVar::X: return "x";
    case ArgVar::U: return "u";
    case ArgVar::W: return "w";
    case ArgVar::Y: return "y";
  }
  return "?";
}

struct Symbols::Impl {
  mutable std::shared_mutex mu;
  std::vector<AtomSig> atoms;
  std::map<std::string, AtomId> atom_by_name;
  std::vector<std::string> params;
  std::map<std::string, ParamId> param_by_name;
};

Symbols::Symbols() : impl_(new Impl) {
  // Arbitrary elements of the equation class and the antiderivative atoms.
  atom("f", {ArgVar::X});
  atom("g", {ArgVar::X});
  atom("h", {ArgVar::X});
  atom("H", {ArgVar::U});
  atom("K", {ArgVar::U});
  atom("IntH", {ArgVar::U}, AtomRule::IntH);
  atom("IntK", {ArgVar::U}, AtomRule::IntK);
  atom("IntHx", {ArgVar::X}, AtomRule::IntHx);
  atom("ExpIntH", {ArgVar::X}, AtomRule::ExpIntH);
  atom("IntExpIntH", {ArgVar::X}, AtomRule::IntExpIntH);
  atom("IntSqrtF", {ArgVar::X}, AtomRule::IntSqrtF);
  atom("IntG", {ArgVar::X}, AtomRule::IntG);
  atom("FExp", {ArgVar::X}, AtomRule::FExp);
  // Opaque letters whose defining relations are supplied as rewrite rules at
  // the point of use: solutions of auxiliary ODEs and side-condition fields.
  atom("a", {ArgVar::T});
  atom("W", {ArgVar::X});
  atom("Ai", {ArgVar::W});
  atom("Bi", {ArgVar::W});
  atom("sigma", {ArgVar::T, ArgVar::X});
  atom("phi", {ArgVar::W});
  // Undetermined components of a point field over (t, x, u), kept opaque so
  // determining systems can be split into their monomial coefficients.
  atom("tau", {ArgVar::T, ArgVar::X, ArgVar::U});
  atom("xi", {ArgVar::T, ArgVar::X, ArgVar::U});
  atom("eta", {ArgVar::T, ArgVar::X, ArgVar::U});
  // Reduced-dependence stand-ins used when splitting the generic residual a
  // second time, after the mixed-jet coefficients have forced tau = tau(t)
  // and xi = xi(x).
  atom("tau0", {ArgVar::T});
  atom("xi0", {ArgVar::X});
  // Placeholders naming lines 2..6 of the displayed determining system, so the
  // monomial-to-line correspondence can be stored as data and bound in checks.
  atom("eq2", {ArgVar::T, ArgVar::X, ArgVar::U});
  atom("eq3", {ArgVar::T, ArgVar::X, ArgVar::U});
  atom("eq4", {ArgVar::T, ArgVar::X, ArgVar::U});
  atom("eq5", {ArgVar::T, ArgVar::X, ArgVar::U});
  atom("eq6", {ArgVar::T, ArgVar::X, ArgVar::U});
  for (const char* p :
       {"mu", "nu", "p", "q", "alpha", "beta", "eps", "lambda", "delta",
        "lambda1", "lambda2",
        "gamma0", "gamma1", "c0", "c1", "c2", "c3", "c4",
        "a00", "a01", "a10", "a11", "h0", "h1", "i", "s",
        "d0", "d1", "d2", "d3", "d4",
        "e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8", "e9",
        "fa0", "fa1", "fb0", "fb1", "fb2"}) {
    param(p);
  }
}

Symbols& Symbols::instance() {
  static Symbols s;
  return s;
}

AtomId Symbols::atom(const std::string& name, const std::vector<ArgVar>& args,
                     AtomRule rule) {
  std::unique_lock lk(impl_->mu);
  auto it = impl_->atom_by_name.find(name);
  if (it != impl_->atom_by_name.end()) {
    const AtomSig& have = impl_->atoms[it->second];
    if (have.args != args || have.rule != rule) {
      throw std::invalid_argument("atom '" + name +
                                  "' re-registered with a different signature");
    }
    return it->second;
  }
  AtomId id = static_cast<AtomId>(impl_->atoms.size());
  impl_->atoms.push_back(AtomSig{name, args, rule});
  impl_->atom_by_name.emplace(name, id);
  return id;
}

std::optional<AtomId> Symbols::find_atom(const std::string& name) const {
  std::shared_lock lk(impl_->mu);
  auto it = impl_->atom_by_name.find(name);
  if (it == impl_->atom_by_name.end()) return std::nullopt;
  return it->second;
}

const AtomSig& Symbols::sig(AtomId id) const {
  std::shared_lock lk(impl_->mu);
  return impl_->atoms.at(id);
}

ParamId Symbols::param(const std::string& name) {
  std::unique_lock lk(impl_->mu);
  auto it = impl_->param_by_name.find(name);
  if (it != impl_->param_by_name.end()) return it->second;
  ParamId id = static_cast<ParamId>(impl_->params.size());
  impl_->params.push_back(name);
  impl_->param_by_name.emplace(name, id);
  return id;
}

std::optional<ParamId> Symbols::find_param(const std::string& name) const {
  std::shared_lock lk(impl_->mu);
  auto it = impl_->param_by_name.find(name);
  if (it == impl_->param_by_name.end()) return std::nullopt;
  return it->second;
}

const std::string& Symbols::param_name(ParamId id) const {
  std::shared_lock lk(impl_->mu);
  return impl_->params.at(id);
}

std::vector<std::string> Symbols::known_names() const {
  std::shared_lock lk(impl_->mu);
  std::vector<std::string> out;
  for (const auto& [name, id] : impl_->atom_by_name) out.push_back(name);
  for (const auto& [name, id] : impl_->param_by_name) out.push_back(name);
  return out;
}

} // namespace telsym
