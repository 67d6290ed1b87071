#include "telsym/parse.hpp"

#include "telsym/calculus.hpp"

#include <cctype>
#include <sstream>

namespace telsym {

namespace {

struct Parser {
  const std::string& src;
  size_t pos = 0;

  explicit Parser(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  Expr parse_expr() {
    Expr r = parse_term();
    while (true) {
      if (eat('+')) {
        r = r + parse_term();
      } else if (eat('-')) {
        r = r - parse_term();
      } else {
        return r;
      }
    }
  }

  Expr parse_term() {
    Expr r = parse_unary();
    while (true) {
      if (eat('*')) {
        r = r * parse_unary();
      } else if (eat('/')) {
        Expr d = parse_unary();
        if (d.is_zero_form()) fail("division by zero");
        r = r / d;
      } else {
        return r;
      }
    }
  }

  Expr parse_unary() {
    if (eat('-')) return -parse_unary();
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (eat('^')) {
      Expr e = parse_unary();
      return pow(base, e);
    }
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (c == '(') {
      ++pos;
      Expr r = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    if (pos < src.size() && src[pos] == '.')
      throw ParseError("decimal literals are not supported; use exact fractions", pos);
    BigInt v(src.substr(start, pos - start));
    return Expr(Rational(v));
  }

  std::vector<Expr> parse_args() {
    std::vector<Expr> args;
    if (!eat('(')) return args;
    if (eat(')')) return args;
    args.push_back(parse_expr());
    while (eat(',')) args.push_back(parse_expr());
    if (!eat(')')) fail("expected ')' after arguments");
    return args;
  }

  Expr parse_ident() {
    size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    std::string name = src.substr(start, pos - start);

    // Builtins with one argument.
    static const std::pair<const char*, FuncKind> fns[] = {
        {"exp", FuncKind::Exp},   {"ln", FuncKind::Ln},
        {"sin", FuncKind::Sin},   {"cos", FuncKind::Cos},
        {"tan", FuncKind::Tan},   {"sinh", FuncKind::Sinh},
        {"cosh", FuncKind::Cosh}, {"tanh", FuncKind::Tanh},
        {"cot", FuncKind::Cot},   {"coth", FuncKind::Coth},
        {"atan", FuncKind::Atan}};
    for (const auto& [fname, fk] : fns) {
      if (name == fname) {
        auto args = require_args(name, 1);
        return func(fk, args[0]);
      }
    }
    if (name == "sqrt") {
      auto args = require_args(name, 1);
      return pow(args[0], Expr(Rational(1, 2)));
    }
    if (name == "abs") {
      // Positive-domain convention: |e| is e.
      auto args = require_args(name, 1);
      return args[0];
    }
    if (name == "dt") {
      auto args = require_args(name, 1);
      return Dt(args[0]);
    }
    if (name == "dx") {
      auto args = require_args(name, 1);
      return Dx(args[0]);
    }

    // Base variables.
    if (name == "t") return base_var(Var::T);
    if (name == "x") return base_var(Var::X);
    if (name == "w") return base_var(Var::W);
    if (name == "y") return base_var(Var::Y);

    // Jet variables: u, u_t, u_x, u_tt, ...
    if (name == "u") return dep_u();
    if (name.size() > 2 && name[0] == 'u' && name[1] == '_') {
      bool jet = true;
      JetVar j;
      for (size_t i = 2; i < name.size(); ++i) {
        if (name[i] == 't') {
          ++j.t_order;
        } else if (name[i] == 'x') {
          ++j.x_order;
        } else {
          jet = false;
          break;
        }
      }
      if (jet) return jet_var(j);
    }

    Symbols& sym = Symbols::instance();
    if (auto pid = sym.find_param(name)) {
      (void)pid;
      if (peek() == '(') fail("parameter '" + name + "' is not callable");
      return param(name);
    }
    if (sym.find_atom(name)) {
      std::vector<Expr> args;
      if (peek() == '(') args = parse_args();
      return make_atom(name, {}, args);
    }
    // Atom derivative suffix: name_letters where name is a known atom.
    auto us = name.rfind('_');
    if (us != std::string::npos && us > 0) {
      std::string head = name.substr(0, us);
      std::string tail = name.substr(us + 1);
      if (auto aid = sym.find_atom(head)) {
        const AtomSig& s = sym.sig(*aid);
        std::vector<std::uint8_t> deriv(s.args.size(), 0);
        bool ok = !tail.empty();
        for (char ch : tail) {
          bool matched = false;
          for (size_t i = 0; i < s.args.size(); ++i) {
            char letter = "txuwy"[static_cast<int>(s.args[i])];
            if (ch == letter) {
              if (deriv[i] == 255) fail("derivative order overflow");
              deriv[i] += 1;
              matched = true;
              break;
            }
          }
          if (!matched) {
            ok = false;
            break;
          }
        }
        if (ok) {
          std::vector<Expr> args;
          if (peek() == '(') args = parse_args();
          return make_atom(head, deriv, args);
        }
      }
    }

    std::ostringstream os;
    os << "unknown identifier '" << name << "'; known symbols: t, x, u, w, y, "
       << "jet variables u_t..., builtins exp ln sin cos tan sinh cosh tanh "
       << "cot coth atan sqrt abs dt dx";
    auto names = sym.known_names();
    if (!names.empty()) {
      os << ", ";
      for (size_t i = 0; i < names.size(); ++i) {
        if (i) os << " ";
        os << names[i];
      }
    }
    pos = start;
    fail(os.str());
  }

  std::vector<Expr> require_args(const std::string& name, size_t n) {
    skip_ws();
    if (peek() != '(') fail("'" + name + "' requires arguments");
    auto args = parse_args();
    if (args.size() != n)
      fail("'" + name + "' takes " + std::to_string(n) + " argument(s)");
    return args;
  }

  Expr make_atom(const std::string& name, const std::vector<std::uint8_t>& deriv,
                 const std::vector<Expr>& args) {
    try {
      return atom(name, deriv, args);
    } catch (const ExprError& e) {
      fail(e.what());
    }
  }
};

} // namespace

Expr parse(const std::string& text) {
  Parser p(text);
  Expr r = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    throw ParseError("trailing input after expression", p.pos);
  return r;
}

} // namespace telsym
