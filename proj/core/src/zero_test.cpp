#include "telsym/zero_test.hpp"

#include "telsym/calculus.hpp"
#include "telsym/numeric.hpp"
#include "telsym/printer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <sstream>

namespace telsym {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ProvedZero: return "proved-zero";
    case Verdict::NumericZero: return "numeric-zero";
    case Verdict::ProvedNonzero: return "nonzero";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

bool samplable(KernelId id) {
  switch (kernel(id).kind) {
    case KernelKind::Base:
    case KernelKind::Param:
    case KernelKind::Jet:
    case KernelKind::Atom:
      return true;
    default:
      return false;  // Func/NumPow/SumPow evaluate from their payloads
  }
}

// Rational in [1/2, 2] with denominator at most 7. Small denominators keep
// symbolic-exponent combinations well conditioned, and the positive range
// keeps principal-branch power rules consistent with normalization.
double draw(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> qd(2, 7);
  int q = qd(rng);
  std::uniform_int_distribution<int> ad((q + 1) / 2, 2 * q);
  return static_cast<double>(ad(rng)) / q;
}

} // namespace

ZeroReport test_zero(const Expr& e, const ZeroOptions& opt) {
  ZeroReport rep;
  if (e.is_zero_form()) {
    rep.verdict = Verdict::ProvedZero;
    rep.confidence = 1.0;
    return rep;
  }

  // Clear the top denominator; it becomes a nonvanishing assumption.
  Expr target = e;
  if (!e.frac().den.is_one()) {
    Expr den(make_frac(e.frac().den, poly_const(Rational(1))));
    rep.side_conditions.push_back(to_text(den) + " != 0");
    target = Expr(make_frac(e.frac().num, poly_const(Rational(1))));
  }
  if (auto c = target.as_rational()) {
    rep.verdict = Verdict::ProvedNonzero;  // exact zero already handled
    rep.confidence = 1.0;
    rep.detail = "nonzero constant " + to_string(*c);
    return rep;
  }
  if (opt.trials <= 0) {
    rep.detail = "no trials requested";
    return rep;
  }

  std::set<KernelId> ks = kernels_deep(target);
  for (const auto& p : opt.positive) collect_kernels_deep(p, ks);
  for (const auto& d : opt.derived) collect_kernels_deep(d.second, ks);

  std::vector<KernelId> leaves;
  for (KernelId id : ks)
    if (samplable(id)) leaves.push_back(id);
  // Intrinsic kernel order, so results do not depend on interning history.
  std::sort(leaves.begin(), leaves.end(),
            [](KernelId a, KernelId b) { return kernel_cmp(a, b) < 0; });

  std::vector<KernelId> derived_ids;
  derived_ids.reserve(opt.derived.size());
  for (const auto& d : opt.derived) {
    std::vector<KernelId> pk = kernels_of(param(d.first));
    derived_ids.push_back(pk.front());
  }

  std::mt19937_64 rng(opt.seed);
  int zeroish = 0;
  const int max_attempts = 200;
  for (int trial = 0; trial < opt.trials; ++trial) {
    bool done = false;
    for (int attempt = 0; attempt < max_attempts && !done; ++attempt) {
      CEnv env;
      for (KernelId id : leaves) env[id] = std::complex<double>(draw(rng), 0.0);
      try {
        for (std::size_t di = 0; di < opt.derived.size(); ++di) {
          double ds = 0.0;
          env[derived_ids[di]] = eval_complex(opt.derived[di].second, env, &ds);
        }
        bool ok = true;
        for (const auto& c : opt.positive) {
          double cs = 0.0;
          std::complex<double> v = eval_complex(c, env, &cs);
          if (std::abs(v.imag()) > 1e-9 || v.real() <= 1e-9) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;

        double scale = 0.0;
        std::complex<double> v = eval_complex(target, env, &scale);
        double mag = std::abs(v) / (1.0 + scale);
        rep.worst = std::max(rep.worst, mag);
        if (mag >= opt.nonzero_tol) {
          rep.verdict = Verdict::ProvedNonzero;
          rep.confidence = 1.0;
          std::ostringstream os;
          os << "scaled magnitude " << mag << " at trial " << trial;
          rep.detail = os.str();
          return rep;
        }
        if (mag <= opt.zero_tol) ++zeroish;
        done = true;
      } catch (const EvalError& err) {
        if (err.kind == EvalError::Kind::MissingKernel) {
          rep.verdict = Verdict::Unknown;
          rep.detail = err.what();
          return rep;
        }
        // Domain failure at this point; redraw.
      }
    }
    if (!done) {
      rep.verdict = Verdict::Unknown;
      rep.detail = "sampling exhausted by singular points";
      return rep;
    }
  }

  if (zeroish == opt.trials) {
    rep.verdict = Verdict::NumericZero;
    rep.confidence = 1.0 - std::min(1.0, rep.worst / opt.zero_tol);
  } else {
    rep.verdict = Verdict::Unknown;
    rep.confidence = static_cast<double>(zeroish) / opt.trials;
    std::ostringstream os;
    os << zeroish << " of " << opt.trials
       << " trials within tolerance; worst scaled magnitude " << rep.worst;
    rep.detail = os.str();
  }
  return rep;
}

bool numeric_zero(const Expr& e, const ZeroOptions& opt) {
  return test_zero(e, opt).holds();
}

} // namespace telsym
