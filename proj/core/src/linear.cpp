#include "telsym/linear.hpp"

#include "telsym/calculus.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace telsym {

namespace {

// Row-reduces the augmented system in place; returns pivot column per row.
std::vector<int> eliminate(std::vector<std::vector<Rational>>& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  std::size_t cols = m.front().size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t sel = row;
    while (sel < m.size() && m[sel][col] == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[row], m[sel]);
    Rational inv = Rational(1) / m[row][col];
    for (std::size_t j = col; j < cols; ++j) m[row][j] *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == row || m[i][col] == 0) continue;
      Rational fac = m[i][col];
      for (std::size_t j = col; j < cols; ++j) m[i][j] -= fac * m[row][j];
    }
    pivots.push_back(static_cast<int>(col));
    ++row;
  }
  return pivots;
}

} // namespace

std::optional<std::vector<Rational>> solve_linear(
    std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  std::size_t n = a.empty() ? 0 : a.front().size();
  for (std::size_t i = 0; i < a.size(); ++i) a[i].push_back(b[i]);
  std::vector<int> pivots = eliminate(a);
  std::vector<Rational> x(n, Rational(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    if (pivots[r] == static_cast<int>(n)) return std::nullopt;  // 0 = 1 row
    x[pivots[r]] = a[r][n];
  }
  return x;
}

int matrix_rank(std::vector<std::vector<Rational>> a) {
  return static_cast<int>(eliminate(a).size());
}

std::vector<std::vector<Rational>> affine_system(
    const Expr& e, const std::vector<KernelId>& params) {
  std::set<KernelId> pset(params.begin(), params.end());
  auto check_clean = [&](const Expr& sub) {
    for (KernelId id : kernels_deep(sub))
      if (pset.count(id))
        throw ExprError("expression is not affine in the unknowns");
  };
  if (!e.frac().den.is_one())
    check_clean(Expr(make_frac(e.frac().den, poly_const(Rational(1)))));

  std::size_t n = params.size();
  std::map<std::string, std::vector<Rational>> groups;
  for (const Term& t : e.frac().num.terms) {
    int which = -1;
    std::string key;
    for (const Factor& fac : t.mono) {
      auto it = pset.find(fac.k);
      if (it != pset.end()) {
        if (which >= 0 || !fac.e.is_rational() || fac.e.rat != 1)
          throw ExprError("expression is not affine in the unknowns");
        which = static_cast<int>(
            std::find(params.begin(), params.end(), fac.k) - params.begin());
        continue;
      }
      // Unknowns hiding inside arguments, bases or exponents break affinity.
      const Kernel& k = kernel(fac.k);
      if (k.kind == KernelKind::Func || k.kind == KernelKind::SumPow)
        check_clean(Expr(k.arg));
      if (k.kind == KernelKind::Atom)
        for (const FracPtr& argp : k.args) check_clean(Expr(argp));
      if (fac.e.sym) check_clean(Expr(fac.e.sym));
      key += k.order_key;
      key += '^';
      key += expo_key(fac.e);
      key += ';';
    }
    auto [it, fresh] = groups.try_emplace(key, std::vector<Rational>());
    if (fresh) it->second.assign(n + 1, Rational(0));
    it->second[which < 0 ? n : static_cast<std::size_t>(which)] += t.coeff;
  }
  std::vector<std::vector<Rational>> rows;
  rows.reserve(groups.size());
  for (auto& [k, row] : groups) rows.push_back(std::move(row));
  return rows;
}

std::optional<std::vector<Rational>> rational_combination(
    const std::vector<std::vector<Expr>>& tuples,
    const std::vector<Expr>& target) {
  std::size_t n = tuples.size();
  std::vector<Expr> cs;
  std::vector<KernelId> cids;
  for (std::size_t i = 0; i < n; ++i) {
    cs.push_back(param("#c" + std::to_string(i)));
    cids.push_back(kernels_of(cs.back()).front());
  }
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  for (std::size_t k = 0; k < target.size(); ++k) {
    Expr eq = -target[k];
    for (std::size_t i = 0; i < n; ++i) {
      if (tuples[i].size() != target.size())
        throw ExprError("tuple length mismatch in rational combination");
      eq = eq + cs[i] * tuples[i][k];
    }
    for (std::vector<Rational>& row : affine_system(eq, cids)) {
      b.push_back(-row.back());
      row.pop_back();
      a.push_back(std::move(row));
    }
  }
  if (a.empty()) return std::vector<Rational>(n, Rational(0));
  return solve_linear(std::move(a), std::move(b));
}

} // namespace telsym
