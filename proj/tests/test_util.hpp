#pragma once

#include <cmath>
#include <string>

#include "kktcert/expr.hpp"
#include "kktcert/linalg.hpp"
#include "kktcert/model.hpp"
#include "kktcert/rng.hpp"

namespace kktcert::testing {

inline std::string fixture(const std::string& name) {
  return std::string(KKTCERT_FIXTURE_DIR) + "/" + name;
}

// Independent derivative oracle: central differences on evaluate().
inline Vec central_difference_gradient(const Expr& e, const Vec& x,
                                       double h = 1e-6) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (evaluate(e, xp) - evaluate(e, xm)) / (2.0 * h);
  }
  return g;
}

// Random polynomial of total degree <= max_degree with coefficients in
// [-2, 2]; always references only variables 1..n.
inline Expr random_polynomial(SplitMix64& rng, int n, int max_degree = 4,
                              int max_terms = 5) {
  int terms = 1 + static_cast<int>(rng.next_u64() % max_terms);
  Expr sum;
  for (int t = 0; t < terms; ++t) {
    Expr term = Expr::constant(rng.uniform(-2.0, 2.0));
    int degree = static_cast<int>(rng.next_u64() % (max_degree + 1));
    for (int d = 0; d < degree; ++d) {
      int v = 1 + static_cast<int>(rng.next_u64() % n);
      term = Expr::binary(NodeKind::kMul, std::move(term), Expr::variable(v));
    }
    if (sum.empty())
      sum = std::move(term);
    else
      sum = Expr::binary(rng.next_double() < 0.5 ? NodeKind::kAdd : NodeKind::kSub,
                         std::move(sum), std::move(term));
  }
  return sum;
}

// Polynomial wrapped in exp/log/sqrt with arguments kept tame so the
// finite-difference oracle stays accurate: exp gets a scaled argument, log
// and sqrt get 1.5 + w^2 which is bounded away from their domain edges.
inline Expr random_smooth_expr(SplitMix64& rng, int n) {
  int shape = static_cast<int>(rng.next_u64() % 4);
  if (shape == 0) return random_polynomial(rng, n);
  Expr w = Expr::binary(NodeKind::kMul, Expr::constant(0.25),
                        random_polynomial(rng, n, 2, 3));
  Expr safe = Expr::binary(NodeKind::kAdd, Expr::constant(1.5),
                           Expr::pow(w, 2));
  Expr wrapped = shape == 1 ? Expr::unary(NodeKind::kExp, std::move(w))
                : shape == 2 ? Expr::unary(NodeKind::kLog, std::move(safe))
                             : Expr::unary(NodeKind::kSqrt, std::move(safe));
  return Expr::binary(NodeKind::kAdd, std::move(wrapped),
                      random_polynomial(rng, n, 2, 2));
}

inline Vec random_point(SplitMix64& rng, int n, double lo = -1.5,
                        double hi = 1.5) {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

// Largest relative gradient error against the central-difference oracle.
inline double max_relative_gradient_error(const Expr& e, const Vec& x) {
  GradientVector ad = gradient(e, x);
  Vec fd = central_difference_gradient(e, x);
  double worst = 0.0;
  for (std::size_t i = 0; i < fd.size(); ++i) {
    double denom = std::max(1.0, std::abs(fd[i]));
    worst = std::max(worst, std::abs(ad.grad[i] - fd[i]) / denom);
  }
  return worst;
}

}  // namespace kktcert::testing
