#include "kktcert/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kktcert {

FeasibilityCheck check_feasibility(const Problem& p, std::span<const double> x,
                                   const Tolerances& tol) {
  FeasibilityCheck r;
  for (int j = 0; j < p.m(); ++j) {
    double g;
    try {
      g = evaluate(p.constraints[j], x);
    } catch (const EvalDomainError&) {
      r.feasible = false;
      r.domain_error = true;
      r.first_violated = j + 1;
      return r;
    }
    if (!(g <= tol.eps_feas)) {
      r.feasible = false;
      r.first_violated = j + 1;
      return r;
    }
  }
  r.feasible = true;
  return r;
}

bool is_feasible(const Problem& p, std::span<const double> x,
                 const Tolerances& tol) {
  return check_feasibility(p, x, tol).feasible;
}

ActiveSet active_set(const Problem& p, const Vec& x, const Tolerances& tol) {
  if (!is_feasible(p, x, tol))
    throw std::invalid_argument("active_set requires a feasible point");
  ActiveSet a;
  a.point = x;
  for (int j = 0; j < p.m(); ++j) {
    double g = evaluate(p.constraints[j], x);
    if (std::abs(g) <= tol.eps_active) a.indices.push_back(j + 1);
  }
  return a;
}

namespace {

// Evaluation along the ray that treats domain violations as +inf so they
// land on the infeasible side of the bisection.
double eval_ray(const Expr& g, const Vec& origin, const Vec& dir, double t) {
  Vec x(origin.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = origin[i] + t * dir[i];
  try {
    return evaluate(g, x);
  } catch (const EvalDomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

Vec ray_point(const Vec& origin, const Vec& dir, double t) {
  Vec x(origin.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = origin[i] + t * dir[i];
  return x;
}

}  // namespace

std::optional<Vec> sample_boundary_point(const Problem& p, int j,
                                         const Vec& interior,
                                         const Vec& direction,
                                         const Tolerances& tol) {
  if (j < 1 || j > p.m()) throw std::invalid_argument("constraint index out of range");
  if (static_cast<int>(interior.size()) != p.n ||
      static_cast<int>(direction.size()) != p.n)
    throw std::invalid_argument("dimension mismatch");
  if (norm2(direction) == 0.0)
    throw std::invalid_argument("direction must be nonzero");
  for (int i = 0; i < p.m(); ++i) {
    double g;
    try {
      g = evaluate(p.constraints[i], interior);
    } catch (const EvalDomainError&) {
      throw std::invalid_argument("start point not evaluable");
    }
    if (!(g < 0.0))
      throw std::invalid_argument("start point must be strictly feasible");
  }

  // Stay inside the box: largest t with interior + t*direction in the box.
  double t_max = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.n; ++i) {
    if (direction[i] > 0.0)
      t_max = std::min(t_max, (p.box_hi[i] - interior[i]) / direction[i]);
    else if (direction[i] < 0.0)
      t_max = std::min(t_max, (p.box_lo[i] - interior[i]) / direction[i]);
  }
  if (!(t_max > 0.0)) return std::nullopt;

  const Expr& g = p.constraints[j - 1];

  // Scan for a sign change, then bisect. A bracket [t_lo, t_hi] always keeps
  // g(t_lo) <= 0 < g(t_hi); the returned point is the feasible endpoint.
  const int kScanSteps = 64;
  double t_lo = 0.0;
  double t_hi = -1.0;
  double prev_t = 0.0;
  for (int k = 1; k <= kScanSteps; ++k) {
    double t = t_max * static_cast<double>(k) / kScanSteps;
    double gv = eval_ray(g, interior, direction, t);
    if (gv > 0.0) {
      t_lo = prev_t;
      t_hi = t;
      break;
    }
    prev_t = t;
  }
  if (t_hi < 0.0) return std::nullopt;

  for (int iter = 0; iter < 200 && (t_hi - t_lo) > 1e-15 * t_max; ++iter) {
    double mid = 0.5 * (t_lo + t_hi);
    if (mid <= t_lo || mid >= t_hi) break;  // bracket at machine resolution
    double gv = eval_ray(g, interior, direction, mid);
    if (gv > 0.0)
      t_hi = mid;
    else
      t_lo = mid;
  }

  Vec point = ray_point(interior, direction, t_lo);
  double g_at;
  try {
    g_at = evaluate(g, point);
  } catch (const EvalDomainError&) {
    return std::nullopt;
  }
  if (std::abs(g_at) > tol.eps_active) return std::nullopt;
  // Keep the postcondition exact: the point must still belong to K.
  FeasibilityCheck fc = check_feasibility(p, point, tol);
  if (!fc.feasible) return std::nullopt;
  return point;
}

std::optional<Vec> sample_feasible_point(const Problem& p, std::uint64_t seed,
                                         const Tolerances& tol) {
  SplitMix64 rng(seed);
  const int kMaxDraws = 100000;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    Vec x = random_box_point(rng, p);
    if (check_feasibility(p, x, tol).feasible) return x;
  }
  return std::nullopt;
}

Vec random_direction(SplitMix64& rng, int n) {
  for (;;) {
    Vec d(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      d[i] = rng.uniform(-1.0, 1.0);
      s += d[i] * d[i];
    }
    if (s > 1e-12) return d;
  }
}

Vec random_box_point(SplitMix64& rng, const Problem& p) {
  Vec x(p.n);
  for (int i = 0; i < p.n; ++i) x[i] = rng.uniform(p.box_lo[i], p.box_hi[i]);
  return x;
}

}  // namespace kktcert
