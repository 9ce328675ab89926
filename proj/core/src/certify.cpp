#include "kktcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kktcert {

const char* to_string(CertificationStatus s) {
  switch (s) {
    case CertificationStatus::kCertifiedModuloSampling:
      return "CERTIFIED_MODULO_SAMPLING";
    case CertificationStatus::kRefutedConvexity:
      return "REFUTED_CONVEXITY";
    case CertificationStatus::kDegenerateFritzJohn:
      return "DEGENERATE_FJ";
    case CertificationStatus::kNoSlater:
      return "NO_SLATER";
    case CertificationStatus::kKktResidualTooLarge:
      return "KKT_RESIDUAL_TOO_LARGE";
  }
  return "UNKNOWN";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double constraint_max(const Problem& p, const Vec& x) {
  double worst = -kInf;
  for (int j = 0; j < p.m(); ++j) {
    double g;
    try {
      g = evaluate(p.constraints[j], x);
    } catch (const EvalDomainError&) {
      return kInf;
    }
    worst = std::max(worst, g);
  }
  return worst;
}

Vec clamp_to_box(const Problem& p, Vec x) {
  for (int i = 0; i < p.n; ++i)
    x[i] = std::min(std::max(x[i], p.box_lo[i]), p.box_hi[i]);
  return x;
}

Vec box_center(const Problem& p) {
  Vec c(p.n);
  for (int i = 0; i < p.n; ++i) c[i] = 0.5 * (p.box_lo[i] + p.box_hi[i]);
  return c;
}

// Log-sum-exp smoothing of max_j g_j at temperature tau, with gradient.
// Returns false on a domain violation.
bool lse_value_grad(const Problem& p, const Vec& x, double tau, double& value,
                    Vec& grad) {
  const int m = p.m();
  Vec gv(m);
  std::vector<Vec> gg(m);
  double peak = -kInf;
  try {
    for (int j = 0; j < m; ++j) {
      GradientVector g = gradient(p.constraints[j], x);
      gv[j] = g.value;
      gg[j] = std::move(g.grad);
      peak = std::max(peak, gv[j]);
    }
  } catch (const EvalDomainError&) {
    return false;
  }
  double sum = 0.0;
  Vec weights(m);
  for (int j = 0; j < m; ++j) {
    weights[j] = std::exp((gv[j] - peak) / tau);
    sum += weights[j];
  }
  value = peak + tau * std::log(sum);
  grad.assign(p.n, 0.0);
  for (int j = 0; j < m; ++j) {
    double w = weights[j] / sum;
    for (int i = 0; i < p.n; ++i) grad[i] += w * gg[j][i];
  }
  return true;
}

// Gradient descent with Armijo backtracking on the smoothed max, iterates
// clamped to the box.
Vec descend_smoothed_max(const Problem& p, Vec x, double tau, int max_iters) {
  double value;
  Vec grad;
  if (!lse_value_grad(p, x, tau, value, grad)) return x;
  for (int it = 0; it < max_iters; ++it) {
    double gnorm2 = dot(grad, grad);
    if (gnorm2 <= 1e-18) break;
    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 50; ++bt) {
      Vec cand = clamp_to_box(p, axpy(x, -step, grad));
      double cand_value;
      Vec cand_grad;
      if (lse_value_grad(p, cand, tau, cand_value, cand_grad) &&
          cand_value <= value - 1e-4 * step * gnorm2) {
        x = std::move(cand);
        value = cand_value;
        grad = std::move(cand_grad);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return x;
}

}  // namespace

SlaterSearchResult slater_search(const Problem& p, std::uint64_t seed,
                                 const Tolerances& tol) {
  SlaterSearchResult result;
  result.failure.best_phi = kInf;
  result.failure.best_x = box_center(p);

  auto consider = [&](const Vec& x) {
    double phi = constraint_max(p, x);
    if (phi < result.failure.best_phi) {
      result.failure.best_phi = phi;
      result.failure.best_x = x;
    }
  };

  SplitMix64 rng(seed);
  const int kStarts = 8;
  const double kTemperatures[] = {1.0, 0.3, 0.1, 0.03, 0.01};

  for (int s = 0; s < kStarts; ++s) {
    Vec x = s == 0 ? box_center(p) : random_box_point(rng, p);
    consider(x);
    for (double tau : kTemperatures) {
      x = descend_smoothed_max(p, x, tau, 150);
      consider(x);
    }
    if (result.failure.best_phi < 0.0) break;
  }

  if (!(result.failure.best_phi < 0.0)) {
    // Rejection-sampling fallback.
    SplitMix64 fallback = rng.split(0xFA11BAC);
    for (int d = 0; d < 2000; ++d) {
      consider(random_box_point(fallback, p));
      if (result.failure.best_phi < 0.0) break;
    }
  }

  if (result.failure.best_phi < 0.0) {
    SlaterCertificate cert;
    cert.x0 = result.failure.best_x;
    cert.margin = -result.failure.best_phi;
    result.certificate = std::move(cert);
  }
  (void)tol;
  return result;
}

namespace {

// Fallback used when no strictly feasible starting point exists: look for
// feasible points where g_j is active and critical, by multistart descent on
// q(x) = g_j(x)^2 + ||grad g_j(x)||^2 with finite-difference gradients.
void critical_point_scan(const Problem& p, int j1, int starts,
                         std::uint64_t seed, const Tolerances& tol,
                         ConstraintNondegeneracy& out) {
  const Expr& g = p.constraints[j1 - 1];
  auto q = [&](const Vec& x) -> double {
    try {
      GradientVector gr = gradient(g, x);
      return gr.value * gr.value + dot(gr.grad, gr.grad);
    } catch (const EvalDomainError&) {
      return kInf;
    }
  };

  const double h = 1e-6;
  auto q_grad = [&](const Vec& x) -> Vec {
    Vec grad(p.n);
    for (int i = 0; i < p.n; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      grad[i] = (q(xp) - q(xm)) / (2.0 * h);
    }
    return grad;
  };

  SplitMix64 rng = SplitMix64(seed).split(j1);
  std::vector<Vec> candidates;
  for (int s = 0; s < starts; ++s) {
    Vec x = s == 0 ? box_center(p) : random_box_point(rng, p);
    double value = q(x);
    if (!std::isfinite(value)) continue;
    for (int it = 0; it < 300; ++it) {
      Vec grad = q_grad(x);
      double gnorm2 = dot(grad, grad);
      if (gnorm2 <= 1e-24) break;
      double step = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        Vec cand = clamp_to_box(p, axpy(x, -step, grad));
        double cv = q(cand);
        if (cv <= value - 1e-4 * step * gnorm2) {
          x = std::move(cand);
          value = cv;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    bool duplicate = false;
    for (const Vec& c : candidates) {
      Vec diff = axpy(c, -1.0, x);
      if (norm2(diff) < 1e-8) duplicate = true;
    }
    if (duplicate) continue;
    candidates.push_back(x);

    if (!check_feasibility(p, x, tol).feasible) continue;
    double gval = evaluate(g, x);
    if (std::abs(gval) > tol.eps_active) continue;
    double gnorm = norm2(gradient(g, x).grad);
    ++out.samples_tested;
    if (!out.min_gradient_norm || gnorm < *out.min_gradient_norm)
      out.min_gradient_norm = gnorm;
    if (gnorm < tol.eps_grad) out.failures.push_back({x, gnorm});
  }
}

}  // namespace

NondegeneracyReport nondegeneracy_check(
    const Problem& p, const std::optional<SlaterCertificate>& slater,
    int samples_per_constraint, std::uint64_t seed, const Tolerances& tol) {
  NondegeneracyReport report;
  SplitMix64 master(seed);

  for (int j = 1; j <= p.m(); ++j) {
    ConstraintNondegeneracy entry;
    entry.j = j;

    if (slater) {
      SplitMix64 rng = master.split(static_cast<std::uint64_t>(j));
      for (int s = 0; s < samples_per_constraint; ++s) {
        Vec dir = random_direction(rng, p.n);
        auto bp = sample_boundary_point(p, j, slater->x0, dir, tol);
        if (!bp) continue;
        double gnorm = norm2(gradient(p.constraints[j - 1], *bp).grad);
        ++entry.samples_tested;
        if (!entry.min_gradient_norm || gnorm < *entry.min_gradient_norm)
          entry.min_gradient_norm = gnorm;
        if (gnorm < tol.eps_grad) entry.failures.push_back({*bp, gnorm});
      }
    } else {
      critical_point_scan(p, j, 6, seed, tol, entry);
    }
    report.per_constraint.push_back(std::move(entry));
  }
  return report;
}

PairProbe probe_convexity_pair(const Problem& p, int j, const Vec& x,
                               const Vec& y, const Tolerances& tol) {
  PairProbe probe;
  GradientVector g;
  try {
    g = gradient(p.constraints[j - 1], x);
  } catch (const EvalDomainError&) {
    return probe;
  }
  Vec diff = axpy(y, -1.0, x);
  probe.inner_product = dot(g.grad, diff);
  if (!(probe.inner_product > tol.eps_kkt)) return probe;

  // The violated supporting-hyperplane inequality guarantees infeasibility
  // for small t, so the scan concentrates near t = 0 while still checking
  // moderate steps.
  for (int k = 1; k <= 40; ++k) {
    double t = std::ldexp(1.0, -k);
    Vec w = axpy(x, t, diff);
    double gval;
    try {
      gval = evaluate(p.constraints[j - 1], w);
    } catch (const EvalDomainError&) {
      continue;
    }
    if (gval > tol.eps_feas) {
      ConvexityViolation v;
      v.j = j;
      v.x = x;
      v.y = y;
      v.inner_product = probe.inner_product;
      v.witness_t = t;
      v.witness_point = std::move(w);
      v.witness_gval = gval;
      probe.violation = std::move(v);
      probe.verdict = PairVerdict::kConfirmed;
      return probe;
    }
  }
  probe.verdict = PairVerdict::kUnconfirmed;
  return probe;
}

FalsifyResult convexity_falsify(const Problem& p,
                                const SlaterCertificate& slater, int pairs,
                                std::uint64_t seed, const Tolerances& tol) {
  FalsifyResult result;
  SplitMix64 master(seed);

  for (int j = 1; j <= p.m(); ++j) {
    SplitMix64 dir_rng = master.split(2 * static_cast<std::uint64_t>(j));
    SplitMix64 y_stream = master.split(2 * static_cast<std::uint64_t>(j) + 1);
    for (int s = 0; s < pairs; ++s) {
      Vec dir = random_direction(dir_rng, p.n);
      auto x = sample_boundary_point(p, j, slater.x0, dir, tol);
      if (!x) continue;
      auto y = sample_feasible_point(p, y_stream.split(s).seed(), tol);
      if (!y) continue;
      PairProbe probe = probe_convexity_pair(p, j, *x, *y, tol);
      if (probe.verdict == PairVerdict::kConfirmed)
        result.confirmed.push_back(std::move(*probe.violation));
      else if (probe.verdict == PairVerdict::kUnconfirmed)
        result.unconfirmed.push_back({j, *x, *y, probe.inner_product});
    }
  }
  return result;
}

KktResidual kkt_residual(const Problem& p, const Vec& x, const Vec& lambda,
                         const Tolerances& tol) {
  if (static_cast<int>(x.size()) != p.n ||
      static_cast<int>(lambda.size()) != p.m())
    throw std::invalid_argument("dimension mismatch in kkt_residual");

  Vec r = gradient(p.objective, x).grad;
  double comp = 0.0;
  bool dual_ok = true;
  for (int j = 0; j < p.m(); ++j) {
    if (lambda[j] < 0.0) dual_ok = false;
    GradientVector g = gradient(p.constraints[j], x);
    for (int i = 0; i < p.n; ++i) r[i] += lambda[j] * g.grad[i];
    comp = std::max(comp, std::abs(lambda[j] * g.value));
  }

  KktResidual res;
  res.stationarity = norm2(r);
  res.complementarity = comp;
  res.feasible = is_feasible(p, x, tol);
  res.dual_feasible = dual_ok;
  return res;
}

KktPoint recover_multipliers(const Problem& p, const Vec& x,
                             const Tolerances& tol) {
  if (!is_feasible(p, x, tol))
    throw std::invalid_argument("recover_multipliers requires a feasible point");

  ActiveSet active = active_set(p, x, tol);
  Vec grad_f = gradient(p.objective, x).grad;

  // Complementarity pins lambda_j = 0 off the active set, so the NNLS runs
  // on the active columns only.
  std::vector<Vec> columns;
  for (int j : active.indices)
    columns.push_back(gradient(p.constraints[j - 1], x).grad);
  Vec b(p.n);
  for (int i = 0; i < p.n; ++i) b[i] = -grad_f[i];
  Vec lam_active = nnls(columns, b);

  KktPoint point;
  point.x = x;
  point.lambda.assign(p.m(), 0.0);
  for (std::size_t t = 0; t < active.indices.size(); ++t)
    point.lambda[active.indices[t] - 1] = lam_active[t];

  KktResidual res = kkt_residual(p, x, point.lambda, tol);
  point.stationarity_residual = res.stationarity;
  point.complementarity_residual = res.complementarity;
  return point;
}

FritzJohnCertificate fritz_john_probe(const Problem& p, const Vec& x,
                                      const Tolerances& tol) {
  if (!is_feasible(p, x, tol))
    throw std::invalid_argument("fritz_john_probe requires a feasible point");

  ActiveSet active = active_set(p, x, tol);
  Vec grad_f = gradient(p.objective, x).grad;

  // NNLS on the simplex: the normalization row sqrt_w * (1,...,1) = sqrt_w
  // forces lambda0 + sum lambda_j = 1 up to O(residual^2 / w).
  const double sqrt_w = 1e5;
  std::vector<Vec> columns;
  {
    Vec c0(grad_f);
    c0.push_back(sqrt_w);
    columns.push_back(std::move(c0));
  }
  for (int j : active.indices) {
    Vec c = gradient(p.constraints[j - 1], x).grad;
    c.push_back(sqrt_w);
    columns.push_back(std::move(c));
  }
  Vec b(p.n, 0.0);
  b.push_back(sqrt_w);

  Vec u = nnls(columns, b);
  double sum = 0.0;
  for (double v : u) sum += v;
  if (sum <= 0.0) sum = 1.0;
  for (double& v : u) v /= sum;

  FritzJohnCertificate fj;
  fj.x = x;
  fj.lambda0 = u[0];
  fj.lambda.assign(p.m(), 0.0);
  for (std::size_t t = 0; t < active.indices.size(); ++t)
    fj.lambda[active.indices[t] - 1] = u[t + 1];

  Vec r(p.n, 0.0);
  for (int i = 0; i < p.n; ++i) r[i] = fj.lambda0 * grad_f[i];
  for (int j : active.indices) {
    Vec g = gradient(p.constraints[j - 1], x).grad;
    for (int i = 0; i < p.n; ++i) r[i] += fj.lambda[j - 1] * g[i];
  }
  fj.residual = norm2(r);
  (void)tol;
  return fj;
}

bool is_degenerate(const FritzJohnCertificate& fj, const Tolerances& tol) {
  return fj.lambda0 <= tol.eps_kkt && fj.residual <= tol.eps_kkt;
}

GlobalOptimalityCertificate certify_global(const Problem& p, const Vec& x,
                                           const CertifyConfig& config,
                                           const Tolerances& tol) {
  GlobalOptimalityCertificate cert;
  cert.config = config;
  cert.tolerances = tol;

  SplitMix64 master(config.seed);

  SlaterSearchResult slater = slater_search(p, config.seed, tol);
  if (!slater.found()) {
    cert.slater_failure = slater.failure;
    cert.status = CertificationStatus::kNoSlater;
    return cert;
  }
  cert.slater = slater.certificate;

  cert.nondegeneracy =
      nondegeneracy_check(p, slater.certificate, config.nondegeneracy_samples,
                          master.split(101).seed(), tol);
  if (!cert.nondegeneracy->passed()) {
    if (is_feasible(p, x, tol)) cert.kkt = recover_multipliers(p, x, tol);
    cert.status = CertificationStatus::kDegenerateFritzJohn;
    return cert;
  }

  FalsifyResult falsify = convexity_falsify(
      p, *slater.certificate, config.falsify_pairs, master.split(102).seed(), tol);
  cert.convexity_violations = std::move(falsify.confirmed);
  cert.unconfirmed_violations = std::move(falsify.unconfirmed);
  if (!cert.convexity_violations.empty()) {
    cert.status = CertificationStatus::kRefutedConvexity;
    return cert;
  }

  if (!is_feasible(p, x, tol)) {
    cert.status = CertificationStatus::kKktResidualTooLarge;
    return cert;
  }
  cert.kkt = recover_multipliers(p, x, tol);
  if (cert.kkt->stationarity_residual <= tol.eps_kkt &&
      cert.kkt->complementarity_residual <= tol.eps_kkt) {
    cert.status = CertificationStatus::kCertifiedModuloSampling;
    return cert;
  }

  cert.fritz_john = fritz_john_probe(p, x, tol);
  cert.status = is_degenerate(*cert.fritz_john, tol)
                    ? CertificationStatus::kDegenerateFritzJohn
                    : CertificationStatus::kKktResidualTooLarge;
  return cert;
}

LagrangianProbeResult lagrangian_probe(const Problem& p, const KktPoint& kkt,
                                       double fstar, int samples,
                                       std::uint64_t seed,
                                       const Tolerances& tol) {
  if (kkt.stationarity_residual > tol.eps_kkt ||
      kkt.complementarity_residual > tol.eps_kkt)
    throw std::invalid_argument("lagrangian_probe requires KKT residuals within eps_kkt");
  if (static_cast<int>(kkt.lambda.size()) != p.m())
    throw std::invalid_argument("multiplier length mismatch");

  const Vec& lambda = kkt.lambda;

  auto lagrangian = [&](const Vec& x) -> double {
    double value = evaluate(p.objective, x) - fstar;
    for (int j = 0; j < p.m(); ++j)
      if (lambda[j] != 0.0) value += lambda[j] * evaluate(p.constraints[j], x);
    return value;
  };
  auto lagrangian_grad = [&](const Vec& x) -> Vec {
    Vec grad = gradient(p.objective, x).grad;
    for (int j = 0; j < p.m(); ++j) {
      if (lambda[j] == 0.0) continue;
      GradientVector g = gradient(p.constraints[j], x);
      for (int i = 0; i < p.n; ++i) grad[i] += lambda[j] * g.grad[i];
    }
    return grad;
  };

  LagrangianProbeResult result;
  result.lambda = lambda;
  const double kEigTol = 1e-6;
  const double h = 1e-4;
  double min_eig = kInf;

  SplitMix64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    Vec x = random_box_point(rng, p);
    try {
      double value = lagrangian(x);
      if (value < -tol.eps_kkt) result.nonneg_violations.push_back({x, value});

      // Hessian as central differences of the forward-mode gradient,
      // symmetrized before the eigenvalue sweep.
      std::vector<Vec> hess(p.n, Vec(p.n));
      for (int i = 0; i < p.n; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        Vec gp = lagrangian_grad(xp);
        Vec gm = lagrangian_grad(xm);
        for (int r = 0; r < p.n; ++r) hess[r][i] = (gp[r] - gm[r]) / (2.0 * h);
      }
      for (int r = 0; r < p.n; ++r)
        for (int c = r + 1; c < p.n; ++c) {
          double v = 0.5 * (hess[r][c] + hess[c][r]);
          hess[r][c] = hess[c][r] = v;
        }
      Vec eig = jacobi_eigenvalues(std::move(hess));
      if (!eig.empty()) min_eig = std::min(min_eig, eig.front());
      ++result.samples_used;
    } catch (const EvalDomainError&) {
      ++result.samples_skipped;
    }
  }

  result.min_hessian_eigenvalue_seen = std::isfinite(min_eig) ? min_eig : 0.0;
  result.convex_evidence = result.min_hessian_eigenvalue_seen >= -kEigTol;
  return result;
}

}  // namespace kktcert
