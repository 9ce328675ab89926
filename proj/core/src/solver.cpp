#include "kktcert/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kktcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Barrier value and gradient; fails when x leaves the box or the strictly
// feasible region, or an expression is not evaluable, which makes the
// backtracking loop reject the step. The value accumulates in long double:
// near a stage optimum the Armijo decrease is of order mu * ||grad||^2 and
// falls below the double-precision ulp of B while the gradient is still
// above the stage threshold.
bool barrier_eval(const Problem& p, double mu, const Vec& x,
                  long double& value, Vec* grad) {
  for (int i = 0; i < p.n; ++i)
    if (x[i] < p.box_lo[i] || x[i] > p.box_hi[i]) return false;
  try {
    if (grad) {
      GradientVector f = gradient(p.objective, x);
      value = f.value;
      *grad = f.grad;
      for (int j = 0; j < p.m(); ++j) {
        GradientVector g = gradient(p.constraints[j], x);
        if (!(g.value < 0.0)) return false;
        value -= static_cast<long double>(mu) *
                 std::log(static_cast<long double>(-g.value));
        double scale = mu / (-g.value);
        for (int i = 0; i < p.n; ++i) (*grad)[i] += scale * g.grad[i];
      }
    } else {
      value = evaluate(p.objective, x);
      for (int j = 0; j < p.m(); ++j) {
        double g = evaluate(p.constraints[j], x);
        if (!(g < 0.0)) return false;
        value -= static_cast<long double>(mu) *
                 std::log(static_cast<long double>(-g));
      }
    }
    return true;
  } catch (const EvalDomainError&) {
    return false;
  }
}

}  // namespace

SolveResult barrier_solve(const Problem& p, const SlaterCertificate& slater,
                          const BarrierSchedule& schedule,
                          const Tolerances& tol) {
  if (!(schedule.mu0 > 0.0) || !(schedule.factor > 0.0) ||
      !(schedule.factor < 1.0) || schedule.stages < 1)
    throw std::invalid_argument("malformed barrier schedule");
  if (static_cast<int>(slater.x0.size()) != p.n)
    throw std::invalid_argument("Slater point has wrong dimension");
  if (!(slater.margin > 0.0))
    throw std::invalid_argument("barrier_solve requires a strictly feasible start");

  SolveResult result;
  Vec x = slater.x0;
  bool stages_ok = true;
  bool kkt_reached = false;

  auto kkt_passes = [&](const Vec& point) {
    KktPoint k = recover_multipliers(p, point, tol);
    return k.stationarity_residual <= tol.eps_kkt &&
           k.complementarity_residual <= tol.eps_kkt;
  };

  double mu = schedule.mu0;
  for (int stage = 0; stage < schedule.stages && !kkt_reached;
       ++stage, mu *= schedule.factor) {
    BarrierStage trace;
    trace.mu = mu;

    long double value;
    Vec grad;
    if (!barrier_eval(p, mu, x, value, &grad))
      throw std::logic_error("barrier iterate left the strictly feasible region");
    trace.barrier_initial = static_cast<double>(value);

    const double threshold = std::max(tol.eps_kkt, mu);
    const int kMaxInner = 10000;
    double gnorm = norm2(grad);
    Vec prev_x, prev_grad;
    bool have_prev = false;

    // Backtrack by halving along `dir` (slope = <grad, dir>). Near a stage
    // optimum the true Armijo decrease drops below the rounding noise of the
    // double-precision expression evaluations; in that regime a step is
    // accepted when it strictly reduces the gradient norm without increasing
    // the computed value (gradients stay fully resolvable long after value
    // differences vanish). Returns the new gradient on success.
    auto line_search = [&](const Vec& dir, double slope,
                           double step) -> std::optional<Vec> {
      for (int bt = 0; bt < 60; ++bt) {
        Vec cand = axpy(x, -step, dir);
        long double cand_value;
        if (barrier_eval(p, mu, cand, cand_value, nullptr)) {
          bool armijo = cand_value <=
                        value - static_cast<long double>(1e-4 * step * slope);
          Vec g2;
          bool grad_accept = false;
          if (!armijo && cand_value <= value) {
            long double v2;
            grad_accept = barrier_eval(p, mu, cand, v2, &g2) &&
                          norm2(g2) < gnorm * (1.0 - 1e-4);
          }
          if (armijo || grad_accept) {
            prev_x = std::move(x);
            prev_grad = grad;
            have_prev = true;
            x = std::move(cand);
            if (cand_value > value) trace.monotone = false;
            value = cand_value;
            if (!grad_accept) {
              long double v2;
              barrier_eval(p, mu, x, v2, &g2);
            }
            return g2;
          }
        }
        step *= 0.5;
      }
      return std::nullopt;
    };

    int it = 0;
    for (; it < kMaxInner && gnorm > threshold; ++it) {
      // Barzilai-Borwein trial step: a unit initial step forces the Armijo
      // loop down to ~1/L every iteration, and with the barrier's curvature
      // growing like 1/mu the tangential progress per iteration shrinks to
      // nothing. The BB quotient adapts to both curvature scales.
      double step = 1.0;
      if (have_prev) {
        Vec s = axpy(x, -1.0, prev_x);
        Vec yv = axpy(grad, -1.0, prev_grad);
        double sty = dot(s, yv);
        if (sty > 0.0) step = std::clamp(dot(s, s) / sty, 1e-14, 1e6);
      }
      auto moved = line_search(grad, gnorm * gnorm, step);

      if (!moved) {
        // The full gradient mixes the stiff boundary-normal direction (step
        // limited to ~mu by feasibility and evaluation noise) with the soft
        // tangential one. When no mixed step is acceptable, descend along
        // the gradient projected off the normals of constraints inside the
        // stiff regime mu / g_j^2 >= 1.
        Vec dir = grad;
        for (int j = 0; j < p.m(); ++j) {
          double gj = evaluate(p.constraints[j], x);
          if (-gj <= std::sqrt(mu)) {
            Vec nj = gradient(p.constraints[j], x).grad;
            double nn = dot(nj, nj);
            if (nn > 0.0) {
              double c = dot(dir, nj) / nn;
              for (int i = 0; i < p.n; ++i) dir[i] -= c * nj[i];
            }
          }
        }
        double slope = dot(grad, dir);
        if (slope > 0.0) moved = line_search(dir, slope, 1.0);
      }

      if (!moved) break;  // no acceptable step at machine resolution
      grad = std::move(*moved);
      gnorm = norm2(grad);
      if (kkt_passes(x)) {
        kkt_reached = true;
        ++it;
        break;
      }
    }

    trace.inner_iterations = it;
    trace.final_gradient_norm = gnorm;
    trace.barrier_final = static_cast<double>(value);
    trace.kkt_stop = kkt_reached;
    trace.reached_tol = kkt_reached || gnorm <= threshold;
    trace.lambda_estimate.resize(p.m());
    for (int j = 0; j < p.m(); ++j)
      trace.lambda_estimate[j] = mu / (-evaluate(p.constraints[j], x));
    result.stages.push_back(std::move(trace));

    // A missed stage threshold does not abort the homotopy: smaller mu pulls
    // the iterate onward, and the run still counts as converged only if the
    // certified residuals pass.
    if (!result.stages.back().reached_tol) stages_ok = false;
    if (!kkt_reached && gnorm <= threshold && kkt_passes(x)) kkt_reached = true;
  }

  result.x = x;
  result.fstar = evaluate(p.objective, x);
  result.kkt = recover_multipliers(p, x, tol);
  result.converged = (kkt_reached || stages_ok) &&
                     result.kkt.stationarity_residual <= tol.eps_kkt &&
                     result.kkt.complementarity_residual <= tol.eps_kkt &&
                     is_feasible(p, x, tol);
  return result;
}

OracleResult brute_force_oracle(const Problem& p, int grid_points_per_axis,
                                int refinement_rounds) {
  if (p.n > 4)
    throw std::invalid_argument("brute_force_oracle supports n <= 4 only");
  if (grid_points_per_axis < 3)
    throw std::invalid_argument("need at least 3 grid points per axis");
  if (refinement_rounds < 1)
    throw std::invalid_argument("need at least one refinement round");

  const Tolerances tol;  // feasibility slack only
  Vec lo = p.box_lo;
  Vec hi = p.box_hi;

  Vec best_x;
  double best_value = kInf;

  for (int round = 0; round < refinement_rounds; ++round) {
    const int pts = grid_points_per_axis;
    Vec step(p.n);
    for (int i = 0; i < p.n; ++i)
      step[i] = (hi[i] - lo[i]) / static_cast<double>(pts - 1);

    std::vector<int> idx(p.n, 0);
    Vec x(p.n);
    bool done = false;
    while (!done) {
      for (int i = 0; i < p.n; ++i)
        x[i] = lo[i] + step[i] * static_cast<double>(idx[i]);
      if (check_feasibility(p, x, tol).feasible) {
        try {
          double v = evaluate(p.objective, x);
          if (v < best_value) {  // strict: first grid point wins ties
            best_value = v;
            best_x = x;
          }
        } catch (const EvalDomainError&) {
        }
      }
      // odometer increment
      int d = 0;
      for (; d < p.n; ++d) {
        if (++idx[d] < pts) break;
        idx[d] = 0;
      }
      done = d == p.n;
    }

    if (best_x.empty())
      throw std::runtime_error(
          "brute_force_oracle found no feasible grid point; try a finer grid");

    // Shrink to a 3-cell neighborhood of the incumbent, clipped to the box.
    for (int i = 0; i < p.n; ++i) {
      double r = 1.5 * step[i];
      lo[i] = std::max(p.box_lo[i], best_x[i] - r);
      hi[i] = std::min(p.box_hi[i], best_x[i] + r);
    }
  }

  OracleResult result;
  result.x = best_x;
  result.value = best_value;
  result.refinement_rounds = refinement_rounds;
  double res = 0.0;
  for (int i = 0; i < p.n; ++i)
    res = std::max(res, (hi[i] - lo[i]) / static_cast<double>(grid_points_per_axis - 1));
  result.grid_resolution = res;
  return result;
}

}  // namespace kktcert
