#pragma once

#include <vector>

#include "kktcert/certify.hpp"
#include "kktcert/model.hpp"

namespace kktcert {

struct BarrierSchedule {
  double mu0 = 1.0;
  double factor = 0.5;  // in (0, 1)
  int stages = 40;
};

struct BarrierStage {
  double mu = 0.0;
  int inner_iterations = 0;
  double final_gradient_norm = 0.0;
  double barrier_initial = 0.0;
  double barrier_final = 0.0;
  bool monotone = true;    // accepted steps never increased the barrier
  bool reached_tol = true;
  bool kkt_stop = false;   // homotopy ended here: certified residuals passed
  Vec lambda_estimate;     // mu / (-g_j) at the stage end, diagnostics only
};

struct SolveResult {
  Vec x;
  double fstar = 0.0;
  KktPoint kkt;  // from recover_multipliers at the final iterate
  std::vector<BarrierStage> stages;
  bool converged = false;
};

struct OracleResult {
  Vec x;
  double value = 0.0;
  double grid_resolution = 0.0;  // final cell size, max over axes
  int refinement_rounds = 0;
};

// Log-barrier homotopy: for mu = mu0, mu0*factor, ... minimizes
//   B_mu(x) = f(x) - mu * sum_j log(-g_j(x))
// by gradient descent with Armijo backtracking (shrink 0.5, slope factor
// 1e-4) from a Barzilai-Borwein trial step. Steps leaving strict
// feasibility are rejected inside the backtracking loop, so every iterate
// satisfies g_j < 0. A stage stops at ||grad B_mu|| <= max(eps_kkt, mu) or
// fails after 10^4 inner iterations.
// Certified multipliers come from recover_multipliers, which is also
// re-checked after every accepted step: the homotopy ends as soon as the
// certified residuals pass eps_kkt, since later stages cannot improve a
// point that already satisfies the optimality conditions being certified.
// The barrier estimates mu/(-g_j) are recorded per stage as diagnostics.
SolveResult barrier_solve(const Problem& p, const SlaterCertificate& slater,
                          const BarrierSchedule& schedule,
                          const Tolerances& tol);

// Uniform feasible-grid minimization with shrinking refinement: evaluates f
// on the feasible subset of a grid over the box, then re-grids a 3-cell
// neighborhood of the best point. Deterministic (index-ordered argmin
// tie-break). Requires n <= 4; throws when no feasible grid point exists.
OracleResult brute_force_oracle(const Problem& p, int grid_points_per_axis,
                                int refinement_rounds);

}  // namespace kktcert
