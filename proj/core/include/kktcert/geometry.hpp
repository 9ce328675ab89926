#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kktcert/model.hpp"
#include "kktcert/rng.hpp"

namespace kktcert {

struct FeasibilityCheck {
  bool feasible = false;
  bool domain_error = false;  // some g_j was not evaluable at x
  int first_violated = 0;     // 1-based index of the first failing constraint, 0 if none
};

// Constraints active at a feasible point: { j : |g_j(point)| <= eps_active }.
struct ActiveSet {
  Vec point;
  std::vector<int> indices;  // 1-based, ascending
};

// g_j(x) <= eps_feas for all j. A domain violation in any g_j makes x
// infeasible and sets the diagnostic flag.
FeasibilityCheck check_feasibility(const Problem& p, std::span<const double> x,
                                   const Tolerances& tol);
bool is_feasible(const Problem& p, std::span<const double> x,
                 const Tolerances& tol);

// Throws std::invalid_argument when x is infeasible.
ActiveSet active_set(const Problem& p, const Vec& x, const Tolerances& tol);

// Shoots the ray interior + t*direction (t > 0) until it leaves the box,
// looking for a sign change of g_j; bisects any bracket down to machine
// resolution and returns the feasible-side endpoint. The returned point is
// feasible with j active. Crossings at which another constraint has already
// become infeasible are discarded (returns nullopt). The start must be
// strictly feasible (all g < 0) and the direction nonzero.
std::optional<Vec> sample_boundary_point(const Problem& p, int j,
                                         const Vec& interior,
                                         const Vec& direction,
                                         const Tolerances& tol);

// Uniform rejection sampling over the box, at most 10^5 draws. Deterministic
// given the seed.
std::optional<Vec> sample_feasible_point(const Problem& p, std::uint64_t seed,
                                         const Tolerances& tol);

// Direction with components uniform in [-1, 1], rejecting near-zero vectors.
Vec random_direction(SplitMix64& rng, int n);

// Uniform point in the box.
Vec random_box_point(SplitMix64& rng, const Problem& p);

}  // namespace kktcert
