#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kktcert/expr.hpp"
#include "kktcert/linalg.hpp"

namespace kktcert {

// Inequality-constrained minimization problem
//   minimize f(x)  subject to  g_j(x) <= 0, j = 1..m
// plus a bounding box used by samplers and the brute-force oracle. The box
// is search metadata, not an extra constraint; bound constraints belong in
// the constraint list like any other g_j.
struct Problem {
  int n = 0;
  Expr objective;
  std::vector<Expr> constraints;  // g_1..g_m
  Vec box_lo;
  Vec box_hi;

  int m() const { return static_cast<int>(constraints.size()); }
};

struct Tolerances {
  double eps_active = 1e-6;  // |g_j(x)| below this counts as active
  double eps_grad = 1e-6;    // constraint gradient norms below this are degenerate
  double eps_kkt = 1e-6;     // stationarity and complementarity residual bound
  double eps_feas = 1e-9;    // feasibility slack on g_j(x) <= 0
};

struct KktPoint {
  Vec x;
  Vec lambda;  // length m, nonnegative
  double stationarity_residual = 0.0;    // ||grad f + sum lambda_j grad g_j||
  double complementarity_residual = 0.0; // max_j |lambda_j g_j(x)|
};

// Strictly feasible point with margin = -max_j g_j(x0) > 0.
struct SlaterCertificate {
  Vec x0;
  double margin = 0.0;
};

// A supporting-hyperplane failure at an active boundary point x: a feasible
// y on the wrong side of grad g_j(x), together with a point on the segment
// [x, y] that genuinely violates constraint j.
struct ConvexityViolation {
  int j = 0;  // 1-based constraint index
  Vec x;      // boundary point, g_j(x) ~ 0
  Vec y;      // feasible point
  double inner_product = 0.0;  // <grad g_j(x), y - x>, positive
  double witness_t = 0.0;      // in (0, 1)
  Vec witness_point;           // x + t (y - x)
  double witness_gval = 0.0;   // g_j at the witness point, > eps_feas
};

// Positive inner product whose dyadic witness search found no verifiable
// infeasibility; reported but never blocks certification.
struct UnconfirmedViolation {
  int j = 0;
  Vec x;
  Vec y;
  double inner_product = 0.0;
};

// Multipliers (lambda0, lambda) >= 0 on the simplex lambda0 + sum lambda_j = 1
// minimizing ||lambda0 grad f + sum lambda_j grad g_j||. lambda0 ~ 0 with a
// small residual marks Fritz-John degeneracy.
struct FritzJohnCertificate {
  Vec x;
  double lambda0 = 0.0;
  Vec lambda;  // length m, supported on the active set
  double residual = 0.0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> messages;
};

// Problem-file error with a 1-based line number.
class ProblemFormatError : public std::runtime_error {
 public:
  ProblemFormatError(const std::string& what, int line);
  int line() const { return line_; }

 private:
  int line_;
};

// Parses the line-oriented problem format:
//   # comment
//   n = 2
//   box = [0,10] x [0,10]
//   minimize: x1 + x2
//   subject_to:
//   1 - x1*x2 <= 0
Problem load_problem(const std::string& text);
Problem load_problem_file(const std::string& path);

// Dimension/index consistency plus evaluability of every expression at the
// box center. Diagnostics, not failures.
ValidationReport validate(const Problem& p);

}  // namespace kktcert
