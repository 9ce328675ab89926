#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kktcert/geometry.hpp"
#include "kktcert/model.hpp"

namespace kktcert {

// ---------------------------------------------------------------------------
// Hypothesis checks and certificates for KKT-based global optimality on
// problems whose feasible set is convex even though the defining functions
// g_j need not be. A KKT point of such a problem is a global minimizer once
// three hypotheses hold: a Slater point exists, no constraint gradient
// vanishes at an active feasible point, and every constraint gradient
// supports the set at its active boundary points. The first is verified by
// search; the other two quantify over continua and are checked by seeded
// sampling, which is why a successful certificate is "modulo sampling".
// ---------------------------------------------------------------------------

struct SlaterFailure {
  double best_phi = 0.0;  // smallest max_j g_j(x) reached
  Vec best_x;
};

struct SlaterSearchResult {
  std::optional<SlaterCertificate> certificate;
  SlaterFailure failure;  // populated whether or not the search succeeded
  bool found() const { return certificate.has_value(); }
};

struct NondegeneracyFailure {
  Vec point;
  double gradient_norm = 0.0;
};

struct ConstraintNondegeneracy {
  int j = 0;  // 1-based
  int samples_tested = 0;
  // Smallest ||grad g_j|| seen over the tested boundary points; absent when
  // no boundary point of K with g_j active was found.
  std::optional<double> min_gradient_norm;
  std::vector<NondegeneracyFailure> failures;
};

struct NondegeneracyReport {
  std::vector<ConstraintNondegeneracy> per_constraint;
  bool passed() const {
    for (const auto& c : per_constraint)
      if (!c.failures.empty()) return false;
    return true;
  }
};

struct FalsifyResult {
  std::vector<ConvexityViolation> confirmed;
  std::vector<UnconfirmedViolation> unconfirmed;
};

enum class PairVerdict { kNoViolation, kUnconfirmed, kConfirmed };

struct PairProbe {
  PairVerdict verdict = PairVerdict::kNoViolation;
  double inner_product = 0.0;
  std::optional<ConvexityViolation> violation;  // set when confirmed
};

struct KktResidual {
  double stationarity = 0.0;
  double complementarity = 0.0;
  bool feasible = false;
  bool dual_feasible = false;
};

enum class CertificationStatus {
  kCertifiedModuloSampling,
  kRefutedConvexity,
  kDegenerateFritzJohn,
  kNoSlater,
  kKktResidualTooLarge,
};

const char* to_string(CertificationStatus s);

struct CertifyConfig {
  int nondegeneracy_samples = 200;  // boundary samples per constraint
  int falsify_pairs = 1000;         // (x, y) pairs per constraint
  std::uint64_t seed = 42;
};

struct GlobalOptimalityCertificate {
  CertificationStatus status = CertificationStatus::kKktResidualTooLarge;
  std::optional<KktPoint> kkt;
  std::optional<SlaterCertificate> slater;
  std::optional<SlaterFailure> slater_failure;
  std::optional<NondegeneracyReport> nondegeneracy;
  std::vector<ConvexityViolation> convexity_violations;
  std::vector<UnconfirmedViolation> unconfirmed_violations;
  std::optional<FritzJohnCertificate> fritz_john;
  CertifyConfig config;
  Tolerances tolerances;
};

struct LagrangianViolation {
  Vec point;
  double value = 0.0;  // L_f at the point, below -eps_kkt
};

struct LagrangianProbeResult {
  Vec lambda;
  double min_hessian_eigenvalue_seen = 0.0;
  std::vector<LagrangianViolation> nonneg_violations;
  bool convex_evidence = false;
  int samples_used = 0;
  int samples_skipped = 0;  // domain violations
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Searches for a strictly feasible point: seeded multistart gradient descent
// on a log-sum-exp smoothing of max_j g_j with a decreasing temperature
// schedule, then rejection sampling as a fallback. Failure is a report, not
// an exception.
SlaterSearchResult slater_search(const Problem& p, std::uint64_t seed,
                                 const Tolerances& tol);

// Checks that no constraint gradient vanishes at sampled active boundary
// points. With a Slater certificate, boundary points come from ray shooting
// along seeded random directions. Without one (no strictly feasible point
// exists), falls back to a multistart search for feasible points that are
// simultaneously active and critical for g_j, which is exactly the failure
// mode being probed.
NondegeneracyReport nondegeneracy_check(
    const Problem& p, const std::optional<SlaterCertificate>& slater,
    int samples_per_constraint, std::uint64_t seed, const Tolerances& tol);

// Tests one (boundary point, feasible point) pair: a positive inner product
// <grad g_j(x), y - x> is a candidate violation; it is confirmed only when a
// dyadic scan t = 2^-k, k = 1..40 finds g_j(x + t(y-x)) > eps_feas.
PairProbe probe_convexity_pair(const Problem& p, int j, const Vec& x,
                               const Vec& y, const Tolerances& tol);

// Samples boundary/feasible pairs per constraint and collects confirmed
// violations (deterministically ordered by constraint, then sample index).
// Candidates without a verifiable witness are reported as unconfirmed and
// never block certification.
FalsifyResult convexity_falsify(const Problem& p,
                                const SlaterCertificate& slater, int pairs,
                                std::uint64_t seed, const Tolerances& tol);

// stationarity = ||grad f(x) + sum lambda_j grad g_j(x)||,
// complementarity = max_j |lambda_j g_j(x)|.
KktResidual kkt_residual(const Problem& p, const Vec& x, const Vec& lambda,
                         const Tolerances& tol);

// Recovers multipliers supported on the active set by nonnegative least
// squares on ||grad f + sum lambda_j grad g_j||; inactive constraints get
// lambda_j = 0. Throws std::invalid_argument for infeasible x.
KktPoint recover_multipliers(const Problem& p, const Vec& x,
                             const Tolerances& tol);

// Minimizes ||lambda0 grad f + sum lambda_j grad g_j|| over the simplex
// lambda0 + sum lambda_j = 1 with lambda supported on the active set (NNLS
// with a normalization row appended). lambda0 <= eps_kkt with residual
// <= eps_kkt marks Fritz-John degeneracy.
FritzJohnCertificate fritz_john_probe(const Problem& p, const Vec& x,
                                      const Tolerances& tol);

bool is_degenerate(const FritzJohnCertificate& fj, const Tolerances& tol);

// Full pipeline: Slater search, nondegeneracy sampling, convexity
// falsification, multiplier recovery and residual evaluation at x. Every
// failure is a status, never an exception.
GlobalOptimalityCertificate certify_global(const Problem& p, const Vec& x,
                                           const CertifyConfig& config,
                                           const Tolerances& tol);

// Samples the Lagrangian L_f = f - fstar + sum lambda_j g_j over the box:
// collects points where L_f < -eps_kkt and tracks the smallest eigenvalue of
// its finite-difference Hessian (central differences of the forward-mode
// gradient, h = 1e-4, symmetrized; eigenvalues by Jacobi iteration).
LagrangianProbeResult lagrangian_probe(const Problem& p, const KktPoint& kkt,
                                       double fstar, int samples,
                                       std::uint64_t seed,
                                       const Tolerances& tol);

}  // namespace kktcert
