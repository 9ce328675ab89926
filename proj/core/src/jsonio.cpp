#include "kktcert/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace kktcert {

void to_json(Json& j, const Tolerances& t) {
  j = Json{{"eps_active", t.eps_active},
           {"eps_grad", t.eps_grad},
           {"eps_kkt", t.eps_kkt},
           {"eps_feas", t.eps_feas}};
}

void from_json(const Json& j, Tolerances& t) {
  j.at("eps_active").get_to(t.eps_active);
  j.at("eps_grad").get_to(t.eps_grad);
  j.at("eps_kkt").get_to(t.eps_kkt);
  j.at("eps_feas").get_to(t.eps_feas);
}

void to_json(Json& j, const KktPoint& k) {
  j = Json{{"x", k.x},
           {"lambda", k.lambda},
           {"stationarity_residual", k.stationarity_residual},
           {"complementarity_residual", k.complementarity_residual}};
}

void from_json(const Json& j, KktPoint& k) {
  j.at("x").get_to(k.x);
  j.at("lambda").get_to(k.lambda);
  j.at("stationarity_residual").get_to(k.stationarity_residual);
  j.at("complementarity_residual").get_to(k.complementarity_residual);
}

void to_json(Json& j, const SlaterCertificate& c) {
  j = Json{{"x0", c.x0}, {"margin", c.margin}};
}

void from_json(const Json& j, SlaterCertificate& c) {
  j.at("x0").get_to(c.x0);
  j.at("margin").get_to(c.margin);
}

void to_json(Json& j, const SlaterFailure& f) {
  j = Json{{"best_phi", f.best_phi}, {"best_x", f.best_x}};
}

void from_json(const Json& j, SlaterFailure& f) {
  j.at("best_phi").get_to(f.best_phi);
  j.at("best_x").get_to(f.best_x);
}

void to_json(Json& j, const ConvexityViolation& v) {
  j = Json{{"j", v.j},
           {"x", v.x},
           {"y", v.y},
           {"inner_product", v.inner_product},
           {"witness_t", v.witness_t},
           {"witness_point", v.witness_point},
           {"witness_gval", v.witness_gval}};
}

void from_json(const Json& j, ConvexityViolation& v) {
  j.at("j").get_to(v.j);
  j.at("x").get_to(v.x);
  j.at("y").get_to(v.y);
  j.at("inner_product").get_to(v.inner_product);
  j.at("witness_t").get_to(v.witness_t);
  j.at("witness_point").get_to(v.witness_point);
  j.at("witness_gval").get_to(v.witness_gval);
}

void to_json(Json& j, const UnconfirmedViolation& v) {
  j = Json{{"j", v.j}, {"x", v.x}, {"y", v.y}, {"inner_product", v.inner_product}};
}

void from_json(const Json& j, UnconfirmedViolation& v) {
  j.at("j").get_to(v.j);
  j.at("x").get_to(v.x);
  j.at("y").get_to(v.y);
  j.at("inner_product").get_to(v.inner_product);
}

void to_json(Json& j, const FritzJohnCertificate& c) {
  j = Json{{"x", c.x},
           {"lambda0", c.lambda0},
           {"lambda", c.lambda},
           {"residual", c.residual}};
}

void from_json(const Json& j, FritzJohnCertificate& c) {
  j.at("x").get_to(c.x);
  j.at("lambda0").get_to(c.lambda0);
  j.at("lambda").get_to(c.lambda);
  j.at("residual").get_to(c.residual);
}

void to_json(Json& j, const NondegeneracyFailure& f) {
  j = Json{{"point", f.point}, {"gradient_norm", f.gradient_norm}};
}

void from_json(const Json& j, NondegeneracyFailure& f) {
  j.at("point").get_to(f.point);
  j.at("gradient_norm").get_to(f.gradient_norm);
}

void to_json(Json& j, const ConstraintNondegeneracy& c) {
  j = Json{{"j", c.j}, {"samples_tested", c.samples_tested}};
  if (c.min_gradient_norm)
    j["min_gradient_norm"] = *c.min_gradient_norm;
  else
    j["min_gradient_norm"] = nullptr;
  j["failures"] = c.failures;
}

void from_json(const Json& j, ConstraintNondegeneracy& c) {
  j.at("j").get_to(c.j);
  j.at("samples_tested").get_to(c.samples_tested);
  if (j.at("min_gradient_norm").is_null())
    c.min_gradient_norm.reset();
  else
    c.min_gradient_norm = j.at("min_gradient_norm").get<double>();
  j.at("failures").get_to(c.failures);
}

void to_json(Json& j, const NondegeneracyReport& r) {
  j = Json{{"per_constraint", r.per_constraint}, {"passed", r.passed()}};
}

void from_json(const Json& j, NondegeneracyReport& r) {
  j.at("per_constraint").get_to(r.per_constraint);
}

void to_json(Json& j, const LagrangianViolation& v) {
  j = Json{{"point", v.point}, {"value", v.value}};
}

void from_json(const Json& j, LagrangianViolation& v) {
  j.at("point").get_to(v.point);
  j.at("value").get_to(v.value);
}

void to_json(Json& j, const LagrangianProbeResult& r) {
  j = Json{{"lambda", r.lambda},
           {"min_hessian_eigenvalue_seen", r.min_hessian_eigenvalue_seen},
           {"nonneg_violations", r.nonneg_violations},
           {"convex_evidence", r.convex_evidence},
           {"samples_used", r.samples_used},
           {"samples_skipped", r.samples_skipped}};
}

void from_json(const Json& j, LagrangianProbeResult& r) {
  j.at("lambda").get_to(r.lambda);
  j.at("min_hessian_eigenvalue_seen").get_to(r.min_hessian_eigenvalue_seen);
  j.at("nonneg_violations").get_to(r.nonneg_violations);
  j.at("convex_evidence").get_to(r.convex_evidence);
  j.at("samples_used").get_to(r.samples_used);
  j.at("samples_skipped").get_to(r.samples_skipped);
}

CertificationStatus status_from_string(const std::string& s) {
  if (s == "CERTIFIED_MODULO_SAMPLING")
    return CertificationStatus::kCertifiedModuloSampling;
  if (s == "REFUTED_CONVEXITY") return CertificationStatus::kRefutedConvexity;
  if (s == "DEGENERATE_FJ") return CertificationStatus::kDegenerateFritzJohn;
  if (s == "NO_SLATER") return CertificationStatus::kNoSlater;
  if (s == "KKT_RESIDUAL_TOO_LARGE")
    return CertificationStatus::kKktResidualTooLarge;
  throw std::invalid_argument("unknown certification status: " + s);
}

namespace {

template <typename T>
Json opt_json(const std::optional<T>& v) {
  if (v) return Json(*v);
  return Json(nullptr);
}

template <typename T>
void opt_from(const Json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null())
    out = j.at(key).get<T>();
  else
    out.reset();
}

}  // namespace

void to_json(Json& j, const GlobalOptimalityCertificate& c) {
  j = Json{{"status", to_string(c.status)},
           {"kkt", opt_json(c.kkt)},
           {"slater", opt_json(c.slater)},
           {"slater_failure", opt_json(c.slater_failure)},
           {"nondegeneracy", opt_json(c.nondegeneracy)},
           {"convexity_violations", c.convexity_violations},
           {"unconfirmed_violations", c.unconfirmed_violations},
           {"fritz_john", opt_json(c.fritz_john)},
           {"seed", c.config.seed},
           {"rng", SplitMix64::kName},
           {"samples",
            Json{{"nondegeneracy", c.config.nondegeneracy_samples},
                 {"convexity_pairs", c.config.falsify_pairs}}},
           {"tolerances", c.tolerances}};
}

void from_json(const Json& j, GlobalOptimalityCertificate& c) {
  c.status = status_from_string(j.at("status").get<std::string>());
  opt_from(j, "kkt", c.kkt);
  opt_from(j, "slater", c.slater);
  opt_from(j, "slater_failure", c.slater_failure);
  opt_from(j, "nondegeneracy", c.nondegeneracy);
  j.at("convexity_violations").get_to(c.convexity_violations);
  j.at("unconfirmed_violations").get_to(c.unconfirmed_violations);
  opt_from(j, "fritz_john", c.fritz_john);
  j.at("seed").get_to(c.config.seed);
  j.at("samples").at("nondegeneracy").get_to(c.config.nondegeneracy_samples);
  j.at("samples").at("convexity_pairs").get_to(c.config.falsify_pairs);
  j.at("tolerances").get_to(c.tolerances);
}

void to_json(Json& j, const BarrierStage& s) {
  j = Json{{"mu", s.mu},
           {"inner_iterations", s.inner_iterations},
           {"final_gradient_norm", s.final_gradient_norm},
           {"barrier_initial", s.barrier_initial},
           {"barrier_final", s.barrier_final},
           {"monotone", s.monotone},
           {"reached_tol", s.reached_tol},
           {"kkt_stop", s.kkt_stop},
           {"lambda_estimate", s.lambda_estimate}};
}

void to_json(Json& j, const OracleResult& r) {
  j = Json{{"x", r.x},
           {"value", r.value},
           {"grid_resolution", r.grid_resolution},
           {"refinement_rounds", r.refinement_rounds}};
}

namespace {

void dump_value(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::null:
      out += "null";
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      return;
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += buf;
      return;
    }
    case Json::value_t::string:
      // reuse nlohmann's escaping
      out += nlohmann::json(j.get<std::string>()).dump();
      return;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ',';
        first = false;
        dump_value(el, out);
      }
      out += ']';
      return;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        dump_value(it.value(), out);
      }
      out += '}';
      return;
    }
    default:
      throw std::logic_error("unsupported JSON value type");
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump_value(j, out);
  return out;
}

}  // namespace kktcert
