#pragma once

#include <nlohmann/json.hpp>

#include "kktcert/certify.hpp"
#include "kktcert/model.hpp"
#include "kktcert/solver.hpp"

namespace kktcert {

using Json = nlohmann::ordered_json;

// Certificates serialize with their field names verbatim; optional evidence
// becomes null. Reals are emitted by dump_json(), not nlohmann's dump, so
// that every double carries 17 significant digits and round-trips exactly.

void to_json(Json& j, const Tolerances& t);
void from_json(const Json& j, Tolerances& t);

void to_json(Json& j, const KktPoint& k);
void from_json(const Json& j, KktPoint& k);

void to_json(Json& j, const SlaterCertificate& c);
void from_json(const Json& j, SlaterCertificate& c);

void to_json(Json& j, const SlaterFailure& f);
void from_json(const Json& j, SlaterFailure& f);

void to_json(Json& j, const ConvexityViolation& v);
void from_json(const Json& j, ConvexityViolation& v);

void to_json(Json& j, const UnconfirmedViolation& v);
void from_json(const Json& j, UnconfirmedViolation& v);

void to_json(Json& j, const FritzJohnCertificate& c);
void from_json(const Json& j, FritzJohnCertificate& c);

void to_json(Json& j, const NondegeneracyFailure& f);
void from_json(const Json& j, NondegeneracyFailure& f);

void to_json(Json& j, const ConstraintNondegeneracy& c);
void from_json(const Json& j, ConstraintNondegeneracy& c);

void to_json(Json& j, const NondegeneracyReport& r);
void from_json(const Json& j, NondegeneracyReport& r);

void to_json(Json& j, const LagrangianViolation& v);
void from_json(const Json& j, LagrangianViolation& v);

void to_json(Json& j, const LagrangianProbeResult& r);
void from_json(const Json& j, LagrangianProbeResult& r);

void to_json(Json& j, const GlobalOptimalityCertificate& c);
void from_json(const Json& j, GlobalOptimalityCertificate& c);

void to_json(Json& j, const BarrierStage& s);
void to_json(Json& j, const OracleResult& r);

CertificationStatus status_from_string(const std::string& s);

// Compact single-line serialization with doubles at 17 significant digits.
// Deterministic: identical documents produce identical bytes.
std::string dump_json(const Json& j);

}  // namespace kktcert
