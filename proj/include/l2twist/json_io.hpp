#pragma once

// JSON encodings shared by the CLI and the Python module.
//
//   group      {"kind": "abelian", "rank": d}
//              {"kind": "presented", "generators": k, "relators": [[1, 2, -1, -2], ...]}
//   key        integer array (exponent vector or signed 1-based word)
//   element    [{"key": [...], "re": x, "im": y}, ...]; for Z^d also a
//              polynomial string such as "z-1" or "x*y^-1+2"
//   matrix     {"rows": r, "cols": s, "entries": [[element, ...], ...]}
//   character  {"target": "real", "values": [..]} or
//              {"target": "free_abelian", "values": [[..], ..]} (one row per generator)
//   rep        {"dim": m, "matrices": [R_1, ...]} with R_l[i][j] = [re, im] or a number
//   quotient   {"order": n, "generators": [[perm], ...], "abelian": [N_1, ...]?}
//              or {"abelian": [N_1, ...]} alone
//   tower      [quotient, ...] or {"cyclic": {"d": d, "sizes": [N, ...]}}
//   complex    {"group": group, "ranks": [...], "boundaries": [c_1, ...],
//               "tower": tower?, "character": character?}
//   laurent    {"vars": d, "terms": [{"key": [...], "re": x, "im": y}, ...]}

#include <optional>
#include <string>

#include "json.hpp"
#include "l2twist/grouprings.hpp"
#include "l2twist/mahler.hpp"
#include "l2twist/quotients.hpp"
#include "l2twist/torsion.hpp"
#include "l2twist/twisting.hpp"

namespace l2twist {

using Json = nlohmann::json;

Group group_from_json(const Json& j);
Json to_json(const Group& g);

GroupElementKey key_from_json(const Json& j, const Group& g);
GroupRingElement element_from_json(const Json& j, const Group& g);
Json to_json(const GroupRingElement& x);

GroupRingMatrix matrix_from_json(const Json& j, const Group& g);
Json to_json(const GroupRingMatrix& a);

Character character_from_json(const Json& j);
Json to_json(const Character& phi);

BasedRepresentation representation_from_json(const Json& j);
Json to_json(const BasedRepresentation& v);

FiniteQuotient quotient_from_json(const Json& j);
Json to_json(const FiniteQuotient& q);
QuotientTower tower_from_json(const Json& j);
Json to_json(const QuotientTower& t);

struct ComplexInput {
  BasedChainComplex complex;
  Character phi;  ///< defaults to all ones
};
ComplexInput complex_from_json(const Json& j);
Json to_json(const BasedChainComplex& c);

LaurentPoly laurent_from_json(const Json& j);
Json to_json(const LaurentPoly& p);

/// value is null for the -inf sentinel.
Json to_json(const LogDetResult& r);
Json to_json(const ApproxResult& r);
Json to_json(const BoundCertificate& b);
Json to_json(const TorsionCurve& c);
Json to_json(const DegreeResult& d);
Json to_json(const BoundEnvelope& e);
Json to_json(const VerifyReport& r);
Json to_json(const SemicontinuityReport& r);

/// Shortest round-trip decimal text of a double.
std::string format_double(double x);

/// Header: t,rho,status,envelope_lower,envelope_upper.
std::string curve_csv(const TorsionCurve& c, const std::optional<BoundEnvelope>& env);
/// Header: level,order,dim_ker,logdet.
std::string approx_csv(const ApproxResult& r);

}  // namespace l2twist
