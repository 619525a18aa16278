#include "l2twist/json_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "l2twist/poly_parser.hpp"

namespace l2twist {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw InvalidInput(std::string("missing field '") + name + "'");
  return j.at(name);
}

template <class T>
T get_as(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(std::string("field '") + what + "' has the wrong type");
  }
}

Complex scalar_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
  throw InvalidInput("expected a complex number as x, [re, im] or {re, im}");
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x + 0.0) : Json(nullptr); }

Json terms_json(const GroupRingElement& x) {
  Json out = Json::array();
  for (const auto& [k, c] : x.terms()) out.push_back({{"key", k.data}, {"re", c.real()}, {"im", c.imag()}});
  return out;
}

}  // namespace

Group group_from_json(const Json& j) {
  const auto kind = get_as<std::string>(field(j, "kind"), "kind");
  if (kind == "abelian") {
    const int rank = get_as<int>(field(j, "rank"), "rank");
    return Group::abelian(rank);
  }
  if (kind == "presented") {
    const int gens = get_as<int>(field(j, "generators"), "generators");
    std::vector<std::vector<std::int64_t>> rels;
    if (j.contains("relators")) rels = get_as<std::vector<std::vector<std::int64_t>>>(j.at("relators"), "relators");
    return Group::presented(gens, std::move(rels));
  }
  throw InvalidInput("group kind must be 'abelian' or 'presented'");
}

Json to_json(const Group& g) {
  if (g.is_abelian()) return {{"kind", "abelian"}, {"rank", g.generator_count()}};
  return {{"kind", "presented"}, {"generators", g.generator_count()}, {"relators", g.relators()}};
}

GroupElementKey key_from_json(const Json& j, const Group& g) {
  GroupElementKey key(get_as<std::vector<std::int64_t>>(j, "key"));
  if (!g.is_abelian()) key = GroupElementKey(free_reduce(key.data));
  g.validate(key);
  return key;
}

GroupRingElement element_from_json(const Json& j, const Group& g) {
  if (j.is_string()) {
    if (!g.is_abelian()) throw InvalidInput("polynomial strings need an abelian group");
    return parse_polynomial(j.get<std::string>(), g.generator_count()).to_element();
  }
  if (j.is_number()) return GroupRingElement::constant(g, j.get<double>());
  if (!j.is_array()) throw InvalidInput("element must be a term list, a number or a polynomial string");
  GroupRingElement x;
  for (const auto& t : j) {
    x.add_term(key_from_json(field(t, "key"), g), {t.value("re", 0.0), t.value("im", 0.0)});
  }
  return x;
}

Json to_json(const GroupRingElement& x) { return terms_json(x); }

GroupRingMatrix matrix_from_json(const Json& j, const Group& g) {
  const auto rows = get_as<std::size_t>(field(j, "rows"), "rows");
  const auto cols = get_as<std::size_t>(field(j, "cols"), "cols");
  GroupRingMatrix a(g, rows, cols);
  const auto& entries = j.contains("entries") ? j.at("entries") : Json::array();
  if (rows > 0 && cols > 0) {
    if (!entries.is_array() || entries.size() != rows) throw DimensionMismatch("matrix entries must have 'rows' rows");
    for (std::size_t i = 0; i < rows; ++i) {
      if (!entries[i].is_array() || entries[i].size() != cols) {
        throw DimensionMismatch("matrix row " + std::to_string(i) + " must have 'cols' entries");
      }
      for (std::size_t k = 0; k < cols; ++k) a.set(i, k, element_from_json(entries[i][k], g));
    }
  }
  return a;
}

Json to_json(const GroupRingMatrix& a) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < a.cols(); ++k) row.push_back(terms_json(a.at(i, k)));
    entries.push_back(std::move(row));
  }
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"entries", entries}, {"integer_exact", a.integer_exact()}};
}

Character character_from_json(const Json& j) {
  const auto target = j.value("target", std::string("real"));
  if (target == "real") return Character::real(get_as<std::vector<double>>(field(j, "values"), "values"));
  if (target == "free_abelian") {
    return Character::free_abelian(get_as<std::vector<std::vector<std::int64_t>>>(field(j, "values"), "values"));
  }
  throw InvalidInput("character target must be 'real' or 'free_abelian'");
}

Json to_json(const Character& phi) {
  if (phi.target() == CharacterTarget::Real) {
    std::vector<double> v;
    for (const auto& row : phi.values()) v.push_back(row[0]);
    return {{"target", "real"}, {"values", v}};
  }
  std::vector<std::vector<std::int64_t>> v;
  for (const auto& row : phi.values()) {
    std::vector<std::int64_t> r;
    for (double x : row) r.push_back(static_cast<std::int64_t>(x));
    v.push_back(r);
  }
  return {{"target", "free_abelian"}, {"values", v}};
}

BasedRepresentation representation_from_json(const Json& j) {
  const int dim = get_as<int>(field(j, "dim"), "dim");
  std::vector<Eigen::MatrixXcd> acts;
  for (const auto& m : field(j, "matrices")) {
    if (!m.is_array() || static_cast<int>(m.size()) != dim) throw DimensionMismatch("representation matrix must be dim x dim");
    Eigen::MatrixXcd r(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (!m[i].is_array() || static_cast<int>(m[i].size()) != dim) {
        throw DimensionMismatch("representation matrix must be dim x dim");
      }
      for (int k = 0; k < dim; ++k) r(i, k) = scalar_from_json(m[i][k]);
    }
    acts.push_back(std::move(r));
  }
  return BasedRepresentation(std::move(acts), dim);
}

Json to_json(const BasedRepresentation& v) {
  Json mats = Json::array();
  for (const auto& r : v.actions()) {
    Json m = Json::array();
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index k = 0; k < r.cols(); ++k) row.push_back({r(i, k).real(), r(i, k).imag()});
      m.push_back(std::move(row));
    }
    mats.push_back(std::move(m));
  }
  return {{"dim", v.dim()}, {"matrices", mats}};
}

FiniteQuotient quotient_from_json(const Json& j) {
  std::optional<std::vector<std::int64_t>> sizes;
  if (j.contains("abelian")) sizes = get_as<std::vector<std::int64_t>>(j.at("abelian"), "abelian");
  if (!j.contains("generators")) {
    if (!sizes) throw InvalidInput("quotient needs 'generators' or 'abelian'");
    return FiniteQuotient::abelian(*sizes);
  }
  auto gens = get_as<std::vector<std::vector<std::size_t>>>(j.at("generators"), "generators");
  auto q = FiniteQuotient::from_permutations(std::move(gens), sizes);
  if (j.contains("order") && get_as<std::size_t>(j.at("order"), "order") != q.order()) {
    throw InvalidInput("quotient order does not match the permutations");
  }
  return q;
}

Json to_json(const FiniteQuotient& q) {
  Json out = {{"order", q.order()}, {"generators", q.generators()}};
  if (q.abelian_sizes()) out["abelian"] = *q.abelian_sizes();
  return out;
}

QuotientTower tower_from_json(const Json& j) {
  if (j.is_object() && j.contains("cyclic")) {
    const auto& c = j.at("cyclic");
    return QuotientTower::cyclic(get_as<int>(field(c, "d"), "d"),
                                 get_as<std::vector<std::int64_t>>(field(c, "sizes"), "sizes"));
  }
  if (!j.is_array()) throw InvalidInput("tower must be a list of quotients or {cyclic: ...}");
  std::vector<FiniteQuotient> levels;
  for (const auto& q : j) levels.push_back(quotient_from_json(q));
  return QuotientTower(std::move(levels));
}

Json to_json(const QuotientTower& t) {
  Json out = Json::array();
  for (const auto& q : t.levels()) out.push_back(to_json(q));
  return out;
}

ComplexInput complex_from_json(const Json& j) {
  const Group g = group_from_json(field(j, "group"));
  const auto ranks = get_as<std::vector<std::size_t>>(field(j, "ranks"), "ranks");
  std::vector<GroupRingMatrix> bds;
  if (j.contains("boundaries")) {
    for (const auto& m : j.at("boundaries")) bds.push_back(matrix_from_json(m, g));
  }
  ComplexInput in{BasedChainComplex(g, ranks, std::move(bds)),
                  Character::real(std::vector<double>(static_cast<std::size_t>(g.generator_count()), 1.0))};
  if (j.contains("tower")) in.complex.tower = tower_from_json(j.at("tower"));
  if (j.contains("character")) in.phi = character_from_json(j.at("character"));
  const auto check = validate_complex(in.complex);
  if (!check.ok) throw InvalidInput("not a chain complex: " + check.message);
  return in;
}

Json to_json(const BasedChainComplex& c) {
  Json bds = Json::array();
  for (const auto& b : c.boundaries()) bds.push_back(to_json(b));
  Json out = {{"group", to_json(c.group())}, {"ranks", c.ranks()}, {"boundaries", bds}};
  if (c.tower) out["tower"] = to_json(*c.tower);
  return out;
}

LaurentPoly laurent_from_json(const Json& j) {
  if (j.is_string()) return parse_polynomial(j.get<std::string>());
  const int vars = get_as<int>(field(j, "vars"), "vars");
  LaurentPoly p(vars);
  for (const auto& t : field(j, "terms")) {
    p.add_term(get_as<Exponent>(field(t, "key"), "key"), {t.value("re", 0.0), t.value("im", 0.0)});
  }
  return p;
}

Json to_json(const LaurentPoly& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"key", e}, {"re", c.real()}, {"im", c.imag()}});
  return {{"vars", p.vars()}, {"terms", terms}, {"integer_exact", p.integer_exact()}};
}

Json to_json(const LogDetResult& r) {
  Json out = {{"value", number_or_null(r.value)}, {"method", to_string(r.method)}};
  out["error_estimate"] = r.error_estimate ? number_or_null(*r.error_estimate) : Json(nullptr);
  if (std::isinf(r.value) && r.value < 0) out["status"] = "zero-determinant";
  return out;
}

Json to_json(const ApproxResult& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"order", l.order}, {"dim_ker", l.vn_dim_ker}, {"logdet", l.reg_logdet}});
  }
  return {{"levels", levels},
          {"limsup_estimate", r.limsup_estimate},
          {"dims_limit_estimate", r.dims_limit_estimate},
          {"dims_stable", r.dims_stable}};
}

Json to_json(const BoundCertificate& b) {
  Json out = {{"lower", number_or_null(b.lower)}, {"upper", number_or_null(b.upper)}};
  out["theta_lower"] = b.theta_lower ? number_or_null(*b.theta_lower) : Json(nullptr);
  return out;
}

Json to_json(const TorsionCurve& c) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    pts.push_back({{"t", c.t[i]},
                   {"rho", c.ok[i] ? number_or_null(c.rho[i]) : Json(nullptr)},
                   {"status", c.ok[i] ? "ok" : "non-det-class"},
                   {"method", to_string(c.methods[i])}});
  }
  return {{"points", pts}};
}

Json to_json(const DegreeResult& d) {
  return {{"deg0", d.deg0},           {"deg_inf", d.deg_inf},       {"deg", d.deg},
          {"slopes0", d.slopes0},     {"slopes_inf", d.slopes_inf}, {"stable0", d.stable0},
          {"stable_inf", d.stable_inf}, {"enough_points", d.enough_points}};
}

Json to_json(const BoundEnvelope& e) { return {{"C", e.c}, {"D", e.d}}; }

Json to_json(const VerifyReport& r) {
  Json res = Json::array();
  for (double x : r.residuals) res.push_back(number_or_null(x));
  return {{"ok", r.ok},       {"max_residual", number_or_null(r.max_residual)},
          {"t", r.t},         {"residuals", res},
          {"slope", r.slope}, {"intercept", r.intercept},
          {"detail", r.detail}};
}

Json to_json(const SemicontinuityReport& r) {
  Json out = {{"ok", r.ok},
              {"limit_dim", r.limit_dim},
              {"limsup_dim", r.limsup_dim},
              {"limit_det", r.limit_det},
              {"limsup_det", r.limsup_det},
              {"tail_max_det", r.tail_max_det},
              {"tail_start", r.tail_start},
              {"distances", r.distances},
              {"dims", r.dims},
              {"dets", r.dets},
              {"message", r.message}};
  out["extrapolated_det"] = r.extrapolated_det ? Json(*r.extrapolated_det) : Json(nullptr);
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string curve_csv(const TorsionCurve& c, const std::optional<BoundEnvelope>& env) {
  std::ostringstream os;
  os << "t,rho,status,envelope_lower,envelope_upper\r\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    os << format_double(c.t[i]) << ',' << (c.ok[i] ? format_double(c.rho[i]) : std::string()) << ','
       << (c.ok[i] ? "ok" : "non-det-class") << ',';
    if (env) os << format_double(-env->at(c.t[i])) << ',' << format_double(env->at(c.t[i]));
    else os << ',';
    os << "\r\n";
  }
  return os.str();
}

std::string approx_csv(const ApproxResult& r) {
  std::ostringstream os;
  os << "level,order,dim_ker,logdet\r\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& l = r.levels[i];
    os << i << ',' << l.order << ',' << format_double(l.vn_dim_ker) << ',' << format_double(l.reg_logdet) << "\r\n";
  }
  return os.str();
}

}  // namespace l2twist
