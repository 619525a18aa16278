// Python module _l2twist. Jobs and results cross the boundary as JSON text;
// the l2twist package wraps them as dicts.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "l2twist/json_io.hpp"
#include "l2twist/poly_parser.hpp"

namespace py = pybind11;
using namespace l2twist;

namespace {

Json parse_job(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("job is not valid JSON: ") + e.what());
  }
}

Character default_character(const Json& in, const Group& g) {
  if (in.contains("character")) return character_from_json(in.at("character"));
  if (g.is_abelian()) return Character::identity(g.generator_count());
  return Character::real(std::vector<double>(static_cast<std::size_t>(g.generator_count()), 1.0));
}

Twist job_twist(const Json& in, const Group& g) {
  if (!in.contains("representation")) return {};
  return RepresentationTwist{default_character(in, g), representation_from_json(in.at("representation"))};
}

std::string mahler_json(const std::string& poly, const std::string& method, double tol, std::size_t n) {
  const LaurentPoly p = parse_polynomial(poly);
  if (p.is_zero()) throw InvalidInput("the zero polynomial has no Mahler measure");
  LawtonOptions lo;
  lo.tol = tol;
  LogDetResult r;
  if (method == "auto") r = mahler(p, lo);
  else if (method == "exact") r = mahler_exact_univariate(p);
  else if (method == "lawton") r = mahler_lawton(p, lo);
  else if (method == "quadrature") r = mahler_quadrature(p, n, 1);
  else if (method == "fibered") r = mahler_fibered(p, n);
  else throw InvalidInput("unknown method " + method);
  Json out = to_json(r);
  out["polynomial"] = to_string(p);
  return out.dump();
}

std::string fkdet_json(const std::string& job, double tol) {
  const Json in = parse_job(job);
  const Group g = group_from_json(in.at("group"));
  const GroupRingMatrix a = apply_twist(matrix_from_json(in.at("matrix"), g), job_twist(in, g));
  LawtonOptions lo;
  lo.tol = tol;
  const auto d = det_matrix_over_Zd(a, lo);
  Json out = to_json(d.logdet);
  out["determinant"] = to_string(d.detpoly);
  return out.dump();
}

std::string approx_json(const std::string& job) {
  const Json in = parse_job(job);
  const Group g = group_from_json(in.at("group"));
  const GroupRingMatrix a = matrix_from_json(in.at("matrix"), g);
  if (!in.contains("tower")) throw InvalidInput("approx needs a 'tower'");
  ApproxOptions ao;
  ao.threads = 1;
  return to_json(approx_sequence(a, tower_from_json(in.at("tower")), job_twist(in, g), ao)).dump();
}

std::string torsion_json(const std::string& job, const std::vector<double>& ts, bool with_degree) {
  const Json in = parse_job(job);
  const auto ci = complex_from_json(in);
  TorsionOptions opts;
  opts.threads = 1;
  const auto curve = torsion_curve(ci.complex, ci.phi, ts, opts);
  Json out = to_json(curve);
  if (with_degree) out["degree"] = to_json(degree(curve));
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_l2twist, m) {
  m.doc() = "L2-torsion twisted by characters and representations";
  // translators run newest first, so the derived type goes last
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);

  m.def("canonical_polynomial", [](const std::string& s) { return to_string(parse_polynomial(s)); });
  m.def("lead", [](const std::string& s) { return lead(parse_polynomial(s)); });
  m.def("mahler_json", &mahler_json, py::arg("poly"), py::arg("method") = "auto", py::arg("tol") = 1e-4,
        py::arg("quadrature_n") = 256);
  m.def("fkdet_json", &fkdet_json, py::arg("job"), py::arg("tol") = 1e-4);
  m.def("approx_json", &approx_json, py::arg("job"));
  m.def("torsion_json", &torsion_json, py::arg("job"), py::arg("t"), py::arg("with_degree") = false);
  m.def("geometric_grid", &geometric_grid, py::arg("t_min"), py::arg("t_max"), py::arg("points"));
}
