// l2twist command-line tool. Reads a JSON job, writes JSON results (and CSV
// curves on request).
//
// Exit status: 0 success, 1 internal error, 2 invalid input, 3 failed
// verification, 4 non-det-class point in a --strict torsion run.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "l2twist/json_io.hpp"
#include "l2twist/parallel.hpp"
#include "l2twist/poly_parser.hpp"

using namespace l2twist;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitVerify = 3;
constexpr int kExitStrict = 4;

struct Options {
  std::string input;
  std::string output;
  std::string csv;
  std::string poly;
  std::string method = "auto";
  std::string check;
  double tmin = 0.25;
  double tmax = 4.0;
  std::size_t points = 9;
  double tol = 1e-4;
  std::size_t quadrature_n = 256;
  double cutoff_factor = kDefaultCutoffFactor;
  std::uint64_t seed = 0;
  int threads = default_threads();
  bool strict = false;
  double r = 2.0;
};

Json read_input(const Options& o) {
  if (o.input.empty()) throw InvalidInput("--input is required for this command");
  std::ifstream in(o.input);
  if (!in) throw InvalidInput("cannot open input file " + o.input);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("input is not valid JSON: ") + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

void emit(const Options& o, const Json& result) {
  const std::string text = result.dump(2) + "\n";
  if (o.output.empty()) std::cout << text;
  else write_text(o.output, text);
}

std::vector<double> t_grid(const Options& o, const Json& in) {
  if (in.contains("t")) {
    auto ts = in.at("t").get<std::vector<double>>();
    for (double t : ts) {
      if (!(t > 0) || !std::isfinite(t)) throw InvalidInput("t-grid values must be positive");
    }
    if (ts.empty()) throw InvalidInput("t-grid is empty");
    return ts;
  }
  if (!(o.tmin > 0) || !(o.tmax >= o.tmin) || o.points == 0) {
    throw InvalidInput("need 0 < tmin <= tmax and points >= 1");
  }
  return geometric_grid(o.tmin, o.tmax, o.points);
}

TorsionOptions torsion_options(const Options& o) {
  TorsionOptions t;
  t.threads = o.threads;
  t.lawton.tol = o.tol;
  t.approx.cutoff_factor = o.cutoff_factor;
  t.approx.threads = o.threads;
  return t;
}

Character character_or_default(const Json& in, const Group& g) {
  if (in.contains("character")) return character_from_json(in.at("character"));
  if (g.is_abelian()) return Character::identity(g.generator_count());
  return Character::real(std::vector<double>(static_cast<std::size_t>(g.generator_count()), 1.0));
}

Twist twist_from_input(const Json& in, const Group& g) {
  if (!in.contains("representation")) return {};
  return RepresentationTwist{character_or_default(in, g), representation_from_json(in.at("representation"))};
}

int run_mahler(const Options& o) {
  LaurentPoly p;
  if (!o.poly.empty()) {
    p = parse_polynomial(o.poly);
  } else {
    const Json in = read_input(o);
    p = laurent_from_json(in.contains("polynomial") ? in.at("polynomial") : in);
  }
  if (p.is_zero()) throw InvalidInput("the zero polynomial has no Mahler measure");
  LawtonOptions lo;
  lo.tol = o.tol;
  LogDetResult r;
  if (o.method == "auto") r = mahler(p, lo);
  else if (o.method == "exact") r = mahler_exact_univariate(p);
  else if (o.method == "lawton") r = mahler_lawton(p, lo);
  else if (o.method == "quadrature") r = mahler_quadrature(p, o.quadrature_n, o.threads);
  else if (o.method == "fibered") r = mahler_fibered(p, o.quadrature_n);
  else throw InvalidInput("unknown method " + o.method);
  Json out = to_json(r);
  out["command"] = "mahler";
  out["polynomial"] = to_string(p);
  emit(o, out);
  return 0;
}

int run_fkdet(const Options& o) {
  const Json in = read_input(o);
  const Group g = group_from_json(in.at("group"));
  GroupRingMatrix a = matrix_from_json(in.at("matrix"), g);
  const Twist tw = twist_from_input(in, g);
  a = apply_twist(a, tw);
  LawtonOptions lo;
  lo.tol = o.tol;
  const auto d = det_matrix_over_Zd(a, lo);
  Json out = to_json(d.logdet);
  out["command"] = "fkdet";
  out["determinant"] = to_string(d.detpoly);
  out["det"] = std::isfinite(d.logdet.value) ? Json(std::exp(d.logdet.value)) : Json(0.0);
  emit(o, out);
  return 0;
}

int run_approx(const Options& o) {
  const Json in = read_input(o);
  const Group g = group_from_json(in.at("group"));
  const GroupRingMatrix a = matrix_from_json(in.at("matrix"), g);
  if (!in.contains("tower")) throw InvalidInput("approx needs a 'tower'");
  const QuotientTower tower = tower_from_json(in.at("tower"));
  ApproxOptions ao;
  ao.cutoff_factor = o.cutoff_factor;
  ao.threads = o.threads;
  const auto r = approx_sequence(a, tower, twist_from_input(in, g), ao);
  Json out = to_json(r);
  out["command"] = "approx";
  emit(o, out);
  if (!o.csv.empty()) write_text(o.csv, approx_csv(r));
  return 0;
}

int run_torsion(const Options& o, bool with_degree) {
  const Json in = read_input(o);
  const auto ci = complex_from_json(in);
  const auto ts = t_grid(o, in);
  const auto curve = torsion_curve(ci.complex, ci.phi, ts, torsion_options(o));
  std::optional<BoundEnvelope> env;
  std::string env_note;
  try {
    env = bound_envelope(ci.complex, ci.phi);
  } catch (const InvalidInput& e) {
    env_note = e.what();
  }
  Json out = to_json(curve);
  out["command"] = with_degree ? "degree" : "torsion";
  out["envelope"] = env ? to_json(*env) : Json(nullptr);
  if (!env_note.empty()) out["envelope_note"] = env_note;
  if (with_degree) out["degree"] = to_json(degree(curve));
  emit(o, out);
  if (!o.csv.empty()) write_text(o.csv, curve_csv(curve, env));
  if (o.strict) {
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
      if (!curve.ok[i]) {
        std::cerr << Json{{"error", "non-det-class"}, {"t", curve.t[i]}}.dump() << "\n";
        return kExitStrict;
      }
    }
  }
  return 0;
}

int run_bounds(const Options& o) {
  const Json in = read_input(o);
  const Group g = group_from_json(in.at("group"));
  if (!g.is_abelian()) throw InvalidInput("bound certificates need Z^d");
  const GroupRingMatrix a = matrix_from_json(in.at("matrix"), g);
  const Character phi = character_or_default(in, g);
  if (!in.contains("representation")) throw InvalidInput("bounds needs a 'representation'");
  const BasedRepresentation v = representation_from_json(in.at("representation"));
  double k = 0.0;
  if (in.contains("kernel_dim")) {
    k = in.at("kernel_dim").get<double>();
  } else {
    k = static_cast<double>(a.rows()) - static_cast<double>(rank_fraction_field(a, o.seed));
  }
  const auto cert = bound_certificate(a, phi, v, k, in.value("has_section", false));
  Json out = to_json(cert);
  out["command"] = "bounds";
  out["kernel_dim"] = k;
  if (a.rows() == a.cols() && k == 0.0) {
    LawtonOptions lo;
    lo.tol = o.tol;
    const auto d = det_matrix_over_Zd(twist_rep(a, phi, v), lo);
    out["logdet"] = to_json(d.logdet);
    out["within"] = d.logdet.value >= cert.lower - 1e-9 && d.logdet.value <= cert.upper + 1e-9;
  }
  emit(o, out);
  return 0;
}

std::vector<std::vector<std::int64_t>> int_rows(const Json& j) { return j.get<std::vector<std::vector<std::int64_t>>>(); }

Eigen::MatrixXd int_matrix(const Json& j, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (rows == 0 || cols == 0) return m;
  const auto v = j.get<std::vector<std::vector<double>>>();
  if (v.size() != rows) throw DimensionMismatch("integer matrix has the wrong row count");
  for (std::size_t i = 0; i < rows; ++i) {
    if (v[i].size() != cols) throw DimensionMismatch("integer matrix has the wrong column count");
    for (std::size_t k = 0; k < cols; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v[i][k];
  }
  return m;
}

int run_verify(const Options& o) {
  const Json in = read_input(o);
  const auto ci = complex_from_json(in);
  const auto ts = t_grid(o, in);
  const auto topt = torsion_options(o);
  VerifyReport rep;
  if (o.check == "scaling") {
    rep = verify_scaling(ci.complex, ci.phi, o.r, ts, topt);
  } else if (o.check == "duality") {
    const int n = in.value("dimension", static_cast<int>(ci.complex.top()));
    rep = verify_duality(ci.complex, n, ci.phi, ts, std::nullopt, topt);
  } else if (o.check == "restriction") {
    if (!in.contains("sublattice")) throw InvalidInput("restriction needs 'sublattice' basis rows");
    rep = verify_restriction(ci.complex, ci.phi, int_rows(in.at("sublattice")), ts, topt);
  } else if (o.check == "base_change") {
    if (!in.contains("basis_change")) throw InvalidInput("base_change needs 'basis_change'");
    BasisChange change;
    for (const auto& degree : in.at("basis_change")) {
      std::vector<BasisChangeEntry> row;
      for (const auto& e : degree) {
        row.push_back({e.at("source").get<std::size_t>(), e.value("sign", 1),
                       key_from_json(e.at("g"), ci.complex.group())});
      }
      change.push_back(std::move(row));
    }
    rep = verify_base_change(ci.complex, ci.phi, change, ts, topt);
  } else if (o.check == "sum") {
    if (!in.contains("quotient") || !in.contains("h")) throw InvalidInput("sum needs 'quotient' and 'h'");
    const auto quot = complex_from_json(in.at("quotient"));
    std::vector<GroupRingMatrix> h;
    for (const auto& m : in.at("h")) h.push_back(matrix_from_json(m, ci.complex.group()));
    rep = verify_sum(ci.complex, quot.complex, h, ci.phi, ts, topt);
  } else if (o.check == "product") {
    if (!in.contains("factor")) throw InvalidInput("product needs 'factor' {ranks, boundaries}");
    const auto& f = in.at("factor");
    const auto ranks = f.at("ranks").get<std::vector<std::size_t>>();
    std::vector<Eigen::MatrixXd> bds;
    const Json fb = f.value("boundaries", Json::array());
    if (fb.size() + 1 != ranks.size()) throw DimensionMismatch("factor needs one boundary per positive degree");
    for (std::size_t n = 1; n < ranks.size(); ++n) bds.push_back(int_matrix(fb[n - 1], ranks[n], ranks[n - 1]));
    rep = verify_product(ci.complex, ranks, bds, ci.phi, ts, topt);
  } else {
    throw InvalidInput("unknown check '" + o.check +
                       "' (scaling, duality, restriction, base_change, sum, product)");
  }
  Json out = to_json(rep);
  out["command"] = "verify";
  out["check"] = o.check;
  emit(o, out);
  if (!rep.ok) {
    std::cerr << Json{{"error", "verification-failed"}, {"check", o.check}, {"max_residual", rep.max_residual}}.dump()
              << "\n";
    return kExitVerify;
  }
  return 0;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--input,-i", o.input, "JSON input file");
  sub->add_option("--output,-o", o.output, "JSON output file (default stdout)");
  sub->add_option("--tol", o.tol, "Lawton convergence tolerance");
  sub->add_option("--threads", o.threads, "worker threads (default $L2TWIST_THREADS or 1)");
  sub->add_option("--seed", o.seed, "seed for randomized rank tests");
  sub->add_option("--svd-cutoff-factor", o.cutoff_factor, "singular value cutoff factor");
  sub->add_option("--quadrature-n,--n", o.quadrature_n, "quadrature nodes per axis");
}

void add_grid(CLI::App* sub, Options& o) {
  sub->add_option("--tmin", o.tmin, "smallest t");
  sub->add_option("--tmax", o.tmax, "largest t");
  sub->add_option("--points", o.points, "number of grid points");
  sub->add_option("--csv", o.csv, "CSV output file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisted L2-invariants of chain complexes over group rings"};
  app.require_subcommand(1);
  Options o;

  auto* mahler_cmd = app.add_subcommand("mahler", "Mahler measure of a Laurent polynomial");
  add_common(mahler_cmd, o);
  mahler_cmd->add_option("--poly", o.poly, "polynomial string, e.g. \"1+x+y\"");
  mahler_cmd->add_option("--method", o.method, "auto, exact, lawton, quadrature or fibered");

  auto* fkdet_cmd = app.add_subcommand("fkdet", "Fuglede-Kadison determinant over Z^d");
  add_common(fkdet_cmd, o);

  auto* approx_cmd = app.add_subcommand("approx", "finite quotient approximation");
  add_common(approx_cmd, o);
  approx_cmd->add_option("--csv", o.csv, "CSV output file");

  auto* torsion_cmd = app.add_subcommand("torsion", "twisted L2-torsion curve");
  add_common(torsion_cmd, o);
  add_grid(torsion_cmd, o);
  torsion_cmd->add_flag("--strict", o.strict, "exit 4 if a grid point is not of determinant class");

  auto* degree_cmd = app.add_subcommand("degree", "degree of the torsion function");
  add_common(degree_cmd, o);
  add_grid(degree_cmd, o);
  degree_cmd->add_flag("--strict", o.strict, "exit 4 if a grid point is not of determinant class");

  auto* bounds_cmd = app.add_subcommand("bounds", "bound certificate for a twisted determinant");
  add_common(bounds_cmd, o);

  auto* verify_cmd = app.add_subcommand("verify", "check a structural identity");
  add_common(verify_cmd, o);
  add_grid(verify_cmd, o);
  verify_cmd->add_option("--check", o.check, "scaling, duality, restriction, base_change, sum or product")->required();
  verify_cmd->add_option("--r", o.r, "scale factor for the scaling check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*mahler_cmd) return run_mahler(o);
    if (*fkdet_cmd) return run_fkdet(o);
    if (*approx_cmd) return run_approx(o);
    if (*torsion_cmd) return run_torsion(o, false);
    if (*degree_cmd) return run_torsion(o, true);
    if (*bounds_cmd) return run_bounds(o);
    if (*verify_cmd) return run_verify(o);
  } catch (const InvalidInput& e) {
    std::cerr << Json{{"error", "invalid-input"}, {"message", e.what()}}.dump() << "\n";
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << Json{{"error", "invalid-input"}, {"message", e.what()}}.dump() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
