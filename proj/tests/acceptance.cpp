// Acceptance run: one PASS/FAIL line per criterion with its runtime.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "l2twist/dense.hpp"
#include "l2twist/mahler.hpp"
#include "l2twist/poly_parser.hpp"
#include "l2twist/quotients.hpp"
#include "l2twist/torsion.hpp"

using namespace l2twist;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::printf("%s %2d %-28s %8.3fs (limit %gs)  %s%s\n", pass ? "PASS" : "FAIL", id, name, secs, budget_s,
              o.detail.c_str(), in_time ? "" : " [over time budget]");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

GroupRingMatrix poly_matrix(int d, const std::vector<std::vector<std::string>>& rows) {
  GroupRingMatrix a(Group::abelian(d), rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) a.set(i, j, parse_polynomial(rows[i][j], d).to_element());
  return a;
}

const std::vector<double>& dyadic_grid() {
  static const std::vector<double> ts = [] {
    std::vector<double> v;
    for (int k = 0; k <= 8; ++k) v.push_back(std::ldexp(1.0, k) / 4.0);
    return v;
  }();
  return ts;
}

GroupRingElement random_element(std::mt19937_64& rng, int d, int terms, int coef, int expo) {
  std::uniform_int_distribution<int> c(-coef, coef), e(-expo, expo);
  GroupRingElement x;
  for (int t = 0; t < terms; ++t) {
    std::vector<std::int64_t> key(d);
    for (auto& k : key) k = e(rng);
    x.add_term(GroupElementKey(key), static_cast<double>(c(rng)));
  }
  return x;
}

GroupRingMatrix random_matrix(std::mt19937_64& rng, int d, std::size_t r, std::size_t s, int terms = 3) {
  GroupRingMatrix a(Group::abelian(d), r, s);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < s; ++j) a.set(i, j, random_element(rng, d, terms, 3, d == 1 ? 2 : 1));
  return a;
}

// 1. Circle curve
Outcome circle_curve() {
  const auto& ts = dyadic_grid();
  const auto curve = torsion_curve(circle_complex(), Character::real({1.0}), ts);
  double err = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!curve.ok[i]) return {false, "non-det-class point"};
    err = std::max(err, std::abs(curve.rho[i] - std::log(std::max(ts[i], 1.0))));
  }
  const auto deg = degree(curve);
  const bool ok = err <= 1e-9 && std::abs(deg.deg - 1.0) <= 1e-6;
  return {ok, fmt("max |rho - ln max(t,1)| = %.3g, degree = %.12g", err, deg.deg)};
}

// 2. Torus vanishing
Outcome torus_vanishing() {
  const auto& ts = dyadic_grid();
  const auto curve = torsion_curve(torus_complex(2), Character::real({1.0, 1.0}), ts);
  double err = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!curve.ok[i]) return {false, "non-det-class point"};
    err = std::max(err, std::abs(curve.rho[i]));
  }
  return {err <= 1e-9, fmt("max |rho| = %.3g", err)};
}

// 3. Mapping torus plateaus
Outcome mapping_torus_plateaus() {
  IntegerChainMap f;
  f.ranks = {1, 2};
  f.boundaries = {Eigen::MatrixXd::Zero(2, 1)};
  f.maps = {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(2, 2)};
  const auto mt = mapping_torus_complex(f);
  const auto& ts = dyadic_grid();
  const auto curve = torsion_curve(mt.complex, Character::real({1.0}), ts);
  double err = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!curve.ok[i]) return {false, "non-det-class point"};
    const double expect = ts[i] <= 1.0 ? 0.0 : -std::log(ts[i]);
    err = std::max(err, std::abs(curve.rho[i] - expect));
  }
  const bool ok = err <= 1e-9 && std::abs(mt.t0 - 1.0) <= 1e-12 && std::abs(mt.t_inf - 1.0) <= 1e-12;
  return {ok, fmt("max err = %.3g, T0 = %.15g, Tinf = %.15g", err, mt.t0, mt.t_inf)};
}

// 4. Quotient convergence
Outcome quotient_convergence() {
  std::vector<std::int64_t> sizes;
  for (int k = 4; k <= 12; ++k) sizes.push_back(std::int64_t{1} << k);
  const auto tower = QuotientTower::cyclic(1, sizes);
  const auto a = approx_sequence(poly_matrix(1, {{"2z-1"}}), tower);
  const double ln2 = std::log(2.0);
  bool ok = true;
  double max_dim = 0.0, max_excess = -1.0;
  for (const auto& l : a.levels) {
    max_excess = std::max(max_excess, l.reg_logdet - ln2);
    max_dim = std::max(max_dim, l.vn_dim_ker);
  }
  ok = ok && max_excess <= 1e-6 && max_dim == 0.0;
  const double final_gap = std::abs(a.levels.back().reg_logdet - ln2);
  ok = ok && final_gap <= 1e-3;

  const auto b = approx_sequence(poly_matrix(1, {{"z-1"}}), tower);
  double dim_err = 0.0, ld_err = 0.0;
  for (const auto& l : b.levels) {
    const double n = static_cast<double>(l.order);
    dim_err = std::max(dim_err, std::abs(l.vn_dim_ker - 1.0 / n));
    ld_err = std::max(ld_err, std::abs(l.reg_logdet - std::log(n) / n));
  }
  const auto& last = b.levels.back();
  ok = ok && dim_err <= 1e-12 && ld_err <= 1e-3 && last.order == 4096 && last.vn_dim_ker <= 1.0 / 4096 + 1e-12 &&
       last.reg_logdet <= b.levels.front().reg_logdet;
  std::ostringstream os;
  os << "2z-1: max excess over ln2 = " << max_excess << ", final gap = " << final_gap << ", dims = " << max_dim
     << "; z-1 at N=4096: dim = " << last.vn_dim_ker << ", logdet = " << last.reg_logdet
     << " (ln N / N = " << std::log(4096.0) / 4096 << ")";
  return {ok, os.str()};
}

// 5. Bound certificates
Outcome bound_certificates() {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> diag(0.25, 4.0);
  std::uniform_int_distribution<int> coin(0, 1), dimv(1, 3);
  int checked = 0, skipped = 0, violations = 0, theta_violations = 0;
  double worst = 0.0;
  while (checked < 200) {
    const int d = 1 + coin(rng);
    const std::size_t r = 1 + static_cast<std::size_t>(coin(rng));
    const auto a = random_matrix(rng, d, r, r);
    const int m = dimv(rng);
    std::vector<Eigen::MatrixXcd> acts;
    for (int l = 0; l < d; ++l) {
      Eigen::MatrixXcd rl = Eigen::MatrixXcd::Zero(m, m);
      for (int i = 0; i < m; ++i) rl(i, i) = diag(rng);
      acts.push_back(rl);
    }
    const BasedRepresentation v(acts);
    if (rank_fraction_field(a) < r) {
      ++skipped;
      continue;
    }
    const auto phi = Character::identity(d);
    const auto exact = det_matrix_over_Zd(twist_rep(a, phi, v));
    if (!std::isfinite(exact.logdet.value)) {
      ++skipped;
      continue;
    }
    const auto cert = bound_certificate(a, phi, v, 0.0, true);
    const double tol = exact.logdet.error_estimate.value_or(0.0) + 1e-9;
    const double below = cert.lower - exact.logdet.value, above = exact.logdet.value - cert.upper;
    worst = std::max({worst, below, above});
    if (below > tol || above > tol) ++violations;
    if (!cert.theta_lower || *cert.theta_lower < cert.lower - 1e-12) ++theta_violations;
    ++checked;
  }
  std::ostringstream os;
  os << checked << " instances (" << skipped << " singular skipped), " << violations << " violations, "
     << theta_violations << " theta<nu, worst excess " << worst;
  return {violations == 0 && theta_violations == 0, os.str()};
}

// 6. Twisted Betti
Outcome twisted_betti() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> size(1, 3), dimv(1, 3), coin(0, 2);
  std::uniform_real_distribution<double> diag(0.25, 4.0), entry(-1.0, 1.0);
  int mismatches = 0, low_rank = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = size(rng), s = size(rng);
    GroupRingMatrix a = random_matrix(rng, 2, r, s, 2);
    if (coin(rng) == 0 && std::min(r, s) > 1) {
      // product through a thinner module forces a rank drop
      a = mat_mul(random_matrix(rng, 2, r, 1, 2), random_matrix(rng, 2, 1, s, 2));
      ++low_rank;
    }
    const int m = dimv(rng);
    Eigen::MatrixXcd u(m, m);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) u(i, k) = entry(rng) + (i == k ? 2.0 : 0.0);
    std::vector<Eigen::MatrixXcd> acts;
    for (int l = 0; l < 2; ++l) {
      Eigen::MatrixXcd dl = Eigen::MatrixXcd::Zero(m, m);
      for (int i = 0; i < m; ++i) dl(i, i) = diag(rng);
      acts.push_back(u * dl * u.inverse());
    }
    const BasedRepresentation v(acts);
    const auto base = rank_fraction_field(a);
    const auto twisted = rank_fraction_field(twist_rep(a, Character::identity(2), v));
    if (twisted != static_cast<std::size_t>(m) * base) ++mismatches;
  }
  std::ostringstream os;
  os << "100 matrices (" << low_rank << " low-rank), " << mismatches << " mismatches";
  return {mismatches == 0, os.str()};
}

// 7. Mahler oracle agreement
Outcome mahler_agreement() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-5, 5), degree_dist(1, 8);
  int count = 0, disagreements = 0;
  double worst = 0.0;
  while (count < 50) {
    const int deg = degree_dist(rng);
    std::vector<Complex> c(deg + 1);
    for (auto& x : c) x = static_cast<double>(coef(rng));
    if (c.back() == 0.0 || c.front() == 0.0) continue;
    bool near_circle = false;
    for (const auto& z : polynomial_roots(c)) near_circle |= std::abs(std::abs(z) - 1.0) < 1e-3;
    if (near_circle) continue;
    const auto p = LaurentPoly::univariate(c);
    const double exact = mahler_exact_univariate(p).value;
    const double quad = mahler_quadrature(p, 1 << 16).value;
    worst = std::max(worst, std::abs(exact - quad));
    if (std::abs(exact - quad) > 1e-3) ++disagreements;
    ++count;
  }
  const auto smyth = parse_polynomial("1+x+y");
  const double lawton = mahler_lawton(smyth).value;
  const double quad = mahler_quadrature(smyth, 1024).value;
  const double gap = std::abs(lawton - quad);

  std::uniform_int_distribution<int> dd(1, 3), nterms(1, 5), expo(-3, 3);
  int lead_violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = dd(rng);
    LaurentPoly q(d);
    while (q.is_zero()) {
      const int n = nterms(rng);
      for (int t = 0; t < n; ++t) {
        Exponent e(d);
        for (auto& x : e) x = expo(rng);
        q.add_term(e, static_cast<double>(coef(rng)));
      }
    }
    const auto r = mahler(q);
    if (r.value + r.error_estimate.value_or(0.0) + 1e-9 < std::log(std::abs(lead(q)))) ++lead_violations;
  }
  std::ostringstream os;
  os << "exact vs quadrature worst " << worst << " (" << disagreements << " > 1e-3); Lawton(1+x+y) - quadrature = "
     << gap << "; lead violations " << lead_violations << "/200";
  return {disagreements == 0 && gap <= 2e-3 && lead_violations == 0, os.str()};
}

// 8. Envelope
Outcome envelope() {
  const auto& ts = dyadic_grid();
  const auto env = bound_envelope(circle_complex(), Character::real({1.0}));
  const auto curve = torsion_curve(circle_complex(), Character::real({1.0}), ts);
  bool ok = env.c <= 4.0 + 1e-12 && env.d <= std::log(2.0) + 1e-12;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    ok = ok && curve.ok[i] && std::abs(curve.rho[i]) <= env.at(ts[i]) &&
         std::abs(curve.rho[i]) <= 4.0 * std::abs(std::log(ts[i])) + std::log(2.0);
  }
  return {ok, fmt("C = %.17g, D = %.17g", env.c, env.d)};
}

// 9. Property verifiers
Outcome verifiers() {
  const auto& ts = dyadic_grid();
  const auto circle = circle_complex();
  const auto phi = Character::real({1.0});
  std::ostringstream os;
  bool ok = true;
  auto note = [&](const char* name, const VerifyReport& r) {
    ok = ok && r.ok && r.max_residual <= 1e-9;
    os << name << " " << (r.ok ? "ok" : "FAILED") << " (" << r.max_residual << "); ";
  };
  for (double r : {0.5, 2.0, 3.0}) note("scaling", verify_scaling(circle, phi, r, ts));
  const auto dual = verify_duality(circle, 1, phi, ts);
  note("duality", dual);
  // the residual of the circle is exactly ln t
  ok = ok && std::abs(dual.slope - 1.0) <= 1e-9 && std::abs(dual.intercept) <= 1e-9;

  const auto res = restrict_to_sublattice(circle, phi, {{2}});
  double restr = 0.0;
  for (double t : ts) {
    restr = std::max(restr, std::abs(torsion_at(res.complex, res.phi, t).value - 2.0 * torsion_at(circle, phi, t).value));
  }
  ok = ok && res.index == 2 && restr <= 1e-9;
  note("restriction", verify_restriction(circle, phi, {{2}}, ts));

  BasisChange change(2);
  change[0] = {{0, 1, GroupElementKey{3}}};
  change[1] = {{0, -1, GroupElementKey{1}}};
  note("base-change", verify_base_change(circle, phi, change, ts));

  const auto t2 = torus_complex(2);
  const auto phi2 = Character::real({1.0, 2.0});
  BasisChange change2(3);
  change2[0] = {{0, 1, GroupElementKey{1, 0}}};
  change2[1] = {{1, 1, GroupElementKey{0, 1}}, {0, -1, GroupElementKey{2, -1}}};
  change2[2] = {{0, 1, GroupElementKey{0, 0}}};
  note("base-change T2", verify_base_change(t2, phi2, change2, ts));

  const GroupRingMatrix h = poly_matrix(1, {{"z^2-3"}});
  note("sum", verify_sum(circle, circle, {h}, phi, ts));
  note("product", verify_product(circle, {1, 1}, {Eigen::MatrixXd::Constant(1, 1, 3.0)}, phi, ts));
  note("product T2", verify_product(t2, {1}, {}, phi2, ts));
  return {ok, os.str()};
}

// 10. Semicontinuity harness
Outcome semicontinuity() {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_complex = [&](int r, int c) {
    Eigen::MatrixXcd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int k = 0; k < c; ++k) m(i, k) = Complex(g(rng), g(rng));
    return m;
  };
  int violations = 0, families = 0;
  double worst_dim = -1.0, worst_det = -1.0;
  auto check = [&](const std::vector<Eigen::MatrixXcd>& fam, const Eigen::MatrixXcd& limit, std::size_t order) {
    const auto rep = semicontinuity_check(fam, limit, order);
    ++families;
    if (!rep.ok) ++violations;
    worst_dim = std::max(worst_dim, rep.limsup_dim - rep.limit_dim);
    worst_det = std::max(worst_det, rep.limsup_det - rep.limit_det);
  };
  for (int f = 0; f < 16; ++f) {
    const int n = 2 + f % 4;
    const int rank = f % 2 == 0 ? n : std::max(0, n - 1 - f % 3);
    const Eigen::MatrixXcd limit = random_complex(n, rank) * random_complex(rank, n);
    const Eigen::MatrixXcd e = random_complex(n, n);
    std::vector<Eigen::MatrixXcd> fam;
    for (int j = 1; j <= 20; ++j) fam.push_back(limit + std::ldexp(1.0, -j) * e);
    check(fam, limit, 1);
  }
  // group-ring families in the regular representation of Z/N
  for (int f = 0; f < 4; ++f) {
    const std::int64_t n = 4 << f;
    const auto q = FiniteQuotient::abelian({n});
    const auto limit = regular_rep_matrix(poly_matrix(1, {{f % 2 ? "z-1" : "z^2-1"}}), q).dense();
    const auto e = regular_rep_matrix(poly_matrix(1, {{"z+2"}}), q).dense();
    std::vector<Eigen::MatrixXcd> fam;
    for (int j = 1; j <= 20; ++j) fam.push_back(limit + std::ldexp(1.0, -j) * e);
    check(fam, limit, static_cast<std::size_t>(n));
  }
  std::ostringstream os;
  os << families << " families, " << violations << " violations; max limsup-limit dim " << worst_dim << ", det "
     << worst_det;
  return {violations == 0 && families == 20, os.str()};
}

// 11. Unitary invariance
Outcome unitary_invariance() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> size(1, 3);
  double worst = 0.0;
  int count = 0;
  while (count < 20) {
    const std::size_t r = size(rng);
    const auto a = random_matrix(rng, 1, r, r);
    const auto base = det_matrix_over_Zd(a);
    if (!std::isfinite(base.logdet.value)) continue;
    const auto v = BasedRepresentation::scalar({std::polar(1.0, angle(rng))});
    const auto tw = det_matrix_over_Zd(twist_rep(a, Character::identity(1), v));
    worst = std::max(worst, std::abs(tw.logdet.value - base.logdet.value));
    ++count;
  }
  return {worst <= 1e-9, fmt("20 characters, max |change| = %.3g", worst)};
}

}  // namespace

int main() {
  criterion(1, "circle curve", 1.0, circle_curve);
  criterion(2, "torus vanishing", 1.0, torus_vanishing);
  criterion(3, "mapping-torus plateaus", 1.0, mapping_torus_plateaus);
  criterion(4, "quotient convergence", 10.0, quotient_convergence);
  criterion(5, "bound certificates", 60.0, bound_certificates);
  criterion(6, "twisted Betti", 30.0, twisted_betti);
  criterion(7, "Mahler oracle agreement", 120.0, mahler_agreement);
  criterion(8, "envelope", 1.0, envelope);
  criterion(9, "property verifiers", 5.0, verifiers);
  criterion(10, "semicontinuity harness", 10.0, semicontinuity);
  criterion(11, "unitary invariance", 5.0, unitary_invariance);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
