#include "l2twist/torsion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "l2twist/dense.hpp"
#include "l2twist/parallel.hpp"

namespace l2twist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GroupRingMatrix zero_matrix(const Group& g, std::size_t r, std::size_t s) { return GroupRingMatrix(g, r, s); }

bool is_integer(double x) { return std::isfinite(x) && x == std::nearbyint(x); }

// Variable with the largest exponent span over all boundaries, shared by every
// degree so fibered evaluations use identical node sets.
int shared_exact_variable(const BasedChainComplex& c) {
  const int d = c.group().generator_count();
  std::vector<std::int64_t> lo(d, 0), hi(d, 0);
  for (const auto& b : c.boundaries()) {
    for (const auto& key : support(b)) {
      for (int l = 0; l < d; ++l) {
        lo[l] = std::min(lo[l], key[l]);
        hi[l] = std::max(hi[l], key[l]);
      }
    }
  }
  int best = 0;
  for (int l = 1; l < d; ++l) {
    if (hi[l] - lo[l] > hi[best] - lo[best]) best = l;
  }
  return best;
}

struct LogDet {
  double value = 0.0;
  bool ok = true;
  LogDetMethod method = LogDetMethod::ExactUnivariate;
  double error = 0.0;
  std::string diagnostic;
};

LogDet log_det_abelian(const GroupRingMatrix& lap, int exact_var, const TorsionOptions& options) {
  LogDet out;
  const int d = lap.group().generator_count();
  if (lap.rows() == 0) return out;
  if (d == 0) {
    const Eigen::MatrixXcd m = evaluate(lap, {});
    const auto sv = singular_values(m);
    const double cut = 1e-12 * sv(0) * static_cast<double>(m.rows());
    if (sv(0) == 0.0 || sv(sv.size() - 1) <= cut) {
      out.ok = false;
      out.diagnostic = "Laplacian is singular";
      return out;
    }
    out.value = std::log(std::abs(m.partialPivLu().determinant()));
    out.method = LogDetMethod::MatrixReduction;
    return out;
  }
  const LaurentPoly det = determinant(to_poly_matrix(lap), d);
  if (det.is_zero()) {
    out.ok = false;
    out.method = LogDetMethod::MatrixReduction;
    out.diagnostic = "Laplacian determinant vanishes identically";
    return out;
  }
  LogDetResult r;
  if (d == 1) {
    r = mahler_exact_univariate(det);
  } else if (options.route == MultivariateRoute::Fibered) {
    r = mahler_fibered(det, options.fibered_nodes, exact_var);
  } else {
    r = mahler(det, options.lawton);
  }
  out.value = r.value;
  out.method = r.method;
  out.error = r.error_estimate.value_or(0.0);
  return out;
}

LogDet log_det_tower(const GroupRingMatrix& lap, const QuotientTower& tower, const TorsionOptions& options) {
  LogDet out;
  out.method = LogDetMethod::MatrixReduction;
  if (lap.rows() == 0) return out;
  const auto approx = approx_sequence(lap, tower, {}, options.approx);
  const auto& lv = approx.levels;
  const std::size_t n = lv.size();
  const double last = lv.back().vn_dim_ker;
  bool acyclic = last <= 1e-6;
  if (!acyclic && n >= 3) {
    acyclic = last <= 1e-2 && lv[n - 1].vn_dim_ker < lv[n - 2].vn_dim_ker &&
              lv[n - 2].vn_dim_ker < lv[n - 3].vn_dim_ker;
  }
  if (!acyclic) {
    out.ok = false;
    out.diagnostic = "kernel dimension does not tend to zero along the tower";
    return out;
  }
  out.value = approx.limsup_estimate;
  if (n >= 2) out.error = std::abs(lv[n - 1].reg_logdet - lv[n - 2].reg_logdet);
  return out;
}

std::vector<double> evaluate_curve(const BasedChainComplex& c, const Character& phi, const std::vector<double>& ts,
                                   const TorsionOptions& options, std::vector<bool>* ok = nullptr) {
  std::vector<double> rho(ts.size());
  std::vector<char> flags(ts.size(), 1);
  parallel_for(ts.size(), options.threads, [&](std::size_t i) {
    const auto v = torsion_at(c, phi, ts[i], options);
    rho[i] = v.value;
    flags[i] = v.det_class;
  });
  if (ok) ok->assign(flags.begin(), flags.end());
  return rho;
}

// Least-squares fit of y against a ln t + b; returns the max residual.
double linear_fit(const std::vector<double>& ts, const std::vector<double>& y, double& slope, double& intercept,
                  std::vector<double>& residuals) {
  const std::size_t n = ts.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(ts[i]);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (n >= 2 && std::abs(denom) > 1e-300) {
    slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    intercept = (sy - slope * sx) / static_cast<double>(n);
  } else {
    slope = 0.0;
    intercept = n ? sy / static_cast<double>(n) : 0.0;
  }
  residuals.resize(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    residuals[i] = y[i] - (slope * std::log(ts[i]) + intercept);
    worst = std::max(worst, std::abs(residuals[i]));
  }
  return worst;
}

VerifyReport pointwise(const std::vector<double>& ts, const std::vector<double>& diff, const std::string& detail) {
  VerifyReport rep;
  rep.t = ts;
  rep.residuals = diff;
  for (double x : diff) rep.max_residual = std::max(rep.max_residual, std::isfinite(x) ? std::abs(x) : kInf);
  rep.ok = rep.max_residual <= kVerifyTolerance;
  rep.detail = detail;
  return rep;
}

void require_all_ok(const std::vector<bool>& ok, const char* what) {
  if (std::find(ok.begin(), ok.end(), false) != ok.end()) {
    throw InvalidInput(std::string(what) + ": complex is not of determinant class on the grid");
  }
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Row-style Hermite normal form: upper triangular with positive diagonal,
// generating the same lattice as the rows of b.
std::vector<std::vector<std::int64_t>> hermite_form(std::vector<std::vector<std::int64_t>> b) {
  const std::size_t d = b.size();
  for (std::size_t col = 0; col < d; ++col) {
    for (;;) {
      std::size_t pivot = d;
      for (std::size_t r = col; r < d; ++r) {
        if (b[r][col] != 0 && (pivot == d || std::abs(b[r][col]) < std::abs(b[pivot][col]))) pivot = r;
      }
      if (pivot == d) throw InvalidInput("sublattice basis is not of full rank");
      std::swap(b[col], b[pivot]);
      bool clean = true;
      for (std::size_t r = col + 1; r < d; ++r) {
        const auto q = b[r][col] / b[col][col];
        if (q != 0) {
          for (std::size_t k = 0; k < d; ++k) b[r][k] -= q * b[col][k];
        }
        if (b[r][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (b[col][col] < 0) {
      for (auto& x : b[col]) x = -x;
    }
  }
  return b;
}

}  // namespace

BasedChainComplex::BasedChainComplex(Group group, std::vector<std::size_t> ranks,
                                     std::vector<GroupRingMatrix> boundaries)
    : group_(std::move(group)), ranks_(std::move(ranks)), boundaries_(std::move(boundaries)) {
  const std::size_t expected = ranks_.empty() ? 0 : ranks_.size() - 1;
  if (boundaries_.size() != expected) {
    throw DimensionMismatch("complex with " + std::to_string(ranks_.size()) + " ranks needs " +
                            std::to_string(expected) + " boundary matrices, got " +
                            std::to_string(boundaries_.size()));
  }
  for (std::size_t n = 1; n <= expected; ++n) {
    const auto& b = boundaries_[n - 1];
    if (b.rows() != ranks_[n] || b.cols() != ranks_[n - 1]) {
      throw DimensionMismatch("c_" + std::to_string(n) + " must be " + std::to_string(ranks_[n]) + "x" +
                              std::to_string(ranks_[n - 1]));
    }
    if (!(b.group() == group_)) throw InvalidInput("c_" + std::to_string(n) + " lives over a different group");
  }
}

std::size_t BasedChainComplex::rank(std::ptrdiff_t n) const {
  if (n < 0 || static_cast<std::size_t>(n) >= ranks_.size()) return 0;
  return ranks_[static_cast<std::size_t>(n)];
}

GroupRingMatrix BasedChainComplex::boundary(std::ptrdiff_t n) const {
  if (n >= 1 && static_cast<std::size_t>(n) <= boundaries_.size()) return boundaries_[static_cast<std::size_t>(n - 1)];
  return zero_matrix(group_, rank(n), rank(n - 1));
}

long BasedChainComplex::euler_characteristic() const {
  long chi = 0;
  for (std::size_t n = 0; n < ranks_.size(); ++n) chi += (n % 2 == 0 ? 1 : -1) * static_cast<long>(ranks_[n]);
  return chi;
}

ComplexCheck validate_complex(const BasedChainComplex& c) {
  ComplexCheck out;
  for (std::size_t n = 2; n <= c.top(); ++n) {
    const auto prod = mat_mul(c.boundary(static_cast<std::ptrdiff_t>(n)), c.boundary(static_cast<std::ptrdiff_t>(n - 1)));
    for (std::size_t i = 0; i < prod.rows(); ++i) {
      for (std::size_t j = 0; j < prod.cols(); ++j) {
        if (prod.at(i, j).is_zero()) continue;
        if (!c.group().is_abelian() && c.tower) {
          // words may vanish only modulo relators; test every quotient
          bool vanishes = true;
          for (const auto& q : c.tower->levels()) {
            GroupRingMatrix entry(c.group(), 1, 1);
            entry.at(0, 0) = prod.at(i, j);
            const auto m = regular_rep_matrix(entry, q).dense();
            if (m.cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, prod.at(i, j).l1_norm())) vanishes = false;
          }
          if (vanishes) continue;
        }
        out.ok = false;
        out.degree = n;
        out.row = i;
        out.col = j;
        std::ostringstream os;
        os << "c_" << n << " * c_" << n - 1 << " has nonzero entry (" << i << ", " << j
           << "): " << to_string(prod.at(i, j));
        out.message = os.str();
        return out;
      }
    }
  }
  return out;
}

GroupRingMatrix laplacian(const BasedChainComplex& c, std::size_t n, const Twist& twist) {
  if (n > c.top()) throw InvalidInput("laplacian: degree " + std::to_string(n) + " out of range");
  const auto up = apply_twist(c.boundary(static_cast<std::ptrdiff_t>(n + 1)), twist);
  const auto down = apply_twist(c.boundary(static_cast<std::ptrdiff_t>(n)), twist);
  // right multiplication: x -> x c^* c for the upper term
  return mat_add(mat_mul(adjoint(up), up), mat_mul(down, adjoint(down)));
}

TorsionValue torsion_at(const BasedChainComplex& c, const Twist& twist, const TorsionOptions& options) {
  if (const auto* s = std::get_if<ScalarTwist>(&twist)) {
    TwistParameter check(s->t);
    (void)check;
    const auto cc = check_character(s->phi, c.group());
    if (!cc.ok) throw InvalidInput("character does not vanish on relator " + std::to_string(*cc.relator + 1));
  }
  const bool use_tower = c.tower && (!c.group().is_abelian() || options.prefer_tower);
  if (!c.group().is_abelian() && !c.tower) {
    throw InvalidInput("torsion over a presented group needs a quotient tower");
  }
  const int exact_var = c.group().is_abelian() && c.group().generator_count() >= 2 ? shared_exact_variable(c) : -1;
  TorsionValue out;
  double sum = 0.0;
  for (std::size_t n = 1; n <= c.top(); ++n) {
    if (c.rank(static_cast<std::ptrdiff_t>(n)) == 0) continue;
    const auto lap = laplacian(c, n, twist);
    const LogDet ld = use_tower ? log_det_tower(lap, *c.tower, options) : log_det_abelian(lap, exact_var, options);
    out.method = ld.method;
    if (!ld.ok) {
      out.det_class = false;
      out.value = std::numeric_limits<double>::quiet_NaN();
      out.diagnostic = "degree " + std::to_string(n) + ": " + ld.diagnostic;
      return out;
    }
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    sum += sign * static_cast<double>(n) * ld.value;
    out.error_estimate += static_cast<double>(n) * ld.error;
  }
  // degree 0 enters with weight 0, but acyclicity still requires Delta_0 to be
  // a weak isomorphism
  if (c.rank(0) > 0) {
    const auto lap = laplacian(c, 0, twist);
    const LogDet ld = use_tower ? log_det_tower(lap, *c.tower, options) : log_det_abelian(lap, exact_var, options);
    if (!ld.ok) {
      out.det_class = false;
      out.value = std::numeric_limits<double>::quiet_NaN();
      out.diagnostic = "degree 0: " + ld.diagnostic;
      return out;
    }
  }
  out.value = -0.5 * sum;
  out.error_estimate *= 0.5;
  return out;
}

TorsionValue torsion_at(const BasedChainComplex& c, const Character& phi, double t, const TorsionOptions& options) {
  if (phi.target() != CharacterTarget::Real) throw InvalidInput("torsion_at: phi must be real-valued");
  return torsion_at(c, Twist{ScalarTwist{phi, TwistParameter(t).value()}}, options);
}

std::vector<double> geometric_grid(double t_min, double t_max, std::size_t points) {
  if (!(t_min > 0.0) || !(t_max > t_min)) throw InvalidInput("grid needs 0 < t_min < t_max");
  if (points < 2) throw InvalidInput("grid needs at least two points");
  std::vector<double> ts(points);
  const double ratio = t_max / t_min;
  for (std::size_t k = 0; k < points; ++k) {
    ts[k] = t_min * std::pow(ratio, static_cast<double>(k) / static_cast<double>(points - 1));
  }
  ts.front() = t_min;
  ts.back() = t_max;
  return ts;
}

TorsionCurve torsion_curve(const BasedChainComplex& c, const Character& phi, const std::vector<double>& ts,
                           const TorsionOptions& options) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0)) throw InvalidInput("curve grid must be positive");
    if (i > 0 && !(ts[i] > ts[i - 1])) throw InvalidInput("curve grid must be strictly increasing");
  }
  TorsionCurve curve;
  curve.t = ts;
  curve.rho.resize(ts.size());
  curve.methods.resize(ts.size());
  std::vector<char> ok(ts.size(), 1);
  parallel_for(ts.size(), options.threads, [&](std::size_t i) {
    const auto v = torsion_at(c, phi, ts[i], options);
    curve.rho[i] = v.value;
    curve.methods[i] = v.method;
    ok[i] = v.det_class;
  });
  curve.ok.assign(ok.begin(), ok.end());
  return curve;
}

TorsionCurve torsion_curve(const BasedChainComplex& c, const Character& phi, double t_min, double t_max,
                           std::size_t points, const TorsionOptions& options) {
  return torsion_curve(c, phi, geometric_grid(t_min, t_max, points), options);
}

DegreeResult degree(const TorsionCurve& curve) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    if (i < curve.ok.size() && !curve.ok[i]) continue;
    x.push_back(std::log(curve.t[i]));
    y.push_back(curve.rho[i]);
  }
  DegreeResult out;
  out.enough_points = x.size() >= 4;
  if (x.size() < 2) return out;
  std::vector<double> slopes;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) slopes.push_back((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
  const std::size_t w = std::min<std::size_t>(3, slopes.size());
  out.slopes0.assign(slopes.begin(), slopes.begin() + static_cast<std::ptrdiff_t>(w));
  out.slopes_inf.assign(slopes.end() - static_cast<std::ptrdiff_t>(w), slopes.end());
  auto [lo0, hi0] = std::minmax_element(out.slopes0.begin(), out.slopes0.end());
  auto [loi, hii] = std::minmax_element(out.slopes_inf.begin(), out.slopes_inf.end());
  out.deg0 = *lo0;
  out.deg_inf = *hii;
  out.stable0 = *hi0 - *lo0 < 1e-6 * (1.0 + std::abs(out.deg0));
  out.stable_inf = *hii - *loi < 1e-6 * (1.0 + std::abs(out.deg_inf));
  out.deg = out.deg_inf - out.deg0;
  return out;
}

BoundEnvelope bound_envelope(const BasedChainComplex& c, const Character& phi) {
  if (phi.target() != CharacterTarget::Real) throw InvalidInput("bound_envelope: phi must be real-valued");
  const Group& g = c.group();
  if (phi.generator_count() != static_cast<std::size_t>(g.generator_count())) {
    throw DimensionMismatch("bound_envelope: character has the wrong number of values");
  }
  // phi = i o phi' with phi' integral; phi'(key) as exponent data and the
  // total weight sum_l |i(e_l)|
  std::function<std::vector<std::int64_t>(const GroupElementKey&)> phi_prime;
  double weight = 0.0;
  if (g.is_abelian()) {
    phi_prime = [](const GroupElementKey& k) { return k.data; };
    for (const auto& v : phi.values()) weight += std::abs(v[0]);
  } else {
    // common rational unit u with phi = u * (integer values)
    std::vector<std::int64_t> num, den;
    for (const auto& v : phi.values()) {
      const double x = v[0];
      std::int64_t q = 1;
      while (q <= 1000000 && std::abs(x * static_cast<double>(q) - std::nearbyint(x * static_cast<double>(q))) >
                                 1e-12 * std::max(1.0, std::abs(x * static_cast<double>(q)))) {
        ++q;
      }
      if (q > 1000000) throw InvalidInput("bound_envelope: character values are not rational");
      num.push_back(static_cast<std::int64_t>(std::nearbyint(x * static_cast<double>(q))));
      den.push_back(q);
    }
    std::int64_t l = 1, gn = 0;
    for (auto q : den) l = std::lcm(l, q);
    std::vector<std::int64_t> ints;
    for (std::size_t i = 0; i < num.size(); ++i) {
      ints.push_back(num[i] * (l / den[i]));
      gn = std::gcd(gn, ints.back());
    }
    if (gn == 0) gn = 1;
    for (auto& v : ints) v /= gn;
    weight = static_cast<double>(gn) / static_cast<double>(l);
    phi_prime = [ints, &g](const GroupElementKey& k) {
      const auto e = g.exponent_sums(k);
      std::int64_t s = 0;
      for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * ints[i];
      return std::vector<std::int64_t>{s};
    };
  }
  BoundEnvelope env;
  for (std::size_t n = 1; n <= c.top(); ++n) {
    const auto& b = c.boundary(static_cast<std::ptrdiff_t>(n));
    if (b.is_zero()) continue;
    std::int64_t big_m = 1;
    for (const auto& key : support(b)) {
      for (auto x : phi_prime(key)) big_m = std::max<std::int64_t>(big_m, std::abs(x));
    }
    double rank = 0.0;
    if (g.is_abelian()) {
      rank = static_cast<double>(rank_fraction_field(b));
    } else {
      if (!c.tower) throw InvalidInput("bound_envelope over a presented group needs a quotient tower");
      rank = static_cast<double>(b.rows()) - approx_sequence(b, *c.tower).dims_limit_estimate;
    }
    env.c += rank * static_cast<double>(3 * big_m + 1) * weight;
    env.d += std::max(0.0, std::log(one_norm(b)));
  }
  return env;
}

MappingTorus mapping_torus_complex(const IntegerChainMap& f) {
  const std::size_t top = f.ranks.empty() ? 0 : f.ranks.size() - 1;
  if (f.ranks.empty()) throw InvalidInput("mapping torus: empty base complex");
  if (f.boundaries.size() != top || f.maps.size() != f.ranks.size()) {
    throw DimensionMismatch("mapping torus: need N boundaries and N + 1 maps for ranks r_0..r_N");
  }
  auto rk = [&](std::ptrdiff_t n) -> std::size_t {
    return n < 0 || static_cast<std::size_t>(n) > top ? 0 : f.ranks[static_cast<std::size_t>(n)];
  };
  for (std::size_t n = 0; n <= top; ++n) {
    const auto& m = f.maps[n];
    if (static_cast<std::size_t>(m.rows()) != f.ranks[n] || static_cast<std::size_t>(m.cols()) != f.ranks[n]) {
      throw DimensionMismatch("F_" + std::to_string(n) + " must be square of size r_" + std::to_string(n));
    }
    if (!m.unaryExpr([](double x) { return is_integer(x) ? 0.0 : 1.0; }).isZero()) {
      throw InvalidInput("F_" + std::to_string(n) + " must be integral");
    }
  }
  for (std::size_t n = 1; n <= top; ++n) {
    const auto& d = f.boundaries[n - 1];
    if (static_cast<std::size_t>(d.rows()) != f.ranks[n] || static_cast<std::size_t>(d.cols()) != f.ranks[n - 1]) {
      throw DimensionMismatch("d_" + std::to_string(n) + " has the wrong shape");
    }
    if (!d.unaryExpr([](double x) { return is_integer(x) ? 0.0 : 1.0; }).isZero()) {
      throw InvalidInput("d_" + std::to_string(n) + " must be integral");
    }
    if (n >= 2 && !(d * f.boundaries[n - 2]).isZero()) throw InvalidInput("base boundaries do not compose to zero");
    if (!(f.maps[n] * d - d * f.maps[n - 1]).isZero()) {
      throw InvalidInput("F is not a chain map in degree " + std::to_string(n));
    }
  }
  // chain homotopy equivalence: the cone of F is rationally acyclic
  {
    std::vector<Eigen::MatrixXd> cone;
    for (std::size_t n = 1; n <= top + 1; ++n) {
      const auto rn = rk(static_cast<std::ptrdiff_t>(n)), rn1 = rk(static_cast<std::ptrdiff_t>(n) - 1),
                 rn2 = rk(static_cast<std::ptrdiff_t>(n) - 2);
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rn + rn1, rn1 + rn2);
      if (n <= top) m.topLeftCorner(rn, rn1) = f.boundaries[n - 1];
      m.bottomLeftCorner(rn1, rn1) = f.maps[n - 1];
      if (n >= 2) m.bottomRightCorner(rn1, rn2) = -f.boundaries[n - 2];
      cone.push_back(std::move(m));
    }
    auto rank_of = [](const Eigen::MatrixXd& m) -> std::size_t {
      return m.size() == 0 ? 0 : numerical_rank(m.cast<Complex>());
    };
    for (std::size_t n = 0; n <= top + 1; ++n) {
      const std::size_t dim = rk(static_cast<std::ptrdiff_t>(n)) + rk(static_cast<std::ptrdiff_t>(n) - 1);
      const std::size_t out_rank = n >= 1 ? rank_of(cone[n - 1]) : 0;
      const std::size_t in_rank = n + 1 <= top + 1 ? rank_of(cone[n]) : 0;
      if (dim != out_rank + in_rank) throw InvalidInput("F is not a rational homology equivalence");
    }
  }

  const Group z = Group::abelian(1);
  std::vector<std::size_t> ranks;
  for (std::size_t n = 0; n <= top + 1; ++n) {
    ranks.push_back(rk(static_cast<std::ptrdiff_t>(n)) + rk(static_cast<std::ptrdiff_t>(n) - 1));
  }
  std::vector<GroupRingMatrix> bds;
  for (std::size_t n = 1; n <= top + 1; ++n) {
    const auto rn = rk(static_cast<std::ptrdiff_t>(n)), rn1 = rk(static_cast<std::ptrdiff_t>(n) - 1),
               rn2 = rk(static_cast<std::ptrdiff_t>(n) - 2);
    GroupRingMatrix m(z, rn + rn1, rn1 + rn2);
    if (n <= top) {
      for (std::size_t i = 0; i < rn; ++i) {
        for (std::size_t j = 0; j < rn1; ++j) m.at(i, j).add_term({0}, f.boundaries[n - 1](i, j));
      }
    }
    for (std::size_t i = 0; i < rn1; ++i) {
      for (std::size_t j = 0; j < rn1; ++j) {
        if (i == j) m.at(rn + i, j).add_term({0}, 1.0);
        m.at(rn + i, j).add_term({1}, -f.maps[n - 1](i, j));
      }
      if (n >= 2) {
        for (std::size_t j = 0; j < rn2; ++j) m.at(rn + i, rn1 + j).add_term({0}, -f.boundaries[n - 2](i, j));
      }
    }
    bds.push_back(std::move(m));
  }
  MappingTorus out{BasedChainComplex(z, ranks, std::move(bds)), 0.0, 0.0, 0};
  bool invertible = true;
  for (std::size_t n = 0; n <= top; ++n) {
    if (f.ranks[n] == 0) continue;
    out.t0 = std::max(out.t0, spectral_radius(f.maps[n]));
    if (std::abs(f.maps[n].determinant()) < 0.5) {
      invertible = false;
    } else {
      out.t_inf = std::max(out.t_inf, spectral_radius(f.maps[n].inverse()));
    }
    out.chi += (n % 2 == 0 ? 1 : -1) * static_cast<long>(f.ranks[n]);
  }
  if (!invertible) out.t_inf = kInf;
  return out;
}

double mapping_torus_predicted(const IntegerChainMap& f, double t) {
  double s = 0.0;
  for (std::size_t n = 0; n < f.maps.size(); ++n) {
    if (f.maps[n].size() == 0) continue;
    Eigen::EigenSolver<Eigen::MatrixXd> es(f.maps[n], false);
    double part = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      part += std::max(0.0, std::log(t * std::abs(es.eigenvalues()(i))));
    }
    s += (n % 2 == 0 ? 1.0 : -1.0) * part;
  }
  return s;
}

BasedChainComplex circle_complex() { return torus_complex(1); }

BasedChainComplex torus_complex(int d) {
  if (d < 0) throw InvalidInput("torus dimension must be nonnegative");
  const Group g = Group::abelian(d);
  // subsets of {0..d-1} grouped by size, each in lexicographic order
  std::vector<std::vector<std::uint32_t>> cells(d + 1);
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) cells[std::popcount(mask)].push_back(mask);
  auto lex = [d](std::uint32_t a, std::uint32_t b) {
    for (int i = 0; i < d; ++i) {
      const bool ia = a & (1u << i), ib = b & (1u << i);
      if (ia != ib) return ia;
    }
    return false;
  };
  for (auto& v : cells) std::sort(v.begin(), v.end(), lex);
  std::vector<std::size_t> ranks;
  for (const auto& v : cells) ranks.push_back(v.size());
  std::vector<GroupRingMatrix> bds;
  for (int k = 1; k <= d; ++k) {
    GroupRingMatrix m(g, cells[k].size(), cells[k - 1].size());
    for (std::size_t row = 0; row < cells[k].size(); ++row) {
      const auto s = cells[k][row];
      int pos = 0;
      for (int i = 0; i < d; ++i) {
        if (!(s & (1u << i))) continue;
        const auto face = s & ~(1u << i);
        const auto col = static_cast<std::size_t>(
            std::find(cells[k - 1].begin(), cells[k - 1].end(), face) - cells[k - 1].begin());
        const double sign = pos % 2 == 0 ? 1.0 : -1.0;
        std::vector<std::int64_t> e(d, 0);
        e[i] = 1;
        m.at(row, col).add_term(GroupElementKey(e), sign);
        m.at(row, col).add_term(g.identity(), -sign);
        ++pos;
      }
    }
    bds.push_back(std::move(m));
  }
  return BasedChainComplex(g, ranks, std::move(bds));
}

double s1_predicted(double chi_orb_times_k, double t) {
  if (!(t > 0.0)) throw InvalidInput("t must be positive");
  return t >= 1.0 ? chi_orb_times_k * std::log(t) : 0.0;
}

namespace {

void check_change(const BasedChainComplex& c, const BasisChange& change) {
  if (change.size() != c.ranks().size()) {
    throw InvalidInput("basis change must list every degree 0.." + std::to_string(c.top()));
  }
  for (std::size_t n = 0; n < change.size(); ++n) {
    if (change[n].size() != c.ranks()[n]) {
      throw InvalidInput("basis change in degree " + std::to_string(n) + " has the wrong length");
    }
    std::vector<char> used(change[n].size(), 0);
    for (const auto& e : change[n]) {
      if (e.source >= used.size() || used[e.source]) {
        throw InvalidInput("basis change in degree " + std::to_string(n) + " is not a permutation");
      }
      used[e.source] = 1;
      if (e.sign != 1 && e.sign != -1) throw InvalidInput("basis change signs must be +1 or -1");
      c.group().validate(e.g);
    }
  }
}

GroupRingElement left_right(const Group& g, const GroupElementKey& left, const GroupRingElement& x,
                             const GroupElementKey& right) {
  GroupRingElement out;
  for (const auto& [k, v] : x.terms()) out.add_term(g.multiply(g.multiply(left, k), right), v);
  return out;
}

}  // namespace

std::vector<std::int64_t> trans_class(const BasedChainComplex& c, const BasisChange& change) {
  check_change(c, change);
  std::vector<std::int64_t> out(static_cast<std::size_t>(c.group().generator_count()), 0);
  for (std::size_t n = 0; n < change.size(); ++n) {
    const std::int64_t sign = n % 2 == 0 ? 1 : -1;
    for (const auto& e : change[n]) {
      const auto ex = c.group().exponent_sums(e.g);
      for (std::size_t l = 0; l < out.size(); ++l) out[l] += sign * ex[l];
    }
  }
  return out;
}

BasedChainComplex rebase(const BasedChainComplex& c, const BasisChange& change) {
  check_change(c, change);
  const Group& g = c.group();
  std::vector<GroupRingMatrix> bds;
  for (std::size_t n = 1; n <= c.top(); ++n) {
    const auto& old = c.boundary(static_cast<std::ptrdiff_t>(n));
    GroupRingMatrix m(g, old.rows(), old.cols());
    for (std::size_t k = 0; k < old.rows(); ++k) {
      const auto& ek = change[n][k];
      for (std::size_t l = 0; l < old.cols(); ++l) {
        const auto& el = change[n - 1][l];
        const double sign = static_cast<double>(ek.sign * el.sign);
        m.at(k, l) = Complex(sign) * left_right(g, ek.g, old.at(ek.source, el.source), g.inverse(el.g));
      }
    }
    bds.push_back(std::move(m));
  }
  BasedChainComplex out(g, c.ranks(), std::move(bds));
  out.tower = c.tower;
  return out;
}

VerifyReport verify_base_change(const BasedChainComplex& c, const Character& phi, const BasisChange& change,
                                const std::vector<double>& ts, const TorsionOptions& options) {
  const auto trans = trans_class(c, change);
  double phi_trans = 0.0;
  for (std::size_t l = 0; l < trans.size(); ++l) phi_trans += phi.values()[l][0] * static_cast<double>(trans[l]);
  std::vector<bool> ok1, ok2;
  const auto before = evaluate_curve(c, phi, ts, options, &ok1);
  const auto after = evaluate_curve(rebase(c, change), phi, ts, options, &ok2);
  require_all_ok(ok1, "verify_base_change");
  require_all_ok(ok2, "verify_base_change");
  std::vector<double> diff(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) diff[i] = after[i] - before[i] + phi_trans * std::log(ts[i]);
  auto rep = pointwise(ts, diff, "rho' - rho = -phi(trans) ln t");
  rep.slope = -phi_trans;
  return rep;
}

VerifyReport verify_scaling(const BasedChainComplex& c, const Character& phi, double r, const std::vector<double>& ts,
                            const TorsionOptions& options) {
  if (r == 0.0 || !std::isfinite(r)) throw InvalidInput("scaling factor must be nonzero");
  std::vector<double> powered(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) powered[i] = std::pow(ts[i], r);
  std::vector<double> diff(ts.size());
  parallel_for(ts.size(), options.threads, [&](std::size_t i) {
    const auto a = torsion_at(c, phi.scaled(r), ts[i], options);
    const auto b = torsion_at(c, phi, powered[i], options);
    diff[i] = a.det_class && b.det_class ? a.value - b.value : kInf;
  });
  return pointwise(ts, diff, "rho(r phi)(t) - rho(phi)(t^r)");
}

BasedChainComplex dual_complex(const BasedChainComplex& c) {
  const std::size_t top = c.top();
  std::vector<std::size_t> ranks(c.ranks().rbegin(), c.ranks().rend());
  std::vector<GroupRingMatrix> bds;
  for (std::size_t k = 1; k <= top; ++k) bds.push_back(adjoint(c.boundary(static_cast<std::ptrdiff_t>(top - k + 1))));
  BasedChainComplex out(c.group(), std::move(ranks), std::move(bds));
  out.tower = c.tower;
  return out;
}

VerifyReport verify_duality(const BasedChainComplex& c, int n, const Character& phi, const std::vector<double>& ts,
                            const std::optional<BasedChainComplex>& dual, const TorsionOptions& options) {
  std::vector<double> inv(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) inv[i] = 1.0 / ts[i];
  std::vector<bool> ok1, ok2, ok3;
  const auto rho = evaluate_curve(c, phi, ts, options, &ok1);
  const auto rho_inv = evaluate_curve(c, phi, inv, options, &ok2);
  const auto rho_dual = evaluate_curve(dual ? *dual : dual_complex(c), phi, ts, options, &ok3);
  require_all_ok(ok1, "verify_duality");
  require_all_ok(ok2, "verify_duality");
  require_all_ok(ok3, "verify_duality");
  const double sign = (n + 1) % 2 == 0 ? 1.0 : -1.0;
  std::vector<double> sym(ts.size()), cross(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sym[i] = rho[i] - sign * rho_inv[i];
    cross[i] = rho[i] - rho_dual[i];
  }
  VerifyReport rep;
  rep.t = ts;
  std::vector<double> cross_res;
  double cs, ci;
  const double r1 = linear_fit(ts, sym, rep.slope, rep.intercept, rep.residuals);
  const double r2 = linear_fit(ts, cross, cs, ci, cross_res);
  rep.max_residual = std::max(r1, r2);
  rep.ok = rep.max_residual <= kVerifyTolerance;
  std::ostringstream os;
  os.precision(17);
  os << "rho(t) - (-1)^(n+1) rho(1/t) = " << rep.slope << " ln t + " << rep.intercept
     << " (fit residual " << r1 << "); rho - rho_dual fit residual " << r2;
  rep.detail = os.str();
  return rep;
}

Restriction restrict_to_sublattice(const BasedChainComplex& c, const Character& phi,
                                   const std::vector<std::vector<std::int64_t>>& basis) {
  const Group& g = c.group();
  if (!g.is_abelian()) throw InvalidInput("restriction needs a complex over Z^d");
  const auto d = static_cast<std::size_t>(g.generator_count());
  if (basis.size() != d) throw DimensionMismatch("sublattice basis must have d rows");
  for (const auto& row : basis) {
    if (row.size() != d) throw DimensionMismatch("sublattice basis must be d x d");
  }
  if (phi.target() != CharacterTarget::Real || phi.generator_count() != d) {
    throw DimensionMismatch("restriction: phi must be a real character on Z^d");
  }
  const auto hnf = hermite_form(basis);
  std::int64_t index = 1;
  for (std::size_t l = 0; l < d; ++l) index *= hnf[l][l];

  Eigen::MatrixXd bt(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < d; ++l) bt(l, k) = static_cast<double>(basis[k][l]);
  }
  const auto lu = bt.fullPivLu();
  // v -> (coset index, coordinates of v - rep in the given basis)
  auto split = [&](std::vector<std::int64_t> v) {
    const auto orig = v;
    for (std::size_t l = 0; l < d; ++l) {
      const auto q = static_cast<std::int64_t>(std::floor(static_cast<double>(v[l]) / static_cast<double>(hnf[l][l])));
      for (std::size_t k = l; k < d; ++k) v[k] -= q * hnf[l][k];
    }
    std::size_t idx = 0, stride = 1;
    for (std::size_t l = 0; l < d; ++l) {
      idx += static_cast<std::size_t>(v[l]) * stride;
      stride *= static_cast<std::size_t>(hnf[l][l]);
    }
    Eigen::VectorXd h(d);
    for (std::size_t l = 0; l < d; ++l) h(l) = static_cast<double>(orig[l] - v[l]);
    const Eigen::VectorXd y = lu.solve(h);
    std::vector<std::int64_t> coords(d);
    for (std::size_t k = 0; k < d; ++k) coords[k] = static_cast<std::int64_t>(std::llround(y(k)));
    for (std::size_t l = 0; l < d; ++l) {
      std::int64_t s = 0;
      for (std::size_t k = 0; k < d; ++k) s += coords[k] * basis[k][l];
      if (s != orig[l] - v[l]) throw InvalidInput("restriction: lattice coordinates are not integral");
    }
    return std::make_pair(idx, coords);
  };
  // coset representatives in mixed radix order
  std::vector<std::vector<std::int64_t>> reps(static_cast<std::size_t>(index), std::vector<std::int64_t>(d));
  for (std::size_t idx = 0; idx < reps.size(); ++idx) {
    std::size_t r = idx;
    for (std::size_t l = 0; l < d; ++l) {
      reps[idx][l] = static_cast<std::int64_t>(r % static_cast<std::size_t>(hnf[l][l]));
      r /= static_cast<std::size_t>(hnf[l][l]);
    }
  }
  const std::size_t m = reps.size();
  std::vector<std::size_t> ranks;
  for (auto r : c.ranks()) ranks.push_back(r * m);
  std::vector<GroupRingMatrix> bds;
  for (std::size_t n = 1; n <= c.top(); ++n) {
    const auto& b = c.boundary(static_cast<std::ptrdiff_t>(n));
    GroupRingMatrix out(g, b.rows() * m, b.cols() * m);
    for (std::size_t cidx = 0; cidx < m; ++cidx) {
      for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
          for (const auto& [key, val] : b.at(i, j).terms()) {
            std::vector<std::int64_t> v(d);
            for (std::size_t l = 0; l < d; ++l) v[l] = reps[cidx][l] + key[l];
            const auto [target, coords] = split(v);
            out.at(cidx * b.rows() + i, target * b.cols() + j).add_term(GroupElementKey(coords), val);
          }
        }
      }
    }
    bds.push_back(std::move(out));
  }
  std::vector<double> values(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < d; ++l) values[k] += static_cast<double>(basis[k][l]) * phi.values()[l][0];
  }
  return {BasedChainComplex(g, std::move(ranks), std::move(bds)), Character::real(values), index};
}

VerifyReport verify_restriction(const BasedChainComplex& c, const Character& phi,
                                const std::vector<std::vector<std::int64_t>>& basis, const std::vector<double>& ts,
                                const TorsionOptions& options) {
  const auto res = restrict_to_sublattice(c, phi, basis);
  std::vector<bool> ok1, ok2;
  const auto rho_g = evaluate_curve(c, phi, ts, options, &ok1);
  const auto rho_h = evaluate_curve(res.complex, res.phi, ts, options, &ok2);
  require_all_ok(ok1, "verify_restriction");
  require_all_ok(ok2, "verify_restriction");
  std::vector<double> diff(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) diff[i] = rho_h[i] - static_cast<double>(res.index) * rho_g[i];
  VerifyReport rep;
  rep.t = ts;
  rep.max_residual = linear_fit(ts, diff, rep.slope, rep.intercept, rep.residuals);
  rep.ok = rep.max_residual <= kVerifyTolerance;
  std::ostringstream os;
  os.precision(17);
  os << "rho_H - " << res.index << " rho_G = " << rep.slope << " ln t + " << rep.intercept;
  rep.detail = os.str();
  return rep;
}

BasedChainComplex extension(const BasedChainComplex& sub, const BasedChainComplex& quotient,
                            const std::vector<GroupRingMatrix>& h) {
  if (!(sub.group() == quotient.group())) throw InvalidInput("extension: complexes over different groups");
  const Group& g = sub.group();
  const std::size_t top = std::max(sub.top(), quotient.top());
  if (h.size() > top) throw DimensionMismatch("extension: too many connecting matrices");
  std::vector<std::size_t> ranks;
  for (std::size_t n = 0; n <= top; ++n) {
    ranks.push_back(sub.rank(static_cast<std::ptrdiff_t>(n)) + quotient.rank(static_cast<std::ptrdiff_t>(n)));
  }
  std::vector<GroupRingMatrix> bds;
  for (std::size_t n = 1; n <= top; ++n) {
    const auto np = static_cast<std::ptrdiff_t>(n);
    const auto a = sub.boundary(np), b = quotient.boundary(np);
    GroupRingMatrix m(g, ranks[n], ranks[n - 1]);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
    }
    for (std::size_t i = 0; i < b.rows(); ++i) {
      for (std::size_t j = 0; j < b.cols(); ++j) m.at(a.rows() + i, a.cols() + j) = b.at(i, j);
    }
    if (n - 1 < h.size()) {
      const auto& hn = h[n - 1];
      if (hn.rows() != b.rows() || hn.cols() != a.cols()) {
        throw DimensionMismatch("h_" + std::to_string(n) + " must be r''_n x r'_{n-1}");
      }
      for (std::size_t i = 0; i < hn.rows(); ++i) {
        for (std::size_t j = 0; j < hn.cols(); ++j) m.at(a.rows() + i, j) = hn.at(i, j);
      }
    }
    bds.push_back(std::move(m));
  }
  BasedChainComplex out(g, std::move(ranks), std::move(bds));
  const auto check = validate_complex(out);
  if (!check.ok) throw InvalidInput("extension is not a chain complex: " + check.message);
  return out;
}

VerifyReport verify_sum(const BasedChainComplex& sub, const BasedChainComplex& quotient,
                        const std::vector<GroupRingMatrix>& h, const Character& phi, const std::vector<double>& ts,
                        const TorsionOptions& options) {
  const auto total = extension(sub, quotient, h);
  std::vector<bool> ok1, ok2, ok3;
  const auto a = evaluate_curve(sub, phi, ts, options, &ok1);
  const auto b = evaluate_curve(quotient, phi, ts, options, &ok2);
  const auto c = evaluate_curve(total, phi, ts, options, &ok3);
  require_all_ok(ok1, "verify_sum");
  require_all_ok(ok2, "verify_sum");
  require_all_ok(ok3, "verify_sum");
  std::vector<double> diff(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) diff[i] = c[i] - a[i] - b[i];
  return pointwise(ts, diff, "rho(C) - rho(C') - rho(C'')");
}

BasedChainComplex tensor_with(const BasedChainComplex& c, const std::vector<std::size_t>& d_ranks,
                              const std::vector<Eigen::MatrixXd>& d_boundaries) {
  if (d_ranks.empty()) throw InvalidInput("tensor_with: empty second factor");
  const std::size_t dtop = d_ranks.size() - 1;
  if (d_boundaries.size() != dtop) throw DimensionMismatch("tensor_with: second factor needs N boundaries");
  for (std::size_t q = 1; q <= dtop; ++q) {
    const auto& m = d_boundaries[q - 1];
    if (static_cast<std::size_t>(m.rows()) != d_ranks[q] || static_cast<std::size_t>(m.cols()) != d_ranks[q - 1]) {
      throw DimensionMismatch("tensor_with: d_" + std::to_string(q) + " has the wrong shape");
    }
    if (q >= 2 && !(m * d_boundaries[q - 2]).isZero()) throw InvalidInput("tensor_with: second factor is not a complex");
  }
  const Group& g = c.group();
  const std::size_t ctop = c.top(), top = ctop + dtop;
  auto s = [&](std::ptrdiff_t q) -> std::size_t {
    return q < 0 || static_cast<std::size_t>(q) > dtop ? 0 : d_ranks[static_cast<std::size_t>(q)];
  };
  // offset of block (p, k - p) inside degree k
  auto offset = [&](std::size_t k, std::size_t p) {
    std::size_t off = 0;
    for (std::size_t pp = 0; pp < p; ++pp) off += c.rank(static_cast<std::ptrdiff_t>(pp)) * s(static_cast<std::ptrdiff_t>(k - pp));
    return off;
  };
  std::vector<std::size_t> ranks(top + 1, 0);
  for (std::size_t k = 0; k <= top; ++k) {
    for (std::size_t p = 0; p <= std::min(k, ctop); ++p) ranks[k] += c.rank(static_cast<std::ptrdiff_t>(p)) * s(static_cast<std::ptrdiff_t>(k - p));
  }
  std::vector<GroupRingMatrix> bds;
  for (std::size_t k = 1; k <= top; ++k) {
    GroupRingMatrix m(g, ranks[k], ranks[k - 1]);
    for (std::size_t p = 0; p <= std::min(k, ctop); ++p) {
      const std::size_t q = k - p;
      const std::size_t sq = s(static_cast<std::ptrdiff_t>(q));
      const std::size_t rp = c.rank(static_cast<std::ptrdiff_t>(p));
      if (rp == 0 || sq == 0) continue;
      const std::size_t row0 = offset(k, p);
      if (p >= 1) {
        const auto cp = c.boundary(static_cast<std::ptrdiff_t>(p));
        const std::size_t col0 = offset(k - 1, p - 1);
        for (std::size_t i = 0; i < rp; ++i) {
          for (std::size_t j = 0; j < cp.cols(); ++j) {
            for (std::size_t a = 0; a < sq; ++a) m.at(row0 + i * sq + a, col0 + j * sq + a) = cp.at(i, j);
          }
        }
      }
      if (q >= 1) {
        const auto& dq = d_boundaries[q - 1];
        const std::size_t sq1 = s(static_cast<std::ptrdiff_t>(q) - 1);
        const std::size_t col0 = offset(k - 1, p);
        const double sign = p % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < rp; ++i) {
          for (std::size_t a = 0; a < sq; ++a) {
            for (std::size_t b = 0; b < sq1; ++b) {
              if (dq(a, b) != 0.0) m.at(row0 + i * sq + a, col0 + i * sq1 + b).add_term(g.identity(), sign * dq(a, b));
            }
          }
        }
      }
    }
    bds.push_back(std::move(m));
  }
  BasedChainComplex out(g, std::move(ranks), std::move(bds));
  out.tower = c.tower;
  return out;
}

VerifyReport verify_product(const BasedChainComplex& c, const std::vector<std::size_t>& d_ranks,
                            const std::vector<Eigen::MatrixXd>& d_boundaries, const Character& phi,
                            const std::vector<double>& ts, const TorsionOptions& options) {
  const auto prod = tensor_with(c, d_ranks, d_boundaries);
  long chi = 0;
  for (std::size_t q = 0; q < d_ranks.size(); ++q) chi += (q % 2 == 0 ? 1 : -1) * static_cast<long>(d_ranks[q]);
  std::vector<bool> ok1, ok2;
  const auto a = evaluate_curve(c, phi, ts, options, &ok1);
  const auto b = evaluate_curve(prod, phi, ts, options, &ok2);
  require_all_ok(ok1, "verify_product");
  require_all_ok(ok2, "verify_product");
  std::vector<double> diff(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) diff[i] = b[i] - static_cast<double>(chi) * a[i];
  return pointwise(ts, diff, "rho(C x D) - chi(D) rho(C), chi(D) = " + std::to_string(chi));
}

std::vector<double> betti(const BasedChainComplex& c, const Twist& twist, const ApproxOptions& options) {
  const double m = static_cast<double>(twist_dim(twist));
  std::vector<double> ranks(c.top() + 2, 0.0);
  for (std::size_t n = 1; n <= c.top(); ++n) {
    const auto tw = apply_twist(c.boundary(static_cast<std::ptrdiff_t>(n)), twist);
    if (c.group().is_abelian()) {
      ranks[n] = static_cast<double>(rank_fraction_field(tw));
    } else {
      if (!c.tower) throw InvalidInput("betti over a presented group needs a quotient tower");
      ranks[n] = static_cast<double>(tw.rows()) - approx_sequence(tw, *c.tower, {}, options).dims_limit_estimate;
    }
  }
  std::vector<double> out;
  for (std::size_t n = 0; n <= c.top(); ++n) {
    out.push_back(m * static_cast<double>(c.rank(static_cast<std::ptrdiff_t>(n))) - ranks[n] - ranks[n + 1]);
  }
  return out;
}

}  // namespace l2twist
