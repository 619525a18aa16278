#include "l2twist/mahler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "l2twist/dense.hpp"
#include "l2twist/parallel.hpp"

namespace l2twist {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

Complex unit_root(std::int64_t j, std::int64_t n) {
  const std::int64_t r = ((j % n) + n) % n;
  return std::polar(1.0, kTwoPi * static_cast<double>(r) / static_cast<double>(n));
}

// Parlett-Reinsch balancing with radix 2; rescales rows/columns in place.
void balance(Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

// Coefficients (ascending) with no leading/trailing zeros; empty when zero.
std::vector<Complex> trimmed(std::span<const Complex> coeffs) {
  std::size_t lo = 0, hi = coeffs.size();
  while (lo < hi && coeffs[lo] == Complex(0.0)) ++lo;
  while (hi > lo && coeffs[hi - 1] == Complex(0.0)) --hi;
  return {coeffs.begin() + static_cast<std::ptrdiff_t>(lo), coeffs.begin() + static_cast<std::ptrdiff_t>(hi)};
}

// Taylor coefficients P(c), P'(c), P''(c)/2, ... up to order k.
std::vector<Complex> taylor_at(std::span<const Complex> coeffs, Complex c, std::size_t k) {
  std::vector<Complex> work(coeffs.begin(), coeffs.end());
  std::vector<Complex> out;
  for (std::size_t order = 0; order <= k && !work.empty(); ++order) {
    // synthetic division of work by (z - c)
    const std::size_t n = work.size();
    std::vector<Complex> quotient(n > 1 ? n - 1 : 0);
    Complex acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      acc = acc * c + work[i];
      if (i > 0) quotient[i - 1] = acc;
    }
    out.push_back(acc);
    work = std::move(quotient);
  }
  while (out.size() <= k) out.push_back(0.0);
  return out;
}

double contribution_single(Complex root) {
  const double lm = std::log(std::abs(root));
  if (std::abs(lm) <= kOnCircleTolerance) return 0.0;
  return std::max(lm, 0.0);
}

std::vector<std::vector<std::size_t>> single_linkage(const std::vector<Complex>& roots,
                                                     const std::vector<std::size_t>& members, double radius) {
  std::vector<std::size_t> parent(members.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const Complex ra = roots[members[a]], rb = roots[members[b]];
      const double scale = std::max({1.0, std::abs(ra), std::abs(rb)});
      if (std::abs(ra - rb) <= radius * scale) parent[find(a)] = find(b);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<long> slot(members.size(), -1);
  for (std::size_t a = 0; a < members.size(); ++a) {
    const auto r = find(a);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(members[a]);
  }
  return groups;
}

// Sum of ln max(|root|, 1), treating validated multiple roots by their
// well-conditioned cluster mean.
double cluster_contribution(std::span<const Complex> coeffs, const std::vector<Complex>& roots,
                            const std::vector<std::size_t>& members, double radius) {
  if (members.size() == 1) return contribution_single(roots[members[0]]);
  const double k = static_cast<double>(members.size());
  Complex center = 0.0;
  for (auto m : members) center += roots[m];
  center /= k;
  double spread = 0.0;
  for (auto m : members) spread = std::max(spread, std::abs(roots[m] - center));

  const auto taylor = taylor_at(coeffs, center, members.size());
  double scale = 0.0;
  const double ac = std::abs(center);
  double p = 1.0;
  for (const auto& c : coeffs) {
    scale += std::abs(c) * p;
    p *= ac;
  }
  const double gamma = 1e3 * static_cast<double>(coeffs.size());
  const double ak = std::abs(taylor[members.size()]);
  const double delta = ak > 0.0 ? std::pow(gamma * kEps * scale / ak, 1.0 / k) : std::numeric_limits<double>::infinity();
  if (spread <= 10.0 * delta && spread <= radius) {
    const double lm = std::log(std::abs(center));
    if (std::abs(lm) <= kOnCircleTolerance) return 0.0;
    return k * std::max(lm, 0.0);
  }
  if (radius < 1e-9) {
    double s = 0.0;
    for (auto m : members) s += contribution_single(roots[m]);
    return s;
  }
  double s = 0.0;
  for (const auto& g : single_linkage(roots, members, radius / 10.0)) {
    s += cluster_contribution(coeffs, roots, g, radius / 10.0);
  }
  return s;
}

double roots_contribution(std::span<const Complex> coeffs, const std::vector<Complex>& roots) {
  constexpr double radius = 5e-2;
  std::vector<std::size_t> near, far;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    (std::abs(std::log(std::abs(roots[i]))) < 2.0 * radius ? near : far).push_back(i);
  }
  double s = 0.0;
  for (auto i : far) s += contribution_single(roots[i]);
  for (const auto& g : single_linkage(roots, near, radius)) s += cluster_contribution(coeffs, roots, g, radius);
  return s;
}

struct Lattice1D {
  bool ok = false;
  Exponent base;
  Exponent direction;
  std::vector<std::pair<std::int64_t, Complex>> terms;
};

// Detects a support contained in a line base + k * direction (direction
// primitive) so the Mahler measure reduces to one variable.
Lattice1D one_dimensional_support(const LaurentPoly& p) {
  Lattice1D out;
  if (p.is_zero()) return out;
  const int d = p.vars();
  out.base = p.terms().begin()->first;
  Exponent dir(d, 0);
  for (const auto& [e, c] : p.terms()) {
    Exponent diff(d);
    for (int l = 0; l < d; ++l) diff[l] = e[l] - out.base[l];
    if (std::all_of(diff.begin(), diff.end(), [](auto x) { return x == 0; })) continue;
    if (std::all_of(dir.begin(), dir.end(), [](auto x) { return x == 0; })) {
      std::int64_t g = 0;
      for (auto x : diff) g = std::gcd(g, x);
      for (int l = 0; l < d; ++l) dir[l] = diff[l] / g;
    }
  }
  out.direction = dir;
  const bool constant = std::all_of(dir.begin(), dir.end(), [](auto x) { return x == 0; });
  for (const auto& [e, c] : p.terms()) {
    std::int64_t k = 0;
    bool found = constant;
    if (!constant) {
      int pivot = 0;
      while (dir[pivot] == 0) ++pivot;
      const auto num = e[pivot] - out.base[pivot];
      if (num % dir[pivot] != 0) return out;
      k = num / dir[pivot];
      found = true;
      for (int l = 0; l < d; ++l) {
        if (e[l] - out.base[l] != k * dir[l]) found = false;
      }
    }
    if (!found) return out;
    out.terms.emplace_back(k, c);
  }
  out.ok = true;
  return out;
}

}  // namespace

LaurentPoly::LaurentPoly(int vars) : vars_(vars) {
  if (vars < 0) throw InvalidInput("LaurentPoly: negative variable count");
}

LaurentPoly LaurentPoly::constant(int vars, Complex c) {
  LaurentPoly p(vars);
  p.add_term(Exponent(vars, 0), c);
  return p;
}

LaurentPoly LaurentPoly::monomial(Exponent e, Complex c) {
  LaurentPoly p(static_cast<int>(e.size()));
  p.add_term(e, c);
  return p;
}

LaurentPoly LaurentPoly::univariate(const std::vector<Complex>& coeffs, std::int64_t low) {
  LaurentPoly p(1);
  for (std::size_t k = 0; k < coeffs.size(); ++k) p.add_term({static_cast<std::int64_t>(k) + low}, coeffs[k]);
  return p;
}

LaurentPoly LaurentPoly::from_element(const GroupRingElement& x, int vars) {
  LaurentPoly p(vars);
  for (const auto& [k, c] : x.terms()) {
    if (static_cast<int>(k.size()) != vars) throw DimensionMismatch("from_element: key length mismatch");
    p.add_term(k.data, c);
  }
  return p;
}

bool LaurentPoly::integer_exact() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& kv) {
    const auto& c = kv.second;
    return c.imag() == 0.0 && c.real() == std::nearbyint(c.real()) && std::abs(c.real()) < 9.0e15;
  });
}

void LaurentPoly::add_term(const Exponent& e, Complex c) {
  if (static_cast<int>(e.size()) != vars_) throw DimensionMismatch("LaurentPoly: exponent length mismatch");
  if (c == Complex(0.0)) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0.0)) terms_.erase(it);
  }
}

Complex LaurentPoly::evaluate(std::span<const Complex> z) const {
  if (z.size() != static_cast<std::size_t>(vars_)) throw DimensionMismatch("evaluate: wrong point dimension");
  Complex s = 0.0;
  for (const auto& [e, c] : terms_) {
    Complex m = c;
    for (int l = 0; l < vars_; ++l) {
      if (e[l] != 0) m *= ipow(z[l], e[l]);
    }
    s += m;
  }
  return s;
}

GroupRingElement LaurentPoly::to_element() const {
  GroupRingElement x;
  for (const auto& [e, c] : terms_) x.add_term(GroupElementKey(e), c);
  return x;
}

std::pair<Exponent, Exponent> LaurentPoly::exponent_box() const {
  Exponent lo(vars_, 0), hi(vars_, 0);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    for (int l = 0; l < vars_; ++l) {
      lo[l] = first ? e[l] : std::min(lo[l], e[l]);
      hi[l] = first ? e[l] : std::max(hi[l], e[l]);
    }
    first = false;
  }
  return {lo, hi};
}

double LaurentPoly::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.vars() != b.vars()) throw DimensionMismatch("LaurentPoly +: variable count mismatch");
  LaurentPoly out = a;
  for (const auto& [e, c] : b.terms()) out.add_term(e, c);
  return out;
}

LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.vars() != b.vars()) throw DimensionMismatch("LaurentPoly -: variable count mismatch");
  LaurentPoly out = a;
  for (const auto& [e, c] : b.terms()) out.add_term(e, -c);
  return out;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.vars() != b.vars()) throw DimensionMismatch("LaurentPoly *: variable count mismatch");
  LaurentPoly out(a.vars());
  Exponent e(a.vars());
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      for (int l = 0; l < a.vars(); ++l) e[l] = ea[l] + eb[l];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

LaurentPoly operator*(Complex s, const LaurentPoly& a) {
  LaurentPoly out(a.vars());
  if (s == Complex(0.0)) return out;
  for (const auto& [e, c] : a.terms()) out.add_term(e, s * c);
  return out;
}

std::string to_string(const LaurentPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << '(' << c.real();
    if (c.imag() != 0.0) os << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << 'i';
    os << ')';
    for (std::size_t l = 0; l < e.size(); ++l) {
      if (e[l] != 0) os << "*z" << (l + 1) << '^' << e[l];
    }
  }
  return os.str();
}

bool lex_less(const Exponent& a, const Exponent& b) {
  for (std::size_t l = a.size(); l-- > 0;) {
    if (a[l] != b[l]) return a[l] < b[l];
  }
  return false;
}

Complex lead(const LaurentPoly& p) {
  if (p.is_zero()) throw InvalidInput("lead: zero polynomial");
  const auto it = std::max_element(p.terms().begin(), p.terms().end(),
                                   [](const auto& x, const auto& y) { return lex_less(x.first, y.first); });
  return it->second;
}

std::string to_string(LogDetMethod m) {
  switch (m) {
    case LogDetMethod::ExactUnivariate: return "exact-univariate";
    case LogDetMethod::Lawton: return "lawton";
    case LogDetMethod::Quadrature: return "quadrature";
    case LogDetMethod::MatrixReduction: return "matrix-reduction";
    case LogDetMethod::Fibered: return "fibered";
  }
  return "unknown";
}

std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs) {
  const auto c = trimmed(coeffs);
  std::vector<Complex> roots;
  // zero roots from the stripped low-order zeros
  std::size_t lo = 0;
  while (lo < coeffs.size() && coeffs[lo] == Complex(0.0)) ++lo;
  if (c.size() <= 1) {
    if (!c.empty()) roots.assign(lo, Complex(0.0));
    return roots;
  }
  roots.assign(lo, Complex(0.0));
  const auto n = static_cast<Eigen::Index>(c.size() - 1);
  if (n == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  const Complex top = c.back();
  const bool real = std::all_of(c.begin(), c.end(), [](Complex x) { return x.imag() == 0.0; });
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) comp(0, j) = -c[static_cast<std::size_t>(n - 1 - j)] / top;
  for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  balance(comp);
  if (real) {
    Eigen::MatrixXd rc = comp.real();
    Eigen::EigenSolver<Eigen::MatrixXd> es(rc, false);
    for (Eigen::Index i = 0; i < n; ++i) roots.push_back(es.eigenvalues()(i));
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    for (Eigen::Index i = 0; i < n; ++i) roots.push_back(es.eigenvalues()(i));
  }
  return roots;
}

double mahler_univariate_coeffs(std::span<const Complex> coeffs) {
  const auto c = trimmed(coeffs);
  if (c.empty()) return -std::numeric_limits<double>::infinity();
  double value = std::log(std::abs(c.back()));
  if (c.size() == 1) return value;
  const auto roots = polynomial_roots(c);
  return value + roots_contribution(c, roots);
}

LogDetResult mahler_exact_univariate(const LaurentPoly& p) {
  if (p.is_zero()) throw InvalidInput("mahler: zero polynomial");
  if (p.vars() != 1) throw InvalidInput("mahler_exact_univariate: polynomial must have one variable");
  const auto [lo, hi] = p.exponent_box();
  std::vector<Complex> coeffs(static_cast<std::size_t>(hi[0] - lo[0] + 1), 0.0);
  for (const auto& [e, c] : p.terms()) coeffs[static_cast<std::size_t>(e[0] - lo[0])] = c;
  return {mahler_univariate_coeffs(coeffs), LogDetMethod::ExactUnivariate, 0.0};
}

LawtonSchedule lawton_bounds(const LaurentPoly& p) {
  if (p.is_zero()) throw InvalidInput("lawton: zero polynomial");
  const auto [lo, hi] = p.exponent_box();
  LawtonSchedule s;
  const int d = p.vars();
  for (int i = 0; i + 1 < d; ++i) s.bounds.push_back(1 + hi[i] - lo[i]);
  std::int64_t k = 1;
  for (int i = 0; i + 1 < d; ++i) {
    k = i == 0 ? s.bounds[0] : s.bounds[i] * k;
    s.minimal.push_back(k);
  }
  return s;
}

LaurentPoly lawton_substitute(const LaurentPoly& p, const std::vector<std::int64_t>& ks) {
  const auto sched = lawton_bounds(p);
  const int d = p.vars();
  auto describe = [&] {
    std::ostringstream os;
    os << "minimal legal schedule: [";
    for (std::size_t i = 0; i < sched.minimal.size(); ++i) os << (i ? "," : "") << sched.minimal[i];
    os << "]";
    return os.str();
  };
  if (ks.size() != static_cast<std::size_t>(std::max(0, d - 1))) {
    throw InvalidInput("lawton schedule needs " + std::to_string(std::max(0, d - 1)) + " entries; " + describe());
  }
  for (std::size_t j = 0; j < ks.size(); ++j) {
    const std::int64_t need = j == 0 ? sched.bounds[0] : sched.bounds[j] * ks[j - 1];
    if (ks[j] < need) throw InvalidInput("lawton schedule violates k constraints; " + describe());
  }
  LaurentPoly q(1);
  for (const auto& [e, c] : p.terms()) {
    std::int64_t x = d > 0 ? e[0] : 0;
    for (int l = 1; l < d; ++l) x += ks[l - 1] * e[l];
    q.add_term({x}, c);
  }
  return q;
}

LogDetResult mahler_lawton(const LaurentPoly& p, const LawtonOptions& options) {
  if (p.is_zero()) throw InvalidInput("mahler: zero polynomial");
  if (p.vars() <= 1) {
    if (p.vars() == 0) return {std::log(std::abs(p.terms().begin()->second)), LogDetMethod::Lawton, 0.0};
    auto r = mahler_exact_univariate(p);
    r.method = LogDetMethod::Lawton;
    return r;
  }
  const auto sched = lawton_bounds(p);
  const auto [lo, hi] = p.exponent_box();
  std::vector<std::vector<std::int64_t>> schedules = options.schedules;
  if (schedules.empty()) {
    for (std::size_t level = 0; level < options.max_levels; ++level) {
      std::vector<std::int64_t> ks(sched.minimal);
      for (std::size_t j = 0; j < ks.size(); ++j) ks[j] <<= level * (j + 1);
      std::int64_t degree = hi[0] - lo[0];
      for (std::size_t j = 0; j < ks.size(); ++j) degree += ks[j] * (hi[j + 1] - lo[j + 1]);
      if (level > 0 && static_cast<std::size_t>(degree) > options.max_degree) break;
      schedules.push_back(std::move(ks));
    }
  }
  LogDetResult result{0.0, LogDetMethod::Lawton, std::nullopt};
  std::optional<double> previous;
  for (const auto& ks : schedules) {
    const double v = mahler_exact_univariate(lawton_substitute(p, ks)).value;
    result.value = v;
    if (previous) {
      result.error_estimate = std::abs(v - *previous);
      if (*result.error_estimate < options.tol) break;
    }
    previous = v;
  }
  return result;
}

LogDetResult mahler_quadrature(const LaurentPoly& p, std::size_t n, int threads) {
  if (p.is_zero()) throw InvalidInput("mahler: zero polynomial");
  if (n < 4) throw InvalidInput("mahler_quadrature: N must be >= 4");
  const int d = p.vars();
  if (d == 0) return {std::log(std::abs(p.terms().begin()->second)), LogDetMethod::Quadrature, 0.0};
  double total_nodes = std::pow(static_cast<double>(n), d);
  if (total_nodes > static_cast<double>(1u << 26)) throw InvalidInput("mahler_quadrature: grid too large");

  struct Term {
    Exponent e;
    Complex c;
  };
  std::vector<Term> terms;
  for (const auto& [e, c] : p.terms()) terms.push_back({e, c});

  // ln|p| averaged over the 4^d refinement of the cell centered at theta.
  auto refined = [&](const std::vector<double>& theta, double h) {
    const std::size_t sub = std::size_t{1} << (2 * d);
    double s = 0.0;
    std::size_t used = 0;
    std::vector<Complex> z(d);
    for (std::size_t idx = 0; idx < sub; ++idx) {
      std::size_t rem = idx;
      for (int l = 0; l < d; ++l) {
        const double off = ((static_cast<double>(rem % 4) + 0.5) / 4.0 - 0.5) * h;
        rem /= 4;
        z[l] = std::polar(1.0, theta[l] + off);
      }
      const double a = std::abs(p.evaluate(z));
      if (a >= 1e-14) {
        s += std::log(a);
        ++used;
      }
    }
    return used ? s / static_cast<double>(used) : 0.0;
  };

  auto grid_average = [&](std::size_t m) {
    const auto [lo, hi] = p.exponent_box();
    // per-axis tables of z_l^e at node j
    std::vector<std::vector<Complex>> table(d);
    for (int l = 0; l < d; ++l) {
      const std::int64_t span = hi[l] - lo[l] + 1;
      table[l].resize(m * static_cast<std::size_t>(span));
      for (std::size_t j = 0; j < m; ++j) {
        for (std::int64_t e = 0; e < span; ++e) {
          table[l][j * span + e] = unit_root(static_cast<std::int64_t>(j) * (e + lo[l]), static_cast<std::int64_t>(m));
        }
      }
    }
    std::size_t inner = 1;
    for (int l = 1; l < d; ++l) inner *= m;
    const double h = kTwoPi / static_cast<double>(m);
    std::vector<double> partial(m, 0.0);
    parallel_for(m, threads, [&](std::size_t j0) {
      double s = 0.0;
      std::vector<std::size_t> idx(d, 0);
      idx[0] = j0;
      for (std::size_t rest = 0; rest < inner; ++rest) {
        std::size_t r = rest;
        for (int l = 1; l < d; ++l) {
          idx[l] = r % m;
          r /= m;
        }
        Complex v = 0.0;
        for (const auto& t : terms) {
          Complex mono = t.c;
          for (int l = 0; l < d; ++l) {
            const std::int64_t span = hi[l] - lo[l] + 1;
            mono *= table[l][idx[l] * span + (t.e[l] - lo[l])];
          }
          v += mono;
        }
        const double a = std::abs(v);
        if (a >= 1e-14) {
          s += std::log(a);
        } else {
          std::vector<double> theta(d);
          for (int l = 0; l < d; ++l) theta[l] = h * static_cast<double>(idx[l]);
          s += refined(theta, h);
        }
      }
      partial[j0] = s;
    });
    double s = 0.0;
    for (double x : partial) s += x;
    return s / (static_cast<double>(m) * static_cast<double>(inner));
  };

  const double full = grid_average(n);
  const double half = grid_average(n / 2);
  return {full, LogDetMethod::Quadrature, std::abs(full - half)};
}

LogDetResult mahler_fibered(const LaurentPoly& p, std::size_t nodes, int exact_var) {
  if (p.is_zero()) throw InvalidInput("mahler: zero polynomial");
  const int d = p.vars();
  if (d == 0) return {std::log(std::abs(p.terms().begin()->second)), LogDetMethod::Fibered, 0.0};
  const auto [lo, hi] = p.exponent_box();
  if (exact_var < 0) {
    exact_var = 0;
    for (int l = 1; l < d; ++l) {
      if (hi[l] - lo[l] > hi[exact_var] - lo[exact_var]) exact_var = l;
    }
  }
  if (d == 1) {
    auto r = mahler_exact_univariate(p);
    r.method = LogDetMethod::Fibered;
    return r;
  }
  auto average = [&](std::size_t m) {
    std::size_t total = 1;
    for (int l = 0; l < d - 1; ++l) total *= m;
    const std::size_t span = static_cast<std::size_t>(hi[exact_var] - lo[exact_var] + 1);
    double s = 0.0;
    std::vector<Complex> coeffs(span);
    std::vector<Complex> w(d, 1.0);
    for (std::size_t node = 0; node < total; ++node) {
      std::size_t r = node;
      for (int l = 0; l < d; ++l) {
        if (l == exact_var) continue;
        // midpoint nodes avoid theta = 0
        w[l] = std::polar(1.0, kTwoPi * (static_cast<double>(r % m) + 0.5) / static_cast<double>(m));
        r /= m;
      }
      std::fill(coeffs.begin(), coeffs.end(), Complex(0.0));
      for (const auto& [e, c] : p.terms()) {
        Complex m2 = c;
        for (int l = 0; l < d; ++l) {
          if (l != exact_var && e[l] != 0) m2 *= ipow(w[l], e[l]);
        }
        coeffs[static_cast<std::size_t>(e[exact_var] - lo[exact_var])] += m2;
      }
      s += mahler_univariate_coeffs(coeffs);
    }
    return s / static_cast<double>(total);
  };
  const double full = average(nodes);
  const double half = average(std::max<std::size_t>(1, nodes / 2));
  return {full, LogDetMethod::Fibered, std::abs(full - half)};
}

LogDetResult mahler(const LaurentPoly& p, const LawtonOptions& options) {
  if (p.is_zero()) throw InvalidInput("mahler: zero polynomial");
  const auto line = one_dimensional_support(p);
  if (line.ok) {
    std::int64_t kmin = 0, kmax = 0;
    for (const auto& [k, c] : line.terms) {
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
    }
    std::vector<Complex> coeffs(static_cast<std::size_t>(kmax - kmin + 1), 0.0);
    for (const auto& [k, c] : line.terms) coeffs[static_cast<std::size_t>(k - kmin)] += c;
    return {mahler_univariate_coeffs(coeffs), LogDetMethod::ExactUnivariate, 0.0};
  }
  auto result = mahler_lawton(p, options);
  std::size_t n = p.vars() == 2 ? 256 : p.vars() == 3 ? 48 : 16;
  const auto quad = mahler_quadrature(p, n);
  const double gap = std::abs(quad.value - result.value);
  result.error_estimate = std::max(result.error_estimate.value_or(gap), gap);
  return result;
}

namespace {

LaurentPoly determinant_expansion(const std::vector<std::vector<LaurentPoly>>& m, int vars) {
  const std::size_t n = m.size();
  std::vector<LaurentPoly> f(std::size_t{1} << n, LaurentPoly(vars));
  f[0] = LaurentPoly::constant(vars, 1.0);
  // f[mask] = det of rows 0..|mask|-1 against columns in mask
  std::vector<std::vector<std::uint32_t>> by_size(n + 1);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) by_size[std::popcount(mask)].push_back(mask);
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t row = k - 1;
    for (auto mask : by_size[k]) {
      LaurentPoly acc(vars);
      int pos = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (!(mask & (1u << j))) continue;
        const auto& entry = m[row][j];
        const auto& minor = f[mask & ~(1u << j)];
        if (!entry.is_zero() && !minor.is_zero()) {
          const double sign = ((static_cast<int>(row) + pos) % 2 == 0) ? 1.0 : -1.0;
          acc = acc + Complex(sign) * (entry * minor);
        }
        ++pos;
      }
      f[mask] = std::move(acc);
    }
    // masks of size k-1 are no longer needed
    for (auto mask : by_size[k - 1]) f[mask] = LaurentPoly(vars);
  }
  return f[(1u << n) - 1];
}

LaurentPoly determinant_interpolation(const std::vector<std::vector<LaurentPoly>>& m, int vars) {
  const std::size_t n = m.size();
  Exponent lower(vars, 0), upper(vars, 0);
  bool integer = true;
  for (std::size_t i = 0; i < n; ++i) {
    Exponent rlo(vars, std::numeric_limits<std::int64_t>::max()), rhi(vars, std::numeric_limits<std::int64_t>::min());
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (m[i][j].is_zero()) continue;
      integer = integer && m[i][j].integer_exact();
      any = true;
      const auto [lo, hi] = m[i][j].exponent_box();
      for (int l = 0; l < vars; ++l) {
        rlo[l] = std::min(rlo[l], lo[l]);
        rhi[l] = std::max(rhi[l], hi[l]);
      }
    }
    if (!any) return LaurentPoly(vars);
    for (int l = 0; l < vars; ++l) {
      lower[l] += rlo[l];
      upper[l] += rhi[l];
    }
  }
  std::vector<std::size_t> size(vars);
  double total = 1.0;
  for (int l = 0; l < vars; ++l) {
    size[l] = static_cast<std::size_t>(upper[l] - lower[l] + 1);
    total *= static_cast<double>(size[l]);
  }
  if (total > static_cast<double>(1u << 22)) throw InvalidInput("determinant: interpolation grid too large");
  const auto count = static_cast<std::size_t>(total);
  std::vector<Complex> values(count);
  std::vector<Complex> z(vars);
  Eigen::MatrixXcd dense(n, n);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t r = idx;
    Complex shift = 1.0;
    for (int l = 0; l < vars; ++l) {
      const auto j = static_cast<std::int64_t>(r % size[l]);
      r /= size[l];
      z[l] = unit_root(j, static_cast<std::int64_t>(size[l]));
      shift *= unit_root(-j * lower[l], static_cast<std::int64_t>(size[l]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dense(i, j) = m[i][j].evaluate(z);
    }
    values[idx] = dense.partialPivLu().determinant() * shift;
  }
  // inverse DFT along each axis
  std::size_t stride = 1;
  for (int l = 0; l < vars; ++l) {
    const std::size_t len = size[l];
    std::vector<Complex> buf(len);
    for (std::size_t base = 0; base < count; ++base) {
      if ((base / stride) % len != 0) continue;
      for (std::size_t e = 0; e < len; ++e) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
          s += values[base + j * stride] *
               unit_root(-static_cast<std::int64_t>(j * e), static_cast<std::int64_t>(len));
        }
        buf[e] = s / static_cast<double>(len);
      }
      for (std::size_t e = 0; e < len; ++e) values[base + e * stride] = buf[e];
    }
    stride *= len;
  }
  double scale = 0.0;
  for (const auto& v : values) scale = std::max(scale, std::abs(v));
  LaurentPoly out(vars);
  for (std::size_t idx = 0; idx < count; ++idx) {
    Complex c = values[idx];
    if (integer) c = Complex(std::nearbyint(c.real()), 0.0);
    if (std::abs(c) <= 1e-12 * scale) continue;
    Exponent e(vars);
    std::size_t r = idx;
    for (int l = 0; l < vars; ++l) {
      e[l] = static_cast<std::int64_t>(r % size[l]) + lower[l];
      r /= size[l];
    }
    out.add_term(e, c);
  }
  return out;
}

}  // namespace

LaurentPoly determinant(const std::vector<std::vector<LaurentPoly>>& m, int vars) {
  for (const auto& row : m) {
    if (row.size() != m.size()) throw DimensionMismatch("determinant: matrix is not square");
  }
  if (m.empty()) return LaurentPoly::constant(vars, 1.0);
  if (m.size() <= 12) return determinant_expansion(m, vars);
  return determinant_interpolation(m, vars);
}

std::vector<std::vector<LaurentPoly>> to_poly_matrix(const GroupRingMatrix& a) {
  if (!a.group().is_abelian()) throw InvalidInput("matrix is not over a free abelian group");
  const int d = a.group().generator_count();
  std::vector<std::vector<LaurentPoly>> m(a.rows(), std::vector<LaurentPoly>(a.cols(), LaurentPoly(d)));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = LaurentPoly::from_element(a.at(i, j), d);
  }
  return m;
}

DeterminantResult det_matrix_over_Zd(const GroupRingMatrix& a, const LawtonOptions& options) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("det_matrix_over_Zd: matrix is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()));
  }
  const int d = a.group().generator_count();
  DeterminantResult r{determinant(to_poly_matrix(a), d), {}};
  if (r.detpoly.is_zero()) {
    r.logdet = {-std::numeric_limits<double>::infinity(), LogDetMethod::MatrixReduction, std::nullopt};
    return r;
  }
  r.logdet = d <= 1 ? LogDetResult{mahler(r.detpoly, options).value, LogDetMethod::ExactUnivariate, 0.0}
                    : mahler(r.detpoly, options);
  return r;
}

namespace {

bool poly_nonzero(const LaurentPoly& p, double scale) {
  if (p.integer_exact()) return !p.is_zero();
  return p.max_abs_coefficient() > 1e-9 * std::max(scale, 1e-300);
}

bool has_nonzero_minor(const std::vector<std::vector<LaurentPoly>>& m, std::size_t k, int vars,
                       std::size_t& budget) {
  const std::size_t r = m.size(), s = m.empty() ? 0 : m[0].size();
  double scale = 1.0;
  for (const auto& row : m) {
    double rs = 0.0;
    for (const auto& e : row) rs = std::max(rs, e.max_abs_coefficient());
    scale *= std::max(rs, 1.0);
  }
  std::vector<std::size_t> rows(k), cols(k);
  std::iota(rows.begin(), rows.end(), 0);
  auto next = [](std::vector<std::size_t>& c, std::size_t n) {
    std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
      if (c[i] < n - k + i) {
        ++c[i];
        for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
        return true;
      }
    }
    return false;
  };
  do {
    std::iota(cols.begin(), cols.end(), 0);
    do {
      if (budget-- == 0) throw InvalidInput("rank_fraction_field: minor search budget exhausted");
      std::vector<std::vector<LaurentPoly>> sub(k, std::vector<LaurentPoly>(k, LaurentPoly(vars)));
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) sub[i][j] = m[rows[i]][cols[j]];
      }
      if (poly_nonzero(determinant(sub, vars), scale)) return true;
    } while (next(cols, s));
  } while (next(rows, r));
  return false;
}

}  // namespace

std::size_t rank_fraction_field(const GroupRingMatrix& a, std::uint64_t seed) {
  if (!a.group().is_abelian()) throw InvalidInput("rank_fraction_field: matrix is not over Z^d");
  if (a.rows() == 0 || a.cols() == 0 || a.is_zero()) return 0;
  const auto d = static_cast<std::size_t>(a.group().generator_count());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  auto sample = [&] {
    std::vector<Complex> z(d);
    for (auto& x : z) x = std::polar(1.0, angle(rng));
    return numerical_rank(evaluate(a, z));
  };
  const auto r1 = sample();
  const auto r2 = sample();
  if (r1 == r2) return r1;
  const auto m = to_poly_matrix(a);
  std::size_t budget = 200000;
  for (std::size_t k = std::min(a.rows(), a.cols()); k > 0; --k) {
    if (has_nonzero_minor(m, k, static_cast<int>(d), budget)) return k;
  }
  return 0;
}

}  // namespace l2twist
