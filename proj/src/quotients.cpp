#include "l2twist/quotients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "l2twist/dense.hpp"
#include "l2twist/parallel.hpp"

namespace l2twist {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::int64_t mod(std::int64_t a, std::int64_t n) { return ((a % n) + n) % n; }

Complex unit_root(std::int64_t j, std::int64_t n) {
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(mod(j, n)) / static_cast<double>(n));
}

std::vector<std::int64_t> strides(const std::vector<std::int64_t>& sizes) {
  std::vector<std::int64_t> s(sizes.size(), 1);
  for (std::size_t l = 1; l < sizes.size(); ++l) s[l] = s[l - 1] * sizes[l - 1];
  return s;
}

struct Spectrum {
  double dim_ker = 0.0;
  double logdet = 0.0;
};

Spectrum spectrum(const std::vector<const Eigen::MatrixXcd*>& blocks, std::size_t rows, std::size_t cols,
                  std::size_t order, double cutoff_factor) {
  std::vector<Eigen::VectorXd> svs;
  double smax = 0.0;
  for (const auto* b : blocks) {
    svs.push_back(singular_values(*b));
    if (svs.back().size() > 0) smax = std::max(smax, svs.back()(0));
  }
  Spectrum out;
  const double n = static_cast<double>(order);
  if (smax == 0.0) {
    out.dim_ker = static_cast<double>(rows) / n;
    return out;
  }
  const double cutoff = static_cast<double>(std::max(rows, cols)) * kEps * smax * cutoff_factor;
  std::size_t rank = 0;
  double sum = 0.0;
  for (const auto& sv : svs) {
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff) {
        ++rank;
        sum += std::log(sv(i));
      }
    }
  }
  out.dim_ker = static_cast<double>(rows - rank) / n;
  out.logdet = sum / n;
  return out;
}

Spectrum spectrum(const RegularRep& m, double cutoff_factor) {
  std::vector<const Eigen::MatrixXcd*> blocks;
  for (const auto& b : m.blocks) blocks.push_back(&b);
  return spectrum(blocks, m.rows, m.cols, m.order, cutoff_factor);
}

std::optional<double> aitken(double x1, double x2, double x3) {
  const double d1 = x2 - x1, d2 = x3 - x2;
  if (d1 == 0.0 || d2 == 0.0 || (d1 > 0) != (d2 > 0) || std::abs(d2) >= std::abs(d1)) return std::nullopt;
  return x3 - d2 * d2 / (d2 - d1);
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  const auto sv = singular_values(m);
  return sv.size() ? sv(0) : 0.0;
}

}  // namespace

FiniteQuotient FiniteQuotient::from_permutations(std::vector<std::vector<std::size_t>> generators,
                                                 std::optional<std::vector<std::int64_t>> abelian_sizes) {
  FiniteQuotient q;
  q.order_ = generators.empty() ? 1 : generators.front().size();
  if (q.order_ == 0) throw InvalidInput("finite quotient must have positive order");
  for (std::size_t a = 0; a < generators.size(); ++a) {
    const auto& p = generators[a];
    if (p.size() != q.order_) throw InvalidInput("generator permutations have different lengths");
    std::vector<std::size_t> inv(q.order_, q.order_);
    for (std::size_t x = 0; x < q.order_; ++x) {
      if (p[x] >= q.order_ || inv[p[x]] != q.order_) {
        throw InvalidInput("generator " + std::to_string(a + 1) + " is not a permutation");
      }
      inv[p[x]] = x;
    }
    q.inverses_.push_back(std::move(inv));
  }
  q.generators_ = std::move(generators);

  // transitivity: breadth-first orbit of the identity coset
  std::vector<std::size_t> bfs{0};
  std::vector<char> seen(q.order_, 0);
  seen[0] = 1;
  for (std::size_t head = 0; head < bfs.size(); ++head) {
    for (const auto& p : q.generators_) {
      const auto y = p[bfs[head]];
      if (!seen[y]) {
        seen[y] = 1;
        bfs.push_back(y);
      }
    }
  }
  if (bfs.size() != q.order_) throw InvalidInput("generator action is not transitive");

  // freeness: for each q the map lambda_q with lambda_q(0) = q commuting with
  // every generator must be well defined
  std::vector<std::size_t> targets;
  if (q.order_ <= 10000) {
    targets.resize(q.order_);
    std::iota(targets.begin(), targets.end(), 0);
  } else {
    const std::size_t step = q.order_ / 64;
    for (std::size_t k = 0; k < 64; ++k) targets.push_back(k * step + k % step);
  }
  std::vector<std::size_t> lambda(q.order_);
  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  for (auto target : targets) {
    std::fill(lambda.begin(), lambda.end(), unset);
    lambda[0] = target;
    for (auto x : bfs) {
      for (const auto& p : q.generators_) {
        const auto want = p[lambda[x]];
        auto& slot = lambda[p[x]];
        if (slot == unset) {
          slot = want;
        } else if (slot != want) {
          throw InvalidInput("generator action is not free (not a regular action)");
        }
      }
    }
  }

  if (abelian_sizes) {
    const auto& sizes = *abelian_sizes;
    std::int64_t prod = 1;
    for (auto n : sizes) {
      if (n < 1) throw InvalidInput("abelian quotient sizes must be positive");
      prod *= n;
    }
    if (static_cast<std::size_t>(prod) != q.order_ || sizes.size() != q.generators_.size()) {
      throw InvalidInput("abelian structure does not match the permutations");
    }
    const auto st = strides(sizes);
    for (std::size_t l = 0; l < sizes.size(); ++l) {
      for (std::size_t x = 0; x < q.order_; ++x) {
        const auto coord = (static_cast<std::int64_t>(x) / st[l]) % sizes[l];
        const auto y = static_cast<std::int64_t>(x) - coord * st[l] + mod(coord + 1, sizes[l]) * st[l];
        if (q.generators_[l][x] != static_cast<std::size_t>(y)) {
          throw InvalidInput("permutations do not match the declared abelian structure");
        }
      }
    }
    q.abelian_ = abelian_sizes;
  }
  return q;
}

FiniteQuotient FiniteQuotient::abelian(std::vector<std::int64_t> sizes) {
  std::int64_t n = 1;
  for (auto s : sizes) {
    if (s < 1) throw InvalidInput("abelian quotient sizes must be positive");
    n *= s;
    if (n > (std::int64_t{1} << 26)) throw InvalidInput("abelian quotient too large");
  }
  FiniteQuotient q;
  q.order_ = static_cast<std::size_t>(n);
  const auto st = strides(sizes);
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    std::vector<std::size_t> p(q.order_), inv(q.order_);
    for (std::int64_t x = 0; x < n; ++x) {
      const auto coord = (x / st[l]) % sizes[l];
      const auto y = x - coord * st[l] + mod(coord + 1, sizes[l]) * st[l];
      p[x] = static_cast<std::size_t>(y);
      inv[y] = static_cast<std::size_t>(x);
    }
    q.generators_.push_back(std::move(p));
    q.inverses_.push_back(std::move(inv));
  }
  q.abelian_ = std::move(sizes);
  return q;
}

std::size_t FiniteQuotient::act(std::size_t x, const Group& group, const GroupElementKey& key) const {
  if (static_cast<std::size_t>(group.generator_count()) != generators_.size()) {
    throw DimensionMismatch("quotient has " + std::to_string(generators_.size()) + " generators, group has " +
                            std::to_string(group.generator_count()));
  }
  if (group.is_abelian()) {
    if (abelian_) {
      const auto st = strides(*abelian_);
      std::int64_t y = static_cast<std::int64_t>(x);
      for (std::size_t l = 0; l < key.size(); ++l) {
        const auto n = (*abelian_)[l];
        const auto coord = (y / st[l]) % n;
        y += (mod(coord + key[l], n) - coord) * st[l];
      }
      return static_cast<std::size_t>(y);
    }
    for (std::size_t l = 0; l < key.size(); ++l) {
      // every element's order divides |Q|
      const auto reps = mod(key[l], static_cast<std::int64_t>(order_));
      for (std::int64_t k = 0; k < reps; ++k) x = generators_[l][x];
    }
    return x;
  }
  for (auto letter : key.data) {
    const auto idx = static_cast<std::size_t>(std::abs(letter) - 1);
    x = letter > 0 ? generators_[idx][x] : inverses_[idx][x];
  }
  return x;
}

void FiniteQuotient::check_quotient_of(const Group& group) const {
  if (static_cast<std::size_t>(group.generator_count()) != generators_.size()) {
    throw InvalidInput("quotient has " + std::to_string(generators_.size()) + " generator images, group has " +
                       std::to_string(group.generator_count()) + " generators");
  }
  if (group.is_abelian()) {
    for (std::size_t l = 0; l < generators_.size(); ++l) {
      for (std::size_t k = l + 1; k < generators_.size(); ++k) {
        if (generators_[l][generators_[k][0]] != generators_[k][generators_[l][0]]) {
          throw InvalidInput("generator images of a free abelian group do not commute");
        }
      }
    }
    return;
  }
  // the action is regular, so a relator fixing the identity coset is trivial
  const auto& rels = group.relators();
  for (std::size_t i = 0; i < rels.size(); ++i) {
    if (act(0, group, GroupElementKey(rels[i])) != 0) {
      throw InvalidInput("relator " + std::to_string(i + 1) + " does not act trivially on the quotient");
    }
  }
}

QuotientTower::QuotientTower(std::vector<FiniteQuotient> levels) : levels_(std::move(levels)) {
  for (std::size_t i = 1; i < levels_.size(); ++i) {
    if (levels_[i].order() < levels_[i - 1].order()) throw InvalidInput("tower orders must be nondecreasing");
  }
}

QuotientTower QuotientTower::cyclic(int d, const std::vector<std::int64_t>& sizes) {
  std::vector<FiniteQuotient> levels;
  for (auto n : sizes) levels.push_back(FiniteQuotient::abelian(std::vector<std::int64_t>(d, n)));
  return QuotientTower(std::move(levels));
}

Eigen::MatrixXcd RegularRep::dense() const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

RegularRep regular_rep_matrix(const GroupRingMatrix& a, const FiniteQuotient& q, const Twist& twist,
                              const RegularRepOptions& options) {
  const Group& group = a.group();
  q.check_quotient_of(group);
  const auto m = static_cast<std::size_t>(twist_dim(twist));
  const std::size_t n = q.order(), r = a.rows(), s = a.cols();
  RegularRep out;
  out.order = n;
  out.rows = n * r * m;
  out.cols = n * s * m;

  const bool fast = !options.force_generic && q.abelian_sizes() &&
                    q.abelian_sizes()->size() == static_cast<std::size_t>(group.generator_count());
  if (fast) {
    const auto& sizes = *q.abelian_sizes();
    struct Term {
      std::size_t i, j;
      std::vector<std::int64_t> e;
      Eigen::MatrixXcd block;
    };
    std::vector<Term> terms;
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < s; ++j) {
        for (const auto& [key, c] : a.at(i, j).terms()) {
          terms.push_back({i, j, group.exponent_sums(key), c * twist_block(twist, group, key)});
        }
      }
    }
    out.blocks.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      // character index in mixed radix, first coordinate fastest
      std::vector<std::int64_t> chi(sizes.size());
      std::size_t rem = k;
      for (std::size_t l = 0; l < sizes.size(); ++l) {
        chi[l] = static_cast<std::int64_t>(rem % static_cast<std::size_t>(sizes[l]));
        rem /= static_cast<std::size_t>(sizes[l]);
      }
      Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(r * m, s * m);
      for (const auto& t : terms) {
        Complex phase = 1.0;
        for (std::size_t l = 0; l < sizes.size(); ++l) {
          phase *= unit_root(mod(chi[l], sizes[l]) * mod(t.e[l], sizes[l]), sizes[l]);
        }
        blk.block(t.i * m, t.j * m, m, m) += phase * t.block;
      }
      out.blocks[k] = std::move(blk);
    }
    return out;
  }

  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(out.rows, out.cols);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      for (const auto& [key, c] : a.at(i, j).terms()) {
        const Eigen::MatrixXcd blk = c * twist_block(twist, group, key);
        for (std::size_t x = 0; x < n; ++x) {
          const auto y = q.act(x, group, key);
          full.block((x * r + i) * m, (y * s + j) * m, m, m) += blk;
        }
      }
    }
  }
  out.blocks.push_back(std::move(full));
  return out;
}

double vn_dim_ker(const RegularRep& m, double cutoff_factor) { return spectrum(m, cutoff_factor).dim_ker; }

double vn_dim_ker(const Eigen::MatrixXcd& m, std::size_t order, double cutoff_factor) {
  if (order == 0) throw InvalidInput("order must be positive");
  return spectrum({&m}, m.rows(), m.cols(), order, cutoff_factor).dim_ker;
}

double reg_logdet(const RegularRep& m, double cutoff_factor) { return spectrum(m, cutoff_factor).logdet; }

double reg_logdet(const Eigen::MatrixXcd& m, std::size_t order, double cutoff_factor) {
  if (order == 0) throw InvalidInput("order must be positive");
  return spectrum({&m}, m.rows(), m.cols(), order, cutoff_factor).logdet;
}

ApproxResult approx_sequence(const GroupRingMatrix& a, const QuotientTower& tower, const Twist& twist,
                             const ApproxOptions& options) {
  if (tower.size() == 0) throw InvalidInput("approx_sequence: empty tower");
  ApproxResult out;
  out.levels.resize(tower.size());
  parallel_for(tower.size(), options.threads, [&](std::size_t i) {
    const auto& q = tower.levels()[i];
    const auto rep = regular_rep_matrix(a, q, twist, {options.force_generic});
    const auto sp = spectrum(rep, options.cutoff_factor);
    out.levels[i] = {q.order(), sp.dim_ker, sp.logdet};
  });
  const std::size_t count = out.levels.size();
  const std::size_t window = (count + 1) / 2;
  out.limsup_estimate = -std::numeric_limits<double>::infinity();
  for (std::size_t i = count - window; i < count; ++i) {
    out.limsup_estimate = std::max(out.limsup_estimate, out.levels[i].reg_logdet);
  }
  out.dims_limit_estimate = out.levels.back().vn_dim_ker;
  if (count >= 3) {
    double lo = out.levels[count - 1].vn_dim_ker, hi = lo;
    for (std::size_t i = count - 3; i < count; ++i) {
      lo = std::min(lo, out.levels[i].vn_dim_ker);
      hi = std::max(hi, out.levels[i].vn_dim_ker);
    }
    out.dims_stable = hi - lo <= 1e-6;
  }
  return out;
}

BoundCertificate bound_certificate(const GroupRingMatrix& a, const Character& phi, const BasedRepresentation& v,
                                   double kernel_dim, bool has_section) {
  if (phi.target() != CharacterTarget::FreeAbelian || phi.target_dim() != v.rank()) {
    throw DimensionMismatch("bound_certificate: character must map to Z^d with d = rank of V");
  }
  const double r = static_cast<double>(a.rows());
  if (kernel_dim < -1e-12 || kernel_dim > r + 1e-12) throw InvalidInput("kernel dimension outside [0, r]");
  const double exponent = std::max(0.0, r - kernel_dim);
  std::set<GroupElementKey> image;
  for (const auto& key : support(a)) image.insert(GroupElementKey(phi.lattice_value(a.group(), key)));
  BoundCertificate out;
  if (image.empty()) {
    if (exponent > 1e-12) throw InvalidInput("bound_certificate: empty support with r > kernel dimension");
    if (has_section) out.theta_lower = 0.0;
    return out;
  }
  double max_norm = 0.0;
  for (const auto& s : image) max_norm = std::max(max_norm, spectral_norm(v.action(s.data)));
  out.lower = exponent * log_nu(v, image);
  out.upper = exponent * static_cast<double>(v.dim()) * std::log(one_norm(a) * max_norm);
  if (has_section) out.theta_lower = exponent * log_theta(v, image);
  return out;
}

double regular_det(const Eigen::MatrixXcd& m, std::size_t order, double cutoff_factor) {
  const auto sp = spectrum({&m}, m.rows(), m.cols(), order, cutoff_factor);
  if (sp.dim_ker > 0.0) return 0.0;
  return std::exp(sp.logdet);
}

SemicontinuityReport semicontinuity_check(const std::vector<Eigen::MatrixXcd>& family, const Eigen::MatrixXcd& limit,
                                          std::size_t order, double cutoff_factor) {
  if (family.empty()) throw InvalidInput("semicontinuity_check: empty family");
  for (const auto& mj : family) {
    if (mj.rows() != limit.rows() || mj.cols() != limit.cols()) {
      throw DimensionMismatch("semicontinuity_check: family members must have the limit's shape");
    }
  }
  SemicontinuityReport rep;
  for (const auto& mj : family) {
    rep.distances.push_back(spectral_norm(mj - limit));
    rep.dims.push_back(vn_dim_ker(mj, order, cutoff_factor));
    rep.dets.push_back(regular_det(mj, order, cutoff_factor));
  }
  if (rep.distances.back() > rep.distances.front()) {
    throw InvalidInput("semicontinuity_check: family does not approach the limit");
  }
  rep.limit_dim = vn_dim_ker(limit, order, cutoff_factor);
  rep.limit_det = regular_det(limit, order, cutoff_factor);

  const std::size_t count = family.size();
  rep.tail_start = count / 2;
  rep.limsup_dim = 0.0;
  rep.tail_max_det = 0.0;
  for (std::size_t j = rep.tail_start; j < count; ++j) {
    rep.limsup_dim = std::max(rep.limsup_dim, rep.dims[j]);
    rep.tail_max_det = std::max(rep.tail_max_det, rep.dets[j]);
  }
  rep.limsup_det = rep.tail_max_det;
  if (count >= 3) {
    std::vector<double> tail(rep.dets.end() - static_cast<std::ptrdiff_t>(std::min<std::size_t>(count, 5)),
                             rep.dets.end());
    // repeated Aitken steps while the sequence stays monotone and contracting
    while (tail.size() >= 3) {
      std::vector<double> next;
      for (std::size_t k = 0; k + 2 < tail.size(); ++k) {
        const auto a = aitken(tail[k], tail[k + 1], tail[k + 2]);
        if (!a) break;
        next.push_back(*a);
      }
      if (next.size() + 2 != tail.size()) break;
      rep.extrapolated_det = std::max(0.0, next.back());
      tail = std::move(next);
    }
    if (rep.extrapolated_det) rep.limsup_det = std::min(rep.tail_max_det, *rep.extrapolated_det);
  }
  const bool dim_ok = rep.limsup_dim <= rep.limit_dim + 1e-9;
  const bool det_ok = rep.limsup_det <= rep.limit_det * (1.0 + 1e-6) + 1e-9;
  rep.ok = dim_ok && det_ok;
  if (!dim_ok) rep.message = "kernel dimension jumps up in the limit";
  if (!det_ok) rep.message += std::string(rep.message.empty() ? "" : "; ") + "regular determinant exceeds the limit";
  return rep;
}

}  // namespace l2twist
