#pragma once

// Finite-quotient approximation of Fuglede-Kadison data: regular
// representations over finite quotients Q = G/G_i, von Neumann kernel
// dimensions, regularized log-determinants, towers, bound certificates and a
// semicontinuity harness.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "l2twist/grouprings.hpp"
#include "l2twist/twisting.hpp"

namespace l2twist {

/// A finite quotient of G given by the right regular action of its
/// generators on {0, ..., n-1}. Point 0 is the identity coset.
class FiniteQuotient {
 public:
  /// Validates that the permutations generate a group acting freely and
  /// transitively. abelian_sizes, when given, declares the quotient to be
  /// (Z/N_1) x ... x (Z/N_k) with generator l acting as the l-th unit vector
  /// on mixed-radix points; it is checked against the permutations.
  static FiniteQuotient from_permutations(std::vector<std::vector<std::size_t>> generators,
                                          std::optional<std::vector<std::int64_t>> abelian_sizes = std::nullopt);
  /// (Z/N_1) x ... x (Z/N_d) with its standard generators.
  static FiniteQuotient abelian(std::vector<std::int64_t> sizes);

  std::size_t order() const { return order_; }
  std::size_t generator_count() const { return generators_.size(); }
  const std::vector<std::vector<std::size_t>>& generators() const { return generators_; }
  const std::optional<std::vector<std::int64_t>>& abelian_sizes() const { return abelian_; }

  /// The point x . g for a key of the given group.
  std::size_t act(std::size_t x, const Group& group, const GroupElementKey& key) const;

  /// Throws InvalidInput unless this is a quotient of the group: generator
  /// counts match and every relator (every commutator for Z^d) acts trivially.
  void check_quotient_of(const Group& group) const;

 private:
  std::size_t order_ = 1;
  std::vector<std::vector<std::size_t>> generators_;
  std::vector<std::vector<std::size_t>> inverses_;
  std::optional<std::vector<std::int64_t>> abelian_;
};

/// Levels of finite quotients with nondecreasing orders.
class QuotientTower {
 public:
  QuotientTower() = default;
  explicit QuotientTower(std::vector<FiniteQuotient> levels);

  /// (Z/N)^d for each N in sizes.
  static QuotientTower cyclic(int d, const std::vector<std::int64_t>& sizes);

  const std::vector<FiniteQuotient>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }

 private:
  std::vector<FiniteQuotient> levels_;
};

/// Matrix of A in the regular representation of Q, possibly split into
/// independent diagonal blocks (abelian fast path, one block per character).
struct RegularRep {
  std::vector<Eigen::MatrixXcd> blocks;
  std::size_t order = 1;
  std::size_t rows = 0;  ///< rows of the full matrix
  std::size_t cols = 0;

  /// Block-diagonal assembly (unitarily equivalent to the permutation form).
  Eigen::MatrixXcd dense() const;
};

struct RegularRepOptions {
  bool force_generic = false;
};

/// Each group element acts by its n x n permutation matrix P_g with
/// P_g[q, q.g] = 1, tensored with the twist block. Row index (q r + i) m + a.
RegularRep regular_rep_matrix(const GroupRingMatrix& a, const FiniteQuotient& q, const Twist& twist = {},
                              const RegularRepOptions& options = {});

inline constexpr double kDefaultCutoffFactor = 64.0;

/// (rows - numerical rank) / n with the cutoff
/// max(rows, cols) * eps * sigma_max * cutoff_factor.
double vn_dim_ker(const RegularRep& m, double cutoff_factor = kDefaultCutoffFactor);
double vn_dim_ker(const Eigen::MatrixXcd& m, std::size_t order, double cutoff_factor = kDefaultCutoffFactor);

/// (1/n) sum of ln sigma over singular values above the cutoff; 0 for the
/// zero matrix.
double reg_logdet(const RegularRep& m, double cutoff_factor = kDefaultCutoffFactor);
double reg_logdet(const Eigen::MatrixXcd& m, std::size_t order, double cutoff_factor = kDefaultCutoffFactor);

struct ApproxLevel {
  std::size_t order = 0;
  double vn_dim_ker = 0.0;
  double reg_logdet = 0.0;
};

struct ApproxResult {
  std::vector<ApproxLevel> levels;
  double limsup_estimate = 0.0;      ///< max over the last ceil(L/2) levels
  double dims_limit_estimate = 0.0;  ///< last level
  bool dims_stable = false;          ///< last three dims agree within 1e-6
};

struct ApproxOptions {
  double cutoff_factor = kDefaultCutoffFactor;
  int threads = 1;
  bool force_generic = false;
};

ApproxResult approx_sequence(const GroupRingMatrix& a, const QuotientTower& tower, const Twist& twist = {},
                             const ApproxOptions& options = {});

struct BoundCertificate {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> theta_lower;
};

/// Log-scale bracket for the FK determinant of the V-twist of A:
///   lower = (r - k) ln nu(V, phi(supp A)),
///   upper = (r - k) dim V ln(||A||_1 max_s ||Action(s)||),
///   theta_lower = (r - k) ln theta(V, phi(supp A)) when has_section.
/// k is the von Neumann dimension of the kernel of A, supplied by the caller.
BoundCertificate bound_certificate(const GroupRingMatrix& a, const Character& phi, const BasedRepresentation& v,
                                   double kernel_dim, bool has_section = false);

struct SemicontinuityReport {
  bool ok = true;
  double limit_dim = 0.0;
  double limsup_dim = 0.0;
  double limit_det = 0.0;    ///< regular determinant det^r(M)
  double limsup_det = 0.0;   ///< finite-family surrogate
  double tail_max_det = 0.0;
  std::optional<double> extrapolated_det;
  std::size_t tail_start = 0;
  std::vector<double> distances;  ///< ||M_j - M||
  std::vector<double> dims;
  std::vector<double> dets;
  std::string message;
};

/// Regular determinant: exp(reg_logdet) when the matrix is injective, else 0.
double regular_det(const Eigen::MatrixXcd& m, std::size_t order = 1, double cutoff_factor = kDefaultCutoffFactor);

/// Checks limsup dim ker(M_j) <= dim ker(M) + 1e-9 and
/// limsup det^r(M_j) <= det^r(M) (1 + 1e-6) + 1e-9 on a family M_j -> M.
SemicontinuityReport semicontinuity_check(const std::vector<Eigen::MatrixXcd>& family, const Eigen::MatrixXcd& limit,
                                          std::size_t order = 1, double cutoff_factor = kDefaultCutoffFactor);

}  // namespace l2twist
