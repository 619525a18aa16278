#pragma once

// Fuglede-Kadison determinants over Z^d. For a Laurent polynomial p the
// determinant of right multiplication by p is its Mahler measure; for a square
// matrix over C[Z^d] it is the Mahler measure of the classical determinant.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l2twist/grouprings.hpp"

namespace l2twist {

using Exponent = std::vector<std::int64_t>;

class LaurentPoly {
 public:
  using Terms = std::map<Exponent, Complex>;

  explicit LaurentPoly(int vars = 1);
  static LaurentPoly constant(int vars, Complex c);
  static LaurentPoly monomial(Exponent e, Complex c = 1.0);
  /// Univariate polynomial sum_k coeffs[k] z^{k + low}.
  static LaurentPoly univariate(const std::vector<Complex>& coeffs, std::int64_t low = 0);
  /// Reads an element of C[Z^d].
  static LaurentPoly from_element(const GroupRingElement& x, int vars);

  int vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool integer_exact() const;
  std::size_t term_count() const { return terms_.size(); }

  void add_term(const Exponent& e, Complex c);
  Complex evaluate(std::span<const Complex> z) const;
  GroupRingElement to_element() const;

  /// Componentwise minimum and maximum exponents over the support.
  std::pair<Exponent, Exponent> exponent_box() const;

  /// Largest coefficient modulus.
  double max_abs_coefficient() const;

  bool operator==(const LaurentPoly&) const = default;

 private:
  int vars_;
  Terms terms_;
};

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly operator*(Complex s, const LaurentPoly& a);
std::string to_string(const LaurentPoly& p);

/// Compares exponents with the last coordinate dominating.
bool lex_less(const Exponent& a, const Exponent& b);

/// Coefficient at the lexicographically maximal exponent.
Complex lead(const LaurentPoly& p);

enum class LogDetMethod { ExactUnivariate, Lawton, Quadrature, MatrixReduction, Fibered };
std::string to_string(LogDetMethod m);

struct LogDetResult {
  double value = 0.0;  ///< natural-log scale; -inf marks an identically zero determinant
  LogDetMethod method = LogDetMethod::ExactUnivariate;
  std::optional<double> error_estimate;
};

/// Roots modulus tolerance for treating a root as lying on the unit circle.
inline constexpr double kOnCircleTolerance = 1e-10;

/// Mahler measure of a univariate Laurent polynomial via Jensen's formula:
/// ln|lead| + sum over roots outside the unit circle of ln|root|.
LogDetResult mahler_exact_univariate(const LaurentPoly& p);
/// Same for a dense coefficient vector c_0 + c_1 z + ... (leading zeros allowed).
double mahler_univariate_coeffs(std::span<const Complex> coeffs);

/// Polynomial roots from the balanced companion matrix.
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs);

struct LawtonSchedule {
  std::vector<std::int64_t> bounds;  ///< b_1 .. b_{d-1}
  std::vector<std::int64_t> minimal; ///< k_2 .. k_d, minimal legal schedule
};

/// b_i = 1 + max i-th exponent after translating the support into the
/// nonnegative orthant, and the smallest schedule with k_2 >= b_1,
/// k_{j+1} >= b_j k_j.
LawtonSchedule lawton_bounds(const LaurentPoly& p);

/// q(z) = p(z, z^{k_2}, ..., z^{k_d}). Throws InvalidInput when the schedule
/// violates the b-constraints; the message reports the minimal legal schedule.
LaurentPoly lawton_substitute(const LaurentPoly& p, const std::vector<std::int64_t>& ks);

struct LawtonOptions {
  double tol = 1e-4;
  std::size_t max_degree = 512;
  std::size_t max_levels = 12;
  /// Explicit schedules to use instead of the default doubling sequence.
  std::vector<std::vector<std::int64_t>> schedules;
};

LogDetResult mahler_lawton(const LaurentPoly& p, const LawtonOptions& options = {});

/// Tensor trapezoid average of ln|p| over the unit torus with N nodes per
/// axis; nodes where |p| < 1e-14 are replaced by a 4-per-axis refinement of
/// their cell. error_estimate = |value(N) - value(N/2)|.
LogDetResult mahler_quadrature(const LaurentPoly& p, std::size_t n, int threads = 1);

/// Exact univariate Mahler measure in one variable averaged over a midpoint
/// grid of the remaining torus (nodes per axis).
LogDetResult mahler_fibered(const LaurentPoly& p, std::size_t nodes, int exact_var = -1);

/// Mahler measure by the best available route: exact for one effective
/// variable, Lawton with a quadrature cross-check otherwise.
LogDetResult mahler(const LaurentPoly& p, const LawtonOptions& options = {});

/// Classical determinant of a square matrix of Laurent polynomials, computed
/// without division (memoized Laplace expansion) for n <= 12, by
/// interpolation on a root-of-unity grid beyond.
LaurentPoly determinant(const std::vector<std::vector<LaurentPoly>>& m, int vars);

std::vector<std::vector<LaurentPoly>> to_poly_matrix(const GroupRingMatrix& a);

struct DeterminantResult {
  LaurentPoly detpoly;
  LogDetResult logdet;
};

/// FK determinant of a square matrix over C[Z^d].
DeterminantResult det_matrix_over_Zd(const GroupRingMatrix& a, const LawtonOptions& options = {});

/// Rank over the fraction field of C[Z^d]: numerical rank at two random
/// unit-modulus points, falling back to a nonvanishing-minor search.
std::size_t rank_fraction_field(const GroupRingMatrix& a, std::uint64_t seed = 0);

}  // namespace l2twist
