#pragma once

// Based chain complexes over group rings and the phi-twisted L^2-torsion
// function
//   rho(t) = -1/2 sum_n (-1)^n n ln det(Delta_n(t)),
// where Delta_n(t) = c_{n+1} c_{n+1}^* + c_n^* c_n is built from the twisted
// differentials. With this normalization the circle has rho(t) = ln max(t, 1).

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "l2twist/grouprings.hpp"
#include "l2twist/mahler.hpp"
#include "l2twist/quotients.hpp"
#include "l2twist/twisting.hpp"

namespace l2twist {

/// Free chain complex C_N -> ... -> C_0 over the group ring. boundaries[n-1]
/// is c_n of shape r_n x r_{n-1} (right multiplication maps C_n -> C_{n-1}).
class BasedChainComplex {
 public:
  BasedChainComplex() = default;
  /// Checks shapes; the chain condition is checked by validate_complex.
  BasedChainComplex(Group group, std::vector<std::size_t> ranks, std::vector<GroupRingMatrix> boundaries);

  const Group& group() const { return group_; }
  const std::vector<std::size_t>& ranks() const { return ranks_; }
  const std::vector<GroupRingMatrix>& boundaries() const { return boundaries_; }
  /// Top degree N (ranks has N + 1 entries).
  std::size_t top() const { return ranks_.empty() ? 0 : ranks_.size() - 1; }
  std::size_t rank(std::ptrdiff_t n) const;
  /// c_n for 1 <= n <= N; a zero matrix of the right shape otherwise.
  GroupRingMatrix boundary(std::ptrdiff_t n) const;
  long euler_characteristic() const;

  std::optional<QuotientTower> tower;

 private:
  Group group_ = Group::abelian(0);
  std::vector<std::size_t> ranks_;
  std::vector<GroupRingMatrix> boundaries_;
};

struct ComplexCheck {
  bool ok = true;
  std::size_t degree = 0;  ///< n with c_n c_{n-1} != 0
  std::size_t row = 0;
  std::size_t col = 0;
  std::string message;
};

/// c_n c_{n-1} = 0 exactly for Z^d; in every tower level otherwise.
ComplexCheck validate_complex(const BasedChainComplex& c);

/// Delta_n of the twisted complex, a self-adjoint square matrix of size
/// r_n * dim(twist).
GroupRingMatrix laplacian(const BasedChainComplex& c, std::size_t n, const Twist& twist = {});

enum class MultivariateRoute { Fibered, Lawton };

struct TorsionOptions {
  /// Nodes per axis for the fibered evaluation over Z^d, d >= 2.
  std::size_t fibered_nodes = 64;
  MultivariateRoute route = MultivariateRoute::Fibered;
  LawtonOptions lawton;
  /// Use the quotient tower even for Z^d.
  bool prefer_tower = false;
  ApproxOptions approx;
  int threads = 1;
};

struct TorsionValue {
  double value = 0.0;
  bool det_class = true;  ///< false marks the non-det-class sentinel
  LogDetMethod method = LogDetMethod::ExactUnivariate;
  double error_estimate = 0.0;
  std::string diagnostic;
};

TorsionValue torsion_at(const BasedChainComplex& c, const Twist& twist, const TorsionOptions& options = {});
/// phi^* C_t twist with real-valued phi.
TorsionValue torsion_at(const BasedChainComplex& c, const Character& phi, double t,
                        const TorsionOptions& options = {});

struct TorsionCurve {
  std::vector<double> t;
  std::vector<double> rho;
  std::vector<bool> ok;
  std::vector<LogDetMethod> methods;
};

/// Geometric grid t_k = t_min (t_max / t_min)^{k / (points - 1)}.
std::vector<double> geometric_grid(double t_min, double t_max, std::size_t points);

TorsionCurve torsion_curve(const BasedChainComplex& c, const Character& phi, const std::vector<double>& ts,
                           const TorsionOptions& options = {});
TorsionCurve torsion_curve(const BasedChainComplex& c, const Character& phi, double t_min, double t_max,
                           std::size_t points, const TorsionOptions& options = {});

struct DegreeResult {
  double deg0 = 0.0;
  double deg_inf = 0.0;
  double deg = 0.0;
  std::vector<double> slopes0;    ///< slopes of the smallest-t window
  std::vector<double> slopes_inf; ///< slopes of the largest-t window
  bool stable0 = false;
  bool stable_inf = false;
  bool enough_points = false;     ///< at least four usable points
};

/// Pairwise slopes of (ln t, rho) over the three smallest-t and three
/// largest-t adjacent pairs; deg0 is the window minimum, deg_inf the window
/// maximum. A window is stable when its spread is below 1e-6 (1 + |slope|).
DegreeResult degree(const TorsionCurve& curve);

struct BoundEnvelope {
  double c = 0.0;
  double d = 0.0;
  /// Bound C |ln t| + D.
  double at(double t) const { return c * std::abs(std::log(t)) + d; }
};

/// C = sum_n (r_n - dim ker c_n)(3 M_n + 1) sum_l |i(e_l)|, D = sum_n ln ||c_n||_1
/// with phi factored as i o phi' through Z^{d'}.
BoundEnvelope bound_envelope(const BasedChainComplex& c, const Character& phi);

/// Integer chain complex with a chain self-map F (trivial group).
struct IntegerChainMap {
  std::vector<std::size_t> ranks;           ///< r_0 .. r_N
  std::vector<Eigen::MatrixXd> boundaries;  ///< d_1 .. d_N, d_n is r_n x r_{n-1}
  std::vector<Eigen::MatrixXd> maps;        ///< F_0 .. F_N, F_n is r_n x r_n
};

struct MappingTorus {
  BasedChainComplex complex;
  double t0 = 0.0;     ///< max spectral radius of the F_n
  double t_inf = 0.0;  ///< max spectral radius of the F_n^{-1}; +inf if some F_n is singular
  long chi = 0;        ///< Euler characteristic of the base complex
};

/// Mapping cone of id - z F over Z[Z]: C_n = D_n + D_{n-1} with
/// c_n = [[d_n, 0], [1 - z F_{n-1}, -d_{n-1}]].
MappingTorus mapping_torus_complex(const IntegerChainMap& f);

/// sum_n (-1)^n sum_{lambda in spec F_n} ln max(t |lambda|, 1).
double mapping_torus_predicted(const IntegerChainMap& f, double t);

BasedChainComplex circle_complex();
/// Koszul complex of the d-torus over Z^d.
BasedChainComplex torus_complex(int d);
/// chi_orb k ln t for t >= 1, 0 otherwise.
double s1_predicted(double chi_orb_times_k, double t);

/// New basis element k of degree n is sign * g * b_{perm[k]}.
struct BasisChangeEntry {
  std::size_t source = 0;
  int sign = 1;
  GroupElementKey g;
};
using BasisChange = std::vector<std::vector<BasisChangeEntry>>;  // indexed by degree

/// sum_n (-1)^n sum_b g(b) in the abelianization (exponent sums).
std::vector<std::int64_t> trans_class(const BasedChainComplex& c, const BasisChange& change);
BasedChainComplex rebase(const BasedChainComplex& c, const BasisChange& change);

struct VerifyReport {
  bool ok = false;
  double max_residual = 0.0;
  std::vector<double> t;
  std::vector<double> residuals;
  /// For checks up to a linear term: fitted a ln t + b.
  double slope = 0.0;
  double intercept = 0.0;
  std::string detail;
};

inline constexpr double kVerifyTolerance = 1e-9;

/// rho'(t) - rho(t) = -phi(trans) ln t after rebasing.
VerifyReport verify_base_change(const BasedChainComplex& c, const Character& phi, const BasisChange& change,
                                const std::vector<double>& ts, const TorsionOptions& options = {});
/// rho(X; r phi)(t) = rho(X; phi)(t^r).
VerifyReport verify_scaling(const BasedChainComplex& c, const Character& phi, double r, const std::vector<double>& ts,
                            const TorsionOptions& options = {});

/// Cochain complex C^{N-*} with boundaries the adjoints of the c_n.
BasedChainComplex dual_complex(const BasedChainComplex& c);
/// rho(t) - (-1)^{n+1} rho(1/t) and rho_C(t) - rho_dual(t) are linear in ln t.
VerifyReport verify_duality(const BasedChainComplex& c, int n, const Character& phi, const std::vector<double>& ts,
                            const std::optional<BasedChainComplex>& dual = std::nullopt,
                            const TorsionOptions& options = {});

struct Restriction {
  BasedChainComplex complex;
  Character phi;
  std::int64_t index = 1;
};
/// Restriction to the sublattice H of Z^d spanned by the rows of basis,
/// based by coset representatives g_c b_i.
Restriction restrict_to_sublattice(const BasedChainComplex& c, const Character& phi,
                                   const std::vector<std::vector<std::int64_t>>& basis);
/// rho_H(t) - [G:H] rho_G(t) is linear in ln t.
VerifyReport verify_restriction(const BasedChainComplex& c, const Character& phi,
                                const std::vector<std::vector<std::int64_t>>& basis, const std::vector<double>& ts,
                                const TorsionOptions& options = {});

/// Degreewise split extension with boundaries [[c'_n, 0], [h_n, c''_n]];
/// h[n-1] is h_n of shape r''_n x r'_{n-1}.
BasedChainComplex extension(const BasedChainComplex& sub, const BasedChainComplex& quotient,
                            const std::vector<GroupRingMatrix>& h);
/// rho(C) = rho(C') + rho(C'').
VerifyReport verify_sum(const BasedChainComplex& sub, const BasedChainComplex& quotient,
                        const std::vector<GroupRingMatrix>& h, const Character& phi, const std::vector<double>& ts,
                        const TorsionOptions& options = {});

/// C (x) D with D an integer complex over the trivial group.
BasedChainComplex tensor_with(const BasedChainComplex& c, const std::vector<std::size_t>& d_ranks,
                              const std::vector<Eigen::MatrixXd>& d_boundaries);
/// rho(C (x) D) = chi(D) rho(C) (requires chi(C) = 0).
VerifyReport verify_product(const BasedChainComplex& c, const std::vector<std::size_t>& d_ranks,
                            const std::vector<Eigen::MatrixXd>& d_boundaries, const Character& phi,
                            const std::vector<double>& ts, const TorsionOptions& options = {});

/// L^2-Betti numbers b_n = m r_n - rank c_n - rank c_{n+1} of the twisted
/// complex, via fraction-field ranks over Z^d or the tower otherwise.
std::vector<double> betti(const BasedChainComplex& c, const Twist& twist = {}, const ApproxOptions& options = {});

}  // namespace l2twist
