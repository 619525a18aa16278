#pragma once

// Twisting of group-ring matrices by the one-dimensional representations
// phi^* C_t and by based Z^d-representations V, plus the constants theta and
// nu that bound twisted determinants from below.

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <variant>
#include <vector>

#include "l2twist/grouprings.hpp"

namespace l2twist {

/// A positive twist parameter t.
class TwistParameter {
 public:
  explicit TwistParameter(double t);
  double value() const { return t_; }

 private:
  double t_;
};

/// A based finite-dimensional Z^d-representation: commuting invertible
/// matrices R_1..R_d acting on C^m.
class BasedRepresentation {
 public:
  /// Validates invertibility and commutativity (relative tolerance 1e-10).
  explicit BasedRepresentation(std::vector<Eigen::MatrixXcd> actions, int dim = -1);

  static BasedRepresentation trivial(int rank, int dim);
  /// One-dimensional representation with e_l acting by values[l].
  static BasedRepresentation scalar(const std::vector<Complex>& values);
  /// Block sum V1 + V2.
  static BasedRepresentation direct_sum(const BasedRepresentation& a, const BasedRepresentation& b);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(actions_.size()); }
  const std::vector<Eigen::MatrixXcd>& actions() const { return actions_; }

  /// R_1^{s_1} ... R_d^{s_d}.
  Eigen::MatrixXcd action(const std::vector<std::int64_t>& s) const;

  /// The representation with every action conjugated by u: u R_l u^{-1}.
  BasedRepresentation change_basis(const Eigen::MatrixXcd& u) const;

 private:
  int dim_ = 0;
  std::vector<Eigen::MatrixXcd> actions_;
  std::vector<Eigen::MatrixXcd> inverses_;
};

/// lambda_g g -> t^{phi(g)} lambda_g g entrywise; t = 1 returns the input.
GroupRingMatrix twist_scalar(const GroupRingMatrix& a, const Character& phi, TwistParameter t);

/// (r m) x (s m) matrix with block (i, j) = sum lambda_g g (x) Action(phi(g)).
/// Row index i*m + a, column index j*m + b carries Action(phi(g))(a, b).
GroupRingMatrix twist_rep(const GroupRingMatrix& a, const Character& phi, const BasedRepresentation& v);

/// min over s in S of |det Action(s)|. Rejects the empty set.
double theta(const BasedRepresentation& v, const std::set<GroupElementKey>& s);

/// The lower-bound constant
///   ||Action(eps (M+1))||^{-m} * prod_l |delta_l|^{-eps_l 2M}
/// where delta_l = det R_l, eps_l = +1 if |delta_l| >= 1 and -1 otherwise, and
/// M >= 1 is the smallest integer bounding all coordinates of S.
double nu(const BasedRepresentation& v, const std::set<GroupElementKey>& s);
/// ln nu(V, S), computed without forming the (possibly tiny) product.
double log_nu(const BasedRepresentation& v, const std::set<GroupElementKey>& s);
/// ln theta(V, S).
double log_theta(const BasedRepresentation& v, const std::set<GroupElementKey>& s);

/// ln |det Action(s)|, a homomorphism Z^d -> R.
double log_abs_det_action(const BasedRepresentation& v, const std::vector<std::int64_t>& s);

/// phi^* C_t with phi real-valued.
struct ScalarTwist {
  Character phi;
  double t = 1.0;
};

/// phi^* V with phi Z^d-valued.
struct RepresentationTwist {
  Character phi;
  BasedRepresentation v;
};

using Twist = std::variant<std::monostate, ScalarTwist, RepresentationTwist>;

/// Dimension of the twisting representation (1 when untwisted).
int twist_dim(const Twist& twist);
/// The m x m block by which the group element acts under the twist.
Eigen::MatrixXcd twist_block(const Twist& twist, const Group& group, const GroupElementKey& key);
/// Applies the twist to a matrix symbolically.
GroupRingMatrix apply_twist(const GroupRingMatrix& a, const Twist& twist);

}  // namespace l2twist
