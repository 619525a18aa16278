#include "l2twist/twisting.hpp"

#include <cmath>
#include <limits>

namespace l2twist {

namespace {

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& base, std::int64_t n) {
  Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(base.rows(), base.cols());
  Eigen::MatrixXcd b = base;
  while (n > 0) {
    if (n & 1) result = result * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return result;
}

std::vector<std::int64_t> as_vector(const GroupElementKey& key) { return key.data; }

}  // namespace

TwistParameter::TwistParameter(double t) : t_(t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("twist parameter t must be positive and finite");
}

BasedRepresentation::BasedRepresentation(std::vector<Eigen::MatrixXcd> actions, int dim)
    : actions_(std::move(actions)) {
  if (actions_.empty()) {
    if (dim < 0) throw InvalidInput("representation of Z^0 needs an explicit dimension");
    dim_ = dim;
    return;
  }
  dim_ = static_cast<int>(actions_.front().rows());
  if (dim >= 0 && dim != dim_) throw DimensionMismatch("representation dim does not match matrices");
  for (const auto& r : actions_) {
    if (r.rows() != dim_ || r.cols() != dim_) throw DimensionMismatch("action matrices must be m x m");
  }
  for (std::size_t l = 0; l < actions_.size(); ++l) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(actions_[l]);
    const auto& sv = svd.singularValues();
    if (dim_ > 0 && !(sv(dim_ - 1) > 0.0 && std::isfinite(sv(0) / sv(dim_ - 1)) &&
                      sv(0) / sv(dim_ - 1) < 1e14)) {
      throw InvalidInput("action matrix R_" + std::to_string(l + 1) + " is not invertible");
    }
    inverses_.push_back(actions_[l].inverse());
  }
  for (std::size_t l = 0; l < actions_.size(); ++l) {
    for (std::size_t k = l + 1; k < actions_.size(); ++k) {
      const double tol = 1e-10 * operator_norm(actions_[l]) * operator_norm(actions_[k]);
      const double defect = operator_norm(actions_[l] * actions_[k] - actions_[k] * actions_[l]);
      if (defect > tol) {
        throw InvalidInput("action matrices R_" + std::to_string(l + 1) + " and R_" + std::to_string(k + 1) +
                           " do not commute (defect " + std::to_string(defect) + ")");
      }
    }
  }
}

BasedRepresentation BasedRepresentation::trivial(int rank, int dim) {
  std::vector<Eigen::MatrixXcd> a(rank, Eigen::MatrixXcd::Identity(dim, dim));
  return BasedRepresentation(std::move(a), dim);
}

BasedRepresentation BasedRepresentation::scalar(const std::vector<Complex>& values) {
  std::vector<Eigen::MatrixXcd> a;
  for (auto v : values) a.push_back(Eigen::MatrixXcd::Constant(1, 1, v));
  return BasedRepresentation(std::move(a), 1);
}

BasedRepresentation BasedRepresentation::direct_sum(const BasedRepresentation& a, const BasedRepresentation& b) {
  if (a.rank() != b.rank()) throw DimensionMismatch("direct_sum: representations of different rank");
  const int m = a.dim() + b.dim();
  std::vector<Eigen::MatrixXcd> acts;
  for (int l = 0; l < a.rank(); ++l) {
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(m, m);
    r.topLeftCorner(a.dim(), a.dim()) = a.actions()[l];
    r.bottomRightCorner(b.dim(), b.dim()) = b.actions()[l];
    acts.push_back(std::move(r));
  }
  return BasedRepresentation(std::move(acts), m);
}

Eigen::MatrixXcd BasedRepresentation::action(const std::vector<std::int64_t>& s) const {
  if (s.size() != actions_.size()) {
    throw DimensionMismatch("action: exponent vector of length " + std::to_string(s.size()) +
                            " for a rank " + std::to_string(actions_.size()) + " representation");
  }
  Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(dim_, dim_);
  for (std::size_t l = 0; l < s.size(); ++l) {
    if (s[l] > 0) result = result * matrix_power(actions_[l], s[l]);
    if (s[l] < 0) result = result * matrix_power(inverses_[l], -s[l]);
  }
  return result;
}

BasedRepresentation BasedRepresentation::change_basis(const Eigen::MatrixXcd& u) const {
  if (u.rows() != dim_ || u.cols() != dim_) throw DimensionMismatch("change_basis: u must be m x m");
  const Eigen::MatrixXcd ui = u.inverse();
  std::vector<Eigen::MatrixXcd> acts;
  for (const auto& r : actions_) acts.push_back(u * r * ui);
  return BasedRepresentation(std::move(acts), dim_);
}

GroupRingMatrix twist_scalar(const GroupRingMatrix& a, const Character& phi, TwistParameter t) {
  if (t.value() == 1.0) return a;
  const double lt = std::log(t.value());
  GroupRingMatrix out(a.group(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      GroupRingElement e;
      for (const auto& [k, c] : a.at(i, j).terms()) {
        const double p = phi.real_value(a.group(), k);
        // pow keeps integer powers of dyadic t exact
        const double f = p == std::nearbyint(p) ? std::pow(t.value(), p) : std::exp(p * lt);
        e.add_term(k, f * c);
      }
      out.at(i, j) = std::move(e);
    }
  }
  return out;
}

GroupRingMatrix twist_rep(const GroupRingMatrix& a, const Character& phi, const BasedRepresentation& v) {
  if (phi.target() != CharacterTarget::FreeAbelian) throw InvalidInput("twist_rep needs a Z^d-valued character");
  if (phi.target_dim() != v.rank()) {
    throw DimensionMismatch("character target rank " + std::to_string(phi.target_dim()) +
                            " does not match representation rank " + std::to_string(v.rank()));
  }
  const auto m = static_cast<std::size_t>(v.dim());
  GroupRingMatrix out(a.group(), a.rows() * m, a.cols() * m);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      for (const auto& [k, c] : a.at(i, j).terms()) {
        const Eigen::MatrixXcd block = v.action(phi.lattice_value(a.group(), k));
        for (std::size_t p = 0; p < m; ++p) {
          for (std::size_t q = 0; q < m; ++q) {
            out.at(i * m + p, j * m + q).add_term(k, c * block(p, q));
          }
        }
      }
    }
  }
  return out;
}

double theta(const BasedRepresentation& v, const std::set<GroupElementKey>& s) {
  if (s.empty()) throw InvalidInput("theta: empty support set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& key : s) best = std::min(best, std::abs(v.action(as_vector(key)).determinant()));
  return best;
}

double nu(const BasedRepresentation& v, const std::set<GroupElementKey>& s) { return std::exp(log_nu(v, s)); }

double log_theta(const BasedRepresentation& v, const std::set<GroupElementKey>& s) {
  if (s.empty()) throw InvalidInput("theta: empty support set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& key : s) best = std::min(best, log_abs_det_action(v, as_vector(key)));
  return best;
}

double log_nu(const BasedRepresentation& v, const std::set<GroupElementKey>& s) {
  if (s.empty()) throw InvalidInput("nu: empty support set");
  const int d = v.rank();
  std::int64_t big_m = 1;
  for (const auto& key : s) {
    if (static_cast<int>(key.size()) != d) throw DimensionMismatch("nu: key length does not match rank");
    for (auto x : key.data) big_m = std::max<std::int64_t>(big_m, std::abs(x));
  }
  std::vector<std::int64_t> corner(d);
  double acc = 0.0;
  for (int l = 0; l < d; ++l) {
    const double delta = std::abs(v.actions()[l].determinant());
    const int eps = delta >= 1.0 ? 1 : -1;
    corner[l] = eps * (big_m + 1);
    acc -= static_cast<double>(eps) * 2.0 * static_cast<double>(big_m) * std::log(delta);
  }
  acc -= static_cast<double>(v.dim()) * std::log(operator_norm(v.action(corner)));
  return acc;
}

double log_abs_det_action(const BasedRepresentation& v, const std::vector<std::int64_t>& s) {
  // Sum of per-generator terms keeps the homomorphism property exact up to rounding.
  if (static_cast<int>(s.size()) != v.rank()) throw DimensionMismatch("log_abs_det_action: wrong key length");
  double out = 0.0;
  for (std::size_t l = 0; l < s.size(); ++l) {
    if (s[l] != 0) out += static_cast<double>(s[l]) * std::log(std::abs(v.actions()[l].determinant()));
  }
  return out;
}

int twist_dim(const Twist& twist) {
  if (const auto* r = std::get_if<RepresentationTwist>(&twist)) return r->v.dim();
  return 1;
}

Eigen::MatrixXcd twist_block(const Twist& twist, const Group& group, const GroupElementKey& key) {
  if (const auto* s = std::get_if<ScalarTwist>(&twist)) {
    const double p = s->phi.real_value(group, key);
    const double f = p == std::nearbyint(p) ? std::pow(s->t, p) : std::exp(p * std::log(s->t));
    return Eigen::MatrixXcd::Constant(1, 1, f);
  }
  if (const auto* r = std::get_if<RepresentationTwist>(&twist)) {
    return r->v.action(r->phi.lattice_value(group, key));
  }
  return Eigen::MatrixXcd::Identity(1, 1);
}

GroupRingMatrix apply_twist(const GroupRingMatrix& a, const Twist& twist) {
  if (const auto* s = std::get_if<ScalarTwist>(&twist)) return twist_scalar(a, s->phi, TwistParameter(s->t));
  if (const auto* r = std::get_if<RepresentationTwist>(&twist)) return twist_rep(a, r->phi, r->v);
  return a;
}

}  // namespace l2twist
