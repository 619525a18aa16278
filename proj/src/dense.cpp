#include "l2twist/dense.hpp"

#include <cmath>

namespace l2twist {

Complex ipow(Complex z, std::int64_t n) {
  if (n < 0) return Complex(1.0) / ipow(z, -n);
  Complex r = 1.0;
  while (n > 0) {
    if (n & 1) r *= z;
    n >>= 1;
    if (n) z *= z;
  }
  return r;
}

Eigen::MatrixXcd evaluate(const GroupRingMatrix& a, std::span<const Complex> z) {
  if (!a.group().is_abelian()) throw InvalidInput("evaluate: only matrices over Z^d can be evaluated");
  if (z.size() != static_cast<std::size_t>(a.group().generator_count())) {
    throw DimensionMismatch("evaluate: point has wrong dimension");
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      Complex s = 0.0;
      for (const auto& [k, c] : a.at(i, j).terms()) {
        Complex mono = c;
        for (std::size_t l = 0; l < k.size(); ++l) {
          if (k[l] != 0) mono *= ipow(z[l], k[l]);
        }
        s += mono;
      }
      m(i, j) = s;
    }
  }
  return m;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  if (std::min(m.rows(), m.cols()) <= 16) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues();
  }
  // complex BDCSVD in Eigen 3.4.0 misreports some block-diagonal spectra;
  // the real embedding [Re -Im; Im Re] doubles every singular value instead
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m.real());
    return svd.singularValues();
  }
  const Eigen::Index r = m.rows(), c = m.cols();
  Eigen::MatrixXd real(2 * r, 2 * c);
  real << m.real(), -m.imag(), m.imag(), m.real();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(real);
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::VectorXd out(s.size() / 2);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = 0.5 * (s[2 * i] + s[2 * i + 1]);
  return out;
}

std::size_t numerical_rank(const Eigen::MatrixXcd& m, double rel_tol) {
  const auto sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rel_tol * sv(0) * static_cast<double>(std::max(m.rows(), m.cols()));
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++r;
  }
  return r;
}

}  // namespace l2twist
