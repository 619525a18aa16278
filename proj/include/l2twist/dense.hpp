#pragma once

#include <Eigen/Dense>
#include <span>

#include "l2twist/grouprings.hpp"

namespace l2twist {

/// z^n by repeated squaring; negative n inverts.
Complex ipow(Complex z, std::int64_t n);

/// Evaluates a matrix over C[Z^d] at a point of (C^*)^d.
Eigen::MatrixXcd evaluate(const GroupRingMatrix& a, std::span<const Complex> z);

/// Singular values in decreasing order.
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m);

/// Number of singular values above rel_tol * sigma_max.
std::size_t numerical_rank(const Eigen::MatrixXcd& m, double rel_tol = 1e-9);

}  // namespace l2twist
