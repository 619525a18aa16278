#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "l2twist/mahler.hpp"
#include "l2twist/twisting.hpp"

using namespace l2twist;
using l2twist::test::mat;

TEST(TwistParameter, RejectsNonPositive) {
  EXPECT_THROW(TwistParameter(0.0), InvalidInput);
  EXPECT_THROW(TwistParameter(-1.0), InvalidInput);
  EXPECT_DOUBLE_EQ(TwistParameter(3.0).value(), 3.0);
}

TEST(TwistScalar, SubstitutesTPowers) {
  const auto a = mat(1, {{"z-1", "z^-2+3"}});
  const auto phi = Character::real({1.0});
  const auto b = twist_scalar(a, phi, TwistParameter(2.0));
  EXPECT_EQ(b, mat(1, {{"2z-1", "0.25z^-2+3"}}));
  EXPECT_EQ(twist_scalar(a, phi, TwistParameter(1.0)), a);
}

TEST(TwistScalar, IsMultiplicative) {
  const auto a = mat(2, {{"x-1", "y"}, {"2", "x*y^-1"}});
  const auto b = mat(2, {{"y^2", "1-x"}, {"3x", "y+1"}});
  const auto phi = Character::real({0.5, -1.25});
  const TwistParameter t(1.7);
  const auto lhs = twist_scalar(mat_mul(a, b), phi, t);
  const auto rhs = mat_mul(twist_scalar(a, phi, t), twist_scalar(b, phi, t));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const auto diff = lhs.at(i, j) - rhs.at(i, j);
      EXPECT_LT(diff.l1_norm(), 1e-12);
    }
}

TEST(Representation, Validation) {
  Eigen::MatrixXcd a(2, 2), b(2, 2);
  a << 1, 1, 0, 1;
  b << 1, 0, 1, 1;
  EXPECT_THROW(BasedRepresentation({a, b}), InvalidInput);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2, 2);
  EXPECT_THROW(BasedRepresentation({s}), InvalidInput);
  const auto v = BasedRepresentation::direct_sum(BasedRepresentation::scalar({2.0}), BasedRepresentation::trivial(1, 2));
  EXPECT_EQ(v.dim(), 3);
  EXPECT_NEAR(std::abs(v.action({-2}).determinant()), 0.25, 1e-15);
}

TEST(TwistRep, ScalarRepresentationSubstitutes) {
  const auto a = mat(2, {{"x-1", "y+2"}});
  const auto v = BasedRepresentation::scalar({3.0, 0.5});
  const auto b = twist_rep(a, Character::identity(2), v);
  EXPECT_EQ(b, mat(2, {{"3x-1", "0.5y+2"}}));
}

TEST(TwistRep, IsAHomomorphism) {
  const auto a = mat(2, {{"x-1", "y"}, {"2", "x*y^-1"}});
  const auto b = mat(2, {{"y^2", "1-x"}, {"3x", "y+1"}});
  Eigen::MatrixXcd r1(2, 2), r2(2, 2);
  r1 << 2, 1, 0, 2;
  r2 << 1, 3, 0, 1;
  const BasedRepresentation v({r1, r2});
  const auto phi = Character::identity(2);
  const auto lhs = twist_rep(mat_mul(a, b), phi, v);
  const auto rhs = mat_mul(twist_rep(a, phi, v), twist_rep(b, phi, v));
  ASSERT_EQ(lhs.rows(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_LT((lhs.at(i, j) - rhs.at(i, j)).l1_norm(), 1e-12);
}

TEST(TwistRep, TrivialRepresentationMultipliesLogDet) {
  const auto a = mat(1, {{"2z-1", "1"}, {"z", "z+3"}});
  const auto base = det_matrix_over_Zd(a).logdet.value;
  const auto twisted = det_matrix_over_Zd(twist_rep(a, Character::identity(1), BasedRepresentation::trivial(1, 3)));
  EXPECT_NEAR(twisted.logdet.value, 3.0 * base, 1e-12);
}

TEST(TwistRep, RejectsRankMismatch) {
  const auto a = mat(2, {{"x"}});
  EXPECT_THROW(twist_rep(a, Character::identity(2), BasedRepresentation::scalar({2.0})), DimensionMismatch);
  EXPECT_THROW(twist_rep(a, Character::real({1.0, 1.0}), BasedRepresentation::scalar({2.0, 1.0})), InvalidInput);
}

TEST(Constants, ThetaAndNu) {
  const auto v = BasedRepresentation::scalar({2.0});
  const std::set<GroupElementKey> s{{1}, {-1}, {0}};
  EXPECT_DOUBLE_EQ(theta(v, s), 0.5);
  EXPECT_NEAR(log_theta(v, s), std::log(0.5), 1e-15);
  // M = 1, delta = 2: nu = ||R^2||^{-1} * 2^{-2}
  const std::set<GroupElementKey> one{{1}};
  EXPECT_NEAR(log_nu(v, one), -4.0 * std::log(2.0), 1e-14);
  EXPECT_NEAR(nu(v, one), 1.0 / 16.0, 1e-15);
  EXPECT_THROW(theta(v, {}), InvalidInput);
  EXPECT_LE(log_nu(v, s), log_theta(v, s));
}

TEST(Constants, LogAbsDetActionIsAdditive) {
  Eigen::MatrixXcd r1(2, 2), r2(2, 2);
  r1 << 3, 1, 0, 0.5;
  r2 << 0.25, 0, 0, 0.25;
  const BasedRepresentation v({r1, r2});
  const double a = log_abs_det_action(v, {2, -1}), b = log_abs_det_action(v, {-1, 3});
  EXPECT_NEAR(log_abs_det_action(v, {1, 2}), a + b, 1e-13);
  EXPECT_NEAR(a, std::log(std::abs(v.action({2, -1}).determinant())), 1e-12);
}

TEST(Twist, VariantDispatch) {
  const auto a = mat(1, {{"z-1"}});
  const Twist none{};
  EXPECT_EQ(apply_twist(a, none), a);
  EXPECT_EQ(twist_dim(none), 1);
  const Twist s = ScalarTwist{Character::real({1.0}), 2.0};
  EXPECT_EQ(apply_twist(a, s), mat(1, {{"2z-1"}}));
  const Twist r = RepresentationTwist{Character::identity(1), BasedRepresentation::trivial(1, 2)};
  EXPECT_EQ(twist_dim(r), 2);
  EXPECT_EQ(twist_block(r, Group::abelian(1), GroupElementKey{5}), Eigen::MatrixXcd::Identity(2, 2));
}
