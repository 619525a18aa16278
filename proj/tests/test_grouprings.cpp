#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "l2twist/grouprings.hpp"

using namespace l2twist;
using l2twist::test::el;
using l2twist::test::mat;

TEST(Group, AbelianArithmetic) {
  const Group g = Group::abelian(2);
  const GroupElementKey a{1, -2}, b{3, 5};
  EXPECT_EQ(g.multiply(a, b), (GroupElementKey{4, 3}));
  EXPECT_EQ(g.multiply(a, g.inverse(a)), g.identity());
  EXPECT_EQ(g.generator(1), (GroupElementKey{0, 1}));
  EXPECT_THROW(g.validate(GroupElementKey{1}), InvalidInput);
}

TEST(Group, PresentedWordsAreFreelyReduced) {
  const Group g = Group::presented(2, {{1, 2, -1, -2}});
  const GroupElementKey a{1, 2}, b{-2, -1, 2};
  EXPECT_EQ(g.multiply(a, b), (GroupElementKey{2}));
  EXPECT_EQ(g.multiply(a, g.inverse(a)), g.identity());
  EXPECT_EQ(free_reduce({1, -1, 2, 2, -2}), (std::vector<std::int64_t>{2}));
  EXPECT_EQ(g.exponent_sums(GroupElementKey{1, 2, 1, -2}), (std::vector<std::int64_t>{2, 0}));
  EXPECT_THROW(g.validate(GroupElementKey{3}), InvalidInput);
  EXPECT_THROW(g.validate(GroupElementKey{0}), InvalidInput);
  EXPECT_THROW(Group::presented(2, {{1, 5}}), InvalidInput);
}

TEST(GroupRing, ElementProductMatchesPolynomialProduct) {
  const Group g = Group::abelian(1);
  const auto p = multiply(g, el("z-1", 1), el("z+1", 1));
  EXPECT_EQ(p, el("z^2-1", 1));
  EXPECT_DOUBLE_EQ(el("3z^2-2z^-1+1", 1).l1_norm(), 6.0);
  EXPECT_TRUE(el("3z-1", 1).has_integer_coefficients());
  EXPECT_FALSE(el("0.5z", 1).has_integer_coefficients());
}

TEST(GroupRing, ZeroCoefficientsArePruned) {
  GroupRingElement x;
  x.add_term(GroupElementKey{1}, 2.0);
  x.add_term(GroupElementKey{1}, -2.0);
  EXPECT_TRUE(x.is_zero());
}

TEST(GroupRing, InvolutionInvertsKeysAndConjugates) {
  const Group g = Group::abelian(1);
  GroupRingElement x;
  x.add_term(GroupElementKey{2}, Complex(1.0, 2.0));
  const auto y = involution(g, x);
  EXPECT_EQ(y.coefficient(GroupElementKey{-2}), Complex(1.0, -2.0));
  EXPECT_EQ(involution(g, y), x);
}

TEST(GroupRingMatrix, OneNormAndSupport) {
  const auto a = mat(2, {{"x-1", "2y"}, {"0", "x*y+3"}});
  // r s max ||a_ij||_1 = 2 * 2 * 4
  EXPECT_DOUBLE_EQ(one_norm(a), 16.0);
  const auto s = support(a);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_TRUE(s.count(GroupElementKey{1, 1}));
  EXPECT_TRUE(a.integer_exact());
}

TEST(GroupRingMatrix, ProductIsAssociativeAndAdjointReversesOrder) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3), expo(-2, 2);
  const Group g = Group::presented(2, {});
  auto random_matrix = [&](std::size_t r, std::size_t s) {
    GroupRingMatrix m(g, r, s);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < s; ++j) {
        GroupRingElement x;
        for (int t = 0; t < 3; ++t) {
          std::vector<std::int64_t> w;
          for (int l = 0; l < 3; ++l) {
            const int e = expo(rng);
            if (e != 0) w.push_back(e > 0 ? 1 + (l % 2) : -(1 + (l % 2)));
          }
          x.add_term(GroupElementKey(free_reduce(w)), coef(rng));
        }
        m.set(i, j, x);
      }
    return m;
  };
  const auto a = random_matrix(2, 3), b = random_matrix(3, 2), c = random_matrix(2, 2);
  EXPECT_EQ(mat_mul(mat_mul(a, b), c), mat_mul(a, mat_mul(b, c)));
  EXPECT_EQ(adjoint(mat_mul(a, b)), mat_mul(adjoint(b), adjoint(a)));
  EXPECT_EQ(adjoint(adjoint(a)), a);
  EXPECT_EQ(mat_add(a, mat_scale(-1.0, a)), GroupRingMatrix(g, 2, 3));
  EXPECT_THROW(mat_mul(a, a), DimensionMismatch);
}

TEST(GroupRingMatrix, IdentityIsNeutral) {
  const auto a = mat(1, {{"z-1", "2"}, {"z^3", "-z"}});
  const auto i = GroupRingMatrix::identity(Group::abelian(1), 2);
  EXPECT_EQ(mat_mul(a, i), a);
  EXPECT_EQ(mat_mul(i, a), a);
}

TEST(Homomorphism, AbelianizationPushForward) {
  const Group g = Group::presented(2, {{1, 2, -1, -2}});
  const auto ab = GroupHomomorphism::abelianization(g);
  GroupRingMatrix a(g, 1, 1);
  GroupRingElement x;
  x.add_term(GroupElementKey{1, 2, -1}, 1.0);
  x.add_term(GroupElementKey{2}, -1.0);
  a.set(0, 0, x);
  // a b a^{-1} and b have the same image
  EXPECT_TRUE(push_forward(a, ab).is_zero());
}

TEST(Character, RealValuesAndRelatorCheck) {
  const Group g = Group::presented(2, {{1, 2, -1, -2}});
  const auto phi = Character::real({1.5, -2.0});
  EXPECT_DOUBLE_EQ(phi.real_value(g, GroupElementKey{1, 1, -2}), 5.0);
  EXPECT_TRUE(check_character(phi, g).ok);

  const Group h = Group::presented(1, {{1, 1, 1}});
  const auto bad = check_character(Character::real({1.0}), h);
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.relator, std::optional<std::size_t>(0));
  EXPECT_THROW(check_character(Character::real({1.0, 2.0}), h), DimensionMismatch);
}

TEST(Character, LatticeValues) {
  const Group g = Group::abelian(2);
  const auto phi = Character::free_abelian({{1, 0, 2}, {0, 1, -1}});
  EXPECT_EQ(phi.target_dim(), 3);
  EXPECT_EQ(phi.lattice_value(g, GroupElementKey{2, 3}), (std::vector<std::int64_t>{2, 3, 1}));
  const auto id = Character::identity(2);
  EXPECT_EQ(id.lattice_value(g, GroupElementKey{-1, 4}), (std::vector<std::int64_t>{-1, 4}));
  EXPECT_DOUBLE_EQ(Character::real({2.0}).scaled(0.5).real_value(Group::abelian(1), GroupElementKey{3}), 3.0);
}
