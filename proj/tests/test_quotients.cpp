#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "helpers.hpp"
#include "l2twist/dense.hpp"
#include "l2twist/mahler.hpp"
#include "l2twist/quotients.hpp"

using namespace l2twist;
using l2twist::test::mat;

namespace {

std::vector<std::size_t> cycle(std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = (i + 1) % n;
  return p;
}

// S_3 acting on its six elements by right multiplication with s = (0 1) and
// r = (0 1 2).
FiniteQuotient s3() {
  std::vector<std::array<int, 3>> el;
  std::array<int, 3> p{0, 1, 2};
  do el.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  auto index = [&](const std::array<int, 3>& q) {
    return static_cast<std::size_t>(std::find(el.begin(), el.end(), q) - el.begin());
  };
  auto compose = [](const std::array<int, 3>& a, const std::array<int, 3>& b) {
    std::array<int, 3> c{};
    for (int i = 0; i < 3; ++i) c[i] = b[a[i]];
    return c;
  };
  const std::array<int, 3> s{1, 0, 2}, r{1, 2, 0};
  std::vector<std::size_t> gs(6), gr(6);
  for (std::size_t i = 0; i < 6; ++i) {
    gs[i] = index(compose(el[i], s));
    gr[i] = index(compose(el[i], r));
  }
  return FiniteQuotient::from_permutations({gs, gr});
}

}  // namespace

TEST(FiniteQuotient, Validation) {
  EXPECT_THROW(FiniteQuotient::from_permutations({{0, 0, 1}}), InvalidInput);
  // not transitive
  EXPECT_THROW(FiniteQuotient::from_permutations({{1, 0, 3, 2}}), InvalidInput);
  // transitive but not free: S_3 acting on three points
  EXPECT_THROW(FiniteQuotient::from_permutations({{1, 0, 2}, {1, 2, 0}}), InvalidInput);
  EXPECT_EQ(s3().order(), 6u);
  EXPECT_EQ(FiniteQuotient::abelian({4, 3}).order(), 12u);
  // declared abelian structure must match the permutations
  EXPECT_THROW(FiniteQuotient::from_permutations({cycle(4)}, std::vector<std::int64_t>{2, 2}), InvalidInput);
}

TEST(FiniteQuotient, QuotientOfGroup) {
  const auto q = s3();
  q.check_quotient_of(Group::presented(2, {{1, 1}, {2, 2, 2}, {1, 2, 1, 2}}));
  EXPECT_THROW(q.check_quotient_of(Group::presented(2, {{1, 2, -1, -2}})), InvalidInput);
  EXPECT_THROW(q.check_quotient_of(Group::abelian(2)), InvalidInput);
  EXPECT_THROW(q.check_quotient_of(Group::presented(3, {})), InvalidInput);
}

TEST(FiniteQuotient, AbelianAction) {
  const auto q = FiniteQuotient::abelian({4, 3});
  const Group g = Group::abelian(2);
  EXPECT_EQ(q.act(0, g, GroupElementKey{1, 0}), 1u);
  EXPECT_EQ(q.act(0, g, GroupElementKey{0, 1}), 4u);
  EXPECT_EQ(q.act(0, g, GroupElementKey{-1, -1}), 3u + 8u);
  EXPECT_THROW(QuotientTower({FiniteQuotient::abelian({8}), FiniteQuotient::abelian({4})}), InvalidInput);
}

TEST(RegularRep, ShiftMatrix) {
  const auto q = FiniteQuotient::abelian({5});
  const auto m = regular_rep_matrix(mat(1, {{"z"}}), q, {}, {true}).dense();
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(5, 5);
  for (int i = 0; i < 5; ++i) p(i, (i + 1) % 5) = 1.0;
  EXPECT_LT((m - p).norm(), 1e-15);
}

TEST(RegularRep, FastPathMatchesGenericSpectrum) {
  const auto a = mat(2, {{"x-2", "y"}, {"x*y^-1", "3-y"}});
  const auto q = FiniteQuotient::abelian({4, 6});
  const auto fast = regular_rep_matrix(a, q);
  const auto slow = regular_rep_matrix(a, q, {}, {true});
  EXPECT_GT(fast.blocks.size(), 1u);
  EXPECT_EQ(slow.blocks.size(), 1u);
  EXPECT_NEAR(reg_logdet(fast), reg_logdet(slow), 1e-10);
  EXPECT_NEAR(vn_dim_ker(fast), vn_dim_ker(slow), 1e-12);
  const auto sf = singular_values(fast.dense()), ss = singular_values(slow.dense());
  EXPECT_LT((sf - ss).norm(), 1e-10);
}

TEST(RegularRep, CirculantDeterminants) {
  // det over Z/N of 2z - 1 is 2^N - 1 up to sign; z - 1 has one-dimensional kernel
  // and the product of its nonzero eigenvalue moduli is N.
  for (std::int64_t n : {3, 8, 17}) {
    const auto q = FiniteQuotient::abelian({n});
    const auto a = regular_rep_matrix(mat(1, {{"2z-1"}}), q);
    EXPECT_NEAR(reg_logdet(a), std::log(std::pow(2.0, n) - 1.0) / n, 1e-12);
    EXPECT_EQ(vn_dim_ker(a), 0.0);
    const auto b = regular_rep_matrix(mat(1, {{"z-1"}}), q);
    EXPECT_NEAR(vn_dim_ker(b), 1.0 / n, 1e-15);
    EXPECT_NEAR(reg_logdet(b), std::log(static_cast<double>(n)) / n, 1e-12);
  }
}

TEST(RegularRep, PresentedGroupThroughS3) {
  const Group g = Group::presented(2, {{1, 1}, {2, 2, 2}, {1, 2, 1, 2}});
  GroupRingMatrix a(g, 1, 1);
  GroupRingElement x;
  x.add_term(GroupElementKey{}, 1.0);
  x.add_term(GroupElementKey{1}, 1.0);
  a.set(0, 0, x);
  // 1 + s with s an involution: eigenvalues 2 (x3) and 0 (x3)
  const auto m = regular_rep_matrix(a, s3());
  EXPECT_NEAR(vn_dim_ker(m), 0.5, 1e-12);
  EXPECT_NEAR(reg_logdet(m), 0.5 * std::log(2.0), 1e-12);
}

TEST(RegularRep, TwistedByRepresentation) {
  const auto a = mat(1, {{"z-3"}});
  const Twist tw = RepresentationTwist{Character::identity(1), BasedRepresentation::scalar({0.5})};
  const auto q = FiniteQuotient::abelian({16});
  const auto m = regular_rep_matrix(a, q, tw);
  // det(0.5 P - 3) over Z/16 = 3^16 - 0.5^16 in modulus
  EXPECT_NEAR(reg_logdet(m), std::log(std::pow(3.0, 16) - std::pow(0.5, 16)) / 16.0, 1e-12);
}

TEST(Approx, ConvergesToMahlerMeasure) {
  const auto a = mat(1, {{"2z-1"}});
  const auto r = approx_sequence(a, QuotientTower::cyclic(1, {16, 64, 256, 1024}));
  ASSERT_EQ(r.levels.size(), 4u);
  for (const auto& l : r.levels) EXPECT_LE(l.reg_logdet, std::log(2.0) + 1e-12);
  EXPECT_NEAR(r.limsup_estimate, std::log(2.0), 1e-6);
  EXPECT_TRUE(r.dims_stable);
  const auto b = approx_sequence(mat(2, {{"1+x+y"}}), QuotientTower::cyclic(2, {32, 64, 128}), {}, {64.0, 4, false});
  EXPECT_NEAR(b.levels.back().reg_logdet, mahler_quadrature(parse_polynomial("1+x+y"), 1024).value, 1e-3);
}

TEST(Approx, ThreadsGiveIdenticalResults) {
  const auto a = mat(2, {{"x-2", "y"}, {"1", "x+y"}});
  const auto t = QuotientTower::cyclic(2, {4, 6, 8});
  const auto r1 = approx_sequence(a, t, {}, {64.0, 1, false});
  const auto r4 = approx_sequence(a, t, {}, {64.0, 4, false});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r1.levels[i].reg_logdet, r4.levels[i].reg_logdet);
}

TEST(BoundCertificate, BracketsExactValue) {
  const auto a = mat(2, {{"x-2", "y"}, {"1", "x+y"}});
  Eigen::MatrixXcd r1(2, 2), r2(2, 2);
  r1 << 2, 0, 0, 0.5;
  r2 << 3, 0, 0, 1;
  const BasedRepresentation v({r1, r2});
  const auto cert = bound_certificate(a, Character::identity(2), v, 0.0, true);
  const auto exact = det_matrix_over_Zd(twist_rep(a, Character::identity(2), v)).logdet;
  EXPECT_LE(cert.lower, exact.value);
  EXPECT_GE(cert.upper, exact.value);
  ASSERT_TRUE(cert.theta_lower);
  EXPECT_GE(*cert.theta_lower, cert.lower);
  EXPECT_THROW(bound_certificate(a, Character::identity(2), v, 3.0), InvalidInput);
  EXPECT_THROW(bound_certificate(a, Character::real({1, 1}), v, 0.0), DimensionMismatch);
}

TEST(BoundCertificate, UpperBoundNeedsDimensionFactor) {
  // A = [z], V = 4 I_3: det = 4^3 exceeds ||A||_1 ||4 I|| = 4.
  const auto a = mat(1, {{"z"}});
  const BasedRepresentation v({Eigen::MatrixXcd::Identity(3, 3) * 4.0});
  const auto cert = bound_certificate(a, Character::identity(1), v, 0.0);
  const auto exact = det_matrix_over_Zd(twist_rep(a, Character::identity(1), v)).logdet.value;
  EXPECT_NEAR(exact, 3.0 * std::log(4.0), 1e-12);
  EXPECT_LE(exact, cert.upper + 1e-12);
  EXPECT_GT(exact, std::log(4.0));
}

TEST(Semicontinuity, DiagonalFamily) {
  std::vector<Eigen::MatrixXcd> fam;
  for (int j = 1; j <= 20; ++j) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = std::ldexp(1.0, -j);
    m(1, 1) = 2.0;
    fam.push_back(m);
  }
  Eigen::MatrixXcd limit = Eigen::MatrixXcd::Zero(2, 2);
  limit(1, 1) = 2.0;
  const auto rep = semicontinuity_check(fam, limit);
  EXPECT_TRUE(rep.ok) << rep.message;
  EXPECT_NEAR(rep.limit_dim, 1.0, 1e-15);
  EXPECT_EQ(rep.limit_det, 0.0);
  EXPECT_EQ(rep.limsup_dim, 0.0);
  std::reverse(fam.begin(), fam.end());
  EXPECT_THROW(semicontinuity_check(fam, limit), InvalidInput);
}

TEST(Semicontinuity, RegularDeterminant) {
  Eigen::MatrixXcd m(2, 2);
  m << 2, 0, 0, 3;
  EXPECT_NEAR(regular_det(m), 6.0, 1e-12);
  EXPECT_NEAR(regular_det(m, 2), std::sqrt(6.0), 1e-12);
  m(1, 1) = 0;
  EXPECT_EQ(regular_det(m), 0.0);
}
