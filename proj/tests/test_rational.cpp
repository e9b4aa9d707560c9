#include <algorithm>

#include <gtest/gtest.h>

#include "iop/errors.hpp"
#include "iop/rational.hpp"
#include "support/random.hpp"

using namespace iop;
using iop::testing::Sampler;

namespace {

const Domain kZ = Domain::discrete;

RationalFunction tf(Polynomial num, Polynomial den) { return RationalFunction(std::move(num), std::move(den)); }

RationalMatrix scalar(const RationalFunction& f, Domain d = kZ) {
  RationalMatrix m(1, 1, d);
  m(0, 0) = f;
  return m;
}

void expect_poly_near(const Polynomial& a, const Polynomial& b, double tol = 1e-12) {
  ASSERT_EQ(a.degree(), b.degree());
  for (int k = 0; k <= a.degree(); ++k) EXPECT_NEAR(a.coeff(k), b.coeff(k), tol);
}

std::vector<double> sorted_real(const std::vector<Complex>& v) {
  std::vector<double> out;
  for (const Complex& c : v) out.push_back(c.real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(RationalFunction, DenominatorIsMonicAndZeroRejected) {
  const RationalFunction f = tf({2.0}, {-4.0, 2.0});
  expect_poly_near(f.num(), Polynomial{1.0});
  expect_poly_near(f.den(), Polynomial({-2.0, 1.0}));
  EXPECT_THROW(tf({1.0}, Polynomial{}), std::invalid_argument);
}

TEST(RationalFunction, CommonRootsCancel) {
  const RationalFunction f = tf(Polynomial({-2.0, 1.0}), Polynomial::from_roots(std::vector<Complex>{2.0, 0.0}));
  expect_poly_near(f.num(), Polynomial{1.0});
  expect_poly_near(f.den(), Polynomial({0.0, 1.0}));
}

TEST(RationalMatrix, AddLikeDenominators) {
  const auto a = scalar(tf({1.0}, {-0.5, 1.0}));
  const auto sum = a + a;
  expect_poly_near(sum(0, 0).num(), Polynomial{2.0});
  expect_poly_near(sum(0, 0).den(), Polynomial({-0.5, 1.0}));
}

TEST(RationalMatrix, AddZeroIsIdentity) {
  const auto a = scalar(tf({1.0, 3.0}, {-0.5, 0.2, 1.0}));
  const auto sum = a + RationalMatrix::zero(1, 1, kZ);
  EXPECT_EQ(max_residual(sum, a), 0.0);
}

TEST(RationalMatrix, AddCrossMultiplies) {
  // 1/(z - 0.5) + 1/(z - 2) = (2z - 2.5) / ((z - 0.5)(z - 2)), by hand.
  const auto sum = scalar(tf({1.0}, {-0.5, 1.0})) + scalar(tf({1.0}, {-2.0, 1.0}));
  expect_poly_near(sum(0, 0).num(), Polynomial({-2.5, 2.0}));
  expect_poly_near(sum(0, 0).den(), Polynomial({1.0, -2.5, 1.0}));
}

TEST(RationalMatrix, MultiplyIdentityAndCancellation) {
  const auto a = scalar(tf({1.0, 1.0}, {0.25, 0.0, 1.0}));
  EXPECT_EQ(max_residual(RationalMatrix::identity(1, kZ) * a, a), 0.0);
  // (z - 2)/z * 1/(z - 2) = 1/z.
  const auto prod = scalar(tf({-2.0, 1.0}, {0.0, 1.0})) * scalar(tf({1.0}, {-2.0, 1.0}));
  expect_poly_near(prod(0, 0).num(), Polynomial{1.0});
  expect_poly_near(prod(0, 0).den(), Polynomial({0.0, 1.0}));
  const auto scaled = RationalFunction(2.0) * scalar(tf({1.0}, {-0.5, 1.0}));
  expect_poly_near(scaled(0, 0).num(), Polynomial{2.0});
}

TEST(RationalMatrix, DimensionAndDomainMismatchThrow) {
  const auto a = RationalMatrix::identity(2, kZ);
  EXPECT_THROW(a + RationalMatrix::identity(3, kZ), DimensionError);
  EXPECT_THROW(a + RationalMatrix::identity(2, Domain::continuous), DomainMismatchError);
  EXPECT_THROW(a * RationalMatrix::zero(3, 1, kZ), DimensionError);
}

TEST(RationalMatrix, InverseExamples) {
  EXPECT_EQ(max_residual(inverse(RationalMatrix::identity(1, kZ)), RationalMatrix::identity(1, kZ)), 0.0);
  const auto inv = inverse(scalar(tf({-2.0, 1.0}, {0.0, 1.0})));
  expect_poly_near(inv(0, 0).num(), Polynomial({0.0, 1.0}));
  expect_poly_near(inv(0, 0).den(), Polynomial({-2.0, 1.0}));

  RationalMatrix upper = RationalMatrix::identity(2, kZ);
  upper(0, 1) = tf({1.0}, {-2.0, 1.0});
  RationalMatrix expected = RationalMatrix::identity(2, kZ);
  expected(0, 1) = tf({-1.0}, {-2.0, 1.0});
  EXPECT_LT(max_residual(inverse(upper), expected), 1e-12);
  EXPECT_LT(max_residual(upper * inverse(upper), RationalMatrix::identity(2, kZ)), 1e-12);
}

TEST(RationalMatrix, SingularInverseThrows) {
  RationalMatrix m(2, 2, kZ);
  const RationalFunction f = tf({1.0}, {-0.5, 1.0});
  m(0, 0) = f;
  m(0, 1) = f;
  m(1, 0) = f;
  m(1, 1) = f;
  EXPECT_THROW(inverse(m), SingularMatrixError);
}

TEST(RationalMatrix, PolesExamples) {
  EXPECT_EQ(sorted_real(poles(scalar(tf({1.0}, {-2.0, 1.0})))), std::vector<double>{2.0});
  EXPECT_TRUE(poles(RationalMatrix::constant(Eigen::MatrixXd::Ones(2, 2), kZ)).empty());
  const auto p = sorted_real(poles(scalar(tf({1.0}, {1.0, -2.5, 1.0}))));
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  EXPECT_NEAR(p[1], 2.0, 1e-12);
}

TEST(RationalMatrix, StabilityExamples) {
  EXPECT_TRUE(is_stable(scalar(tf({1.0}, {-0.5, 1.0}))));
  EXPECT_FALSE(is_stable(scalar(tf({1.0}, {-2.0, 1.0}))));
  EXPECT_FALSE(is_stable(scalar(tf({1.0}, {-1.0, 1.0}), Domain::continuous)));
  // Poles on the boundary count as unstable.
  EXPECT_FALSE(is_stable(scalar(tf({1.0}, {-1.0, 1.0}))));
  EXPECT_FALSE(is_stable(scalar(tf({1.0}, {0.0, 1.0}), Domain::continuous)));
}

TEST(RationalMatrix, PropernessExamples) {
  EXPECT_EQ(properness_class(scalar(tf({1.0}, {-2.0, 1.0}))), Properness::strictly_proper);
  EXPECT_EQ(properness_class(scalar(tf({-2.0, 1.0}, {0.0, 1.0}))), Properness::proper);
  EXPECT_EQ(properness_class(scalar(tf({0.0, 0.0, 1.0}, {-1.0, 1.0}))), Properness::improper);
}

TEST(RationalProperty, AdditionAndMultiplicationAssociate) {
  Sampler rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const Domain d = trial % 2 ? kZ : Domain::continuous;
    const auto A = rng.stable_matrix(d, 2, 2, 1, false);
    const auto B = rng.stable_matrix(d, 2, 2, 1, true);
    const auto C = rng.stable_matrix(d, 2, 2, 2, false);
    EXPECT_LT(max_residual((A + B) + C, A + (B + C)), 1e-9);
    EXPECT_LT(max_residual(A * (B * C), (A * B) * C), 1e-9);
  }
}

TEST(RationalProperty, InverseTimesMatrixIsIdentity) {
  Sampler rng(202);
  for (int trial = 0; trial < 40; ++trial) {
    const Domain d = trial % 2 ? kZ : Domain::continuous;
    const auto A = RationalMatrix::identity(2, d) + rng.stable_matrix(d, 2, 2, 1, true);
    EXPECT_LT(max_residual(A * inverse(A), RationalMatrix::identity(2, d)), 1e-9);
  }
}

TEST(RationalProperty, PolesInvariantUnderCommonFactor) {
  Sampler rng(303);
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial num = rng.polynomial(1);
    const Polynomial den = Polynomial::from_roots(std::vector<Complex>{rng.stable_pole(kZ), rng.unstable_pole(kZ)});
    const Polynomial extra = Polynomial::from_roots(std::vector<Complex>{rng.uniform(-3, 3)});
    const auto plain = sorted_real(poles(scalar(tf(num, den))));
    const auto padded = sorted_real(poles(scalar(tf(num * extra, den * extra))));
    ASSERT_EQ(plain.size(), padded.size());
    for (std::size_t i = 0; i < plain.size(); ++i) EXPECT_NEAR(plain[i], padded[i], 1e-7);
  }
}

TEST(RationalProperty, StableSetClosedUnderProduct) {
  Sampler rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    const Domain d = trial % 2 ? kZ : Domain::continuous;
    const auto A = rng.stable_matrix(d, 2, 3, 2, false);
    const auto B = rng.stable_matrix(d, 3, 2, 1, true);
    ASSERT_TRUE(is_stable(A));
    ASSERT_TRUE(is_stable(B));
    EXPECT_TRUE(is_stable(A * B));
  }
}

TEST(RationalMatrix, EvaluateMatchesEntrywiseEvaluation) {
  Sampler rng(7);
  const auto A = rng.stable_matrix(kZ, 2, 3, 2, false);
  const Complex z(0.3, 1.1);
  const Eigen::MatrixXcd v = A.evaluate(z);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(v(i, j) - A(i, j)(z)), 0.0, 1e-12);
}

TEST(RationalMatrix, BlocksAndTranspose) {
  const auto I = RationalMatrix::identity(1, kZ);
  const auto Z = RationalMatrix::zero(1, 1, kZ);
  const auto g = scalar(tf({1.0}, {-2.0, 1.0}));
  const auto big = RationalMatrix::blocks(I, g, Z, I);
  EXPECT_EQ(big.rows(), 2);
  EXPECT_EQ(max_residual(big.block(0, 1, 1, 1), g), 0.0);
  EXPECT_EQ(max_residual(big.transpose().block(1, 0, 1, 1), g), 0.0);
}
