#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "iop/polynomial.hpp"
#include "support/random.hpp"

using iop::Complex;
using iop::Polynomial;

namespace {

std::vector<Complex> sorted(std::vector<Complex> r) {
  std::sort(r.begin(), r.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return r;
}

// Roots of c0 + c1 x + c2 x^2 by the quadratic formula.
std::vector<Complex> quadratic_roots(double c0, double c1, double c2) {
  const Complex disc = std::sqrt(Complex(c1 * c1 - 4.0 * c2 * c0));
  return sorted({(-c1 + disc) / (2.0 * c2), (-c1 - disc) / (2.0 * c2)});
}

}  // namespace

TEST(Polynomial, ZeroPolynomialHasNegativeDegree) {
  EXPECT_EQ(Polynomial{}.degree(), -1);
  EXPECT_TRUE(Polynomial({0.0, 0.0}).is_zero());
  EXPECT_EQ(Polynomial({1.0, 2.0, 0.0}).degree(), 1);
}

TEST(Polynomial, ArithmeticMatchesHandExpansion) {
  const Polynomial a{1.0, 2.0};   // 1 + 2x
  const Polynomial b{-3.0, 0.0, 1.0};  // x^2 - 3
  EXPECT_EQ(a + b, Polynomial({-2.0, 2.0, 1.0}));
  EXPECT_EQ(a - a, Polynomial{});
  EXPECT_EQ(a * b, Polynomial({-3.0, -6.0, 1.0, 2.0}));
  EXPECT_EQ(2.0 * a, Polynomial({2.0, 4.0}));
}

TEST(Polynomial, EvaluationAndDerivative) {
  const Polynomial p{1.0, -2.0, 3.0};
  EXPECT_DOUBLE_EQ(p(2.0), 1.0 - 4.0 + 12.0);
  EXPECT_EQ(p.derivative(), Polynomial({-2.0, 6.0}));
  const Complex z(0.5, 1.0);
  EXPECT_NEAR(std::abs(p(z) - (1.0 - 2.0 * z + 3.0 * z * z)), 0.0, 1e-14);
}

TEST(Polynomial, ShiftedPowerIsBinomialExpansion) {
  EXPECT_EQ(Polynomial::shifted_power(3.0, 2), Polynomial({9.0, 6.0, 1.0}));
  EXPECT_EQ(Polynomial::shifted_power(0.0, 3), Polynomial::monomial(3));
}

TEST(Polynomial, DivmodReconstructsDividend) {
  iop::testing::Sampler rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial a = rng.polynomial(rng.integer(0, 6));
    const Polynomial b = rng.polynomial(rng.integer(0, 3));
    const auto [q, r] = a.divmod(b);
    EXPECT_LT(r.degree(), b.degree());
    const Polynomial back = q * b + r;
    for (int k = 0; k <= a.degree(); ++k) EXPECT_NEAR(back.coeff(k), a.coeff(k), 1e-10);
  }
  EXPECT_THROW(Polynomial({1.0}).divmod(Polynomial{}), std::domain_error);
}

TEST(Polynomial, RootsMatchQuadraticFormula) {
  iop::testing::Sampler rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const double c0 = rng.uniform(-2, 2), c1 = rng.uniform(-2, 2), c2 = rng.uniform(0.5, 2);
    const auto expected = quadratic_roots(c0, c1, c2);
    const auto got = sorted(Polynomial({c0, c1, c2}).roots());
    ASSERT_EQ(got.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(got[i] - expected[i]), 0.0, 1e-10);
  }
}

TEST(Polynomial, RootsOfProductOfKnownFactors) {
  const std::vector<Complex> roots{0.5, 2.0, -1.0, Complex(0.3, 0.4), Complex(0.3, -0.4)};
  const auto got = sorted(Polynomial::from_roots(roots).roots());
  const auto want = sorted(roots);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(std::abs(got[i] - want[i]), 0.0, 1e-10);
}

TEST(Polynomial, ExactZeroRootsAreSplitOff) {
  const Polynomial p{0.0, 0.0, -2.0, 1.0};  // x^2 (x - 2)
  EXPECT_EQ(p.valuation(), 2);
  const auto r = sorted(p.roots());
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], Complex(0.0));
  EXPECT_EQ(r[1], Complex(0.0));
  EXPECT_NEAR(r[2].real(), 2.0, 1e-14);
}

TEST(Polynomial, DeflationRemovesRealAndConjugateRoots) {
  const std::vector<Complex> roots{3.0, Complex(-1.0, 2.0), Complex(-1.0, -2.0)};
  const Polynomial p = Polynomial::from_roots(roots);
  const Polynomial q = p.deflated(3.0);
  EXPECT_EQ(q.degree(), 2);
  EXPECT_NEAR(std::abs(q(Complex(-1.0, 2.0))), 0.0, 1e-12);
  const Polynomial l = p.deflated(Complex(-1.0, 2.0));
  EXPECT_EQ(l.degree(), 1);
  EXPECT_NEAR(l(3.0), 0.0, 1e-12);
}

TEST(Polynomial, AbsProductBoundsProductCoefficients) {
  const Polynomial a{1.0, -1.0}, b{1.0, 1.0};
  const auto scale = iop::abs_product(a, b);
  const Polynomial prod = a * b;  // 1 - x^2
  ASSERT_EQ(scale.size(), 3u);
  EXPECT_DOUBLE_EQ(scale[1], 2.0);
  for (int k = 0; k <= prod.degree(); ++k) EXPECT_LE(std::abs(prod.coeff(k)), scale[static_cast<std::size_t>(k)]);
}
