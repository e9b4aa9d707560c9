#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace iop {

using Complex = std::complex<double>;

// Real polynomial stored with ascending powers of the domain variable.
// The zero polynomial has no coefficients and degree -1; otherwise the
// highest stored coefficient is nonzero.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs);

  static Polynomial constant(double c);
  static Polynomial monomial(int power, double c = 1.0);
  // (x + shift)^power.
  static Polynomial shifted_power(double shift, int power);
  // Monic polynomial with the given roots. Non-real roots must come in
  // conjugate pairs; the imaginary residue of the expansion is dropped.
  static Polynomial from_roots(std::span<const Complex> roots);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<double>& coeffs() const { return c_; }
  double coeff(int power) const;
  double leading() const;
  double max_abs() const;
  // Multiplicity of the root at the origin (count of exact zero low-order
  // coefficients).
  int valuation() const;

  double operator()(double x) const;
  Complex operator()(Complex x) const;
  Polynomial derivative() const;

  // Roots via eigenvalues of the balanced companion matrix, followed by a
  // guarded Newton polish. Exact roots at the origin are split off first.
  std::vector<Complex> roots() const;

  // Quotient after dividing out (x - root); a non-real root divides out the
  // real quadratic of the conjugate pair. The remainder is discarded.
  Polynomial deflated(Complex root) const;

  // Euclidean division. Throws std::domain_error on a zero divisor.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
  friend Polynomial operator*(Polynomial lhs, double s) { return lhs *= s; }
  friend Polynomial operator*(double s, Polynomial rhs) { return rhs *= s; }
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);

  bool operator==(const Polynomial&) const = default;

 private:
  void trim();
  std::vector<double> c_;
};

// Convolution of absolute coefficient values; a rounding-error scale for the
// product lhs * rhs.
std::vector<double> abs_product(const Polynomial& lhs, const Polynomial& rhs);

}  // namespace iop
