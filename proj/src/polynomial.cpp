#include "iop/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace iop {

namespace {

// Parlett-Reinsch balancing; reduces the sensitivity of the companion
// eigenvalues for polynomials with widely spread coefficients.
void balance(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

template <typename T>
T horner(const std::vector<double>& c, T x) {
  T acc{0.0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Complex polish(const Polynomial& p, const Polynomial& dp, Complex r) {
  Complex value = p(r);
  for (int iter = 0; iter < 6 && std::abs(value) > 0.0; ++iter) {
    const Complex slope = dp(r);
    if (std::abs(slope) == 0.0) break;
    const Complex candidate = r - value / slope;
    const Complex next_value = p(candidate);
    if (!(std::abs(next_value) < std::abs(value))) break;
    r = candidate;
    value = next_value;
  }
  return r;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial::Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }

Polynomial Polynomial::constant(double c) { return Polynomial(std::vector<double>{c}); }

Polynomial Polynomial::monomial(int power, double c) {
  if (power < 0) throw std::invalid_argument("Polynomial::monomial: negative power");
  std::vector<double> coeffs(static_cast<std::size_t>(power) + 1, 0.0);
  coeffs.back() = c;
  return Polynomial(std::move(coeffs));
}

Polynomial Polynomial::shifted_power(double shift, int power) {
  if (power < 0) throw std::invalid_argument("Polynomial::shifted_power: negative power");
  std::vector<double> coeffs(static_cast<std::size_t>(power) + 1, 0.0);
  // Binomial expansion, built row by row of Pascal's triangle.
  coeffs[0] = 1.0;
  for (int k = 1; k <= power; ++k) {
    for (int j = k; j >= 1; --j) coeffs[j] = coeffs[j - 1] + shift * coeffs[j];
    coeffs[0] *= shift;
  }
  return Polynomial(std::move(coeffs));
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots) {
  std::vector<Complex> acc{Complex{1.0}};
  acc.reserve(roots.size() + 1);
  for (const Complex& r : roots) {
    acc.push_back(Complex{0.0});
    for (std::size_t j = acc.size() - 1; j >= 1; --j) acc[j] = acc[j - 1] - r * acc[j];
    acc[0] = -r * acc[0];
  }
  std::vector<double> coeffs(acc.size());
  std::transform(acc.begin(), acc.end(), coeffs.begin(), [](Complex c) { return c.real(); });
  return Polynomial(std::move(coeffs));
}

double Polynomial::coeff(int power) const {
  if (power < 0 || power >= static_cast<int>(c_.size())) return 0.0;
  return c_[static_cast<std::size_t>(power)];
}

double Polynomial::leading() const { return c_.empty() ? 0.0 : c_.back(); }

double Polynomial::max_abs() const {
  double m = 0.0;
  for (double c : c_) m = std::max(m, std::abs(c));
  return m;
}

int Polynomial::valuation() const {
  int k = 0;
  while (k < static_cast<int>(c_.size()) && c_[static_cast<std::size_t>(k)] == 0.0) ++k;
  return k;
}

double Polynomial::operator()(double x) const { return horner(c_, x); }

Complex Polynomial::operator()(Complex x) const { return horner(c_, x); }

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

std::vector<Complex> Polynomial::roots() const {
  if (is_zero()) throw std::domain_error("Polynomial::roots: zero polynomial");
  const int zeros = valuation();
  std::vector<Complex> out(static_cast<std::size_t>(zeros), Complex{0.0});
  const Polynomial reduced(std::vector<double>(c_.begin() + zeros, c_.end()));
  const int n = reduced.degree();
  if (n == 0) return out;
  if (n == 1) {
    out.emplace_back(-reduced.c_[0] / reduced.c_[1]);
    return out;
  }

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -reduced.c_[static_cast<std::size_t>(i)] / reduced.leading();
  balance(companion);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Polynomial::roots: eigenvalue iteration failed");

  const auto& ev = solver.eigenvalues();
  const Polynomial dp = reduced.derivative();
  std::vector<Complex> found(ev.data(), ev.data() + ev.size());
  std::vector<bool> done(found.size(), false);
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (done[i]) continue;
    done[i] = true;
    if (found[i].imag() == 0.0) {
      const double x = found[i].real();
      found[i] = polish(reduced, dp, Complex{x, 0.0});
      found[i] = Complex{found[i].real(), 0.0};
      continue;
    }
    // Keep conjugate pairs exact.
    std::size_t partner = found.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < found.size(); ++j) {
      if (done[j]) continue;
      const double d = std::abs(found[j] - std::conj(found[i]));
      if (d < best) {
        best = d;
        partner = j;
      }
    }
    Complex upper = found[i].imag() > 0.0 ? found[i] : std::conj(found[i]);
    upper = polish(reduced, dp, upper);
    if (upper.imag() < 0.0) upper = std::conj(upper);
    found[i] = upper;
    if (partner < found.size()) {
      found[partner] = std::conj(upper);
      done[partner] = true;
    }
  }
  out.insert(out.end(), found.begin(), found.end());
  return out;
}

Polynomial Polynomial::deflated(Complex root) const {
  const int n = degree();
  if (n < 1) return {};
  const bool pair = root.imag() != 0.0;
  if (pair && n < 2) return {};
  if (root == Complex{0.0}) return Polynomial(std::vector<double>(c_.begin() + 1, c_.end()));

  if (!pair) {
    const double r = root.real();
    std::vector<double> q(static_cast<std::size_t>(n));
    if (std::abs(r) <= 1.0) {
      // Forward synthetic division from the leading coefficient.
      q[static_cast<std::size_t>(n - 1)] = c_[static_cast<std::size_t>(n)];
      for (int k = n - 1; k >= 1; --k) q[static_cast<std::size_t>(k - 1)] = c_[static_cast<std::size_t>(k)] + r * q[static_cast<std::size_t>(k)];
    } else {
      // Backward division from the constant term; stable for |r| > 1.
      q[0] = -c_[0] / r;
      for (int k = 1; k < n; ++k) q[static_cast<std::size_t>(k)] = (q[static_cast<std::size_t>(k - 1)] - c_[static_cast<std::size_t>(k)]) / r;
    }
    return Polynomial(std::move(q));
  }

  // Divide by x^2 + b x + c.
  const double b = -2.0 * root.real();
  const double c = std::norm(root);
  std::vector<double> q(static_cast<std::size_t>(n - 1), 0.0);
  if (std::abs(root) <= 1.0) {
    std::vector<double> rem(c_);
    for (int k = n; k >= 2; --k) {
      const double t = rem[static_cast<std::size_t>(k)];
      q[static_cast<std::size_t>(k - 2)] = t;
      rem[static_cast<std::size_t>(k - 1)] -= b * t;
      rem[static_cast<std::size_t>(k - 2)] -= c * t;
    }
  } else {
    for (int k = 0; k <= n - 2; ++k) {
      double v = c_[static_cast<std::size_t>(k)];
      if (k >= 1) v -= b * q[static_cast<std::size_t>(k - 1)];
      if (k >= 2) v -= q[static_cast<std::size_t>(k - 2)];
      q[static_cast<std::size_t>(k)] = v / c;
    }
  }
  return Polynomial(std::move(q));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw std::domain_error("Polynomial::divmod: division by zero polynomial");
  const int n = degree();
  const int d = divisor.degree();
  if (n < d) return {Polynomial{}, *this};
  std::vector<double> rem(c_);
  std::vector<double> q(static_cast<std::size_t>(n - d + 1), 0.0);
  for (int k = n - d; k >= 0; --k) {
    const double t = rem[static_cast<std::size_t>(k + d)] / divisor.leading();
    q[static_cast<std::size_t>(k)] = t;
    for (int j = 0; j <= d; ++j) rem[static_cast<std::size_t>(k + j)] -= t * divisor.c_[static_cast<std::size_t>(j)];
  }
  rem.resize(static_cast<std::size_t>(d));
  return {Polynomial(std::move(q)), Polynomial(std::move(rem))};
}

Polynomial Polynomial::operator-() const {
  Polynomial out(*this);
  for (double& c : out.c_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.c_.size() > c_.size()) c_.resize(rhs.c_.size(), 0.0);
  for (std::size_t k = 0; k < rhs.c_.size(); ++k) c_[k] += rhs.c_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (rhs.c_.size() > c_.size()) c_.resize(rhs.c_.size(), 0.0);
  for (std::size_t k = 0; k < rhs.c_.size(); ++k) c_[k] -= rhs.c_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (double& c : c_) c *= s;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  if (lhs.is_zero() || rhs.is_zero()) return {};
  std::vector<double> out(lhs.c_.size() + rhs.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < lhs.c_.size(); ++i) {
    if (lhs.c_[i] == 0.0) continue;
    for (std::size_t j = 0; j < rhs.c_.size(); ++j) out[i + j] += lhs.c_[i] * rhs.c_[j];
  }
  return Polynomial(std::move(out));
}

std::vector<double> abs_product(const Polynomial& lhs, const Polynomial& rhs) {
  if (lhs.is_zero() || rhs.is_zero()) return {};
  const auto& a = lhs.coeffs();
  const auto& b = rhs.coeffs();
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += std::abs(a[i] * b[j]);
  return out;
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

}  // namespace iop
