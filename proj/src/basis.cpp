#include "iop/basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "iop/errors.hpp"

namespace iop {

namespace {

using Sequence = std::vector<Eigen::MatrixXd>;

void check_sequence(const Sequence& s, int N, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (static_cast<int>(s.size()) != N + 1)
    throw std::invalid_argument(std::string("TruncatedParam: ") + name + " must hold N + 1 coefficient matrices");
  for (const auto& c : s)
    if (c.rows() != rows || c.cols() != cols)
      throw std::invalid_argument(std::string("TruncatedParam: ") + name + " coefficient has the wrong shape");
}

RationalMatrix expand_block(const Sequence& coeffs, Domain domain, double a) {
  const int N = static_cast<int>(coeffs.size()) - 1;
  const Eigen::Index rows = coeffs.front().rows();
  const Eigen::Index cols = coeffs.front().cols();
  // sum_i c_i sigma^-i = (sum_i c_i sigma^(N-i)) / sigma^N.
  std::vector<Polynomial> powers;
  powers.reserve(static_cast<std::size_t>(N) + 1);
  const double root = domain == Domain::discrete ? 0.0 : -a;
  for (int i = 0; i <= N; ++i) powers.push_back(Polynomial::shifted_power(-root, N - i));
  const std::vector<Complex> poles(static_cast<std::size_t>(N), Complex{root});

  RationalMatrix out(rows, cols, domain);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      Polynomial num;
      for (int i = 0; i <= N; ++i) {
        const double v = coeffs[static_cast<std::size_t>(i)](r, c);
        if (v != 0.0) num += v * powers[static_cast<std::size_t>(i)];
      }
      out(r, c) = RationalFunction::from_poles(std::move(num), poles);
    }
  }
  return out;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return out;
}

}  // namespace

TruncatedParam TruncatedParam::zeros(Domain domain, int N, Eigen::Index p, Eigen::Index m, double a) {
  TruncatedParam tp;
  tp.domain = domain;
  tp.N = N;
  tp.a = a;
  const auto n = static_cast<std::size_t>(N) + 1;
  tp.X.assign(n, Eigen::MatrixXd::Zero(p, p));
  tp.Y.assign(n, Eigen::MatrixXd::Zero(m, p));
  tp.W.assign(n, Eigen::MatrixXd::Zero(p, m));
  tp.Z.assign(n, Eigen::MatrixXd::Zero(m, m));
  return tp;
}

void TruncatedParam::validate() const {
  if (N < 0) throw std::invalid_argument("TruncatedParam: negative order");
  if (domain == Domain::continuous && !(a > 0.0))
    throw std::invalid_argument("TruncatedParam: continuous basis needs a > 0");
  if (X.empty() || Z.empty()) throw std::invalid_argument("TruncatedParam: empty coefficient sequence");
  const Eigen::Index p = X.front().rows();
  const Eigen::Index m = Z.front().rows();
  check_sequence(X, N, p, p, "X");
  check_sequence(Y, N, m, p, "Y");
  check_sequence(W, N, p, m, "W");
  check_sequence(Z, N, m, m, "Z");
}

TruncatedParam operator+(const TruncatedParam& lhs, const TruncatedParam& rhs) {
  lhs.validate();
  rhs.validate();
  if (lhs.domain != rhs.domain || lhs.N != rhs.N || lhs.a != rhs.a)
    throw std::invalid_argument("TruncatedParam: cannot add parameters on different bases");
  TruncatedParam out = lhs;
  for (std::size_t i = 0; i < out.X.size(); ++i) {
    out.X[i] += rhs.X[i];
    out.Y[i] += rhs.Y[i];
    out.W[i] += rhs.W[i];
    out.Z[i] += rhs.Z[i];
  }
  return out;
}

TruncatedParam operator*(double s, const TruncatedParam& tp) {
  TruncatedParam out = tp;
  for (std::size_t i = 0; i < out.X.size(); ++i) {
    out.X[i] *= s;
    out.Y[i] *= s;
    out.W[i] *= s;
    out.Z[i] *= s;
  }
  return out;
}

Polynomial basis_sigma(Domain domain, double a) {
  return domain == Domain::discrete ? Polynomial{0.0, 1.0} : Polynomial{a, 1.0};
}

ClosedLoopQuad expand(const TruncatedParam& tp) {
  tp.validate();
  ClosedLoopQuad quad;
  quad.X = expand_block(tp.X, tp.domain, tp.a);
  quad.Y = expand_block(tp.Y, tp.domain, tp.a);
  quad.W = expand_block(tp.W, tp.domain, tp.a);
  quad.Z = expand_block(tp.Z, tp.domain, tp.a);
  return quad;
}

Eigen::MatrixXd sensitivity_block(const TruncatedParam& tp, int i) {
  const Eigen::Index p = tp.outputs();
  const Eigen::Index m = tp.inputs();
  const auto k = static_cast<std::size_t>(i);
  Eigen::MatrixXd J(p + m, m + p);
  J.topLeftCorner(p, m) = tp.W[k];
  J.topRightCorner(p, p) = tp.X[k];
  J.bottomLeftCorner(m, m) = tp.Z[k];
  J.bottomRightCorner(m, p) = tp.Y[k];
  if (i == 0) {
    J.topRightCorner(p, p) -= Eigen::MatrixXd::Identity(p, p);
    J.bottomLeftCorner(m, m) -= Eigen::MatrixXd::Identity(m, m);
  }
  return J;
}

double h2_sq_discrete(const TruncatedParam& tp) {
  tp.validate();
  if (tp.domain != Domain::discrete) throw DomainMismatchError("h2_sq_discrete: parameter is not discrete-time");
  double total = 0.0;
  for (int i = 0; i <= tp.N; ++i) total += sensitivity_block(tp, i).squaredNorm();
  return total;
}

Eigen::MatrixXd continuous_gram(int N, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("continuous_gram: a must be positive");
  Eigen::MatrixXd gram(N, N);
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) gram(i - 1, j - 1) = binomial(i + j - 2, i - 1) / std::pow(2.0 * a, i + j - 1);
  return gram;
}

double h2_sq_continuous(const TruncatedParam& tp, double tol) {
  tp.validate();
  if (tp.domain != Domain::continuous) throw DomainMismatchError("h2_sq_continuous: parameter is not continuous-time");
  if (sensitivity_block(tp, 0).cwiseAbs().maxCoeff() > tol)
    throw InfiniteNormError("h2_sq_continuous: constant blocks are nonzero, the H2 norm is infinite");
  if (tp.N == 0) return 0.0;
  const Eigen::MatrixXd gram = continuous_gram(tp.N, tp.a);
  std::vector<Eigen::MatrixXd> J;
  for (int i = 1; i <= tp.N; ++i) J.push_back(sensitivity_block(tp, i));
  double total = 0.0;
  for (int i = 0; i < tp.N; ++i)
    for (int j = 0; j < tp.N; ++j) total += (J[static_cast<std::size_t>(i)].array() * J[static_cast<std::size_t>(j)].array()).sum() * gram(i, j);
  return total;
}

}  // namespace iop
