#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "iop/rational.hpp"

namespace iop {

inline constexpr int kDefaultDiscreteOrder = 10;
inline constexpr int kDefaultContinuousOrder = 2;
inline constexpr double kDefaultPoleShift = 3.0;

// Coefficients of X, Y, W, Z on the basis sigma^-i, i = 0..N, where
// sigma = z (discrete) or sigma = s + a (continuous).
struct TruncatedParam {
  Domain domain = Domain::discrete;
  int N = 0;
  double a = 0.0;  // continuous only
  std::vector<Eigen::MatrixXd> X;  // p x p
  std::vector<Eigen::MatrixXd> Y;  // m x p
  std::vector<Eigen::MatrixXd> W;  // p x m
  std::vector<Eigen::MatrixXd> Z;  // m x m

  static TruncatedParam zeros(Domain domain, int N, Eigen::Index p, Eigen::Index m, double a = 0.0);

  Eigen::Index outputs() const { return X.empty() ? 0 : X.front().rows(); }
  Eigen::Index inputs() const { return Z.empty() ? 0 : Z.front().rows(); }

  // Throws std::invalid_argument on inconsistent lengths, shapes or a <= 0.
  void validate() const;
};

TruncatedParam operator+(const TruncatedParam& lhs, const TruncatedParam& rhs);
TruncatedParam operator*(double s, const TruncatedParam& tp);

// The basis variable sigma as a polynomial in z or s.
Polynomial basis_sigma(Domain domain, double a);

// Each block becomes sum_i C[i] sigma^-i; every denominator is a power of sigma.
ClosedLoopQuad expand(const TruncatedParam& tp);

// Block matrix [W, X - I; Z - I, Y] of coefficient index i.
Eigen::MatrixXd sensitivity_block(const TruncatedParam& tp, int i);

// Squared H2 norm of [W, X - I; Z - I, Y] in discrete time:
// sum_i trace(J[i]^T J[i]).
double h2_sq_discrete(const TruncatedParam& tp);

// Gram matrix of the basis (s + a)^-i, i = 1..N, in the H2 inner product:
//   Gamma_ij = C(i + j - 2, i - 1) / (2a)^(i + j - 1).
Eigen::MatrixXd continuous_gram(int N, double a);

// Squared H2 norm of [W, X - I; Z - I, Y] in continuous time. The constant
// blocks must vanish (X[0] = I, Z[0] = I, Y[0] = 0, W[0] = 0), otherwise the
// norm is infinite and InfiniteNormError is thrown.
double h2_sq_continuous(const TruncatedParam& tp, double tol = 1e-9);

}  // namespace iop
