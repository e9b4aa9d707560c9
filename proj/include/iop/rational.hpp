#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "iop/polynomial.hpp"

namespace iop {

// Two roots are treated as a common factor when their distance is below
// kCancelTolerance * (1 + |root|).
inline constexpr double kCancelTolerance = 1e-7;
// Poles within this margin of the stability boundary count as unstable.
inline constexpr double kStabilityMargin = 1e-9;
// A coefficient of a sum is set to exactly zero when it is below this
// fraction of the magnitude of the terms that produced it.
inline constexpr double kChopTolerance = 1e-11;

enum class Domain { continuous, discrete };

std::string_view to_string(Domain d);
Domain domain_from_string(std::string_view tag);  // "s" or "z"

enum class Properness { strictly_proper, proper, improper };

std::string_view to_string(Properness p);

// Scalar transfer function num/den with a monic denominator and no
// cancellable num/den root pairs. The denominator roots are kept alongside
// the expanded polynomial so that pole locations are never re-derived from
// expanded products.
class RationalFunction {
 public:
  RationalFunction() = default;  // zero
  RationalFunction(double c);    // NOLINT: constants convert implicitly
  RationalFunction(Polynomial num, Polynomial den);

  static RationalFunction from_poles(Polynomial num, std::vector<Complex> poles);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  const std::vector<Complex>& poles() const { return poles_; }

  bool is_zero() const { return num_.is_zero(); }
  // deg(den) - deg(num); undefined (returns a large value) for zero.
  int relative_degree() const;
  Properness properness() const;
  bool is_stable(Domain d) const;

  Complex operator()(Complex x) const;

  RationalFunction reciprocal() const;

  RationalFunction operator-() const;
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);

 private:
  void cancel_common_roots();
  void rebuild_den();

  Polynomial num_;
  Polynomial den_{1.0};
  std::vector<Complex> poles_;
};

// Residual of sum_i terms[i] written over the least common denominator:
// max |numerator coefficient| divided by the largest coefficient magnitude
// among the individual term numerators. Zero when all terms are zero.
double residual_norm(const std::vector<RationalFunction>& terms);

bool is_stable_pole(Complex pole, Domain d);

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(Eigen::Index rows, Eigen::Index cols, Domain domain);

  static RationalMatrix zero(Eigen::Index rows, Eigen::Index cols, Domain domain);
  static RationalMatrix identity(Eigen::Index n, Domain domain);
  static RationalMatrix constant(const Eigen::MatrixXd& m, Domain domain);
  // [a b; c d]
  static RationalMatrix blocks(const RationalMatrix& a, const RationalMatrix& b, const RationalMatrix& c,
                               const RationalMatrix& d);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Domain domain() const { return domain_; }

  RationalFunction& operator()(Eigen::Index r, Eigen::Index c);
  const RationalFunction& operator()(Eigen::Index r, Eigen::Index c) const;

  RationalMatrix transpose() const;
  RationalMatrix block(Eigen::Index r0, Eigen::Index c0, Eigen::Index nr, Eigen::Index nc) const;
  Eigen::MatrixXcd evaluate(Complex x) const;
  bool is_zero() const;

  RationalMatrix operator-() const;

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  Domain domain_ = Domain::discrete;
  std::vector<RationalFunction> entries_;
};

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix operator*(const RationalFunction& s, const RationalMatrix& a);

// Gauss-Jordan elimination over the field of rational functions.
// Throws SingularMatrixError when the determinant vanishes identically.
RationalMatrix inverse(const RationalMatrix& a);

std::vector<Complex> poles(const RationalMatrix& a);
bool is_stable(const RationalMatrix& a);
Properness properness_class(const RationalMatrix& a);

// Entrywise residual_norm of (lhs - rhs), maximised over entries.
double max_residual(const RationalMatrix& lhs, const RationalMatrix& rhs);

// Four closed-loop maps from (w_y, w_u) to (y, u).
struct ClosedLoopQuad {
  RationalMatrix X;  // p x p
  RationalMatrix Y;  // m x p
  RationalMatrix W;  // p x m
  RationalMatrix Z;  // m x m

  Eigen::Index outputs() const { return X.rows(); }
  Eigen::Index inputs() const { return Z.rows(); }
  Domain domain() const { return X.domain(); }
  // Throws DimensionError / DomainMismatchError on inconsistent blocks.
  void validate() const;
};

}  // namespace iop
