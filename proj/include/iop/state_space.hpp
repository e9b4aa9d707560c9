#pragma once

#include <vector>

#include <Eigen/Core>

#include "iop/basis.hpp"
#include "iop/rational.hpp"

namespace iop {

// x+ = A x + B u, y = C x + D u (x' in continuous time).
struct StateSpace {
  Domain domain = Domain::discrete;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }
  Eigen::MatrixXcd evaluate(Complex x) const;
};

// Relative rank threshold used by the Kalman reduction.
inline constexpr double kMinimalRealizationTolerance = 1e-9;

// Block-diagonal realization with one controllable canonical block per
// nonzero entry. Throws ImproperPlantError for improper entries.
StateSpace realize(const RationalMatrix& m);

// Realization of K = Y X^-1 for truncated parameters, with one basis chain
// per output channel. Throws SingularMatrixError when X[0] is singular.
StateSpace realize_controller(const TruncatedParam& tp);

// Controllable and observable part, by orthogonal Krylov bases.
StateSpace minimal_realization(const StateSpace& sys, double tol = kMinimalRealizationTolerance);

// Interconnection y = G u + w_y, u = K y + w_u with inputs (w_y, w_u) and
// outputs (y, u). G must have D = 0.
StateSpace feedback_interconnection(const StateSpace& G, const StateSpace& K);

// Transfer matrix with each entry built from its own minimal realization.
RationalMatrix transfer_matrix(const StateSpace& sys, double tol = kMinimalRealizationTolerance);

// N D^-1 for square D, computed from one minimal realization of [D; N]
// when D is proper with invertible high-frequency gain, otherwise by
// rational elimination. Throws SingularMatrixError when D is singular.
RationalMatrix right_divide(const RationalMatrix& N, const RationalMatrix& D);

// Eigenvalues of A after minimal reduction.
std::vector<Complex> transfer_poles(const StateSpace& sys, double tol = kMinimalRealizationTolerance);

}  // namespace iop
