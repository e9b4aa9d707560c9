#include "iop/youla.hpp"

#include <algorithm>

#include "iop/errors.hpp"
#include "iop/state_space.hpp"
#include "iop/verify.hpp"

namespace iop {

namespace {

void expect_shape(const RationalMatrix& m, Eigen::Index rows, Eigen::Index cols, Domain d, std::string_view name) {
  if (m.rows() != rows || m.cols() != cols)
    throw DimensionError("DoublyCoprimeFactorization: " + std::string(name) + " has the wrong shape");
  if (m.domain() != d) throw DomainMismatchError("DoublyCoprimeFactorization: " + std::string(name) + " domain differs");
}

std::array<const RationalMatrix*, 8> blocks(const DoublyCoprimeFactorization& f) {
  return {&f.Ur, &f.Vr, &f.Ul, &f.Vl, &f.Mr, &f.Ml, &f.Nr, &f.Nl};
}

}  // namespace

void DoublyCoprimeFactorization::validate() const {
  const Eigen::Index p = outputs();
  const Eigen::Index m = inputs();
  const Domain d = domain();
  expect_shape(Ur, p, p, d, "Ur");
  expect_shape(Vr, m, p, d, "Vr");
  expect_shape(Ul, m, m, d, "Ul");
  expect_shape(Vl, m, p, d, "Vl");
  expect_shape(Mr, m, m, d, "Mr");
  expect_shape(Ml, p, p, d, "Ml");
  expect_shape(Nr, p, m, d, "Nr");
  expect_shape(Nl, p, m, d, "Nl");
}

DoublyCoprimeFactorization trivial_dcf(const RationalMatrix& G) {
  const Eigen::Index p = G.rows();
  const Eigen::Index m = G.cols();
  const Domain d = G.domain();
  DoublyCoprimeFactorization f;
  f.Ur = RationalMatrix::identity(p, d);
  f.Vr = RationalMatrix::zero(m, p, d);
  f.Ul = RationalMatrix::identity(m, d);
  f.Vl = RationalMatrix::zero(m, p, d);
  f.Mr = RationalMatrix::identity(m, d);
  f.Ml = RationalMatrix::identity(p, d);
  f.Nr = G;
  f.Nl = G;
  return f;
}

DcfReport verify_dcf(const RationalMatrix& G, const DoublyCoprimeFactorization& dcf, double tol) {
  dcf.validate();
  if (G.rows() != dcf.outputs() || G.cols() != dcf.inputs())
    throw DimensionError("verify_dcf: factorization does not conform to the plant");
  if (G.domain() != dcf.domain()) throw DomainMismatchError("verify_dcf: domain mismatch");

  DcfReport report;
  const auto all = blocks(dcf);
  for (std::size_t i = 0; i < all.size(); ++i) {
    report.stable[i] = is_stable(*all[i]);
    report.proper[i] = properness_class(*all[i]) != Properness::improper;
  }
  report.right_residual = max_residual(G * dcf.Mr, dcf.Nr);
  report.left_residual = max_residual(dcf.Ml * G, dcf.Nl);

  const Domain d = G.domain();
  const auto left = RationalMatrix::blocks(dcf.Ul, -dcf.Vl, -dcf.Nl, dcf.Ml);
  const auto right = RationalMatrix::blocks(dcf.Mr, dcf.Vr, dcf.Nr, dcf.Ur);
  report.bezout_residual = max_residual(left * right, RationalMatrix::identity(dcf.inputs() + dcf.outputs(), d));

  const auto all_true = [](const std::array<bool, 8>& a) { return std::all_of(a.begin(), a.end(), [](bool b) { return b; }); };
  report.valid = all_true(report.stable) && all_true(report.proper) && report.right_residual < tol &&
                 report.left_residual < tol && report.bezout_residual < tol;
  return report;
}

ClosedLoopQuad youla_to_iop(const RationalMatrix& Q, const DoublyCoprimeFactorization& dcf) {
  dcf.validate();
  if (Q.rows() != dcf.inputs() || Q.cols() != dcf.outputs()) throw DimensionError("youla_to_iop: Q must be m x p");
  if (Q.domain() != dcf.domain()) throw DomainMismatchError("youla_to_iop: domain mismatch");
  if (!is_stable(Q) || properness_class(Q) == Properness::improper)
    throw UnstableParameterError("youla_to_iop: Q must be stable and proper");

  const RationalMatrix left = dcf.Ur - dcf.Nr * Q;
  const RationalMatrix right = dcf.Vr - dcf.Mr * Q;
  ClosedLoopQuad quad;
  quad.X = left * dcf.Ml;
  quad.Y = right * dcf.Ml;
  quad.W = left * dcf.Nl;
  quad.Z = RationalMatrix::identity(dcf.inputs(), dcf.domain()) + right * dcf.Nl;
  return quad;
}

RationalMatrix iop_to_youla(const ClosedLoopQuad& quad, const DoublyCoprimeFactorization& dcf) {
  dcf.validate();
  quad.validate();
  if (quad.outputs() != dcf.outputs() || quad.inputs() != dcf.inputs())
    throw DimensionError("iop_to_youla: quadruple does not conform to the factorization");
  const RationalMatrix G = right_divide(dcf.Nr, dcf.Mr);
  if (!check_iop_membership(G, quad).member) throw MembershipError("iop_to_youla: quadruple is not in the affine subspace");
  return dcf.Vl * quad.X * dcf.Ur - dcf.Ul * quad.Y * dcf.Ur - dcf.Vl * quad.W * dcf.Vr + dcf.Ul * quad.Z * dcf.Vr -
         dcf.Vl * dcf.Ur;
}

RationalMatrix youla_controller(const RationalMatrix& Q, const DoublyCoprimeFactorization& dcf) {
  return right_divide(dcf.Vr - dcf.Mr * Q, dcf.Ur - dcf.Nr * Q);
}

}  // namespace iop
