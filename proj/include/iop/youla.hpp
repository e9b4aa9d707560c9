#pragma once

#include <array>
#include <string_view>

#include "iop/rational.hpp"

namespace iop {

inline constexpr double kDefaultDcfTolerance = 1e-7;

// Stable proper factors of a p x m plant with G = Nr Mr^-1 = Ml^-1 Nl and
//   [Ul -Vl; -Nl Ml] [Mr Vr; Nr Ur] = I.
struct DoublyCoprimeFactorization {
  RationalMatrix Ur;  // p x p
  RationalMatrix Vr;  // m x p
  RationalMatrix Ul;  // m x m
  RationalMatrix Vl;  // m x p
  RationalMatrix Mr;  // m x m
  RationalMatrix Ml;  // p x p
  RationalMatrix Nr;  // p x m
  RationalMatrix Nl;  // p x m

  Eigen::Index outputs() const { return Nr.rows(); }
  Eigen::Index inputs() const { return Nr.cols(); }
  Domain domain() const { return Nr.domain(); }
  // Throws DimensionError / DomainMismatchError on inconsistent shapes.
  void validate() const;
};

inline constexpr std::array<std::string_view, 8> kDcfBlockNames{"Ur", "Vr", "Ul", "Vl", "Mr", "Ml", "Nr", "Nl"};

// Nr = Nl = G, Mr = Ul = I_m, Ml = Ur = I_p, Vr = Vl = 0. Only a valid
// factorization when G is stable.
DoublyCoprimeFactorization trivial_dcf(const RationalMatrix& G);

struct DcfReport {
  bool valid = false;
  std::array<bool, 8> stable{};  // in kDcfBlockNames order
  std::array<bool, 8> proper{};
  double right_residual = 0.0;   // G Mr - Nr
  double left_residual = 0.0;    // Ml G - Nl
  double bezout_residual = 0.0;  // block product - I
};

DcfReport verify_dcf(const RationalMatrix& G, const DoublyCoprimeFactorization& dcf,
                     double tol = kDefaultDcfTolerance);

// X = (Ur - Nr Q) Ml, Y = (Vr - Mr Q) Ml, W = (Ur - Nr Q) Nl,
// Z = I + (Vr - Mr Q) Nl. Throws UnstableParameterError unless Q is stable
// and proper.
ClosedLoopQuad youla_to_iop(const RationalMatrix& Q, const DoublyCoprimeFactorization& dcf);

// Q = Vl X Ur - Ul Y Ur - Vl W Vr + Ul Z Vr - Vl Ur. Throws MembershipError
// unless quad lies in the affine subspace of G = Nr Mr^-1.
RationalMatrix iop_to_youla(const ClosedLoopQuad& quad, const DoublyCoprimeFactorization& dcf);

// K = (Vr - Mr Q)(Ur - Nr Q)^-1.
RationalMatrix youla_controller(const RationalMatrix& Q, const DoublyCoprimeFactorization& dcf);

}  // namespace iop
