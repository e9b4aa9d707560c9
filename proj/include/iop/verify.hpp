#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "iop/rational.hpp"
#include "iop/state_space.hpp"

namespace iop {

inline constexpr double kDefaultMembershipTolerance = 1e-6;

// Closed-loop maps of the interconnection y = G u + w_y, u = K y + w_u:
//   X = (I - GK)^-1, Y = K (I - GK)^-1, W = (I - GK)^-1 G, Z = (I - KG)^-1.
// Requires G strictly proper and K proper; throws IllPosedError otherwise or
// when (I - GK) is singular.
ClosedLoopQuad closed_loop_maps(const RationalMatrix& G, const RationalMatrix& K);

struct BlockStability {
  bool stable = true;
  std::vector<Complex> poles;
  std::vector<Complex> offending;  // poles outside the stability region
};

inline constexpr std::array<std::string_view, 4> kBlockNames{"X", "Y", "W", "Z"};

struct StabilityReport {
  bool stabilizing = false;
  std::array<BlockStability, 4> blocks;  // X, Y, W, Z
};

BlockStability block_stability(const RationalMatrix& block);
StabilityReport check_internal_stability(const ClosedLoopQuad& quad);
// Poles of each closed-loop block taken from a minimal realization of the
// interconnection, so that unstable plant and controller poles cancelling
// in the loop are handled without rational arithmetic.
StabilityReport check_internal_stability(const RationalMatrix& G, const RationalMatrix& K);
StabilityReport check_internal_stability(const StateSpace& G, const StateSpace& K);
bool is_internally_stabilizing(const RationalMatrix& G, const RationalMatrix& K);

struct MembershipReport {
  bool member = false;
  // X - GY = I, W - GZ = 0, -XG + W = 0, -YG + Z = I.
  std::array<double, 4> residuals{};
  std::array<bool, 4> stable{};  // X, Y, W, Z
  double max_residual() const;
};

MembershipReport check_iop_membership(const RationalMatrix& G, const ClosedLoopQuad& quad,
                                      double tol = kDefaultMembershipTolerance);

// K = Y X^-1. Throws SingularMatrixError when X is not invertible.
RationalMatrix recover_controller(const ClosedLoopQuad& quad);

}  // namespace iop
