#include "iop/verify.hpp"

#include <algorithm>

#include "iop/errors.hpp"

namespace iop {

ClosedLoopQuad closed_loop_maps(const RationalMatrix& G, const RationalMatrix& K) {
  if (G.domain() != K.domain()) throw DomainMismatchError("closed_loop_maps: plant and controller domains differ");
  if (K.rows() != G.cols() || K.cols() != G.rows())
    throw DimensionError("closed_loop_maps: controller must be m x p for a p x m plant");
  if (properness_class(G) != Properness::strictly_proper)
    throw IllPosedError("closed_loop_maps: plant must be strictly proper");
  if (properness_class(K) == Properness::improper) throw IllPosedError("closed_loop_maps: controller must be proper");

  const Eigen::Index p = G.rows();
  const Eigen::Index m = G.cols();
  const RationalMatrix maps = transfer_matrix(feedback_interconnection(
      minimal_realization(realize(G), kCancelTolerance), minimal_realization(realize(K), kCancelTolerance)));
  return {maps.block(0, 0, p, p), maps.block(p, 0, m, p), maps.block(0, p, p, m), maps.block(p, p, m, m)};
}

BlockStability block_stability(const RationalMatrix& block) {
  BlockStability out;
  out.poles = poles(block);
  for (const Complex& p : out.poles)
    if (!is_stable_pole(p, block.domain())) out.offending.push_back(p);
  out.stable = out.offending.empty();
  return out;
}

StabilityReport check_internal_stability(const ClosedLoopQuad& quad) {
  StabilityReport report;
  report.blocks[0] = block_stability(quad.X);
  report.blocks[1] = block_stability(quad.Y);
  report.blocks[2] = block_stability(quad.W);
  report.blocks[3] = block_stability(quad.Z);
  report.stabilizing =
      std::all_of(report.blocks.begin(), report.blocks.end(), [](const BlockStability& b) { return b.stable; });
  return report;
}

StabilityReport check_internal_stability(const RationalMatrix& G, const RationalMatrix& K) {
  if (G.domain() != K.domain()) throw DomainMismatchError("check_internal_stability: plant and controller domains differ");
  if (K.rows() != G.cols() || K.cols() != G.rows())
    throw DimensionError("check_internal_stability: controller must be m x p for a p x m plant");
  if (properness_class(G) != Properness::strictly_proper)
    throw IllPosedError("check_internal_stability: plant must be strictly proper");
  if (properness_class(K) == Properness::improper)
    throw IllPosedError("check_internal_stability: controller must be proper");
  return check_internal_stability(minimal_realization(realize(G), kCancelTolerance),
                                  minimal_realization(realize(K), kCancelTolerance));
}

StabilityReport check_internal_stability(const StateSpace& G, const StateSpace& K) {
  const StateSpace loop = feedback_interconnection(minimal_realization(G), minimal_realization(K));
  const Eigen::Index p = G.outputs();
  const Eigen::Index m = G.inputs();
  // X: w_y -> y, Y: w_y -> u, W: w_u -> y, Z: w_u -> u.
  const std::array<std::array<Eigen::Index, 4>, 4> spans{{{0, p, 0, p}, {p, m, 0, p}, {0, p, p, m}, {p, m, p, m}}};
  StabilityReport report;
  for (std::size_t b = 0; b < 4; ++b) {
    const auto [r0, nr, c0, nc] = spans[b];
    StateSpace block{loop.domain, loop.A, loop.B.middleCols(c0, nc), loop.C.middleRows(r0, nr),
                     loop.D.block(r0, c0, nr, nc)};
    BlockStability& out = report.blocks[b];
    out.poles = transfer_poles(block);
    for (const Complex& pole : out.poles)
      if (!is_stable_pole(pole, loop.domain)) out.offending.push_back(pole);
    out.stable = out.offending.empty();
  }
  report.stabilizing =
      std::all_of(report.blocks.begin(), report.blocks.end(), [](const BlockStability& b) { return b.stable; });
  return report;
}

bool is_internally_stabilizing(const RationalMatrix& G, const RationalMatrix& K) {
  return check_internal_stability(G, K).stabilizing;
}

double MembershipReport::max_residual() const { return *std::max_element(residuals.begin(), residuals.end()); }

MembershipReport check_iop_membership(const RationalMatrix& G, const ClosedLoopQuad& quad, double tol) {
  quad.validate();
  if (G.rows() != quad.outputs() || G.cols() != quad.inputs())
    throw DimensionError("check_iop_membership: quadruple does not conform to the plant");
  if (G.domain() != quad.domain()) throw DomainMismatchError("check_iop_membership: domain mismatch");

  const Domain d = G.domain();
  const auto Ip = RationalMatrix::identity(G.rows(), d);
  const auto Im = RationalMatrix::identity(G.cols(), d);

  MembershipReport report;
  report.residuals[0] = max_residual(quad.X - Ip, G * quad.Y);
  report.residuals[1] = max_residual(quad.W, G * quad.Z);
  report.residuals[2] = max_residual(quad.W, quad.X * G);
  report.residuals[3] = max_residual(quad.Z - Im, quad.Y * G);
  report.stable = {is_stable(quad.X), is_stable(quad.Y), is_stable(quad.W), is_stable(quad.Z)};
  report.member = report.max_residual() < tol &&
                  std::all_of(report.stable.begin(), report.stable.end(), [](bool s) { return s; });
  return report;
}

RationalMatrix recover_controller(const ClosedLoopQuad& quad) {
  quad.validate();
  return right_divide(quad.Y, quad.X);
}

}  // namespace iop
