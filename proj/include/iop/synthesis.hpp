#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "iop/basis.hpp"
#include "iop/constraints.hpp"
#include "iop/rational.hpp"
#include "iop/verify.hpp"

namespace iop {

// Equality residual above which the truncated problem is declared infeasible.
inline constexpr double kInfeasibilityThreshold = 1e-6;

enum class Objective { none, h2 };

std::string_view to_string(Objective o);

// Performance weights for ||P_zw + P_zu Y P_yw||_H2.
struct Weights {
  RationalMatrix Pzw;  // q x r
  RationalMatrix Pzu;  // q x m
  RationalMatrix Pyw;  // p x r
};

struct SynthesisProblem {
  RationalMatrix G;
  int N = kDefaultDiscreteOrder;
  std::optional<double> a;
  std::optional<SparsityPattern> sparsity;
  Objective objective = Objective::none;
  // Without weights the h2 objective is the sensitivity cost
  // ||[W, X - I; Z - I, Y]||_H2.
  std::optional<Weights> weights;

  void validate() const;
};

struct SynthesisDiagnostics {
  Eigen::Index variables = 0;
  Eigen::Index constraints = 0;
  Eigen::Index rank = 0;
  double equality_residual = 0.0;  // max |A x - b| on the scaled rows
  double kkt_residual = 0.0;       // scaled stationarity + feasibility (h2 only)
  int refinement_steps = 0;
  MembershipReport membership;
  StabilityReport stability;
  double off_pattern_Y = 0.0;
  double off_pattern_K = 0.0;
  bool sparsity_ok = true;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;
  double verify_seconds = 0.0;
};

struct SynthesisResult {
  TruncatedParam tp;
  RationalMatrix K;
  std::optional<double> h2_norm;
  SynthesisDiagnostics diagnostics;

  // Membership, internal stability and sparsity all hold.
  bool verified() const;
};

// Minimum-Euclidean-norm point of the assembled equality system, expanded
// and verified. Throws InfeasibleError when no exact solution exists at
// order N.
SynthesisResult solve_feasibility(const SynthesisProblem& problem);

// Global minimiser of the convex quadratic H2 cost over the equality set.
SynthesisResult solve_h2(const SynthesisProblem& problem);

SynthesisResult synthesize(const SynthesisProblem& problem);

}  // namespace iop
