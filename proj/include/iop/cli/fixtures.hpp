#pragma once

#include "iop/constraints.hpp"
#include "iop/rational.hpp"

namespace iop::cli {

// 5 x 5 lower-triangular benchmark plant built from two scalar transfer
// functions v and u:
//   [v 0 0 0 0; v u 0 0 0; v u v 0 0; v u v v 0; v u v v u].
RationalMatrix benchmark_plant(const RationalFunction& v, const RationalFunction& u, Domain domain);

// v(z) = 0.1 / (z - 0.5), u(z) = 1 / (z - 2).
RationalMatrix discrete_benchmark_plant();

// v(s) = 1 / (s + 1), u(s) = 1 / (s - 1).
RationalMatrix continuous_benchmark_plant();

// Lower-triangular 5 x 5 controller pattern.
SparsityPattern benchmark_pattern();

// Published sparse stabilizing controller for the continuous plant.
RationalMatrix continuous_reference_controller();

}  // namespace iop::cli
