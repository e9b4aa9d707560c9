#pragma once

#include <iosfwd>
#include <string>

#include "iop/constraints.hpp"
#include "iop/rational.hpp"

namespace iop::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitVerificationFailed = 3;

// Reads a plant from a JSON file, or a built-in fixture named
// "builtin:Gd" / "builtin:Gc". Throws ImproperPlantError unless the plant is
// strictly proper.
RationalMatrix parse_plant(const std::string& source);

// Rational matrix from a JSON file or "builtin:K0".
RationalMatrix parse_rational_matrix(const std::string& source);

// Pattern from a JSON file or "builtin:lower".
SparsityPattern parse_pattern(const std::string& source);

// Applies the IOP_LOG environment variable (trace, debug, info, warn,
// error, off) to the process logger.
void configure_logging();

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace iop::cli
