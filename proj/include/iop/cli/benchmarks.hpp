#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iop/cli/report.hpp"
#include "iop/synthesis.hpp"

namespace iop::cli {

inline constexpr double kCentralizedNorm = 5.67;
inline constexpr double kDistributedNorm = 6.73;
inline constexpr double kNormTolerance = 0.02;

struct BenchmarkCase {
  std::string name;
  SynthesisProblem problem;
  std::optional<double> expected_h2;
  std::optional<SynthesisResult> result;
  std::string error;
  double wall_seconds = 0.0;
  bool passed = false;
};

struct SweepPoint {
  int N = 0;
  std::optional<double> centralized;
  std::optional<double> distributed;
};

struct ReferenceControllerCheck {
  StabilityReport stability;
  double off_pattern = 0.0;
  bool passed = false;
};

struct CaseStudies {
  std::vector<BenchmarkCase> cases;
  ReferenceControllerCheck reference;
  std::vector<SweepPoint> sweep;
  bool passed() const;
};

BenchmarkCase discrete_centralized_case();
BenchmarkCase discrete_distributed_case();
BenchmarkCase continuous_feasibility_case();

// Solves the case in place and decides pass/fail.
void run_case(BenchmarkCase& c);

ReferenceControllerCheck check_reference_controller();

// Optimal discrete costs with and without the pattern for each order.
std::vector<SweepPoint> cost_sweep(const std::vector<int>& orders);

CaseStudies run_case_studies(bool sweep);

Json benchmarks_json(const CaseStudies& b);
std::string benchmarks_text(const CaseStudies& b);

}  // namespace iop::cli
