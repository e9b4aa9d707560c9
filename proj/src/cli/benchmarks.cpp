#include "iop/cli/benchmarks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "iop/cli/fixtures.hpp"
#include "iop/errors.hpp"

namespace iop::cli {

BenchmarkCase discrete_centralized_case() {
  BenchmarkCase c;
  c.name = "discrete-centralized";
  c.problem.G = discrete_benchmark_plant();
  c.problem.N = kDefaultDiscreteOrder;
  c.problem.objective = Objective::h2;
  c.expected_h2 = kCentralizedNorm;
  return c;
}

BenchmarkCase discrete_distributed_case() {
  BenchmarkCase c = discrete_centralized_case();
  c.name = "discrete-distributed";
  c.problem.sparsity = benchmark_pattern();
  c.expected_h2 = kDistributedNorm;
  return c;
}

BenchmarkCase continuous_feasibility_case() {
  BenchmarkCase c;
  c.name = "continuous-feasibility";
  c.problem.G = continuous_benchmark_plant();
  c.problem.N = kDefaultContinuousOrder;
  c.problem.a = kDefaultPoleShift;
  c.problem.sparsity = benchmark_pattern();
  c.problem.objective = Objective::none;
  return c;
}

void run_case(BenchmarkCase& c) {
  const auto start = std::chrono::steady_clock::now();
  try {
    c.result = synthesize(c.problem);
  } catch (const std::exception& e) {
    c.error = e.what();
  }
  c.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.passed = c.result && c.result->verified();
  if (c.passed && c.expected_h2)
    c.passed = c.result->h2_norm && std::abs(*c.result->h2_norm - *c.expected_h2) <= kNormTolerance;
}

ReferenceControllerCheck check_reference_controller() {
  ReferenceControllerCheck out;
  const RationalMatrix K = continuous_reference_controller();
  out.stability = check_internal_stability(continuous_benchmark_plant(), K);
  out.off_pattern = off_pattern_magnitude(K, benchmark_pattern());
  out.passed = out.stability.stabilizing && out.off_pattern == 0.0;
  return out;
}

std::vector<SweepPoint> cost_sweep(const std::vector<int>& orders) {
  std::vector<SweepPoint> out;
  for (int N : orders) {
    SweepPoint point;
    point.N = N;
    BenchmarkCase centralized = discrete_centralized_case();
    centralized.problem.N = N;
    BenchmarkCase distributed = discrete_distributed_case();
    distributed.problem.N = N;
    try {
      point.centralized = solve_h2(centralized.problem).h2_norm;
    } catch (const InfeasibleError&) {
    }
    try {
      point.distributed = solve_h2(distributed.problem).h2_norm;
    } catch (const InfeasibleError&) {
    }
    out.push_back(point);
  }
  return out;
}

bool CaseStudies::passed() const {
  return reference.passed && std::all_of(cases.begin(), cases.end(), [](const BenchmarkCase& c) { return c.passed; });
}

CaseStudies run_case_studies(bool sweep) {
  CaseStudies out;
  out.cases = {discrete_centralized_case(), discrete_distributed_case(), continuous_feasibility_case()};
  for (BenchmarkCase& c : out.cases) run_case(c);
  out.reference = check_reference_controller();
  if (sweep) out.sweep = cost_sweep({2, 4, 6, 8, 10});
  return out;
}

Json benchmarks_json(const CaseStudies& b) {
  Json cases = Json::array();
  for (const BenchmarkCase& c : b.cases) {
    Json entry = {{"name", c.name}, {"passed", c.passed}, {"wall_seconds", c.wall_seconds}};
    entry["expected_h2_norm"] = c.expected_h2 ? Json(*c.expected_h2) : Json(nullptr);
    if (c.result) {
      Json report = synthesis_json(c.problem, *c.result);
      report.erase("tp");
      report.erase("K");
      entry["report"] = std::move(report);
    } else {
      entry["error"] = c.error;
    }
    cases.push_back(std::move(entry));
  }
  Json out = {{"passed", b.passed()},
              {"cases", cases},
              {"reference_controller",
               {{"passed", b.reference.passed},
                {"off_pattern", b.reference.off_pattern},
                {"stability", stability_json(b.reference.stability)}}}};
  if (!b.sweep.empty()) {
    Json sweep = Json::array();
    for (const SweepPoint& p : b.sweep)
      sweep.push_back({{"N", p.N},
                       {"centralized", p.centralized ? Json(*p.centralized) : Json(nullptr)},
                       {"distributed", p.distributed ? Json(*p.distributed) : Json(nullptr)}});
    out["sweep"] = sweep;
  }
  return out;
}

std::string benchmarks_text(const CaseStudies& b) {
  std::ostringstream out;
  for (const BenchmarkCase& c : b.cases) {
    out << "== " << c.name << ": " << (c.passed ? "PASS" : "FAIL") << " (" << std::fixed << std::setprecision(3)
        << c.wall_seconds << " s)\n"
        << std::defaultfloat;
    if (c.expected_h2) out << "expected h2 norm: " << *c.expected_h2 << " +/- " << kNormTolerance << '\n';
    if (c.result)
      out << synthesis_text(c.problem, *c.result);
    else
      out << "error: " << c.error << '\n';
  }
  out << "== reference controller: " << (b.reference.passed ? "PASS" : "FAIL") << '\n'
      << stability_text(b.reference.stability) << "off-pattern magnitude: " << b.reference.off_pattern << '\n';
  if (!b.sweep.empty()) {
    out << "== cost sweep (discrete)\n   N  centralized  distributed\n";
    for (const SweepPoint& p : b.sweep) {
      out << std::setw(4) << p.N << std::fixed << std::setprecision(6);
      out << std::setw(13);
      if (p.centralized) out << *p.centralized; else out << "infeasible";
      out << std::setw(13);
      if (p.distributed) out << *p.distributed; else out << "infeasible";
      out << '\n' << std::defaultfloat;
    }
  }
  out << "overall: " << (b.passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

}  // namespace iop::cli
