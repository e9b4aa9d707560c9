#include "iop/cli/report.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace iop::cli {

namespace {

const char* pass(bool ok) { return ok ? "PASS" : "FAIL"; }

Json problem_json(const SynthesisProblem& problem) {
  Json out = {{"domain", std::string(to_string(problem.G.domain()))},
              {"outputs", problem.G.rows()},
              {"inputs", problem.G.cols()},
              {"N", problem.N},
              {"objective", std::string(to_string(problem.objective))},
              {"weighted", problem.weights.has_value()}};
  out["a"] = problem.a ? Json(*problem.a) : Json(nullptr);
  out["sparsity"] = problem.sparsity ? io::encode(*problem.sparsity) : Json(nullptr);
  return out;
}

}  // namespace

Format format_from_string(std::string_view s) {
  if (s == "json") return Format::json;
  if (s == "text") return Format::text;
  throw std::invalid_argument("unknown format '" + std::string(s) + "' (expected json or text)");
}

Json poles_json(const std::vector<Complex>& poles) {
  Json out = Json::array();
  for (const Complex& p : poles) out.push_back({p.real(), p.imag()});
  return out;
}

Json stability_json(const StabilityReport& report) {
  Json blocks = Json::object();
  for (std::size_t b = 0; b < 4; ++b) {
    const BlockStability& s = report.blocks[b];
    blocks[std::string(kBlockNames[b])] = {
        {"stable", s.stable}, {"poles", poles_json(s.poles)}, {"offending", poles_json(s.offending)}};
  }
  return {{"stabilizing", report.stabilizing}, {"blocks", blocks}};
}

Json membership_json(const MembershipReport& report) {
  return {{"member", report.member},
          {"max_residual", report.max_residual()},
          {"residuals",
           {{"X - GY - I", report.residuals[0]},
            {"W - GZ", report.residuals[1]},
            {"W - XG", report.residuals[2]},
            {"Z - YG - I", report.residuals[3]}}},
          {"stable", {{"X", report.stable[0]}, {"Y", report.stable[1]}, {"W", report.stable[2]}, {"Z", report.stable[3]}}}};
}

Json dcf_json(const DcfReport& report) {
  Json stable = Json::object();
  Json proper = Json::object();
  for (std::size_t i = 0; i < kDcfBlockNames.size(); ++i) {
    stable[std::string(kDcfBlockNames[i])] = report.stable[i];
    proper[std::string(kDcfBlockNames[i])] = report.proper[i];
  }
  return {{"valid", report.valid},
          {"stable", stable},
          {"proper", proper},
          {"right_residual", report.right_residual},
          {"left_residual", report.left_residual},
          {"bezout_residual", report.bezout_residual}};
}

Json synthesis_json(const SynthesisProblem& problem, const SynthesisResult& result) {
  const SynthesisDiagnostics& d = result.diagnostics;
  Json out;
  out["problem"] = problem_json(problem);
  out["h2_norm"] = result.h2_norm ? Json(*result.h2_norm) : Json(nullptr);
  out["verified"] = result.verified();
  out["stabilizing"] = d.stability.stabilizing;
  out["membership_residual"] = d.membership.max_residual();
  out["sparsity_ok"] = d.sparsity_ok;
  out["verification"] = {{"membership", membership_json(d.membership)},
                         {"stability", stability_json(d.stability)},
                         {"sparsity", {{"ok", d.sparsity_ok}, {"off_pattern_Y", d.off_pattern_Y}, {"off_pattern_K", d.off_pattern_K}}}};
  out["diagnostics"] = {{"variables", d.variables},
                        {"constraints", d.constraints},
                        {"rank", d.rank},
                        {"equality_residual", d.equality_residual},
                        {"kkt_residual", d.kkt_residual},
                        {"refinement_steps", d.refinement_steps}};
  out["timings"] = {{"assemble_seconds", d.assemble_seconds},
                    {"solve_seconds", d.solve_seconds},
                    {"verify_seconds", d.verify_seconds}};
  out["tp"] = io::encode(result.tp);
  out["K"] = io::encode(result.K);
  return out;
}

std::string stability_text(const StabilityReport& report) {
  std::ostringstream out;
  out << "internal stability: " << pass(report.stabilizing) << '\n';
  for (std::size_t b = 0; b < 4; ++b) {
    const BlockStability& s = report.blocks[b];
    out << "  " << kBlockNames[b] << ": " << pass(s.stable) << " (" << s.poles.size() << " poles";
    if (!s.offending.empty()) {
      out << "; unstable:";
      for (const Complex& p : s.offending) out << ' ' << p.real() << (p.imag() < 0 ? "-" : "+") << std::abs(p.imag()) << 'i';
    }
    out << ")\n";
  }
  return out.str();
}

std::string membership_text(const MembershipReport& report) {
  static constexpr std::array<const char*, 4> kResidualNames{"X - GY - I", "W - GZ", "W - XG", "Z - YG - I"};
  std::ostringstream out;
  out << std::scientific << std::setprecision(3);
  out << "affine subspace membership: " << pass(report.member) << '\n';
  for (std::size_t i = 0; i < 4; ++i) out << "  residual " << kResidualNames[i] << ": " << report.residuals[i] << '\n';
  for (std::size_t i = 0; i < 4; ++i) out << "  " << kBlockNames[i] << " stable: " << pass(report.stable[i]) << '\n';
  return out.str();
}

std::string synthesis_text(const SynthesisProblem& problem, const SynthesisResult& result) {
  const SynthesisDiagnostics& d = result.diagnostics;
  std::ostringstream out;
  out << "plant: " << problem.G.rows() << "x" << problem.G.cols() << ", domain " << to_string(problem.G.domain())
      << ", N = " << problem.N;
  if (problem.a) out << ", a = " << *problem.a;
  out << ", objective " << to_string(problem.objective) << (problem.sparsity ? ", sparsity constrained" : "") << '\n';
  out << "system: " << d.constraints << " rows, " << d.variables << " variables, rank " << d.rank << '\n';
  out << std::scientific << std::setprecision(3);
  out << "equality residual: " << d.equality_residual << ", KKT residual: " << d.kkt_residual << '\n';
  out << std::defaultfloat << std::setprecision(6);
  if (result.h2_norm) out << "h2 norm: " << *result.h2_norm << '\n';
  out << membership_text(d.membership) << stability_text(d.stability);
  if (problem.sparsity) {
    out << std::scientific << std::setprecision(3);
    out << "sparsity: " << pass(d.sparsity_ok) << " (off-pattern Y " << d.off_pattern_Y << ", K " << d.off_pattern_K
        << ")\n";
  }
  out << std::fixed << std::setprecision(3);
  out << "solver time: " << d.solve_seconds << " s (assemble " << d.assemble_seconds << " s, verify "
      << d.verify_seconds << " s)\n";
  out << "verdict: " << pass(result.verified()) << '\n';
  return out.str();
}

std::string emit_report(const SynthesisProblem& problem, const SynthesisResult& result, Format format) {
  return format == Format::json ? synthesis_json(problem, result).dump(2) + "\n" : synthesis_text(problem, result);
}

}  // namespace iop::cli
