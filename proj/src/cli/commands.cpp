#include "iop/cli/commands.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "iop/cli/benchmarks.hpp"
#include "iop/cli/fixtures.hpp"
#include "iop/cli/report.hpp"
#include "iop/errors.hpp"
#include "iop/json_io.hpp"
#include "iop/synthesis.hpp"
#include "iop/verify.hpp"
#include "iop/youla.hpp"

namespace iop::cli {

namespace {

constexpr std::string_view kBuiltin = "builtin:";

std::optional<std::string> builtin_name(const std::string& source) {
  if (source.rfind(kBuiltin, 0) != 0) return std::nullopt;
  return source.substr(kBuiltin.size());
}

void emit(std::ostream& out, const Json& json, const std::string& text, Format format,
          const std::string& out_path) {
  if (!out_path.empty()) io::write_file(out_path, json);
  out << (format == Format::json ? json.dump(2) + "\n" : text);
}

// Accepts a quadruple of rational matrices, a truncated parameter, or a
// synthesis result holding one under "tp".
ClosedLoopQuad parse_quad(const std::string& path) {
  const Json j = io::read_file(path);
  if (j.is_object() && j.contains("tp")) return expand(io::decode_truncated_param(j.at("tp")));
  if (j.is_object() && j.contains("Xc")) return expand(io::decode_truncated_param(j));
  return io::decode_quad(j);
}

struct SynthOptions {
  std::string plant;
  std::optional<int> order;
  std::optional<double> a;
  std::string sparsity;
  std::string objective = "h2";
  std::string weights;
  std::string out_path;
  std::string export_system;
  std::string format = "json";
};

int run_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
  SynthesisProblem problem;
  problem.G = parse_plant(o.plant);
  const bool continuous = problem.G.domain() == Domain::continuous;
  problem.N = o.order.value_or(continuous ? kDefaultContinuousOrder : kDefaultDiscreteOrder);
  if (continuous) problem.a = o.a.value_or(kDefaultPoleShift);
  else if (o.a) throw std::invalid_argument("--a only applies to continuous-time plants");
  if (!o.sparsity.empty()) problem.sparsity = parse_pattern(o.sparsity);
  if (o.objective == "h2") problem.objective = Objective::h2;
  else if (o.objective == "none") problem.objective = Objective::none;
  else throw std::invalid_argument("--objective must be none or h2");
  if (!o.weights.empty()) problem.weights = io::decode_weights(io::read_file(o.weights));
  const Format format = format_from_string(o.format);

  if (!o.export_system.empty()) {
    problem.validate();
    io::write_file(o.export_system, io::encode(assemble(problem.G, problem.N, problem.a, problem.sparsity)));
    spdlog::info("equality system written to {}", o.export_system);
  }
  spdlog::info("synthesizing: N = {}, objective {}", problem.N, o.objective);
  SynthesisResult result;
  try {
    result = synthesize(problem);
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    Json j = {{"feasible", false}, {"equality_residual", e.residual()}, {"message", e.what()}};
    if (!o.out_path.empty()) io::write_file(o.out_path, j);
    return kExitInfeasible;
  }
  spdlog::debug("solve {:.3f} s, verify {:.3f} s", result.diagnostics.solve_seconds, result.diagnostics.verify_seconds);
  emit(out, synthesis_json(problem, result), synthesis_text(problem, result), format, o.out_path);
  if (!result.verified()) {
    err << "verification failed for the synthesized controller\n";
    return kExitVerificationFailed;
  }
  return kExitOk;
}

}  // namespace

RationalMatrix parse_plant(const std::string& source) {
  RationalMatrix G;
  if (const auto name = builtin_name(source)) {
    if (*name == "Gd") G = discrete_benchmark_plant();
    else if (*name == "Gc") G = continuous_benchmark_plant();
    else throw ParseError("unknown built-in plant '" + *name + "' (expected Gd or Gc)");
  } else {
    G = io::decode_rational_matrix(io::read_file(source));
  }
  if (properness_class(G) != Properness::strictly_proper)
    throw ImproperPlantError("plant must be strictly proper so that the feedback interconnection is well posed");
  return G;
}

RationalMatrix parse_rational_matrix(const std::string& source) {
  if (const auto name = builtin_name(source)) {
    if (*name == "K0") return continuous_reference_controller();
    if (*name == "Gd") return discrete_benchmark_plant();
    if (*name == "Gc") return continuous_benchmark_plant();
    throw ParseError("unknown built-in matrix '" + *name + "'");
  }
  return io::decode_rational_matrix(io::read_file(source));
}

SparsityPattern parse_pattern(const std::string& source) {
  if (const auto name = builtin_name(source)) {
    if (*name == "lower") return benchmark_pattern();
    throw ParseError("unknown built-in pattern '" + *name + "' (expected lower)");
  }
  return io::decode_pattern(io::read_file(source));
}

void configure_logging() {
  static const auto logger = [] {
    auto l = spdlog::stderr_color_mt("iop");
    spdlog::set_default_logger(l);
    return l;
  }();
  const char* env = std::getenv("IOP_LOG");
  logger->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"Input-output parametrization of stabilizing controllers", "iopctl"};
  app.require_subcommand(1);
  std::string format = "json";
  app.add_option("--format", format, "Output format: json or text")->check(CLI::IsMember({"json", "text"}));

  SynthOptions synth;
  auto* cmd_synth = app.add_subcommand("synth", "Synthesize a stabilizing controller");
  cmd_synth->add_option("--plant", synth.plant, "Plant JSON file or builtin:Gd / builtin:Gc")->required();
  cmd_synth->add_option("--order,-N", synth.order, "Truncation order N")->check(CLI::PositiveNumber);
  cmd_synth->add_option("--a", synth.a, "Pole shift of the continuous basis")->check(CLI::PositiveNumber);
  cmd_synth->add_option("--sparsity", synth.sparsity, "Controller sparsity pattern JSON or builtin:lower");
  cmd_synth->add_option("--objective", synth.objective, "none or h2")->check(CLI::IsMember({"none", "h2"}));
  cmd_synth->add_option("--weights", synth.weights, "FIR weights {Pzw, Pzu, Pyw}");
  cmd_synth->add_option("--out", synth.out_path, "Write the JSON result here");
  cmd_synth->add_option("--export-system", synth.export_system, "Write the equality system as sparse triplets");

  std::string plant, controller, quad_path, pattern, support, q_path, dcf_path, out_path;
  double tol = kDefaultMembershipTolerance;
  double dcf_tol = kDefaultDcfTolerance;

  auto* cmd_stab = app.add_subcommand("verify-stab", "Check internal stability of a plant-controller pair");
  cmd_stab->add_option("--plant", plant, "Plant JSON")->required();
  cmd_stab->add_option("--controller", controller, "Controller JSON or builtin:K0")->required();
  cmd_stab->add_option("--out", out_path, "Write the JSON report here");

  auto* cmd_iop = app.add_subcommand("verify-iop", "Check membership of a quadruple in the affine subspace");
  cmd_iop->add_option("--plant", plant, "Plant JSON")->required();
  cmd_iop->add_option("--quad", quad_path, "Quadruple, truncated parameter, or synthesis result JSON")->required();
  cmd_iop->add_option("--tol", tol, "Residual tolerance")->check(CLI::PositiveNumber);
  cmd_iop->add_option("--out", out_path, "Write the JSON report here");

  auto* cmd_qi = app.add_subcommand("qi-check", "Structural quadratic invariance test");
  cmd_qi->add_option("--pattern", pattern, "Controller pattern JSON or builtin:lower")->required();
  auto* opt_support = cmd_qi->add_option("--plant-support", support, "Binary plant support JSON");
  auto* opt_plant = cmd_qi->add_option("--plant", plant, "Plant JSON (its support is used)");
  opt_support->excludes(opt_plant);

  auto* cmd_youla = app.add_subcommand("youla", "Youla parameter conversions");
  cmd_youla->require_subcommand(1);
  auto* cmd_to = cmd_youla->add_subcommand("to-iop", "Q -> (X, Y, W, Z)");
  cmd_to->add_option("--q", q_path, "Youla parameter JSON")->required();
  cmd_to->add_option("--dcf", dcf_path, "Doubly-coprime factorization JSON")->required();
  cmd_to->add_option("--out", out_path, "Write the quadruple here");
  auto* cmd_from = cmd_youla->add_subcommand("from-iop", "(X, Y, W, Z) -> Q");
  cmd_from->add_option("--quad", quad_path, "Quadruple JSON")->required();
  cmd_from->add_option("--dcf", dcf_path, "Doubly-coprime factorization JSON")->required();
  cmd_from->add_option("--out", out_path, "Write Q here");
  auto* cmd_dcf = cmd_youla->add_subcommand("verify-dcf", "Check a doubly-coprime factorization");
  cmd_dcf->add_option("--plant", plant, "Plant JSON")->required();
  cmd_dcf->add_option("--dcf", dcf_path, "Doubly-coprime factorization JSON")->required();
  cmd_dcf->add_option("--tol", dcf_tol, "Coefficient tolerance")->check(CLI::PositiveNumber);

  bool sweep = false;
  auto* cmd_bench = app.add_subcommand("bench-paper", "Reproduce the benchmark case studies");
  cmd_bench->add_flag("--sweep", sweep, "Also report optimal cost for N = 2, 4, ..., 10");
  cmd_bench->add_option("--out", out_path, "Write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const Format fmt = format_from_string(format);
    if (cmd_synth->parsed()) {
      synth.format = format;
      return run_synth(synth, out, err);
    }
    if (cmd_stab->parsed()) {
      const StabilityReport r = check_internal_stability(parse_plant(plant), parse_rational_matrix(controller));
      emit(out, stability_json(r), stability_text(r), fmt, out_path);
      return r.stabilizing ? kExitOk : kExitVerificationFailed;
    }
    if (cmd_iop->parsed()) {
      const MembershipReport r = check_iop_membership(parse_plant(plant), parse_quad(quad_path), tol);
      emit(out, membership_json(r), membership_text(r), fmt, out_path);
      return r.member ? kExitOk : kExitVerificationFailed;
    }
    if (cmd_qi->parsed()) {
      const SparsityPattern s = parse_pattern(pattern);
      SparsityPattern g;
      if (!support.empty()) g = io::decode_pattern(io::read_file(support));
      else if (!plant.empty()) g = SparsityPattern::support_of(parse_rational_matrix(plant));
      else throw std::invalid_argument("qi-check needs --plant-support or --plant");
      const bool qi = qi_check_sparsity(s, g);
      emit(out, Json{{"quadratically_invariant", qi}},
           std::string("quadratic invariance: ") + (qi ? "yes" : "no") + "\n", fmt, "");
      return kExitOk;
    }
    if (cmd_to->parsed()) {
      const ClosedLoopQuad quad =
          youla_to_iop(parse_rational_matrix(q_path), io::decode_dcf(io::read_file(dcf_path)));
      const Json j = io::encode(quad);
      emit(out, j, j.dump(2) + "\n", fmt, out_path);
      return kExitOk;
    }
    if (cmd_from->parsed()) {
      const RationalMatrix Q = iop_to_youla(parse_quad(quad_path), io::decode_dcf(io::read_file(dcf_path)));
      const Json j = io::encode(Q);
      emit(out, j, j.dump(2) + "\n", fmt, out_path);
      return kExitOk;
    }
    if (cmd_dcf->parsed()) {
      const DcfReport r = verify_dcf(parse_rational_matrix(plant), io::decode_dcf(io::read_file(dcf_path)), dcf_tol);
      emit(out, dcf_json(r), std::string("doubly-coprime factorization: ") + (r.valid ? "PASS" : "FAIL") + "\n",
           fmt, "");
      return r.valid ? kExitOk : kExitVerificationFailed;
    }
    if (cmd_bench->parsed()) {
      const CaseStudies b = run_case_studies(sweep);
      emit(out, benchmarks_json(b), benchmarks_text(b), fmt, out_path);
      return b.passed() ? kExitOk : kExitVerificationFailed;
    }
  } catch (const UnstableParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerificationFailed;
  } catch (const MembershipError& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerificationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace iop::cli
