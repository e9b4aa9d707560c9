#pragma once

#include <string>
#include <string_view>

#include "iop/json_io.hpp"
#include "iop/synthesis.hpp"
#include "iop/verify.hpp"
#include "iop/youla.hpp"

namespace iop::cli {

using io::Json;

enum class Format { json, text };

Format format_from_string(std::string_view s);

Json poles_json(const std::vector<Complex>& poles);
Json stability_json(const StabilityReport& report);
Json membership_json(const MembershipReport& report);
Json dcf_json(const DcfReport& report);

// Timing fields live under "timings" only, so reports of identical runs
// differ nowhere else.
Json synthesis_json(const SynthesisProblem& problem, const SynthesisResult& result);
std::string synthesis_text(const SynthesisProblem& problem, const SynthesisResult& result);
std::string emit_report(const SynthesisProblem& problem, const SynthesisResult& result, Format format);

std::string stability_text(const StabilityReport& report);
std::string membership_text(const MembershipReport& report);

}  // namespace iop::cli
