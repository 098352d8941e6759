#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "annihilator/annihilator.hpp"
#include "annihilator/function_model.hpp"
#include "annihilator/hobby_rice.hpp"
#include "annihilator/phase_model.hpp"
#include "annihilator/sobolev.hpp"

namespace ann {

using json = nlohmann::json;

/// Malformed or invalid user input (maps to exit status 1).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses JSON text; syntax errors become InputError with line and column.
json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

/// {"breakpoints": [...], "pieces": [{"re": [...], "im": [...]}, ...]}.
json function_to_json(const Function& f);
/// Also accepts a bare number (a real constant) or {"re": x, "im": y}.
Function function_from_json(const json& j);
/// A list of functions, or an object carrying one under "functions".
std::vector<Function> functions_from_json(const json& j);

json complex_to_json(Complex z);
json phase_to_json(const SmoothPhase& theta);
json norms_to_json(const NormReport& r);

json annihilator_report(const AnnihilatorResult& r, const AnnihilatorOptions& opts);
json hobby_rice_report(const HobbyRiceResult& r, std::size_t parts);
json scaling_report(const ScalingReport& r, const AnnihilatorOptions& opts);

/// `n,seminorm,lower_bound_slope,identity_error,membership_residual,membership_bound,ok`
void write_scaling_csv(const ScalingReport& r, std::ostream& out);

/// Stable text form: two-space indentation and a trailing newline.
std::string dump(const json& j);

}  // namespace ann
