#include "annihilator/serialization.hpp"

#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "annihilator/errors.hpp"

namespace ann {

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the last character read, i.e. the end of the bad token
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << source << ":" << line << ":" << column << ": malformed JSON";
    throw InputError(msg.str());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

json function_to_json(const Function& f) {
  json pieces = json::array();
  for (const auto& p : f.pieces()) pieces.push_back({{"re", p.re}, {"im", p.im}});
  return {{"breakpoints", f.breakpoints()}, {"pieces", pieces}};
}

namespace {

std::vector<double> number_list(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const json& x : j) {
    if (!x.is_number()) throw InputError(std::string(what) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

Function function_from_json(const json& j) {
  try {
    if (j.is_number()) return Function::constant(j.get<double>());
    if (!j.is_object()) throw InputError("a function must be a number or an object");
    if (!j.contains("breakpoints")) {
      if (j.contains("re") || j.contains("im")) {
        const double re = j.value("re", 0.0);
        const double im = j.value("im", 0.0);
        return Function::constant({re, im});
      }
      throw InputError("function object needs \"breakpoints\" and \"pieces\"");
    }
    std::vector<double> bps = number_list(j.at("breakpoints"), "breakpoints");
    if (!j.contains("pieces") || !j.at("pieces").is_array())
      throw InputError("function object needs a \"pieces\" array");
    std::vector<PiecewiseComplexFunction::Piece> pieces;
    for (const json& p : j.at("pieces")) {
      if (!p.is_object()) throw InputError("each piece must be an object");
      PiecewiseComplexFunction::Piece piece;
      if (p.contains("re")) piece.re = number_list(p.at("re"), "re");
      if (p.contains("im")) piece.im = number_list(p.at("im"), "im");
      pieces.push_back(std::move(piece));
    }
    return Function(std::move(bps), std::move(pieces));
  } catch (const DomainError& e) {
    throw InputError(std::string("invalid function: ") + e.what());
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid function: ") + e.what());
  }
}

std::vector<Function> functions_from_json(const json& j) {
  const json* list = &j;
  if (j.is_object()) {
    if (!j.contains("functions")) throw InputError("expected a \"functions\" list");
    list = &j.at("functions");
  }
  if (!list->is_array()) throw InputError("\"functions\" must be an array");
  std::vector<Function> out;
  for (const json& f : *list) out.push_back(function_from_json(f));
  return out;
}

json complex_to_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

namespace {

json complex_list(std::span<const Complex> zs) {
  json out = json::array();
  for (const Complex& z : zs) out.push_back(complex_to_json(z));
  return out;
}

}  // namespace

json phase_to_json(const SmoothPhase& theta) {
  json terms = json::array();
  for (const PhaseTerm& t : theta.terms())
    terms.push_back({{"center", t.center}, {"width", t.width}, {"jump", t.jump}});
  return {{"base", theta.base_value()}, {"domain", {theta.lo(), theta.hi()}}, {"terms", terms}};
}

json norms_to_json(const NormReport& r) {
  return {{"p", r.p},
          {"n", r.n},
          {"total_variation", r.total_variation},
          {"seminorm_phase", r.seminorm_phase},
          {"norm_exp_phase", r.norm_exp_phase},
          {"norm_phase", r.norm_phase},
          {"sup_abs_phase", r.sup_abs_phase},
          {"bound_tv", r.bound_tv},
          {"bound_5pin_plus_1", r.bound_5pin_plus_1},
          {"bound_7n1_pi", r.bound_7n1_pi},
          {"bound_sup", r.bound_sup},
          {"satisfied",
           {{"tv", r.tv_ok}, {"exp_phase", r.exp_ok}, {"phase", r.phase_ok}, {"sup", r.sup_ok}}}};
}

json annihilator_report(const AnnihilatorResult& r, const AnnihilatorOptions& opts) {
  const PipelineState& s = r.state;
  double max_gap = 0.0;
  for (const IterateRecord& it : r.history) max_gap = std::max(max_gap, it.consistency_gap);
  json j;
  j["status"] = "ok";
  j["tol"] = opts.tol;
  j["seed"] = opts.seed;
  j["kept"] = r.kept;
  j["nodes"] = s.nodes.nodes;
  j["d"] = s.nodes.d;
  j["condition_estimate"] = s.nodes.condition_estimate;
  j["delta"] = s.certificate.delta;
  j["certificate"] = {{"per_node_margins", s.certificate.per_node_margins},
                      {"margin_sums", s.certificate.margin_sums},
                      {"margin_threshold", s.certificate.margin_threshold},
                      {"z_grid_resolution", s.certificate.z_grid_resolution},
                      {"halvings", s.certificate.halvings}};
  j["eta"] = s.phi.eta;
  j["phi"] = {{"switch_points", s.phi.pattern.switch_points},
              {"leading_sign", s.phi.pattern.leading_sign},
              {"hobby_rice_residual", s.phi.hobby_rice_residual},
              {"discontinuities", s.phi.discontinuities},
              {"r", complex_list(s.phi.r)}};
  j["z0"] = complex_list(r.z0);
  j["residuals"] = complex_list(r.residuals);
  j["max_residual"] = r.max_residual;
  j["iterations"] = r.iterations;
  j["used_fallback"] = r.used_fallback;
  j["max_consistency_gap"] = max_gap;
  j["consistency_tolerance"] = r.consistency_tolerance;
  j["norms"] = norms_to_json(r.norms);
  j["theta"] = phase_to_json(r.theta);
  return j;
}

json hobby_rice_report(const HobbyRiceResult& r, std::size_t parts) {
  return {{"status", "ok"},
          {"parts", parts},
          {"switch_points", r.pattern.switch_points},
          {"leading_sign", r.pattern.leading_sign},
          {"residuals", r.residuals},
          {"max_residual", r.max_residual},
          {"converged_seeds", r.converged_seeds}};
}

json scaling_report(const ScalingReport& r, const AnnihilatorOptions& opts) {
  json levels = json::array();
  for (const ScalingLevel& l : r.levels) {
    json e = {{"n", l.n},
              {"ok", l.ok},
              {"seminorm_upper_bound", l.seminorm},
              {"identity_error", l.identity_error},
              {"membership_residual", l.membership_residual},
              {"membership_bound", l.membership_bound},
              {"lower_bound_slope", l.lower_bound_slope},
              {"delta", l.delta}};
    if (!l.ok) e["error"] = l.error;
    levels.push_back(std::move(e));
  }
  return {{"status", "ok"},
          {"p", r.p},
          {"tol", opts.tol},
          {"seed", opts.seed},
          {"note", "seminorms are int |theta'|^p of constructed annihilators: upper bounds on rho"},
          {"levels", levels},
          {"strictly_increasing", r.strictly_increasing}};
}

void write_scaling_csv(const ScalingReport& r, std::ostream& out) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "n,seminorm,lower_bound_slope,identity_error,membership_residual,membership_bound,ok\n";
  for (const ScalingLevel& l : r.levels)
    buf << l.n << ',' << l.seminorm << ',' << l.lower_bound_slope << ',' << l.identity_error << ','
        << l.membership_residual << ',' << l.membership_bound << ',' << (l.ok ? 1 : 0) << '\n';
  out << buf.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace ann
