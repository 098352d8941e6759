#include "annihilator/problem.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "annihilator/errors.hpp"
#include "annihilator/parallel.hpp"

namespace ann {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Annihilate: return "annihilate";
    case Mode::HobbyRice: return "hobby-rice";
    case Mode::Scaling: return "scaling";
  }
  return "annihilate";
}

Mode mode_from_string(const std::string& s) {
  if (s == "annihilate") return Mode::Annihilate;
  if (s == "hobby-rice") return Mode::HobbyRice;
  if (s == "scaling") return Mode::Scaling;
  throw InputError("unknown mode \"" + s + "\"");
}

json spec_to_json(const ProblemSpec& s) {
  json fs = json::array();
  for (const Function& f : s.functions) fs.push_back(function_to_json(f));
  return {{"mode", to_string(s.mode)},
          {"functions", fs},
          {"tol", s.tol},
          {"quadrature_tol", s.quadrature_tol},
          {"hobby_rice_tol", s.hobby_rice_tol},
          {"hobby_rice_seeds", s.hobby_rice_seeds},
          {"pack_real", s.pack_real},
          {"seed", s.seed},
          {"grid", s.grid},
          {"p", s.p},
          {"levels", s.levels},
          {"out", s.out},
          {"samples", s.samples},
          {"csv", s.csv}};
}

ProblemSpec spec_from_json(const json& j) {
  ProblemSpec s;
  if (j.is_array()) {
    s.functions = functions_from_json(j);
    return s;
  }
  if (!j.is_object()) throw InputError("problem must be a JSON object or a list of functions");
  try {
    if (j.contains("mode")) s.mode = mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("functions")) s.functions = functions_from_json(j.at("functions"));
    if (j.contains("tol")) s.tol = j.at("tol").get<double>();
    if (j.contains("quadrature_tol")) s.quadrature_tol = j.at("quadrature_tol").get<double>();
    if (j.contains("hobby_rice_tol")) s.hobby_rice_tol = j.at("hobby_rice_tol").get<double>();
    if (j.contains("hobby_rice_seeds")) s.hobby_rice_seeds = j.at("hobby_rice_seeds").get<int>();
    if (j.contains("pack_real")) s.pack_real = j.at("pack_real").get<bool>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("grid")) s.grid = j.at("grid").get<int>();
    if (j.contains("p")) s.p = j.at("p").get<double>();
    if (j.contains("levels")) s.levels = j.at("levels").get<std::vector<int>>();
    if (j.contains("out")) s.out = j.at("out").get<std::string>();
    if (j.contains("samples")) s.samples = j.at("samples").get<std::string>();
    if (j.contains("csv")) s.csv = j.at("csv").get<std::string>();
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid problem field: ") + e.what());
  }
  return s;
}

void validate(const ProblemSpec& s) {
  if (s.functions.empty()) throw InputError("the problem needs at least one function");
  if (!(s.tol > 0.0) || !(s.quadrature_tol > 0.0) || !(s.hobby_rice_tol > 0.0))
    throw InputError("tolerances must be positive");
  if (s.hobby_rice_seeds < 1) throw InputError("hobby_rice_seeds must be positive");
  if (s.grid < 2) throw InputError("grid must be at least 2");
  if (s.mode == Mode::Scaling) {
    if (!(s.p > 1.0)) throw InputError("scaling needs p > 1");
    if (s.levels.empty()) throw InputError("scaling needs at least one level");
    for (int n : s.levels)
      if (n < 1 || n > 30) throw InputError("levels must lie in 1..30");
    if (s.functions.size() != 1) throw InputError("scaling takes exactly one function");
  }
}

AnnihilatorOptions annihilator_options(const ProblemSpec& s) {
  AnnihilatorOptions o;
  o.tol = s.tol;
  o.pack_real = s.pack_real;
  o.seed = s.seed;
  o.threads = max_threads();
  o.quadrature.abs_tol = s.quadrature_tol;
  o.hobby_rice.tol = s.hobby_rice_tol;
  o.hobby_rice.seeds = s.hobby_rice_seeds;
  return o;
}

std::vector<int> parse_levels(const std::string& text) {
  try {
    const auto colon = text.find(':');
    std::size_t used = 0;
    if (colon == std::string::npos) {
      const int n = std::stoi(text, &used);
      if (used != text.size()) throw InputError("");
      return {n};
    }
    const std::string a = text.substr(0, colon);
    const std::string b = text.substr(colon + 1);
    const int lo = std::stoi(a, &used);
    if (used != a.size()) throw InputError("");
    const int hi = std::stoi(b, &used);
    if (used != b.size() || hi < lo) throw InputError("");
    std::vector<int> out;
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  } catch (const std::exception&) {
    throw InputError("levels must look like 1:6 or 3, got \"" + text + "\"");
  }
}

void export_samples(const SmoothPhase& theta, int grid_size, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  write_phase_samples(theta, grid_size, out);
  if (!out) throw InputError("error writing " + path);
}

namespace {

void emit(const json& report, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << dump(report);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << dump(report);
  if (!f) throw InputError("error writing " + path);
}

std::vector<Function> real_parts(const std::vector<Function>& fs) {
  std::vector<Function> out;
  for (const Function& f : fs) {
    if (f.is_real()) {
      out.push_back(f);
      continue;
    }
    out.push_back(f.real_part());
    out.push_back(f.imag_part());
  }
  return out;
}

}  // namespace

int run(const ProblemSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    validate(spec);
    const AnnihilatorOptions opts = annihilator_options(spec);
    switch (spec.mode) {
      case Mode::Annihilate: {
        const AnnihilatorResult r = solve_annihilator(spec.functions, opts);
        emit(annihilator_report(r, opts), spec.out, out);
        if (!spec.samples.empty()) export_samples(r.theta, spec.grid, spec.samples);
        return 0;
      }
      case Mode::HobbyRice: {
        const std::vector<Function> gs = real_parts(spec.functions);
        HobbyRiceOptions hr;
        hr.tol = spec.hobby_rice_tol;
        hr.seeds = spec.hobby_rice_seeds;
        hr.seed = spec.seed;
        hr.threads = opts.threads;
        const HobbyRiceResult r = solve_hobby_rice(gs, IntervalMask::unit(), hr);
        emit(hobby_rice_report(r, gs.size()), spec.out, out);
        return 0;
      }
      case Mode::Scaling: {
        const ScalingReport r = scaling_experiment(spec.functions[0], spec.p, spec.levels, opts);
        emit(scaling_report(r, opts), spec.out, out);
        if (!spec.csv.empty()) {
          std::ofstream f(spec.csv, std::ios::binary);
          if (!f) throw InputError("cannot write " + spec.csv);
          write_scaling_csv(r, f);
        }
        for (const ScalingLevel& l : r.levels)
          if (!l.ok) {
            err << "level " << l.n << " failed: " << l.error << "\n";
            return 2;
          }
        return 0;
      }
    }
    return 1;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return 1;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    err << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const CertificationFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const NearDependenceError& e) {
    err << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const ConsistencyError& e) {
    err << "solver failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ann
