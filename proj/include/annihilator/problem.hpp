#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "annihilator/serialization.hpp"

namespace ann {

enum class Mode { Annihilate, HobbyRice, Scaling };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct ProblemSpec {
  Mode mode = Mode::Annihilate;
  std::vector<Function> functions;
  double tol = 1e-6;
  double quadrature_tol = 1e-11;
  double hobby_rice_tol = 1e-10;
  int hobby_rice_seeds = 64;
  bool pack_real = false;
  std::uint64_t seed = 0;
  int grid = 1001;  // samples written to the CSV
  double p = 2.0;
  std::vector<int> levels{1, 2, 3, 4, 5, 6};
  std::string out;
  std::string samples;
  std::string csv;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

json spec_to_json(const ProblemSpec& s);
/// Missing fields keep their defaults. Throws InputError.
ProblemSpec spec_from_json(const json& j);

/// Throws InputError when the spec cannot be run.
void validate(const ProblemSpec& s);

AnnihilatorOptions annihilator_options(const ProblemSpec& s);

/// "a:b" or a single level.
std::vector<int> parse_levels(const std::string& text);

/// CSV `t,theta,dtheta,re,im` at grid_size uniform points.
void export_samples(const SmoothPhase& theta, int grid_size, const std::string& path);

/// Runs the pipeline for spec.mode and writes the report (to spec.out, or
/// `out` when empty). Returns 0 on success, 1 on input error, 2 on solver
/// failure. Diagnostics go to `err`.
int run(const ProblemSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace ann
