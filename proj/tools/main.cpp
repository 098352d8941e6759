#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "annihilator/problem.hpp"

namespace {

struct Flags {
  std::string in;
  std::string f;
  std::string out;
  std::string samples;
  std::string csv;
  std::string levels;
  double tol = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
  int grid = 0;
};

CLI::App* add_common(CLI::App& app, const char* name, const char* about, Flags& fl) {
  CLI::App* sub = app.add_subcommand(name, about);
  sub->add_option("--out", fl.out, "report JSON (stdout when omitted)");
  sub->add_option("--tol", fl.tol, "residual tolerance");
  sub->add_option("--seed", fl.seed, "seed for every multistart");
  sub->add_option("--grid", fl.grid, "number of CSV sample points");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth circle-valued annihilators for finite families of functions on [0, 1]"};
  app.require_subcommand(1);
  Flags fl;

  CLI::App* annihilate = add_common(app, "annihilate", "build e^{i theta} annihilating every input", fl);
  annihilate->add_option("--in", fl.in, "problem JSON or list of functions")->required();
  annihilate->add_option("--samples", fl.samples, "CSV samples of theta");

  CLI::App* hobby = add_common(app, "hobby-rice", "sign function with few switches annihilating real inputs", fl);
  hobby->add_option("--in", fl.in, "problem JSON or list of functions")->required();

  CLI::App* scaling = add_common(app, "scaling", "compression experiment on one function", fl);
  scaling->add_option("--f", fl.f, "function JSON")->required();
  scaling->add_option("--p", fl.p, "exponent p > 1");
  scaling->add_option("--levels", fl.levels, "levels as a:b");
  scaling->add_option("--csv", fl.csv, "per-level trend CSV");
  scaling->add_option("--samples", fl.samples, "unused; accepted for symmetry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ann::ProblemSpec spec;
    CLI::App* sub = app.get_subcommands().front();
    if (sub == scaling) {
      spec.functions = {ann::function_from_json(ann::read_json_file(fl.f))};
      spec.mode = ann::Mode::Scaling;
      if (sub->count("--p")) spec.p = fl.p;
      if (sub->count("--levels")) spec.levels = ann::parse_levels(fl.levels);
      if (sub->count("--csv")) spec.csv = fl.csv;
    } else {
      spec = ann::spec_from_json(ann::read_json_file(fl.in));
      spec.mode = sub == annihilate ? ann::Mode::Annihilate : ann::Mode::HobbyRice;
      if (sub == annihilate && sub->count("--samples")) spec.samples = fl.samples;
    }
    if (sub->count("--out")) spec.out = fl.out;
    if (sub->count("--tol")) {
      if (spec.mode == ann::Mode::HobbyRice) spec.hobby_rice_tol = fl.tol;
      else spec.tol = fl.tol;
    }
    if (sub->count("--seed")) spec.seed = fl.seed;
    if (sub->count("--grid")) spec.grid = fl.grid;
    return ann::run(spec, std::cout, std::cerr);
  } catch (const ann::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  }
}
