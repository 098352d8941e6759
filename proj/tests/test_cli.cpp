#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "annihilator/errors.hpp"
#include "annihilator/problem.hpp"
#include "support.hpp"

using namespace ann;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "annihilator_test_cli";
  fs::create_directories(d);
  return d;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(ANNIHILATOR_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string data(const char* name) { return std::string(ANNIHILATOR_TEST_DATA) + "/" + name; }

ProblemSpec suite_spec() {
  ProblemSpec s;
  s.functions = {Function::constant(1.0), testing::complex_poly({0, 1, 0}, {0, 0, 1})};
  s.seed = 7;
  return s;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_spec(const ProblemSpec& s) {
  std::ostringstream out, err;
  const int code = run(s, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("spec round trip") {
  ProblemSpec s = suite_spec();
  s.mode = Mode::Scaling;
  s.tol = 1e-7;
  s.pack_real = true;
  s.p = 1.5;
  s.levels = {2, 3};
  s.out = "a.json";
  s.csv = "b.csv";
  CHECK(spec_from_json(spec_to_json(s)) == s);
  CHECK(spec_from_json(parse_json_text(dump(spec_to_json(s)), "spec")) == s);

  const ProblemSpec bare = spec_from_json(json::parse("[1, {\"re\": 0, \"im\": 2}]"));
  REQUIRE(bare.functions.size() == 2);
  CHECK(eval_f(bare.functions[1], 0.4) == Complex(0.0, 2.0));
  CHECK(bare.tol == 1e-6);

  CHECK_THROWS_AS(spec_from_json(json::parse("{\"tol\": \"small\"}")), InputError);
  CHECK_THROWS_AS(spec_from_json(json::parse("{\"mode\": \"fold\"}")), InputError);
  CHECK_THROWS_AS(spec_from_json(json::parse("3")), InputError);
  CHECK_THROWS_AS(function_from_json(json::parse("{\"breakpoints\": [0, 1]}")), InputError);
  CHECK_THROWS_AS(function_from_json(json::parse("{\"breakpoints\": [0, 1], \"pieces\": [{\"re\": []}]}")),
                  InputError);
}

TEST_CASE("malformed JSON reports line and column") {
  try {
    read_json_file(data("malformed.json"));
    FAIL("no error");
  } catch (const InputError& e) {
    // the column is the last character of the offending token, "pieces"
    CHECK(std::string(e.what()).find("malformed.json:3:35") != std::string::npos);
  }
  try {
    parse_json_text("{\n  \"a\": ,\n}", "x.json");
    FAIL("no error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()) == "x.json:2:8: malformed JSON");
  }
  CHECK_THROWS_AS(read_json_file(data("missing.json")), InputError);
}

TEST_CASE("parse_levels") {
  CHECK(parse_levels("1:6") == std::vector<int>{1, 2, 3, 4, 5, 6});
  CHECK(parse_levels("3") == std::vector<int>{3});
  CHECK(parse_levels("2:2") == std::vector<int>{2});
  CHECK_THROWS_AS(parse_levels("6:1"), InputError);
  CHECK_THROWS_AS(parse_levels("a:b"), InputError);
  CHECK_THROWS_AS(parse_levels("1:"), InputError);
  CHECK_THROWS_AS(parse_levels("1:3x"), InputError);
}

TEST_CASE("run: exit codes") {
  const Run ok = run_spec(suite_spec());
  CHECK(ok.code == 0);
  const json report = json::parse(ok.out);
  CHECK(report.at("status") == "ok");
  CHECK(report.at("max_residual").get<double>() <= 1e-6);
  CHECK(report.at("residuals").size() == 2);

  ProblemSpec empty;
  CHECK(run_spec(empty).code == 1);

  ProblemSpec bad_p = suite_spec();
  bad_p.mode = Mode::Scaling;
  bad_p.functions.pop_back();
  bad_p.p = 1.0;
  CHECK(run_spec(bad_p).code == 1);

  ProblemSpec bad_grid = suite_spec();
  bad_grid.grid = 1;
  CHECK(run_spec(bad_grid).code == 1);

  ProblemSpec unreachable = suite_spec();
  unreachable.tol = 1e-300;
  const Run fail = run_spec(unreachable);
  CHECK(fail.code == 2);
  CHECK(fail.err.find("solver failure") != std::string::npos);

  ProblemSpec hr;
  hr.mode = Mode::HobbyRice;
  hr.functions = {testing::real_poly({1, 0.3}), testing::real_poly({0, 0, 1})};
  hr.hobby_rice_tol = 1e-300;
  hr.hobby_rice_seeds = 2;
  CHECK(run_spec(hr).code == 2);

  ProblemSpec unwritable = suite_spec();
  unwritable.out = "/nonexistent/dir/report.json";
  CHECK(run_spec(unwritable).code == 1);
}

TEST_CASE("run: hobby-rice splits complex inputs") {
  ProblemSpec s;
  s.mode = Mode::HobbyRice;
  s.functions = {Function::constant(1.0), testing::complex_poly({0, 1}, {0, 0})};
  const Run r = run_spec(s);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("parts") == 2);
  const auto t = j.at("switch_points").get<std::vector<double>>();
  REQUIRE(t.size() == 2);
  CHECK(std::abs(t[0] - 0.25) <= 1e-10);
  CHECK(std::abs(t[1] - 0.75) <= 1e-10);
}

TEST_CASE("run: output file and samples") {
  const fs::path dir = scratch_dir();
  ProblemSpec s = suite_spec();
  s.out = (dir / "report.json").string();
  s.samples = (dir / "theta.csv").string();
  s.grid = 5;
  const Run r = run_spec(s);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const json j = json::parse(slurp(s.out));
  CHECK(j.at("status") == "ok");

  const std::string csv = slurp(s.samples);
  CHECK(csv.rfind("t,theta,dtheta,re,im\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);

  // the same rows as the phase writer
  std::ostringstream direct;
  const AnnihilatorResult res = solve_annihilator(s.functions, annihilator_options(s));
  write_phase_samples(res.theta, 5, direct);
  CHECK(csv == direct.str());
}

TEST_CASE("export_samples on a constant phase") {
  const fs::path p = scratch_dir() / "zero.csv";
  export_samples(SmoothPhase::constant(0.0), 3, p.string());
  CHECK(slurp(p) == "t,theta,dtheta,re,im\n0,0,0,1,0\n0.5,0,0,1,0\n1,0,0,1,0\n");
  CHECK_THROWS_AS(export_samples(SmoothPhase::constant(0.0), 3, "/nonexistent/dir/x.csv"), InputError);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  ProblemSpec a = suite_spec();
  a.functions.push_back(testing::complex_poly({-0.5, 0, 0, 1}, {-1.0 / 3, 1}));
  ::setenv("ANNIHILATOR_THREADS", "1", 1);
  const Run one = run_spec(a);
  const Run again = run_spec(a);
  ::setenv("ANNIHILATOR_THREADS", "3", 1);
  const Run three = run_spec(a);
  ::unsetenv("ANNIHILATOR_THREADS");
  REQUIRE(one.code == 0);
  CHECK(one.out == again.out);
  CHECK(one.out == three.out);

  ProblemSpec other = a;
  other.seed = 8;
  CHECK(run_spec(other).code == 0);
}

TEST_CASE("thread count comes from the environment") {
  ::setenv("ANNIHILATOR_THREADS", "5", 1);
  CHECK(annihilator_options(suite_spec()).threads == 5);
  ::setenv("ANNIHILATOR_THREADS", "junk", 1);
  CHECK(annihilator_options(suite_spec()).threads >= 1);
  ::unsetenv("ANNIHILATOR_THREADS");
}

TEST_CASE("command line front end") {
  const fs::path dir = scratch_dir();
  CHECK(cli("hobby-rice --in " + data("one_and_t.json")) == 0);
  CHECK(cli("annihilate --in " + data("suite_n2.json") + " --out " + (dir / "a.json").string() +
            " --samples " + (dir / "a.csv").string() + " --grid 9 --seed 7 --tol 1e-6") == 0);
  CHECK(cli("annihilate --in " + data("suite_n2.json") + " --out " + (dir / "b.json").string() +
            " --samples " + (dir / "b.csv").string() + " --grid 9 --seed 7 --tol 1e-6") == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

  CHECK(cli("scaling --f " + data("one.json") + " --p 2 --levels 1:2 --out " +
            (dir / "s.json").string() + " --csv " + (dir / "s.csv").string()) == 0);
  const std::string csv = slurp(dir / "s.csv");
  CHECK(csv.rfind("n,seminorm,lower_bound_slope,identity_error,membership_residual,membership_bound,ok\n", 0) == 0);

  CHECK(cli("annihilate --in " + data("malformed.json")) == 1);
  CHECK(cli("annihilate --in " + data("empty.json")) == 1);
  CHECK(cli("annihilate") == 1);
  CHECK(cli("frobnicate") == 1);
  CHECK(cli("scaling --f " + data("one.json") + " --levels 3:1") == 1);
  CHECK(cli("annihilate --in " + data("suite_n2.json") + " --tol 1e-300") == 2);
  CHECK(cli("--help") == 0);
}
