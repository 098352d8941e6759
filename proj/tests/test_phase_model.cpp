#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "annihilator/errors.hpp"
#include "annihilator/phase_model.hpp"
#include "support.hpp"

using namespace ann;

namespace {

constexpr double kPi = std::numbers::pi;

bool same(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-15) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("build_step_phase at the centre") {
  const StepPhase s = build_step_phase(0.0);
  CHECK(same(s.jump_locations(), {-0.5, 0.0, 0.5}));
  CHECK(same(s.jump_sizes(), {kPi / 2, kPi / 2, kPi / 2}));
  CHECK(s.base_value() == 0.0);
}

TEST_CASE("build_step_phase drops empty intervals") {
  // z = 1: lengths 1, 1/2, 0, 1/2
  const StepPhase one = build_step_phase(1.0);
  CHECK(same(one.jump_locations(), {0.0, 0.5}));
  CHECK(one(-0.5) == 0.0);
  CHECK(one(0.25) == kPi / 2);
  CHECK(one(0.75) == 3 * kPi / 2);
  // z = i: lengths 1/2, 1, 1/2, 0
  const StepPhase up = build_step_phase({0.0, 1.0});
  CHECK(same(up.jump_locations(), {-0.5, 0.5}));
  CHECK(up(-0.75) == 0.0);
  CHECK(up(0.0) == kPi / 2);
  CHECK(up(0.75) == kPi);
  CHECK_THROWS_AS(build_step_phase({0.8, 0.8}), DomainError);
}

TEST_CASE("step integral reproduces its parameter") {
  CHECK(std::abs(step_integral_exp(build_step_phase(0.0))) <= 1e-15);
  CHECK(std::abs(step_integral_exp(build_step_phase(1.0)) - 1.0) <= 1e-15);
  const Complex z(0.3, -0.4);
  const StepPhase s = build_step_phase(z);
  CHECK(std::abs(step_integral_exp(s) - z) <= 1e-15);
  // direct summation over the four intervals
  const double len[4] = {(1 + 0.3) / 2, (1 - 0.4) / 2, (1 - 0.3) / 2, (1 + 0.4) / 2};
  const Complex dir = len[0] + Complex(0, 1) * len[1] - len[2] - Complex(0, 1) * len[3];
  CHECK(std::abs(dir - z) <= 1e-15);

  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Complex w = testing::random_disk_point(rng);
    if (i % 10 == 0) w /= std::abs(w);  // boundary circle too
    worst = std::max(worst, std::abs(step_integral_exp(build_step_phase(w)) - w));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("clamp_step examples") {
  const StepPhase c = clamp_step(build_step_phase(0.0), 0.1);
  CHECK(same(c.jump_locations(), {-0.5, 0.0, 0.5, 0.9}));
  CHECK(same(c.jump_sizes(), {kPi / 2, kPi / 2, kPi / 2, kPi / 2}));
  CHECK(c(0.9) == doctest::Approx(2 * kPi).epsilon(1e-15));

  const StepPhase s = build_step_phase(1.0);
  const StepPhase d = clamp_step(s, 0.6);
  for (int i = 0; i <= 200; ++i) {
    const double t = -1.0 + 2.0 * i / 200;
    double expected;
    if (t < -0.4) expected = 0.0;
    else if (t < 0.4) expected = s(t);
    else expected = 2 * kPi;
    CHECK(d(t) == doctest::Approx(expected).epsilon(1e-15));
  }
  for (double h : {0.05, 0.3, 0.77}) CHECK(clamp_step(build_step_phase({0.1, 0.2}), h)(1 - h) ==
                                           doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK_THROWS_AS(clamp_step(s, 0.0), DomainError);
  CHECK_THROWS_AS(clamp_step(s, 1.0), DomainError);
}

TEST_CASE("mollified single jump") {
  const StepPhase s({0.0}, {2 * kPi}, 0.0, -1.0, 1.0);
  const SmoothPhase m = mollify(s, 0.2);
  CHECK(m.value(0.0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(m.value(0.2) == 2 * kPi);
  CHECK(m.value(0.5) == 2 * kPi);
  CHECK(m.value(-0.2) == 0.0);
  CHECK(m.value(-0.7) == 0.0);
  CHECK_THROWS_AS(mollify(s, 0.0), DomainError);
}

TEST_CASE("window phases run from 0 to 2 pi and are flat at the ends") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> hd(0.01, 0.9);
  for (int i = 0; i < 200; ++i) {
    const Complex z = testing::random_disk_point(rng);
    const double h = hd(rng);
    const SmoothPhase w = window_phase(z, h);
    CHECK(eval_phase(w, -1.0) == 0.0);
    CHECK(eval_phase(w, 1.0) == doctest::Approx(2 * kPi).epsilon(1e-15));
    CHECK(eval_phase_deriv(w, -1.0) == 0.0);
    CHECK(eval_phase_deriv(w, 1.0) == 0.0);
    for (int k = 0; k <= 400; ++k) REQUIRE(eval_phase_deriv(w, -1.0 + k / 200.0) >= 0.0);
  }
}

TEST_CASE("eval examples") {
  const SmoothPhase empty = SmoothPhase::constant(0.0);
  CHECK(eval_phase(empty, 0.4) == 0.0);
  CHECK(eval_phase_deriv(empty, 0.4) == 0.0);
  const SmoothPhase one({{0.5, 0.25, 2 * kPi}}, 0.0, 0.0, 1.0);
  CHECK(eval_phase(one, 0.75) == 2 * kPi);
  CHECK(eval_phase_deriv(one, 0.75) == 0.0);
}

TEST_CASE("derivative against central differences") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PhaseTerm> terms;
  for (int k = 0; k < 6; ++k) terms.push_back({u(rng), 0.05 + 0.3 * u(rng), 4 * u(rng) - 2});
  const SmoothPhase theta(terms, 0.3, 0.0, 1.0);
  int checked = 0;
  while (checked < 50) {
    const double t = u(rng);
    const double d = theta.derivative(t);
    if (std::abs(d) < 1e-3) continue;  // relative error is meaningless near zeros
    const double h = 1e-6;
    const double fd = (theta.value(t + h) - theta.value(t - h)) / (2 * h);
    CHECK(std::abs(fd - d) <= 1e-6 * std::abs(d));
    ++checked;
  }
}

TEST_CASE("batch evaluation matches pointwise evaluation") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PhaseTerm> terms;
  for (int k = 0; k < 12; ++k) terms.push_back({u(rng), 0.001 + 0.1 * u(rng), 3 * u(rng)});
  const SmoothPhase theta(terms, -1.0, 0.0, 1.0);
  std::vector<double> ts(15);
  for (double& t : ts) t = u(rng);
  std::vector<double> v(15), d(15);
  theta.evaluate(ts, v, d);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(v[i] == theta.value(ts[i]));
    CHECK(d[i] == theta.derivative(ts[i]));
  }
}

TEST_CASE("total variation") {
  const QuadratureConfig cfg;
  const SmoothPhase w = window_phase({0.2, 0.5}, 0.1);
  CHECK(phase_total_variation(w, -1.0, 1.0, cfg) == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(phase_total_variation(SmoothPhase::constant(3.0), 0.0, 1.0, cfg) == 0.0);

  // alternating +pi / -pi jumps: the quadrature path
  const SmoothPhase apart({{0.2, 0.05, kPi}, {0.5, 0.05, -kPi}, {0.8, 0.05, kPi}}, 0.0, 0.0, 1.0);
  CHECK(phase_total_variation(apart, 0.0, 1.0, cfg) == doctest::Approx(3 * kPi).epsilon(1e-11));
  CHECK(testing::reference_total_variation(apart, 0.0, 1.0) == doctest::Approx(3 * kPi).epsilon(1e-12));
  const SmoothPhase overlap({{0.5, 0.1, kPi}, {0.55, 0.1, -kPi}}, 0.0, 0.0, 1.0);
  CHECK(phase_total_variation(overlap, 0.0, 1.0, cfg) < 2 * kPi);
  CHECK_THROWS_AS(phase_total_variation(apart, 0.7, 0.2, cfg), DomainError);
}

TEST_CASE("mollifying never increases total variation") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const QuadratureConfig cfg;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> locs, sizes;
    double sum = 0.0;
    for (int k = 0; k < 6; ++k) {
      locs.push_back(-1.0 + (k + u(rng)) / 3.0);
      sizes.push_back(4 * u(rng) - 2);
      sum += std::abs(sizes.back());
    }
    const StepPhase s(locs, sizes, 0.0, -1.0, 1.0);
    const SmoothPhase m = mollify(s, 0.01 + 0.5 * u(rng));
    CHECK(phase_total_variation(m, -3.0, 3.0, cfg) <= sum + 1e-10);
  }
}

TEST_CASE("window phase is Lipschitz in z") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Mollifier& m = Mollifier::standard();
  for (double h : {0.02, 0.1, 0.5}) {
    const double K = 2 * kPi * m.sup_density() / h;
    for (int i = 0; i < 40; ++i) {
      Complex z1 = 0.999 * testing::random_disk_point(rng);
      const Complex z2 = z1 + 1e-3 * testing::random_disk_point(rng);
      if (std::abs(z2) > 1.0) continue;
      const SmoothPhase a = window_phase(z1, h);
      const SmoothPhase b = window_phase(z2, h);
      double sup = 0.0;
      for (int k = 0; k <= 4000; ++k) {
        const double t = -1.0 + k / 2000.0;
        sup = std::max(sup, std::abs(a.value(t) - b.value(t)));
      }
      CHECK(sup <= K * std::abs(z1 - z2));
    }
  }
}

TEST_CASE("affine and plus") {
  const SmoothPhase w = window_phase(0.0, 0.5);
  const SmoothPhase a = w.affine(0.25, 0.5, 0.0, 1.0);
  for (double s : {-0.9, -0.3, 0.0, 0.4, 0.8}) CHECK(a.value(0.5 + 0.25 * s) == doctest::Approx(w.value(s)));
  const SmoothPhase sum = a.plus(SmoothPhase::constant(1.0));
  CHECK(sum.value(0.6) == doctest::Approx(a.value(0.6) + 1.0));
  CHECK(sum.terms().size() == a.terms().size());
  CHECK(a.breakpoints().size() == 3 * a.terms().size());
  CHECK_THROWS_AS(w.affine(0.0, 0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(SmoothPhase({{0.5, 0.0, 1.0}}, 0.0, 0.0, 1.0), DomainError);
}

TEST_CASE("sample export") {
  std::ostringstream out;
  write_phase_samples(SmoothPhase::constant(0.0), 3, out);
  CHECK(out.str() == "t,theta,dtheta,re,im\n0,0,0,1,0\n0.5,0,0,1,0\n1,0,0,1,0\n");

  const SmoothPhase theta({{0.3, 0.1, 2.0}, {0.7, 0.2, -1.0}}, 0.5, 0.0, 1.0);
  std::ostringstream big;
  write_phase_samples(theta, 101, big);
  std::istringstream in(big.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,theta,dtheta,re,im");
  int rows = 0;
  while (std::getline(in, line)) {
    double t, v, d, re, im;
    char c;
    std::istringstream row(line);
    row >> t >> c >> v >> c >> d >> c >> re >> c >> im;
    CHECK(std::abs(re * re + im * im - 1.0) <= 1e-12);
    ++rows;
  }
  CHECK(rows == 101);
  std::ostringstream bad;
  CHECK_THROWS_AS(write_phase_samples(theta, 1, bad), DomainError);
}
