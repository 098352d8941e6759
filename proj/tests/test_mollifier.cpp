#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "annihilator/mollifier.hpp"

using namespace ann;

namespace {

double bump(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

// Reference mass of the unnormalized bump on [-1, x].
double reference_mass(double x) {
  boost::math::quadrature::tanh_sinh<double> ts;
  if (x <= -1.0) return 0.0;
  return ts.integrate(bump, -1.0, std::min(x, 1.0), 1e-15);
}

}  // namespace

TEST_CASE("normalization against tanh-sinh") {
  const double mass = reference_mass(1.0);
  const Mollifier& m = Mollifier::standard();
  CHECK(m.normalization() == doctest::Approx(1.0 / mass).epsilon(1e-13));
  CHECK(m.normalization() == doctest::Approx(2.2522836).epsilon(1e-7));
  CHECK(m.sup_density() == doctest::Approx(m.normalization() / std::exp(1.0)).epsilon(1e-15));
}

TEST_CASE("cdf against reference integrals") {
  const Mollifier& m = Mollifier::standard();
  const double C = 1.0 / reference_mass(1.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    worst = std::max(worst, std::abs(m.cdf(x) - C * reference_mass(x)));
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("cdf boundary values and symmetry") {
  const Mollifier& m = Mollifier::standard();
  CHECK(m.cdf(-1.0) == 0.0);
  CHECK(m.cdf(1.0) == 1.0);
  CHECK(m.cdf(0.0) == 0.5);
  CHECK(m.cdf(-3.0) == 0.0);
  CHECK(m.cdf(7.0) == 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    CHECK(m.cdf(x) + m.cdf(-x) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("cdf is nondecreasing on a fine grid") {
  const Mollifier& m = Mollifier::standard();
  double prev = m.cdf(-1.0);
  for (int i = 1; i <= 200000; ++i) {
    const double v = m.cdf(-1.0 + 2.0 * i / 200000);
    REQUIRE(v >= prev);
    prev = v;
  }
}

TEST_CASE("density: support, sign, and the tabulated slope") {
  const Mollifier& m = Mollifier::standard();
  CHECK(m.density(-1.0) == 0.0);
  CHECK(m.density(1.0) == 0.0);
  CHECK(m.density(1.5) == 0.0);
  CHECK(m.density(0.0) == doctest::Approx(m.sup_density()));
  for (int i = -999; i <= 999; ++i) {
    const double x = i / 1000.0;
    CHECK(m.density(x) >= 0.0);
    CHECK(std::abs(m.cdf_slope(x) - m.density(x)) <= 5e-12);  // interpolation error of the table
  }
}

TEST_CASE("density derivative against central differences") {
  const Mollifier& m = Mollifier::standard();
  for (int i = -9; i <= 9; ++i) {
    const double x = i / 10.0;
    const double h = 1e-6;
    const double fd = (m.density(x + h) - m.density(x - h)) / (2 * h);
    CHECK(m.density_derivative(x) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("a coarser table still builds") {
  const Mollifier coarse(64);
  CHECK(coarse.cells() == 64);
  CHECK(coarse.cdf(0.0) == 0.5);
  CHECK(std::abs(coarse.cdf(0.3) - Mollifier::standard().cdf(0.3)) < 1e-8);
}

TEST_CASE("only tail cells fall back to linear pieces") {
  const Mollifier& m = Mollifier::standard();
  CHECK(m.linear_cells() < m.cells() / 8);
  MESSAGE("linear cells: " << m.linear_cells());
}
