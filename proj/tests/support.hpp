#pragma once

// Shared helpers for the test binaries: deterministic random inputs and
// reference integrals that do not go through the library's quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "annihilator/function_model.hpp"
#include "annihilator/phase_model.hpp"

namespace testing {

using ann::Complex;
using ann::Function;
using ann::SmoothPhase;

inline Function real_poly(std::vector<double> coefs) {
  std::vector<double> im(coefs.size(), 0.0);
  return Function({0.0, 1.0}, {{std::move(coefs), std::move(im)}});
}

inline Function complex_poly(std::vector<double> re, std::vector<double> im) {
  return Function({0.0, 1.0}, {{std::move(re), std::move(im)}});
}

/// Random piecewise polynomial: up to max_pieces pieces of degree up to
/// max_degree, coefficients uniform in [-1, 1].
inline Function random_function(std::mt19937_64& rng, int max_pieces, int max_degree,
                                bool real_only) {
  std::uniform_int_distribution<int> pieces_d(1, max_pieces);
  std::uniform_int_distribution<int> degree_d(0, max_degree);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int pieces = pieces_d(rng);
  std::vector<double> bps{0.0, 1.0};
  while (static_cast<int>(bps.size()) < pieces + 1) {
    const double b = 0.05 + 0.9 * unit(rng);
    bool far = true;
    for (double x : bps) far = far && std::abs(x - b) > 0.05;
    if (far) bps.push_back(b);
  }
  std::sort(bps.begin(), bps.end());
  std::vector<Function::Piece> ps;
  for (int i = 0; i < pieces; ++i) {
    const int deg = degree_d(rng);
    Function::Piece p;
    for (int k = 0; k <= deg; ++k) {
      p.re.push_back(coef(rng));
      p.im.push_back(real_only ? 0.0 : coef(rng));
    }
    ps.push_back(std::move(p));
  }
  return Function(std::move(bps), std::move(ps));
}

inline std::vector<double> sorted_cuts(std::vector<double> cuts, double a, double b) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::vector<double> out;
  for (double c : cuts)
    if (c >= a && c <= b) out.push_back(c);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// int_a^b g by 61-point Gauss-Kronrod, adaptive (depth 8), on every segment between
/// consecutive cuts.
template <class G>
double reference_integral(G g, std::vector<double> cuts, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  const std::vector<double> c = sorted_cuts(std::move(cuts), a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    sum += gauss_kronrod<double, 61>::integrate(g, c[i], c[i + 1], 8, 1e-13);
  return sum;
}

inline std::vector<double> all_cuts(const SmoothPhase& theta, const Function& f) {
  std::vector<double> cuts = theta.breakpoints();
  cuts.insert(cuts.end(), f.breakpoints().begin(), f.breakpoints().end());
  return cuts;
}

/// int_0^1 f e^{i theta}, independent of integrate_against_phase.
inline Complex reference_phase_integral(const Function& f, const SmoothPhase& theta) {
  const std::vector<double> cuts = all_cuts(theta, f);
  auto re = [&](double t) {
    const Complex v = ann::eval_f(f, t) * std::polar(1.0, theta.value(t));
    return v.real();
  };
  auto im = [&](double t) {
    const Complex v = ann::eval_f(f, t) * std::polar(1.0, theta.value(t));
    return v.imag();
  };
  return {reference_integral(re, cuts, 0.0, 1.0), reference_integral(im, cuts, 0.0, 1.0)};
}

/// Breakpoints of theta plus the zeros of theta' (found on a fine grid,
/// then by Boost bisection): the kinks of |theta'|^p.
inline std::vector<double> derivative_cuts(const SmoothPhase& theta, double a, double b) {
  std::vector<double> cuts = theta.breakpoints();
  constexpr int kGrid = 20000;
  auto d = [&](double t) { return theta.derivative(t); };
  double x0 = a, d0 = d(a);
  for (int i = 1; i <= kGrid; ++i) {
    const double x1 = a + (b - a) * i / kGrid;
    const double d1 = d(x1);
    if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
      const auto r = boost::math::tools::bisect(d, x0, x1, boost::math::tools::eps_tolerance<double>(52));
      cuts.push_back(0.5 * (r.first + r.second));
    }
    x0 = x1;
    d0 = d1;
  }
  return cuts;
}

/// int_a^b |theta'|^p by the reference rule.
inline double reference_power_integral(const SmoothPhase& theta, double a, double b, double p) {
  return reference_integral([&](double t) { return std::pow(std::abs(theta.derivative(t)), p); },
                            derivative_cuts(theta, a, b), a, b);
}

inline double reference_total_variation(const SmoothPhase& theta, double a, double b) {
  return reference_power_integral(theta, a, b, 1.0);
}

inline Complex random_disk_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::polar(std::sqrt(unit(rng)), 2.0 * M_PI * unit(rng));
}

}  // namespace testing
