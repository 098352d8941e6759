#include "annihilator/mollifier.hpp"

#include <cmath>

#include "annihilator/errors.hpp"
#include "annihilator/quadrature.hpp"
#include "simd_scalar_inl.hpp"

namespace ann {

namespace {

double bump(double x) {
  const double q = 1.0 - x * x;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double bump_derivative(double x) {
  const double q = 1.0 - x * x;
  return q > 0.0 ? std::exp(-1.0 / q) * (-2.0 * x / (q * q)) : 0.0;
}

long double cell_mass(double a, double b) {
  const auto xs = gk15::panel_points(a, b);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < 7; ++i)
    sum += gk15::kKronrodWeights[i] * (static_cast<long double>(bump(xs[i])) + bump(xs[14 - i]));
  sum += gk15::kKronrodWeights[7] * static_cast<long double>(bump(xs[7]));
  return sum * 0.5L * (b - a);
}

}  // namespace

const Mollifier& Mollifier::standard() {
  static const Mollifier instance;
  return instance;
}

Mollifier::Mollifier(int cells) {
  if (cells < 2 || cells % 2 != 0) throw DomainError("mollifier table needs an even cell count");
  const double h = 2.0 / cells;
  auto knot = [&](int k) { return -1.0 + h * k; };

  // Unnormalized masses of the left half; the right half follows by symmetry.
  const int half = cells / 2;
  std::vector<long double> cumulative(half + 1, 0.0L);
  for (int k = 0; k < half; ++k) cumulative[k + 1] = cumulative[k] + cell_mass(knot(k), knot(k + 1));
  const long double half_mass = cumulative[half];
  normalization_ = static_cast<double>(0.5L / half_mass);

  std::vector<double> cdf_at(cells + 1);
  for (int k = 0; k <= half; ++k) cdf_at[k] = static_cast<double>(0.5L * cumulative[k] / half_mass);
  for (int k = half + 1; k <= cells; ++k) cdf_at[k] = 1.0 - cdf_at[cells - k];
  cdf_at[half] = 0.5;

  value_coefs_.assign(8 * static_cast<std::size_t>(cells), 0.0);
  slope_coefs_.assign(8 * static_cast<std::size_t>(cells), 0.0);
  const double c = normalization_;
  for (int k = 0; k < cells; ++k) {
    const double p0 = cdf_at[k], p1 = cdf_at[k + 1];
    const double d0 = c * bump(knot(k)) * h, d1 = c * bump(knot(k + 1)) * h;
    const double s0 = c * bump_derivative(knot(k)) * h * h;
    const double s1 = c * bump_derivative(knot(k + 1)) * h * h;
    const double dp = p1 - p0;
    double* a = &value_coefs_[8 * static_cast<std::size_t>(k)];
    a[0] = p0;
    a[1] = d0;
    a[2] = 0.5 * s0;
    a[3] = 10.0 * dp - 6.0 * d0 - 4.0 * d1 - 1.5 * s0 + 0.5 * s1;
    a[4] = -15.0 * dp + 8.0 * d0 + 7.0 * d1 + 1.5 * s0 - s1;
    a[5] = 6.0 * dp - 3.0 * d0 - 3.0 * d1 - 0.5 * s0 + 0.5 * s1;
    double* s = &slope_coefs_[8 * static_cast<std::size_t>(k)];
    for (int j = 0; j < 5; ++j) s[j] = (j + 1) * a[j + 1] / h;
    // Deep in the tails the quintic can dip by a few ulps of values near
    // 1e-114; a linear cell keeps Psi monotone there.
    bool monotone = true;
    for (int i = 0; i <= 256 && monotone; ++i) {
      const double tau = i / 256.0;
      monotone = s[0] + tau * (s[1] + tau * (s[2] + tau * (s[3] + tau * s[4]))) >= 0.0;
    }
    if (!monotone) {
      std::fill(a, a + 8, 0.0);
      std::fill(s, s + 8, 0.0);
      a[0] = p0;
      a[1] = dp;
      s[0] = dp / h;
      ++linear_cells_;
    }
  }

  table_.value = value_coefs_.data();
  table_.slope = slope_coefs_.data();
  table_.cells = cells;
  table_.half_cells = 0.5 * cells;
  table_.last_cell = static_cast<double>(cells - 1);
}

double Mollifier::density(double x) const { return normalization_ * bump(x); }

double Mollifier::density_derivative(double x) const { return normalization_ * bump_derivative(x); }

double Mollifier::sup_density() const { return normalization_ * std::exp(-1.0); }

double Mollifier::cdf(double x) const { return simd::detail::cdf_point(table_, x); }

double Mollifier::cdf_slope(double x) const { return simd::detail::density_point(table_, x); }

}  // namespace ann
