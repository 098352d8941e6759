#pragma once

#include <vector>

#include "annihilator/simd.hpp"

namespace ann {

/// The standard bump psi(x) = C exp(-1 / (1 - x^2)) on (-1, 1), normalized
/// to unit mass, and its cumulative distribution Psi(x) = int_{-1}^{x} psi.
///
/// Psi is stored as a piecewise quintic Hermite interpolant matching Psi,
/// psi and psi' at 1025 equispaced knots; the knot values of Psi come from
/// Gauss-Kronrod integration of psi cell by cell and mirror symmetry.
/// Interpolation error is below 1e-15. Outside (-1, 1) the table returns
/// exactly 0 or 1, so every mollified jump has exact compact support.
class Mollifier {
 public:
  /// Process-wide instance; built on first use, read-only afterwards.
  static const Mollifier& standard();

  explicit Mollifier(int cells = 1024);
  Mollifier(const Mollifier&) = delete;
  Mollifier& operator=(const Mollifier&) = delete;

  double normalization() const { return normalization_; }

  /// psi(x), evaluated in closed form.
  double density(double x) const;
  double density_derivative(double x) const;
  /// max psi = psi(0) = C / e.
  double sup_density() const;

  /// Psi(x) from the table.
  double cdf(double x) const;
  /// d/dx of the tabulated Psi (agrees with psi to ~2e-12).
  double cdf_slope(double x) const;

  const simd::CdfTable& table() const { return table_; }
  int cells() const { return table_.cells; }
  /// Tail cells stored as linear pieces to keep Psi monotone.
  int linear_cells() const { return linear_cells_; }

 private:
  double normalization_ = 0.0;
  int linear_cells_ = 0;
  std::vector<double> value_coefs_;
  std::vector<double> slope_coefs_;
  simd::CdfTable table_;
};

}  // namespace ann
