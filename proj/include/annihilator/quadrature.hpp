#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for vector-valued
// integrands, with the initial panels aligned to caller-supplied breakpoints.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ann {

struct QuadratureConfig {
  double abs_tol = 1e-11;
  /// Optional relative target; the run stops once the error bound is below
  /// max(abs_tol, rel_tol * |estimate|).
  double rel_tol = 0.0;
  int max_subdivisions = 20000;
};

void validate(const QuadratureConfig& cfg);

namespace gk15 {

/// Kronrod abscissae on [-1, 1], positive half in decreasing order; the
/// last entry is the centre. Odd indices (1, 3, 5) and the centre are the
/// Gauss 7-point abscissae.
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr std::size_t kPoints = 15;

/// The 15 Kronrod points of [a, b], ordered left to right.
std::array<double, kPoints> panel_points(double a, double b);

}  // namespace gk15

/// Fills `values` (row-major, kPoints x dim) with the integrand at `xs`.
using BatchIntegrand =
    std::function<void(std::span<const double, gk15::kPoints> xs, std::span<double> values)>;

struct QuadratureResult {
  std::vector<double> values;  // one per integrand component
  double error_bound = 0.0;    // sum over panels of max-component |K15 - G7|
  int panels = 0;
};

/// Integrates a `dim`-component integrand over [lo, hi]. `breakpoints` may be
/// unsorted and may include points outside [lo, hi]; those inside become
/// initial panel boundaries. Throws ConvergenceError when the panel budget is
/// exhausted before the tolerance is met.
QuadratureResult integrate_adaptive(const BatchIntegrand& integrand, std::size_t dim, double lo,
                                    double hi, std::span<const double> breakpoints,
                                    const QuadratureConfig& cfg);

/// Scalar convenience wrapper over integrate_adaptive.
double integrate_scalar(const std::function<double(double)>& f, double lo, double hi,
                        std::span<const double> breakpoints, const QuadratureConfig& cfg);

}  // namespace ann
