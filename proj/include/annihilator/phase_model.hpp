#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "annihilator/mollifier.hpp"
#include "annihilator/quadrature.hpp"

namespace ann {

/// Right-continuous real step function: base_value left of every jump, plus
/// jump_sizes[i] from jump_locations[i] on. Outside [lo, hi] it extends by
/// its boundary values.
class StepPhase {
 public:
  StepPhase(std::vector<double> jump_locations, std::vector<double> jump_sizes, double base_value,
            double lo, double hi);

  const std::vector<double>& jump_locations() const { return locations_; }
  const std::vector<double>& jump_sizes() const { return sizes_; }
  double base_value() const { return base_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double operator()(double t) const;
  /// Value just left of t.
  double left_limit(double t) const;
  double final_value() const;

 private:
  std::vector<double> locations_;
  std::vector<double> sizes_;
  double base_;
  double lo_;
  double hi_;
};

/// jump * Psi((t - center) / width): a unit step at `center` smoothed over
/// [center - width, center + width].
struct PhaseTerm {
  double center;
  double width;
  double jump;
  friend bool operator==(const PhaseTerm&, const PhaseTerm&) = default;
};

/// base_value + sum of mollified jumps. Smooth; derivative is
/// sum jump * psi((t - center) / width) / width.
class SmoothPhase {
 public:
  SmoothPhase(std::vector<PhaseTerm> terms, double base_value, double lo, double hi);

  static SmoothPhase constant(double value, double lo = 0.0, double hi = 1.0) {
    return SmoothPhase({}, value, lo, hi);
  }

  const std::vector<PhaseTerm>& terms() const { return terms_; }
  double base_value() const { return base_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double value(double t) const;
  double derivative(double t) const;

  /// Batch evaluation through the active SIMD kernels. `derivatives` may be
  /// empty.
  void evaluate(std::span<const double> ts, std::span<double> values,
                std::span<double> derivatives) const;

  /// Support edges and centres of all terms (unsorted).
  std::vector<double> breakpoints() const;

  /// t -> theta((t - shift) / scale) on [new_lo, new_hi].
  SmoothPhase affine(double scale, double shift, double new_lo, double new_hi) const;

  /// Terms of both phases, bases added; domain of *this.
  SmoothPhase plus(const SmoothPhase& other) const;

  friend bool operator==(const SmoothPhase&, const SmoothPhase&) = default;

 private:
  std::vector<PhaseTerm> terms_;
  double base_;
  double lo_;
  double hi_;
};

/// Staircase on [-1, 1] taking 0, pi/2, pi, 3pi/2 on consecutive intervals
/// of lengths (1+u)/2, (1+v)/2, (1-u)/2, (1-v)/2 for z = u + iv, |z| <= 1.
/// Empty intervals are dropped.
StepPhase build_step_phase(std::complex<double> z);

/// int exp(i s(t)) dt over the domain of s, summed segment by segment.
std::complex<double> step_integral_exp(const StepPhase& s);

/// s on (h-1, 1-h), 0 before, 2pi from 1-h on. Requires 0 < h < 1 and a
/// step on [-1, 1].
StepPhase clamp_step(const StepPhase& s, double h);

/// Closed-form convolution with psi_h: one term per jump.
SmoothPhase mollify(const StepPhase& s, double h);

/// The window phase psi_h * clamp_step(build_step_phase(z), h) on [-1, 1].
SmoothPhase window_phase(std::complex<double> z, double h);

double eval_phase(const SmoothPhase& theta, double t);
double eval_phase_deriv(const SmoothPhase& theta, double t);

/// int_a^b |theta'|. When every term that is non-constant on [a, b] has a
/// jump of the same sign the net change |theta(b) - theta(a)| is returned.
double phase_total_variation(const SmoothPhase& theta, double a, double b,
                             const QuadratureConfig& cfg);

/// int_a^b |theta'|^p by quadrature.
double phase_derivative_power_integral(const SmoothPhase& theta, double a, double b, double p,
                                       const QuadratureConfig& cfg);

/// CSV `t,theta,dtheta,re,im` on a uniform grid of `grid_size` points over
/// the phase domain, endpoints included.
void write_phase_samples(const SmoothPhase& theta, int grid_size, std::ostream& out);

}  // namespace ann
