#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "annihilator/quadrature.hpp"

namespace ann {

using Complex = std::complex<double>;

class SmoothPhase;

/// Complex-valued piecewise polynomial on [0, 1]. Each piece is a polynomial
/// in the global variable t with ascending coefficients re[k] + i*im[k].
/// Evaluation is right-continuous at breakpoints (the last piece owns t = 1).
class PiecewiseComplexFunction {
 public:
  static constexpr std::size_t kMaxDegree = 12;

  struct Piece {
    std::vector<double> re;
    std::vector<double> im;
    friend bool operator==(const Piece&, const Piece&) = default;
  };

  PiecewiseComplexFunction(std::vector<double> breakpoints, std::vector<Piece> pieces);

  static PiecewiseComplexFunction constant(Complex value);
  /// Single piece with the given ascending complex coefficients.
  static PiecewiseComplexFunction polynomial(std::span<const Complex> coefs);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  /// Index of the piece owning t (right-continuous, left piece at t = 1).
  std::size_t piece_index(double t) const;

  bool is_real() const;
  PiecewiseComplexFunction real_part() const;
  PiecewiseComplexFunction imag_part() const;
  PiecewiseComplexFunction scaled(Complex c) const;
  /// Same function on a refined partition containing `extra` points.
  PiecewiseComplexFunction refined(std::span<const double> extra) const;

  friend bool operator==(const PiecewiseComplexFunction&,
                         const PiecewiseComplexFunction&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<Piece> pieces_;
};

using Function = PiecewiseComplexFunction;

/// Finite union of disjoint closed subintervals of [0, 1], sorted.
class IntervalMask {
 public:
  using Interval = std::pair<double, double>;

  IntervalMask() = default;
  explicit IntervalMask(std::vector<Interval> intervals);

  static IntervalMask unit() { return IntervalMask({{0.0, 1.0}}); }
  /// [0, 1] minus the open windows (c - radius, c + radius).
  static IntervalMask complement_of_windows(std::span<const double> centers, double radius);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool contains(double t) const;
  /// Pieces of the mask inside [a, b].
  std::vector<Interval> clip(double a, double b) const;
  /// Interval endpoints lying strictly inside (0, 1).
  std::vector<double> interior_endpoints() const;

 private:
  std::vector<Interval> intervals_;
};

Complex eval_f(const Function& f, double t);

/// Exact integral of f over [a, b] from piecewise antiderivatives.
Complex integrate(const Function& f, double a, double b);

/// Exact integral of f over mask ∩ [a, b].
Complex integrate_masked(const Function& f, const IntervalMask& mask, double a, double b);

struct PhaseIntegrals {
  std::vector<Complex> values;
  double error_bound = 0.0;
  int panels = 0;
};

/// int_{mask} f_k(t) exp(i theta(t)) dt for every f_k at once. Panels are
/// aligned to the breakpoints of every f_k, the mask endpoints, and the
/// support edges and centres of every mollified jump of theta.
PhaseIntegrals integrate_against_phase(std::span<const Function> fs, const SmoothPhase& theta,
                                       const IntervalMask& mask, const QuadratureConfig& cfg);

Complex integrate_against_phase(const Function& f, const SmoothPhase& theta,
                                const IntervalMask& mask, const QuadratureConfig& cfg);

/// L2 inner product int f conj(g), exact.
Complex inner_product(const Function& f, const Function& g);

/// Indices of a maximal linearly independent subset, chosen greedily in
/// input order by Gram-Schmidt on the exact L2 Gram matrix. A function is
/// kept when its squared residual exceeds `tol` times the largest Gram
/// diagonal entry.
std::vector<std::size_t> independent_subset(std::span<const Function> fs, double tol = 1e-10);

/// Combines real functions pairwise as f_{2j-1} + i f_{2j}; an odd leftover
/// passes through.
std::vector<Function> pack_real_pairs(std::span<const Function> fs);

/// f * indicator(mask), as a piecewise polynomial.
Function restrict_to_mask(const Function& f, const IntervalMask& mask);

/// sum_k coefs[k] * fs[k]
Function linear_combination(std::span<const Function> fs, std::span<const Complex> coefs);

/// int_0^1 |f| by adaptive quadrature.
double l1_norm(const Function& f, const QuadratureConfig& cfg);

/// Upper estimate of sup |f| over [a, b] from dense sampling of each piece.
double sup_abs(const Function& f, double a, double b);

}  // namespace ann
