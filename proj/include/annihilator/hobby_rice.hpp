#pragma once

// Sign functions with few switches that annihilate finitely many real
// functions. The search runs over the unit sphere in R^{m+1}: interval
// lengths are the squared coordinates and interval signs their signs, which
// makes the moment map odd.

#include <cstdint>
#include <span>
#include <vector>

#include "annihilator/function_model.hpp"
#include "annihilator/phase_model.hpp"

namespace ann {

/// Phi(t) = leading_sign * (-1)^{#switch points <= t}.
struct SignPattern {
  std::vector<double> switch_points;
  int leading_sign = 1;

  int operator()(double t) const;
  friend bool operator==(const SignPattern&, const SignPattern&) = default;
};

struct SphereCoordinates {
  std::vector<double> x;  // unit Euclidean norm
};

/// Sign pattern induced by sphere coordinates. Intervals of length at most
/// `merge_length` take the sign of their left neighbour, so coincident
/// switch points disappear.
SignPattern pattern_from_sphere(const SphereCoordinates& x, double merge_length = 1e-14);

/// int_{mask} g_k * Phi, exact per polynomial piece. The g_k must be real.
std::vector<double> moment_residual(std::span<const Function> gs, const SignPattern& s,
                                    const IntervalMask& mask);

/// The odd moment map F(x) on the sphere (no merging).
std::vector<double> sphere_moment_map(std::span<const Function> gs, const IntervalMask& mask,
                                      const SphereCoordinates& x);

struct HobbyRiceOptions {
  double tol = 1e-10;
  int seeds = 64;
  int max_iterations = 200;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct HobbyRiceResult {
  SignPattern pattern;
  std::vector<double> residuals;
  double max_residual = 0.0;
  int converged_seeds = 0;
};

/// Multistart Levenberg-Marquardt on the switch points, with the mask's
/// holes squeezed out. Among seeds whose merged pattern meets `tol`, the
/// lowest residual wins, ties broken by the lexicographically smallest
/// switch vector. When no seed converges, a homotopy from a Chebyshev system
/// is tracked instead. Throws SolverFailure when that fails too.
HobbyRiceResult solve_hobby_rice(std::span<const Function> gs, const IntervalMask& mask,
                                 const HobbyRiceOptions& opts = {});

/// The {0, pi} phase (pi/2)(1 - Phi), or its flip pi minus that, whichever
/// equals pi at no more than half of the boundary points (the unflipped one
/// on a tie).
StepPhase select_phi_sharp(const SignPattern& s, std::span<const double> boundary);

/// Discontinuities of phi * indicator(mask) inside (0, 1): jumps of phi
/// strictly inside a mask interval plus mask endpoints where phi is nonzero
/// on the mask side.
int count_masked_discontinuities(const StepPhase& phi, const IntervalMask& mask);

/// phi * indicator(mask) as a step on [0, 1], extended constantly past the
/// ends of [0, 1].
StepPhase mask_step(const StepPhase& phi, const IntervalMask& mask);

}  // namespace ann
