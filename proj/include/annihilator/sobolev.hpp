#pragma once

#include <string>
#include <vector>

#include "annihilator/function_model.hpp"
#include "annihilator/phase_model.hpp"

namespace ann {

struct AnnihilatorOptions;

struct NormReport {
  double p = 1.0;
  int n = 0;
  double seminorm_phase = 0.0;   // (int |theta'|^p)^(1/p)
  double norm_exp_phase = 0.0;   // ||e^{i theta}||_{W^{1,p}}
  double norm_phase = 0.0;       // int |theta| + int |theta'|
  double total_variation = 0.0;  // int |theta'|
  double sup_abs_phase = 0.0;    // sampled
  double bound_tv = 0.0;         // 5 pi n
  double bound_5pin_plus_1 = 0.0;
  double bound_7n1_pi = 0.0;
  double bound_sup = 0.0;        // (2n + 1) pi
  bool tv_ok = false;
  bool exp_ok = false;
  bool phase_ok = false;
  bool sup_ok = false;
};

/// Norms of theta on its domain and the bounds for n functions. Bounds are
/// compared with an absolute slack of `slack`.
NormReport sobolev_report(const SmoothPhase& theta, double p, int n, const QuadratureConfig& cfg,
                          double slack = 1e-6);

/// t -> f(2^n t) on [0, 2^-n], zero after.
Function upsilon_scale(const Function& f, int n);

/// s -> theta(2^-n s) on [0, 1].
SmoothPhase rescale_phase(const SmoothPhase& theta, int n);

/// Relative gap between int_0^{2^-n} |theta'|^p and
/// 2^{n(p-1)} int_0^1 |(rescale_phase(theta, n))'|^p.
double scaling_identity_check(const SmoothPhase& theta, int n, double p,
                              const QuadratureConfig& cfg);

/// l * upsilon_scale(f, n) / ||upsilon_scale(f, n)||_{L^1}.
Function blowup_instance(const Function& f, double l, int n, const QuadratureConfig& cfg);

struct ScalingLevel {
  int n = 0;
  bool ok = false;
  std::string error;
  double seminorm = 0.0;            // int |theta'|^p, an upper bound on rho
  double identity_error = 0.0;
  double membership_residual = 0.0;
  double membership_bound = 0.0;    // 2^n tol
  double lower_bound_slope = 0.0;   // 2^{n(p-1)}
  double delta = 0.0;
  SmoothPhase theta = SmoothPhase::constant(0.0);
};

struct ScalingReport {
  double p = 2.0;
  std::vector<ScalingLevel> levels;
  bool strictly_increasing = false;  // over the successful levels
};

/// Per level n: annihilate upsilon_scale(f, n), then check the identity and
/// the membership of the rescaled phase in A(f). Pipeline failures are
/// recorded per level.
ScalingReport scaling_experiment(const Function& f, double p, std::span<const int> levels,
                                 const AnnihilatorOptions& opts);

}  // namespace ann
