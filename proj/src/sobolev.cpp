#include "annihilator/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "annihilator/annihilator.hpp"
#include "annihilator/errors.hpp"

namespace ann {

namespace {

constexpr double kPi = std::numbers::pi;

// Derivative powers reach 1e20 and more for narrow windows, so the norm
// integrals stop on a relative target as well.
QuadratureConfig norm_config(const QuadratureConfig& cfg) {
  QuadratureConfig c = cfg;
  c.rel_tol = std::max(cfg.rel_tol, 1e-11);
  return c;
}

double integral_abs_phase(const SmoothPhase& theta, const QuadratureConfig& cfg) {
  const std::vector<double> cuts = theta.breakpoints();
  std::array<double, gk15::kPoints> values{};
  auto integrand = [&](std::span<const double, gk15::kPoints> xs, std::span<double> out) {
    theta.evaluate(xs, values, {});
    for (std::size_t i = 0; i < gk15::kPoints; ++i) out[i] = std::abs(values[i]);
  };
  return integrate_adaptive(integrand, 1, theta.lo(), theta.hi(), cuts, cfg).values[0];
}

double sampled_sup_abs(const SmoothPhase& theta) {
  std::vector<double> ts = theta.breakpoints();
  constexpr int kGrid = 4096;
  for (int i = 0; i <= kGrid; ++i) ts.push_back(theta.lo() + (theta.hi() - theta.lo()) * i / kGrid);
  double m = 0.0;
  for (double t : ts)
    if (t >= theta.lo() && t <= theta.hi()) m = std::max(m, std::abs(theta.value(t)));
  return m;
}

}  // namespace

NormReport sobolev_report(const SmoothPhase& theta, double p, int n, const QuadratureConfig& cfg,
                          double slack) {
  if (!(p >= 1.0)) throw DomainError("sobolev_report needs p >= 1");
  if (n < 0) throw DomainError("sobolev_report needs n >= 0");
  const QuadratureConfig c = norm_config(cfg);
  NormReport r;
  r.p = p;
  r.n = n;
  r.total_variation = phase_total_variation(theta, theta.lo(), theta.hi(), c);
  const double power =
      p == 1.0 ? r.total_variation
               : phase_derivative_power_integral(theta, theta.lo(), theta.hi(), p, c);
  const double length = theta.hi() - theta.lo();
  r.seminorm_phase = std::pow(power, 1.0 / p);
  r.norm_exp_phase = std::pow(length + power, 1.0 / p);
  r.norm_phase = integral_abs_phase(theta, c) + r.total_variation;
  r.sup_abs_phase = sampled_sup_abs(theta);
  r.bound_tv = 5 * kPi * n;
  r.bound_5pin_plus_1 = 5 * kPi * n + 1;
  r.bound_7n1_pi = (7 * n + 1) * kPi;
  r.bound_sup = (2 * n + 1) * kPi;
  r.tv_ok = r.total_variation <= r.bound_tv + slack;
  r.exp_ok = p != 1.0 || r.norm_exp_phase <= r.bound_5pin_plus_1 + slack;
  r.phase_ok = r.norm_phase <= r.bound_7n1_pi + slack;
  r.sup_ok = r.sup_abs_phase <= r.bound_sup + slack;
  return r;
}

Function upsilon_scale(const Function& f, int n) {
  if (n < 1) throw DomainError("upsilon_scale needs n >= 1");
  std::vector<double> bps;
  for (double b : f.breakpoints()) bps.push_back(std::ldexp(b, -n));
  std::vector<PiecewiseComplexFunction::Piece> pieces;
  for (const auto& piece : f.pieces()) {
    PiecewiseComplexFunction::Piece q = piece;
    for (std::size_t k = 0; k < q.re.size(); ++k) {
      q.re[k] = std::ldexp(q.re[k], n * static_cast<int>(k));
      q.im[k] = std::ldexp(q.im[k], n * static_cast<int>(k));
    }
    pieces.push_back(std::move(q));
  }
  bps.push_back(1.0);
  pieces.push_back({{0.0}, {0.0}});
  return {std::move(bps), std::move(pieces)};
}

SmoothPhase rescale_phase(const SmoothPhase& theta, int n) {
  if (n < 0) throw DomainError("rescale_phase needs n >= 0");
  return theta.affine(std::ldexp(1.0, n), 0.0, 0.0, 1.0);
}

double scaling_identity_check(const SmoothPhase& theta, int n, double p,
                              const QuadratureConfig& cfg) {
  if (!(p > 1.0)) throw DomainError("scaling identity needs p > 1");
  const QuadratureConfig c = norm_config(cfg);
  const double lhs = phase_derivative_power_integral(theta, 0.0, std::ldexp(1.0, -n), p, c);
  const double rhs = std::pow(2.0, n * (p - 1)) *
                     phase_derivative_power_integral(rescale_phase(theta, n), 0.0, 1.0, p, c);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

Function blowup_instance(const Function& f, double l, int n, const QuadratureConfig& cfg) {
  if (!(l > 0.0)) throw DomainError("blowup_instance needs l > 0");
  const Function g = upsilon_scale(f, n);
  const double norm = l1_norm(g, cfg);
  if (!(norm > 0.0)) throw DomainError("blowup_instance: the compressed function has zero norm");
  return g.scaled(l / norm);
}

ScalingReport scaling_experiment(const Function& f, double p, std::span<const int> levels,
                                 const AnnihilatorOptions& opts) {
  if (!(p > 1.0)) throw DomainError("scaling experiment needs p > 1");
  ScalingReport report;
  report.p = p;
  const QuadratureConfig c = norm_config(opts.quadrature);
  for (int n : levels) {
    ScalingLevel level;
    level.n = n;
    level.membership_bound = std::ldexp(opts.tol, n);
    level.lower_bound_slope = std::pow(2.0, n * (p - 1));
    try {
      const Function g = upsilon_scale(f, n);
      const AnnihilatorResult res = solve_annihilator(std::span<const Function>(&g, 1), opts);
      level.theta = res.theta;
      level.delta = res.state.certificate.delta;
      level.seminorm = phase_derivative_power_integral(res.theta, 0.0, 1.0, p, c);
      level.identity_error = scaling_identity_check(res.theta, n, p, opts.quadrature);
      level.membership_residual = std::abs(integrate_against_phase(
          f, rescale_phase(res.theta, n), IntervalMask::unit(), opts.quadrature));
      level.ok = true;
    } catch (const std::exception& e) {
      level.error = e.what();
    }
    report.levels.push_back(std::move(level));
  }
  report.strictly_increasing = !report.levels.empty();
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    if (!report.levels[i].ok) report.strictly_increasing = false;
    if (i > 0 && !(report.levels[i].seminorm > report.levels[i - 1].seminorm))
      report.strictly_increasing = false;
  }
  return report;
}

}  // namespace ann
