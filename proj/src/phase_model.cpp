#include "annihilator/phase_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "annihilator/errors.hpp"
#include "annihilator/simd.hpp"

namespace ann {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

StepPhase::StepPhase(std::vector<double> jump_locations, std::vector<double> jump_sizes,
                     double base_value, double lo, double hi)
    : locations_(std::move(jump_locations)),
      sizes_(std::move(jump_sizes)),
      base_(base_value),
      lo_(lo),
      hi_(hi) {
  if (!(lo_ < hi_)) throw DomainError("step phase domain must be a non-degenerate interval");
  if (locations_.size() != sizes_.size())
    throw DomainError("step phase needs one size per jump location");
  for (std::size_t i = 0; i < locations_.size(); ++i) {
    if (locations_[i] < lo_ || locations_[i] > hi_)
      throw DomainError("step phase jump outside its domain");
    if (i > 0 && !(locations_[i] > locations_[i - 1]))
      throw DomainError("step phase jump locations must be strictly increasing");
    if (sizes_[i] == 0.0 || !std::isfinite(sizes_[i]))
      throw DomainError("step phase jump sizes must be finite and nonzero");
  }
}

double StepPhase::operator()(double t) const {
  double v = base_;
  for (std::size_t i = 0; i < locations_.size() && locations_[i] <= t; ++i) v += sizes_[i];
  return v;
}

double StepPhase::left_limit(double t) const {
  double v = base_;
  for (std::size_t i = 0; i < locations_.size() && locations_[i] < t; ++i) v += sizes_[i];
  return v;
}

double StepPhase::final_value() const {
  double v = base_;
  for (double s : sizes_) v += s;
  return v;
}

SmoothPhase::SmoothPhase(std::vector<PhaseTerm> terms, double base_value, double lo, double hi)
    : terms_(std::move(terms)), base_(base_value), lo_(lo), hi_(hi) {
  if (!(lo_ < hi_)) throw DomainError("smooth phase domain must be a non-degenerate interval");
  for (const PhaseTerm& t : terms_) {
    if (!(t.width > 0.0) || !std::isfinite(t.width))
      throw DomainError("mollified jump width must be positive");
    if (!std::isfinite(t.center) || !std::isfinite(t.jump))
      throw DomainError("mollified jump must be finite");
  }
}

double SmoothPhase::value(double t) const {
  double v = 0.0;
  evaluate(std::span<const double>(&t, 1), std::span<double>(&v, 1), {});
  return v;
}

double SmoothPhase::derivative(double t) const {
  double v = 0.0;
  double d = 0.0;
  evaluate(std::span<const double>(&t, 1), std::span<double>(&v, 1), std::span<double>(&d, 1));
  return d;
}

void SmoothPhase::evaluate(std::span<const double> ts, std::span<double> values,
                           std::span<double> derivatives) const {
  if (ts.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(ts.begin(), ts.end());
  const double tmin = *lo_it;
  const double tmax = *hi_it;

  // A leading run of terms already at their full jump on the whole batch is
  // folded into the offset. Summation stays in term order, so a batch gives
  // the same bits as evaluating point by point.
  double offset = base_;
  thread_local std::vector<simd::ActiveTerm> active;
  active.clear();
  bool prefix = true;
  for (const PhaseTerm& term : terms_) {
    const double inv_width = 1.0 / term.width;
    if ((tmax - term.center) * inv_width <= -simd::kSaturation) continue;
    if (prefix && (tmin - term.center) * inv_width >= simd::kSaturation) {
      offset += term.jump;
      continue;
    }
    prefix = false;
    active.push_back({term.center, inv_width, term.jump, term.jump * inv_width});
  }

  std::fill(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(ts.size()), offset);
  const simd::Kernels& k = simd::active_kernels();
  const simd::CdfTable& table = Mollifier::standard().table();
  simd::cdf_sum(k, table, active, ts, values);
  if (!derivatives.empty()) {
    std::fill(derivatives.begin(), derivatives.begin() + static_cast<std::ptrdiff_t>(ts.size()),
              0.0);
    simd::density_sum(k, table, active, ts, derivatives);
  }
}

std::vector<double> SmoothPhase::breakpoints() const {
  std::vector<double> out;
  out.reserve(3 * terms_.size());
  for (const PhaseTerm& t : terms_) {
    out.push_back(t.center - t.width);
    out.push_back(t.center);
    out.push_back(t.center + t.width);
  }
  return out;
}

SmoothPhase SmoothPhase::affine(double scale, double shift, double new_lo, double new_hi) const {
  if (!(scale > 0.0)) throw DomainError("affine phase map needs a positive scale");
  std::vector<PhaseTerm> mapped;
  mapped.reserve(terms_.size());
  for (const PhaseTerm& t : terms_) mapped.push_back({shift + scale * t.center, scale * t.width, t.jump});
  return SmoothPhase(std::move(mapped), base_, new_lo, new_hi);
}

SmoothPhase SmoothPhase::plus(const SmoothPhase& other) const {
  std::vector<PhaseTerm> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return SmoothPhase(std::move(all), base_ + other.base_, lo_, hi_);
}

StepPhase build_step_phase(std::complex<double> z) {
  if (!(std::abs(z) <= 1.0 + 1e-15) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("step phase parameter must lie in the closed unit disk");
  const double u = std::clamp(z.real(), -1.0, 1.0);
  const double v = std::clamp(z.imag(), -1.0, 1.0);
  // Interval edges in closed form: [-1, b1), [b1, b2), [b2, b3), [b3, 1] with
  // lengths (1+u)/2, (1+v)/2, (1-u)/2, (1-v)/2.
  const double edges[5] = {-1.0, (u - 1.0) / 2, (u + v) / 2, (1.0 + v) / 2, 1.0};
  const double levels[4] = {0.0, kPi / 2, kPi, 3 * kPi / 2};

  std::vector<double> locations;
  std::vector<double> sizes;
  double base = 0.0;
  double current = 0.0;
  bool started = false;
  for (int i = 0; i < 4; ++i) {
    if (!(edges[i + 1] > edges[i])) continue;
    if (!started) {
      base = current = levels[i];
      started = true;
      continue;
    }
    locations.push_back(edges[i]);
    sizes.push_back(levels[i] - current);
    current = levels[i];
  }
  return StepPhase(std::move(locations), std::move(sizes), base, -1.0, 1.0);
}

std::complex<double> step_integral_exp(const StepPhase& s) {
  std::complex<double> sum = 0.0;
  double left = s.lo();
  double level = s.base_value();
  const auto& loc = s.jump_locations();
  const auto& size = s.jump_sizes();
  for (std::size_t i = 0; i < loc.size(); ++i) {
    sum += (loc[i] - left) * std::polar(1.0, level);
    left = loc[i];
    level += size[i];
  }
  sum += (s.hi() - left) * std::polar(1.0, level);
  return sum;
}

StepPhase clamp_step(const StepPhase& s, double h) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("clamp width must lie in (0, 1)");
  if (s.lo() != -1.0 || s.hi() != 1.0) throw DomainError("clamp_step expects a step on [-1, 1]");
  const double open_lo = h - 1.0;
  const double open_hi = 1.0 - h;

  std::vector<double> locations;
  std::vector<double> sizes;
  auto push = [&](double at, double size) {
    if (size == 0.0) return;
    locations.push_back(at);
    sizes.push_back(size);
  };
  push(open_lo, s(open_lo));
  const auto& loc = s.jump_locations();
  for (std::size_t i = 0; i < loc.size(); ++i)
    if (loc[i] > open_lo && loc[i] < open_hi) push(loc[i], s.jump_sizes()[i]);
  push(open_hi, kTwoPi - s.left_limit(open_hi));
  return StepPhase(std::move(locations), std::move(sizes), 0.0, -1.0, 1.0);
}

SmoothPhase mollify(const StepPhase& s, double h) {
  if (!(h > 0.0)) throw DomainError("mollifier width must be positive");
  std::vector<PhaseTerm> terms;
  terms.reserve(s.jump_locations().size());
  for (std::size_t i = 0; i < s.jump_locations().size(); ++i)
    terms.push_back({s.jump_locations()[i], h, s.jump_sizes()[i]});
  return SmoothPhase(std::move(terms), s.base_value(), s.lo(), s.hi());
}

SmoothPhase window_phase(std::complex<double> z, double h) {
  return mollify(clamp_step(build_step_phase(z), h), h);
}

double eval_phase(const SmoothPhase& theta, double t) { return theta.value(t); }

double eval_phase_deriv(const SmoothPhase& theta, double t) { return theta.derivative(t); }

namespace {

std::vector<double> breakpoints_within(const SmoothPhase& theta, double a, double b) {
  std::vector<double> cuts;
  for (double x : theta.breakpoints())
    if (x > a && x < b) cuts.push_back(x);
  return cuts;
}

bool mixed_signs(const SmoothPhase& theta, double a, double b) {
  bool any_positive = false;
  bool any_negative = false;
  for (const PhaseTerm& t : theta.terms()) {
    if (t.center + t.width <= a || t.center - t.width >= b) continue;
    (t.jump > 0.0 ? any_positive : any_negative) = true;
  }
  return any_positive && any_negative;
}

// Sign changes of theta' found on a sampling grid between the breakpoints,
// refined by bisection. |theta'|^p has a kink there.
std::vector<double> derivative_sign_changes(const SmoothPhase& theta, std::vector<double> cuts,
                                            double a, double b) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  constexpr int kSamples = 32;
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double x0 = cuts[i];
    double d0 = theta.derivative(x0);
    for (int k = 1; k <= kSamples; ++k) {
      const double x1 = k == kSamples ? cuts[i + 1] : cuts[i] + (cuts[i + 1] - cuts[i]) * k / kSamples;
      const double d1 = theta.derivative(x1);
      if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
        double lo = x0, hi = x1;
        const bool rising = d0 < 0.0;
        while (true) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          ((theta.derivative(mid) < 0.0) == rising ? lo : hi) = mid;
        }
        roots.push_back(0.5 * (lo + hi));
      }
      x0 = x1;
      d0 = d1;
    }
  }
  return roots;
}

double power_integral(const SmoothPhase& theta, double a, double b, double p,
                      const QuadratureConfig& cfg) {
  std::vector<double> cuts = breakpoints_within(theta, a, b);
  if (mixed_signs(theta, a, b))
    for (double r : derivative_sign_changes(theta, cuts, a, b))
      if (r > a && r < b) cuts.push_back(r);
  std::vector<double> values(gk15::kPoints);
  std::vector<double> derivs(gk15::kPoints);
  auto integrand = [&](std::span<const double, gk15::kPoints> xs, std::span<double> out) {
    theta.evaluate(xs, values, derivs);
    for (std::size_t i = 0; i < xs.size(); ++i)
      out[i] = p == 1.0 ? std::abs(derivs[i]) : std::pow(std::abs(derivs[i]), p);
  };
  return integrate_adaptive(integrand, 1, a, b, cuts, cfg).values[0];
}

}  // namespace

double phase_total_variation(const SmoothPhase& theta, double a, double b,
                             const QuadratureConfig& cfg) {
  if (a > b) throw DomainError("total variation bounds out of order");
  if (a == b) return 0.0;
  if (!mixed_signs(theta, a, b)) return std::abs(theta.value(b) - theta.value(a));
  return power_integral(theta, a, b, 1.0, cfg);
}

double phase_derivative_power_integral(const SmoothPhase& theta, double a, double b, double p,
                                       const QuadratureConfig& cfg) {
  if (a > b) throw DomainError("integration bounds out of order");
  if (!(p >= 1.0)) throw DomainError("exponent p must be at least 1");
  if (a == b) return 0.0;
  return power_integral(theta, a, b, p, cfg);
}

void write_phase_samples(const SmoothPhase& theta, int grid_size, std::ostream& out) {
  if (grid_size < 2) throw DomainError("sample grid needs at least two points");
  std::ostringstream buf;
  buf.precision(17);
  buf << "t,theta,dtheta,re,im\n";
  const double lo = theta.lo();
  const double hi = theta.hi();
  for (int i = 0; i < grid_size; ++i) {
    const double t =
        i == grid_size - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (grid_size - 1);
    const double v = theta.value(t);
    const double d = theta.derivative(t);
    buf << t << ',' << v << ',' << d << ',' << std::cos(v) << ',' << std::sin(v) << '\n';
  }
  out << buf.str();
}

}  // namespace ann
