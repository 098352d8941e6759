#include "annihilator/function_model.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "annihilator/errors.hpp"
#include "annihilator/phase_model.hpp"
#include "annihilator/simd.hpp"

namespace ann {

namespace {

Complex horner(const PiecewiseComplexFunction::Piece& p, double t) {
  double re = p.re.back();
  double im = p.im.back();
  for (std::size_t k = p.re.size() - 1; k-- > 0;) {
    re = re * t + p.re[k];
    im = im * t + p.im[k];
  }
  return {re, im};
}

Complex antiderivative(const PiecewiseComplexFunction::Piece& p, double t) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = p.re.size(); k-- > 0;) {
    const double scale = 1.0 / static_cast<double>(k + 1);
    re = re * t + p.re[k] * scale;
    im = im * t + p.im[k] * scale;
  }
  return {re * t, im * t};
}

std::vector<double> merged_breakpoints(std::span<const Function> fs) {
  std::vector<double> all;
  for (const Function& f : fs) all.insert(all.end(), f.breakpoints().begin(), f.breakpoints().end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

PiecewiseComplexFunction::Piece zero_piece() { return {{0.0}, {0.0}}; }

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseComplexFunction

PiecewiseComplexFunction::PiecewiseComplexFunction(std::vector<double> breakpoints,
                                                   std::vector<Piece> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (breakpoints_.size() < 2) throw DomainError("a function needs at least two breakpoints");
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
    throw DomainError("breakpoints must start at 0 and end at 1");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    if (!(breakpoints_[i] > breakpoints_[i - 1]))
      throw DomainError("breakpoints must be strictly increasing");
  if (pieces_.size() + 1 != breakpoints_.size())
    throw DomainError("need exactly one piece per breakpoint interval");
  for (Piece& p : pieces_) {
    if (p.re.empty() && p.im.empty()) throw DomainError("every piece needs a coefficient");
    const std::size_t n = std::max(p.re.size(), p.im.size());
    if (n > kMaxDegree + 1) throw DomainError("piece degree exceeds 12");
    p.re.resize(n, 0.0);
    p.im.resize(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      if (!std::isfinite(p.re[k]) || !std::isfinite(p.im[k]))
        throw DomainError("coefficients must be finite");
  }
}

PiecewiseComplexFunction PiecewiseComplexFunction::constant(Complex value) {
  return PiecewiseComplexFunction({0.0, 1.0}, {Piece{{value.real()}, {value.imag()}}});
}

PiecewiseComplexFunction PiecewiseComplexFunction::polynomial(std::span<const Complex> coefs) {
  Piece p;
  for (Complex c : coefs) {
    p.re.push_back(c.real());
    p.im.push_back(c.imag());
  }
  return PiecewiseComplexFunction({0.0, 1.0}, {std::move(p)});
}

std::size_t PiecewiseComplexFunction::piece_index(double t) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const std::ptrdiff_t idx = (it - breakpoints_.begin()) - 1;
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(pieces_.size()) - 1));
}

bool PiecewiseComplexFunction::is_real() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) {
    return std::all_of(p.im.begin(), p.im.end(), [](double c) { return c == 0.0; });
  });
}

PiecewiseComplexFunction PiecewiseComplexFunction::real_part() const {
  std::vector<Piece> out = pieces_;
  for (Piece& p : out) std::fill(p.im.begin(), p.im.end(), 0.0);
  return {breakpoints_, std::move(out)};
}

PiecewiseComplexFunction PiecewiseComplexFunction::imag_part() const {
  std::vector<Piece> out = pieces_;
  for (Piece& p : out) {
    p.re = p.im;
    std::fill(p.im.begin(), p.im.end(), 0.0);
  }
  return {breakpoints_, std::move(out)};
}

PiecewiseComplexFunction PiecewiseComplexFunction::scaled(Complex c) const {
  std::vector<Piece> out = pieces_;
  for (Piece& p : out)
    for (std::size_t k = 0; k < p.re.size(); ++k) {
      const Complex v = c * Complex(p.re[k], p.im[k]);
      p.re[k] = v.real();
      p.im[k] = v.imag();
    }
  return {breakpoints_, std::move(out)};
}

PiecewiseComplexFunction PiecewiseComplexFunction::refined(std::span<const double> extra) const {
  std::vector<double> bps = breakpoints_;
  for (double x : extra)
    if (x > 0.0 && x < 1.0) bps.push_back(x);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  std::vector<Piece> out;
  out.reserve(bps.size() - 1);
  for (std::size_t i = 0; i + 1 < bps.size(); ++i)
    out.push_back(pieces_[piece_index(0.5 * (bps[i] + bps[i + 1]))]);
  return {std::move(bps), std::move(out)};
}

// ---------------------------------------------------------------------------
// IntervalMask

IntervalMask::IntervalMask(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto [a, b] = intervals_[i];
    if (!(a >= 0.0 && b <= 1.0 && a <= b)) throw DomainError("mask interval outside [0, 1]");
    if (i > 0 && !(a > intervals_[i - 1].second))
      throw DomainError("mask intervals must be sorted and disjoint");
  }
}

IntervalMask IntervalMask::complement_of_windows(std::span<const double> centers, double radius) {
  std::vector<double> c(centers.begin(), centers.end());
  std::sort(c.begin(), c.end());
  std::vector<Interval> out;
  double left = 0.0;
  for (double x : c) {
    const double a = x - radius;
    const double b = x + radius;
    if (a > left) out.emplace_back(left, a);
    left = std::max(left, b);
  }
  if (left < 1.0) out.emplace_back(left, 1.0);
  return IntervalMask(std::move(out));
}

bool IntervalMask::contains(double t) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [t](const Interval& iv) { return t >= iv.first && t <= iv.second; });
}

std::vector<IntervalMask::Interval> IntervalMask::clip(double a, double b) const {
  std::vector<Interval> out;
  for (const auto& [lo, hi] : intervals_) {
    const double x = std::max(lo, a);
    const double y = std::min(hi, b);
    if (x < y) out.emplace_back(x, y);
  }
  return out;
}

std::vector<double> IntervalMask::interior_endpoints() const {
  std::vector<double> out;
  for (const auto& [lo, hi] : intervals_) {
    if (lo > 0.0 && lo < 1.0) out.push_back(lo);
    if (hi > 0.0 && hi < 1.0) out.push_back(hi);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operations

Complex eval_f(const Function& f, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("evaluation point outside [0, 1]");
  return horner(f.pieces()[f.piece_index(t)], t);
}

Complex integrate(const Function& f, double a, double b) {
  if (a > b) throw DomainError("integration bounds out of order");
  if (a < 0.0 || b > 1.0) throw DomainError("integration bounds outside [0, 1]");
  const auto& bps = f.breakpoints();
  Complex sum = 0.0;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double lo = std::max(a, bps[i]);
    const double hi = std::min(b, bps[i + 1]);
    if (lo >= hi) continue;
    sum += antiderivative(f.pieces()[i], hi) - antiderivative(f.pieces()[i], lo);
  }
  return sum;
}

Complex integrate_masked(const Function& f, const IntervalMask& mask, double a, double b) {
  Complex sum = 0.0;
  for (const auto& [lo, hi] : mask.clip(a, b)) sum += integrate(f, lo, hi);
  return sum;
}

PhaseIntegrals integrate_against_phase(std::span<const Function> fs, const SmoothPhase& theta,
                                       const IntervalMask& mask, const QuadratureConfig& cfg) {
  validate(cfg);
  PhaseIntegrals out;
  out.values.assign(fs.size(), 0.0);
  if (fs.empty() || mask.intervals().empty()) return out;

  std::vector<double> cuts = theta.breakpoints();
  for (const Function& f : fs) cuts.insert(cuts.end(), f.breakpoints().begin(), f.breakpoints().end());

  const std::size_t dim = 2 * fs.size();
  const simd::Kernels& kernels = simd::active_kernels();
  std::array<double, gk15::kPoints> phase{}, cosv{}, sinv{}, fre{}, fim{};
  auto integrand = [&](std::span<const double, gk15::kPoints> xs, std::span<double> vals) {
    theta.evaluate(xs, phase, {});
    for (std::size_t i = 0; i < gk15::kPoints; ++i) {
      cosv[i] = std::cos(phase[i]);
      sinv[i] = std::sin(phase[i]);
    }
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const auto& piece = fs[k].pieces()[fs[k].piece_index(xs[7])];
      simd::horner_complex(kernels, piece.re, piece.im, xs, fre, fim);
      for (std::size_t i = 0; i < gk15::kPoints; ++i) {
        vals[i * dim + 2 * k] = fre[i] * cosv[i] - fim[i] * sinv[i];
        vals[i * dim + 2 * k + 1] = fre[i] * sinv[i] + fim[i] * cosv[i];
      }
    }
  };

  QuadratureConfig part = cfg;
  part.abs_tol = cfg.abs_tol / static_cast<double>(mask.intervals().size());
  for (const auto& [lo, hi] : mask.intervals()) {
    if (lo == hi) continue;
    const QuadratureResult r = integrate_adaptive(integrand, dim, lo, hi, cuts, part);
    for (std::size_t k = 0; k < fs.size(); ++k) out.values[k] += Complex(r.values[2 * k], r.values[2 * k + 1]);
    out.error_bound += r.error_bound;
    out.panels += r.panels;
  }
  return out;
}

Complex integrate_against_phase(const Function& f, const SmoothPhase& theta,
                                const IntervalMask& mask, const QuadratureConfig& cfg) {
  return integrate_against_phase(std::span<const Function>(&f, 1), theta, mask, cfg).values[0];
}

Complex inner_product(const Function& f, const Function& g) {
  const std::vector<Function> pair{f, g};
  const std::vector<double> bps = merged_breakpoints(pair);
  Complex sum = 0.0;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double mid = 0.5 * (bps[i] + bps[i + 1]);
    const auto& p = f.pieces()[f.piece_index(mid)];
    const auto& q = g.pieces()[g.piece_index(mid)];
    PiecewiseComplexFunction::Piece prod;
    prod.re.assign(p.re.size() + q.re.size() - 1, 0.0);
    prod.im.assign(prod.re.size(), 0.0);
    for (std::size_t a = 0; a < p.re.size(); ++a)
      for (std::size_t b = 0; b < q.re.size(); ++b) {
        const Complex c = Complex(p.re[a], p.im[a]) * std::conj(Complex(q.re[b], q.im[b]));
        prod.re[a + b] += c.real();
        prod.im[a + b] += c.imag();
      }
    sum += antiderivative(prod, bps[i + 1]) - antiderivative(prod, bps[i]);
  }
  return sum;
}

std::vector<std::size_t> independent_subset(std::span<const Function> fs, double tol) {
  if (fs.empty()) throw DomainError("independent_subset needs at least one function");
  const std::size_t n = fs.size();
  Eigen::MatrixXcd gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      gram(i, j) = inner_product(fs[i], fs[j]);
      gram(j, i) = std::conj(gram(i, j));
    }
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, gram(i, i).real());
  std::vector<std::size_t> kept;
  if (!(max_diag > 0.0)) return kept;

  // Lower-triangular Cholesky factor of the Gram matrix of the kept set.
  Eigen::MatrixXcd factor = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = kept.size();
    Eigen::VectorXcd l(m);
    for (std::size_t a = 0; a < m; ++a) {
      Complex s = gram(kept[a], i);
      for (std::size_t b = 0; b < a; ++b) s -= factor(a, b) * l(b);
      l(a) = s / factor(a, a).real();
    }
    const double pivot = gram(i, i).real() - l.squaredNorm();
    if (pivot > tol * max_diag) {
      const double root = std::sqrt(pivot);
      for (std::size_t a = 0; a < m; ++a) factor(m, a) = std::conj(l(a));
      factor(m, m) = root;
      kept.push_back(i);
    }
  }
  return kept;
}

std::vector<Function> pack_real_pairs(std::span<const Function> fs) {
  for (const Function& f : fs)
    if (!f.is_real()) throw DomainError("pack_real_pairs expects real-valued functions");
  std::vector<Function> out;
  for (std::size_t i = 0; i + 1 < fs.size(); i += 2) {
    const Function pair[2] = {fs[i], fs[i + 1]};
    const Complex coefs[2] = {1.0, Complex(0.0, 1.0)};
    out.push_back(linear_combination(pair, coefs));
  }
  if (fs.size() % 2 == 1) out.push_back(fs.back());
  return out;
}

Function restrict_to_mask(const Function& f, const IntervalMask& mask) {
  std::vector<double> edges;
  for (const auto& [lo, hi] : mask.intervals()) {
    edges.push_back(lo);
    edges.push_back(hi);
  }
  Function r = f.refined(edges);
  std::vector<PiecewiseComplexFunction::Piece> pieces = r.pieces();
  const auto& bps = r.breakpoints();
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (!mask.contains(0.5 * (bps[i] + bps[i + 1]))) pieces[i] = zero_piece();
  return {bps, std::move(pieces)};
}

Function linear_combination(std::span<const Function> fs, std::span<const Complex> coefs) {
  if (fs.empty() || fs.size() != coefs.size())
    throw DomainError("linear_combination needs one coefficient per function");
  const std::vector<double> bps = merged_breakpoints(fs);
  std::vector<PiecewiseComplexFunction::Piece> pieces;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double mid = 0.5 * (bps[i] + bps[i + 1]);
    PiecewiseComplexFunction::Piece acc{{0.0}, {0.0}};
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const auto& p = fs[k].pieces()[fs[k].piece_index(mid)];
      if (p.re.size() > acc.re.size()) {
        acc.re.resize(p.re.size(), 0.0);
        acc.im.resize(p.re.size(), 0.0);
      }
      for (std::size_t d = 0; d < p.re.size(); ++d) {
        const Complex v = coefs[k] * Complex(p.re[d], p.im[d]);
        acc.re[d] += v.real();
        acc.im[d] += v.imag();
      }
    }
    pieces.push_back(std::move(acc));
  }
  return {bps, std::move(pieces)};
}

double l1_norm(const Function& f, const QuadratureConfig& cfg) {
  const auto& bps = f.breakpoints();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const auto& p = f.pieces()[i];
    auto piece_abs = [&p](double t) { return std::abs(horner(p, t)); };
    sum += integrate_scalar(piece_abs, bps[i], bps[i + 1], {}, cfg);
  }
  return sum;
}

double sup_abs(const Function& f, double a, double b) {
  if (a > b) throw DomainError("sup_abs bounds out of order");
  const auto& bps = f.breakpoints();
  double m = 0.0;
  constexpr int kSamples = 64;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double lo = std::max(a, bps[i]);
    const double hi = std::min(b, bps[i + 1]);
    if (lo > hi) continue;
    for (int s = 0; s <= kSamples; ++s) {
      const double t = lo + (hi - lo) * s / kSamples;
      m = std::max(m, std::abs(horner(f.pieces()[i], t)));
    }
  }
  return m;
}

}  // namespace ann
