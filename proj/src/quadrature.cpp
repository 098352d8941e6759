#include "annihilator/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "annihilator/errors.hpp"

namespace ann {

void validate(const QuadratureConfig& cfg) {
  if (!(cfg.abs_tol > 0.0)) throw DomainError("quadrature abs_tol must be positive");
  if (!(cfg.rel_tol >= 0.0)) throw DomainError("quadrature rel_tol must be non-negative");
  if (cfg.max_subdivisions < 1) throw DomainError("quadrature max_subdivisions must be positive");
}

namespace gk15 {

std::array<double, kPoints> panel_points(double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, kPoints> xs{};
  for (std::size_t i = 0; i < 7; ++i) {
    xs[i] = mid - half * kNodes[i];
    xs[kPoints - 1 - i] = mid + half * kNodes[i];
  }
  xs[7] = mid;
  return xs;
}

}  // namespace gk15

namespace {

struct Panel {
  double a;
  double b;
  double err;
  std::vector<double> kronrod;
};

struct WorstFirst {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.err != y.err) return x.err < y.err;
    return x.a > y.a;
  }
};

Panel evaluate_panel(const BatchIntegrand& integrand, std::size_t dim, double a, double b,
                     std::vector<double>& scratch) {
  const auto xs = gk15::panel_points(a, b);
  scratch.assign(gk15::kPoints * dim, 0.0);
  integrand(std::span<const double, gk15::kPoints>(xs), std::span<double>(scratch));

  const double half = 0.5 * (b - a);
  Panel p{a, b, 0.0, std::vector<double>(dim, 0.0)};
  for (std::size_t c = 0; c < dim; ++c) {
    auto at = [&](std::size_t i) { return scratch[i * dim + c]; };
    double k = gk15::kKronrodWeights[7] * at(7);
    double g = gk15::kGaussWeights[3] * at(7);
    for (std::size_t i = 0; i < 7; ++i) {
      const double pair = at(i) + at(gk15::kPoints - 1 - i);
      k += gk15::kKronrodWeights[i] * pair;
      if (i % 2 == 1) g += gk15::kGaussWeights[i / 2] * pair;
    }
    p.kronrod[c] = k * half;
    p.err = std::max(p.err, std::abs((k - g) * half));
  }
  if (!std::isfinite(p.err)) p.err = std::numeric_limits<double>::infinity();
  return p;
}

bool splittable(const Panel& p) {
  const double scale = std::max(std::abs(p.a), std::abs(p.b));
  return (p.b - p.a) > 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace

QuadratureResult integrate_adaptive(const BatchIntegrand& integrand, std::size_t dim, double lo,
                                    double hi, std::span<const double> breakpoints,
                                    const QuadratureConfig& cfg) {
  validate(cfg);
  if (lo > hi) throw DomainError("integration bounds out of order");
  QuadratureResult result;
  result.values.assign(dim, 0.0);
  if (lo == hi) return result;

  std::vector<double> cuts{lo, hi};
  for (double x : breakpoints)
    if (x > lo && x < hi) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> scratch;
  std::vector<Panel> heap;
  heap.reserve(cuts.size() * 2);
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    heap.push_back(evaluate_panel(integrand, dim, cuts[i], cuts[i + 1], scratch));
    total_err += heap.back().err;
  }
  std::make_heap(heap.begin(), heap.end(), WorstFirst{});

  auto estimate_scale = [&] {
    std::vector<double> sum(dim, 0.0);
    for (const Panel& p : heap)
      for (std::size_t c = 0; c < dim; ++c) sum[c] += p.kronrod[c];
    double m = 0.0;
    for (double v : sum) m = std::max(m, std::abs(v));
    return m;
  };
  auto target = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * estimate_scale()); };

  int subdivisions = 0;
  double goal = target();
  while (total_err > goal) {
    if (subdivisions >= cfg.max_subdivisions || !splittable(heap.front())) {
      // recompute before giving up; the running sum can drift
      total_err = 0.0;
      for (const Panel& p : heap) total_err += p.err;
      goal = target();
      if (total_err <= goal) break;
      std::ostringstream msg;
      msg << "adaptive quadrature on [" << lo << ", " << hi << "] stopped at error bound "
          << total_err << " > " << goal << " after " << subdivisions << " subdivisions";
      throw ConvergenceError(msg.str(), estimate_scale(), total_err);
    }
    std::pop_heap(heap.begin(), heap.end(), WorstFirst{});
    Panel worst = std::move(heap.back());
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = evaluate_panel(integrand, dim, worst.a, mid, scratch);
    Panel right = evaluate_panel(integrand, dim, mid, worst.b, scratch);
    total_err += left.err + right.err - worst.err;
    heap.push_back(std::move(left));
    std::push_heap(heap.begin(), heap.end(), WorstFirst{});
    heap.push_back(std::move(right));
    std::push_heap(heap.begin(), heap.end(), WorstFirst{});
    ++subdivisions;
    if (subdivisions % 64 == 0) {
      total_err = 0.0;
      for (const Panel& p : heap) total_err += p.err;
      goal = target();
    }
  }

  std::sort(heap.begin(), heap.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  result.error_bound = 0.0;
  for (const Panel& p : heap) {
    for (std::size_t c = 0; c < dim; ++c) result.values[c] += p.kronrod[c];
    result.error_bound += p.err;
  }
  result.panels = static_cast<int>(heap.size());
  return result;
}

double integrate_scalar(const std::function<double(double)>& f, double lo, double hi,
                        std::span<const double> breakpoints, const QuadratureConfig& cfg) {
  auto batch = [&f](std::span<const double, gk15::kPoints> xs, std::span<double> out) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
  };
  return integrate_adaptive(batch, 1, lo, hi, breakpoints, cfg).values[0];
}

}  // namespace ann
