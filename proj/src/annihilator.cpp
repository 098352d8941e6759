#include "annihilator/annihilator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "annihilator/errors.hpp"
#include "annihilator/parallel.hpp"

namespace ann {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double inf_norm(std::span<const Complex> v) {
  double m = 0.0;
  for (const Complex& c : v) m = std::max(m, std::abs(c));
  return m;
}

double inf_norm(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Eigen::VectorXcd to_eigen(std::span<const Complex> v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

std::vector<Complex> to_vector(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

Complex project_to_disk(Complex z) {
  const double r = std::abs(z);
  return r > 1.0 ? z / r : z;
}

/// Mollify a masked step with width eta, nudging each jump by whole ulps
/// until its support clears every window [t_j - delta, t_j + delta] under
/// the same arithmetic the evaluator uses. Then phi is exactly constant on
/// every window.
SmoothPhase separated_mollify(const StepPhase& s, double eta, std::span<const double> nodes,
                              double delta) {
  const double inv = 1.0 / eta;
  std::vector<PhaseTerm> terms;
  for (std::size_t i = 0; i < s.jump_locations().size(); ++i) {
    double y = s.jump_locations()[i];
    for (double t : nodes) {
      if (y <= t) {
        while ((t - delta - y) * inv < 1.0) y = std::nextafter(y, -std::numeric_limits<double>::infinity());
      } else {
        while ((t + delta - y) * inv > -1.0) y = std::nextafter(y, std::numeric_limits<double>::infinity());
      }
    }
    terms.push_back({y, eta, s.jump_sizes()[i]});
  }
  return SmoothPhase(std::move(terms), s.base_value(), 0.0, 1.0);
}

}  // namespace

std::vector<double> default_candidate_grid(std::span<const Function> fs) {
  std::vector<double> bps;
  for (const Function& f : fs) bps.insert(bps.end(), f.breakpoints().begin(), f.breakpoints().end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  constexpr int kPerPiece = 16;
  std::vector<double> grid;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i)
    for (int k = 0; k < kPerPiece; ++k)
      grid.push_back(bps[i] + (bps[i + 1] - bps[i]) * (k + 0.5) / kPerPiece);
  return grid;
}

NodeSelection select_nodes(std::span<const Function> fs, std::span<const double> candidate_grid) {
  if (fs.empty()) throw DomainError("select_nodes needs at least one function");
  std::vector<double> bps;
  for (const Function& f : fs) bps.insert(bps.end(), f.breakpoints().begin(), f.breakpoints().end());
  std::vector<double> grid;
  for (double t : candidate_grid)
    if (t > 0.0 && t < 1.0 && std::find(bps.begin(), bps.end(), t) == bps.end()) grid.push_back(t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::size_t n = fs.size();
  const Eigen::Index N = static_cast<Eigen::Index>(n);
  const Eigen::Index G = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd V(N, G);
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index g = 0; g < G; ++g) V(k, g) = eval_f(fs[static_cast<std::size_t>(k)], grid[static_cast<std::size_t>(g)]);

  std::vector<Eigen::Index> chosen;
  for (Eigen::Index k = 0; k < N; ++k) {
    const Eigen::Index m = static_cast<Eigen::Index>(chosen.size());
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(m);
    if (m > 0) {
      Eigen::MatrixXcd Mp(m, m);
      Eigen::VectorXcd row(m);
      for (Eigen::Index b = 0; b < m; ++b) {
        for (Eigen::Index a = 0; a < m; ++a) Mp(a, b) = V(a, chosen[static_cast<std::size_t>(b)]);
        row[b] = V(k, chosen[static_cast<std::size_t>(b)]);
      }
      // y(t) = f_k(t) - row M'^{-1} c(t): the Schur complement of the
      // extended matrix.
      w = Mp.transpose().fullPivLu().solve(row);
    }
    double scale = 0.0;
    double best = -1.0;
    std::vector<double> y(static_cast<std::size_t>(G));
    for (Eigen::Index g = 0; g < G; ++g) {
      Complex v = V(k, g);
      for (Eigen::Index a = 0; a < m; ++a) v -= w[a] * V(a, g);
      y[static_cast<std::size_t>(g)] = std::abs(v);
      scale = std::max(scale, std::abs(V(k, g)));
      best = std::max(best, y[static_cast<std::size_t>(g)]);
    }
    if (!(best > 1e-10 * scale) || !(scale > 0.0)) {
      std::ostringstream msg;
      msg << "select_nodes: no candidate gives a usable pivot for function " << k;
      throw NearDependenceError(msg.str());
    }
    for (Eigen::Index g = 0; g < G; ++g)
      if (y[static_cast<std::size_t>(g)] >= best * (1.0 - 1e-12)) {
        chosen.push_back(g);
        break;
      }
  }

  NodeSelection sel;
  for (Eigen::Index g : chosen) sel.nodes.push_back(grid[static_cast<std::size_t>(g)]);
  std::sort(sel.nodes.begin(), sel.nodes.end());
  sel.M.resize(N, N);
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index j = 0; j < N; ++j)
      sel.M(k, j) = eval_f(fs[static_cast<std::size_t>(k)], sel.nodes[static_cast<std::size_t>(j)]);
  const Eigen::FullPivLU<Eigen::MatrixXcd> lu(sel.M);
  if (!lu.isInvertible()) throw NearDependenceError("select_nodes: node matrix is singular");
  sel.M_inverse = lu.inverse();
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sel.M);
  const auto& sv = svd.singularValues();
  sel.condition_estimate = sv[0] / sv[sv.size() - 1];
  double gap = sel.nodes.front();
  for (std::size_t j = 1; j < n; ++j) gap = std::min(gap, sel.nodes[j] - sel.nodes[j - 1]);
  gap = std::min(gap, 1.0 - sel.nodes.back());
  sel.d = gap / 2;
  return sel;
}

std::vector<Complex> window_moments(std::span<const Function> fs, double t_j, double h, Complex z,
                                    const QuadratureConfig& cfg) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("window half-width must lie in (0, 1)");
  const double lo = t_j - h;
  const double hi = t_j + h;
  if (lo < -1e-15 || hi > 1.0 + 1e-15) throw DomainError("window exceeds [0, 1]");
  const SmoothPhase phase = window_phase(z, h).affine(h, t_j, std::max(lo, 0.0), std::min(hi, 1.0));
  const IntervalMask mask({{std::max(lo, 0.0), std::min(hi, 1.0)}});
  const PhaseIntegrals r = integrate_against_phase(fs, phase, mask, cfg);
  std::vector<Complex> out(r.values.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = r.values[k] / h;
  return out;
}

Complex window_moment(const Function& f, double t_j, double h, Complex z,
                      const QuadratureConfig& cfg) {
  return window_moments(std::span<const Function>(&f, 1), t_j, h, z, cfg)[0];
}

std::vector<Complex> compute_Q(std::span<const Function> fs, const NodeSelection& nodes, double h,
                               std::span<const Complex> z, const QuadratureConfig& cfg) {
  if (z.size() != nodes.nodes.size()) throw DomainError("compute_Q: one z per node");
  if (h < 0.0) throw DomainError("compute_Q: h must be non-negative");
  if (h == 0.0) return to_vector(nodes.M * to_eigen(z));
  std::vector<Complex> Q(fs.size(), 0.0);
  for (std::size_t j = 0; j < z.size(); ++j) {
    const std::vector<Complex> q = window_moments(fs, nodes.nodes[j], h, z[j], cfg);
    for (std::size_t k = 0; k < Q.size(); ++k) Q[k] += q[k];
  }
  return Q;
}

std::vector<double> node_margins(std::span<const Function> fs, const NodeSelection& nodes,
                                 double delta, const AnnihilatorOptions& opts) {
  const int R = opts.z_grid_resolution;
  if (R < 2) throw DomainError("z grid resolution must be at least 2");
  const std::size_t n = nodes.nodes.size();
  const double dr = 1.0 / (R - 1);
  const double da = kTwoPi / R;
  // Every point of the disk lies within this distance of a grid point.
  const double covering = dr / 2 + 2.0 * std::sin(da / 4);

  std::vector<double> margins(n, 0.0);
  const std::size_t points = static_cast<std::size_t>(R) * static_cast<std::size_t>(R);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Eigen::VectorXcd> g(points);
    std::vector<Complex> w(points);
    parallel_for(points, opts.threads, [&](std::size_t idx) {
      const int a = static_cast<int>(idx) / R;
      const int b = static_cast<int>(idx) % R;
      w[idx] = std::polar(a * dr, b * da);
      if (a == 0 && b > 0) return;  // the centre, computed once at b = 0
      const std::vector<Complex> q = window_moments(fs, nodes.nodes[j], delta, w[idx], opts.quadrature);
      g[idx] = nodes.M_inverse * (w[idx] * nodes.M.col(static_cast<Eigen::Index>(j)) - to_eigen(q));
    });
    for (int b = 1; b < R; ++b) g[static_cast<std::size_t>(b)] = g[0];

    double sup = 0.0;
    double slope = 0.0;
    auto at = [&](int a, int b) { return static_cast<std::size_t>(a * R + (b % R)); };
    for (int a = 0; a < R; ++a)
      for (int b = 0; b < R; ++b) {
        const std::size_t i = at(a, b);
        sup = std::max(sup, inf_norm(g[i]));
        if (a + 1 < R) {
          const std::size_t k = at(a + 1, b);
          slope = std::max(slope, inf_norm(g[k] - g[i]) / std::abs(w[k] - w[i]));
        }
        if (a > 0) {
          const std::size_t k = at(a, b + 1);
          slope = std::max(slope, inf_norm(g[k] - g[i]) / std::abs(w[k] - w[i]));
        }
      }
    margins[j] = sup + slope * covering;
  }
  return margins;
}

DeltaCertificate find_delta(std::span<const Function> fs, const NodeSelection& nodes,
                            const AnnihilatorOptions& opts) {
  if (!(opts.margin_threshold > 0.0 && opts.margin_threshold < 0.5))
    throw DomainError("margin threshold must lie in (0, 1/2)");
  DeltaCertificate cert;
  cert.z_grid_resolution = opts.z_grid_resolution;
  cert.margin_threshold = opts.margin_threshold;
  double delta = nodes.d;
  for (int k = 0; delta >= 1e-9 * nodes.d; ++k, delta /= 2) {
    std::vector<double> margins = node_margins(fs, nodes, delta, opts);
    double sum = 0.0;
    for (double m : margins) sum += m;
    cert.margin_sums.push_back(sum);
    if (sum <= opts.margin_threshold) {
      cert.delta = delta;
      cert.per_node_margins = std::move(margins);
      cert.halvings = k;
      return cert;
    }
  }
  throw CertificationFailure("find_delta: no window size down to 1e-9 d passes the margin test");
}

PhiConstruction build_phi(std::span<const Function> fs, const NodeSelection& nodes, double delta,
                          const AnnihilatorOptions& opts) {
  const std::size_t n = nodes.nodes.size();
  const IntervalMask L = IntervalMask::complement_of_windows(nodes.nodes, delta);

  // Real and imaginary parts on the mask, dependent or vanishing ones
  // dropped, each scaled to unit L2 norm.
  std::vector<Function> parts;
  for (const Function& f : fs) {
    parts.push_back(restrict_to_mask(f.real_part(), L));
    parts.push_back(restrict_to_mask(f.imag_part(), L));
  }
  std::vector<Function> gs;
  for (std::size_t i : independent_subset(parts)) {
    const double norm = std::sqrt(inner_product(parts[i], parts[i]).real());
    gs.push_back(parts[i].scaled(1.0 / norm));
  }

  PhiConstruction out;
  if (!gs.empty()) {
    HobbyRiceOptions hr = opts.hobby_rice;
    hr.seed = opts.seed;
    hr.threads = opts.threads;
    const HobbyRiceResult res = solve_hobby_rice(gs, L, hr);
    out.pattern = res.pattern;
    out.hobby_rice_residual = res.max_residual;
  }

  std::vector<double> boundary;
  for (double t : nodes.nodes) {
    boundary.push_back(t - delta);
    boundary.push_back(t + delta);
  }
  out.phi_sharp = select_phi_sharp(out.pattern, boundary);

  for (double eta = delta / 2;; eta /= 2) {
    if (eta < 1e-12 * delta)
      throw CertificationFailure("build_phi: smoothing width underflow before |M^-1 r| <= delta/2");
    const IntervalMask L_eta = IntervalMask::complement_of_windows(nodes.nodes, delta + eta);
    const StepPhase masked = mask_step(out.phi_sharp, L_eta);
    SmoothPhase phi = separated_mollify(masked, eta, nodes.nodes, delta);
    const PhaseIntegrals r = integrate_against_phase(fs, phi, L, opts.quadrature);
    const Eigen::VectorXcd v = nodes.M_inverse * to_eigen(r.values);
    if (inf_norm(v) <= delta / 2) {
      out.eta = eta;
      out.phi = std::move(phi);
      out.r = r.values;
      out.discontinuities = count_masked_discontinuities(out.phi_sharp, L_eta);
      break;
    }
  }
  if (out.discontinuities > static_cast<int>(3 * n)) {
    std::ostringstream msg;
    msg << "build_phi: " << out.discontinuities << " discontinuities exceed 3n = " << 3 * n;
    throw ConsistencyError(msg.str(), out.discontinuities);
  }
  return out;
}

SmoothPhase assemble_theta_star(std::span<const Complex> z, const SmoothPhase& phi,
                                const NodeSelection& nodes, double delta) {
  if (z.size() != nodes.nodes.size()) throw DomainError("assemble_theta_star: one z per node");
  std::vector<PhaseTerm> terms = phi.terms();
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (!(std::abs(z[j]) <= 1.0 + 1e-15)) throw DomainError("window parameter outside the unit disk");
    // Each window climbs by 2 pi, which realises the offsets 2 pi (j - 1).
    const SmoothPhase w = window_phase(z[j], delta).affine(delta, nodes.nodes[j], 0.0, 1.0);
    terms.insert(terms.end(), w.terms().begin(), w.terms().end());
  }
  return SmoothPhase(std::move(terms), phi.base_value(), 0.0, 1.0);
}

std::vector<Complex> residual_T(std::span<const Complex> z, const PipelineState& state,
                                const QuadratureConfig& cfg) {
  const SmoothPhase theta =
      assemble_theta_star(z, state.phi.phi, state.nodes, state.certificate.delta);
  return integrate_against_phase(state.fs, theta, IntervalMask::unit(), cfg).values;
}

std::vector<Complex> residual_T_decomposed(std::span<const Complex> z, const PipelineState& state,
                                           const QuadratureConfig& cfg) {
  const double delta = state.certificate.delta;
  std::vector<Complex> T = compute_Q(state.fs, state.nodes, delta, z, cfg);
  for (std::size_t k = 0; k < T.size(); ++k) T[k] = delta * T[k] + state.phi.r[k];
  return T;
}

double consistency_tolerance(const PipelineState& state, const QuadratureConfig& cfg) {
  // direct route, the mask integral r, and one window integral per node
  return 10.0 * cfg.abs_tol * static_cast<double>(state.nodes.nodes.size() + 2);
}

std::vector<Complex> brouwer_map(std::span<const Complex> z, const PipelineState& state,
                                 const QuadratureConfig& cfg) {
  const Eigen::VectorXcd T = to_eigen(residual_T(z, state, cfg));
  return to_vector(to_eigen(z) - state.nodes.M_inverse * T / state.certificate.delta);
}

PipelineState prepare_pipeline(std::span<const Function> fs, const AnnihilatorOptions& opts) {
  validate(opts.quadrature);
  PipelineState state;
  state.fs.assign(fs.begin(), fs.end());
  const std::vector<double> grid =
      opts.candidate_grid.empty() ? default_candidate_grid(fs) : opts.candidate_grid;
  state.nodes = select_nodes(fs, grid);
  state.certificate = find_delta(fs, state.nodes, opts);
  state.phi = build_phi(fs, state.nodes, state.certificate.delta, opts);
  return state;
}

namespace {

class FixedPointRun {
 public:
  FixedPointRun(const PipelineState& state, const AnnihilatorOptions& opts)
      : state_(state), opts_(opts), ctol_(consistency_tolerance(state, opts.quadrature)) {}

  /// Evaluates both routes at an iterate, records it, and returns the
  /// decomposed T (cheaper to differentiate, same value within ctol).
  std::vector<Complex> visit(std::span<const Complex> z) {
    const std::vector<Complex> dec = residual_T_decomposed(z, state_, opts_.quadrature);
    const std::vector<Complex> direct = residual_T(z, state_, opts_.quadrature);
    double gap = 0.0;
    for (std::size_t k = 0; k < dec.size(); ++k) gap = std::max(gap, std::abs(dec[k] - direct[k]));
    const double res = inf_norm(direct);
    history.push_back({res, gap});
    if (gap > ctol_) {
      std::ostringstream msg;
      msg << "residual map: direct quadrature and decomposition differ by " << gap
          << " (allowed " << ctol_ << ")";
      throw ConsistencyError(msg.str(), gap);
    }
    if (res < best_residual) {
      best_residual = res;
      best_z.assign(z.begin(), z.end());
    }
    return dec;
  }

  /// R(z) = M^{-1} T(z) / delta as 2n reals.
  Eigen::VectorXd scaled_residual(std::span<const Complex> T) const {
    const Eigen::VectorXcd v = state_.nodes.M_inverse * to_eigen(T) / state_.certificate.delta;
    Eigen::VectorXd out(2 * v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out[2 * i] = v[i].real();
      out[2 * i + 1] = v[i].imag();
    }
    return out;
  }

  // Iterate well past the tolerance so independent re-checks keep headroom.
  bool done() const { return best_residual <= 1e-3 * opts_.tol; }
  bool good_enough() const { return best_residual <= opts_.tol; }

  bool damped_iteration(std::vector<Complex> z) {
    double stall_ref = std::numeric_limits<double>::infinity();
    int since = 0;
    for (int it = 0; it < opts_.max_iterations; ++it) {
      const std::vector<Complex> T = visit(z);
      if (done()) return true;
      if (best_residual < 0.9 * stall_ref) {
        stall_ref = best_residual;
        since = 0;
      } else if (++since >= 10) {
        return good_enough();
      }
      const Eigen::VectorXcd step =
          state_.nodes.M_inverse * to_eigen(T) * (opts_.lambda / state_.certificate.delta);
      for (std::size_t j = 0; j < z.size(); ++j)
        z[j] = project_to_disk(z[j] - step[static_cast<Eigen::Index>(j)]);
    }
    return false;
  }

  /// Projected Levenberg-Marquardt on R with a forward-difference Jacobian.
  bool least_squares(std::vector<Complex> z, int max_iterations) {
    const std::size_t n = z.size();
    const Eigen::Index dim = static_cast<Eigen::Index>(2 * n);
    std::vector<Complex> T = visit(z);
    if (done()) return true;
    Eigen::VectorXd R = scaled_residual(T);
    double mu = 1e-3;
    for (int it = 0; it < max_iterations; ++it) {
      Eigen::MatrixXd J(dim, dim);
      constexpr double kStep = 1e-7;
      for (Eigen::Index c = 0; c < dim; ++c) {
        std::vector<Complex> zp = z;
        const std::size_t j = static_cast<std::size_t>(c / 2);
        const Complex e = c % 2 == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
        double h = kStep;
        if (std::abs(zp[j] + h * e) > 1.0) h = -h;
        zp[j] += h * e;
        J.col(c) = (scaled_residual(residual_T_decomposed(zp, state_, opts_.quadrature)) - R) / h;
      }
      bool accepted = false;
      while (mu < 1e10) {
        Eigen::MatrixXd A = J.transpose() * J;
        A.diagonal().array() += mu * std::max(1e-12, A.diagonal().maxCoeff());
        const Eigen::VectorXd dx = A.ldlt().solve(-J.transpose() * R);
        std::vector<Complex> trial = z;
        for (std::size_t j = 0; j < n; ++j)
          trial[j] = project_to_disk(
              trial[j] + Complex(dx[static_cast<Eigen::Index>(2 * j)], dx[static_cast<Eigen::Index>(2 * j + 1)]));
        const Eigen::VectorXd Rt =
            scaled_residual(residual_T_decomposed(trial, state_, opts_.quadrature));
        if (Rt.squaredNorm() < R.squaredNorm()) {
          z = std::move(trial);
          T = visit(z);
          if (done()) return true;
          R = scaled_residual(T);
          mu = std::max(1e-12, mu * 0.1);
          accepted = true;
          break;
        }
        mu *= 10.0;
      }
      if (!accepted) return false;
    }
    return false;
  }

  std::vector<IterateRecord> history;
  double best_residual = std::numeric_limits<double>::infinity();
  std::vector<Complex> best_z;

 private:
  const PipelineState& state_;
  const AnnihilatorOptions& opts_;
  double ctol_;
};

}  // namespace

AnnihilatorResult solve_annihilator(std::span<const Function> fs, const AnnihilatorOptions& opts) {
  if (fs.empty()) throw DomainError("solve_annihilator needs at least one function");
  if (!(opts.tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!(opts.lambda > 0.0 && opts.lambda <= 1.0)) throw DomainError("damping must lie in (0, 1]");

  AnnihilatorResult result;
  std::vector<Function> family(fs.begin(), fs.end());
  const bool all_real = std::all_of(fs.begin(), fs.end(), [](const Function& f) { return f.is_real(); });
  if (opts.pack_real && all_real) family = pack_real_pairs(fs);

  result.kept = independent_subset(family);
  for (std::size_t i : result.kept) result.solved.push_back(family[i]);
  result.consistency_tolerance = 10.0 * opts.quadrature.abs_tol;

  if (result.solved.empty()) {
    // Every function vanishes; any phase annihilates.
    result.residuals.assign(family.size(), 0.0);
    result.norms = sobolev_report(result.theta, 1.0, 0, opts.quadrature);
    return result;
  }

  result.state = prepare_pipeline(result.solved, opts);
  const PipelineState& state = result.state;
  result.consistency_tolerance = consistency_tolerance(state, opts.quadrature);
  const std::size_t n = state.nodes.nodes.size();

  // Leading-order fixed point: Q(delta; z) ~ M z gives z ~ -M^{-1} r / delta.
  std::vector<Complex> z0(n);
  const Eigen::VectorXcd lead =
      -(state.nodes.M_inverse * to_eigen(state.phi.r)) / state.certificate.delta;
  for (std::size_t j = 0; j < n; ++j) z0[j] = project_to_disk(lead[static_cast<Eigen::Index>(j)]);

  FixedPointRun run(state, opts);
  bool ok = run.damped_iteration(z0);
  ok = ok || run.good_enough();
  if (!ok) {
    result.used_fallback = true;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < opts.fallback_starts && !ok; ++s) {
      std::vector<Complex> start = run.best_z;
      if (s > 0)
        for (Complex& c : start) c = std::polar(0.9 * std::sqrt(unit(rng)), kTwoPi * unit(rng));
      ok = run.least_squares(start, 50);
    }
    ok = ok || run.good_enough();
  }
  result.history = run.history;
  result.iterations = static_cast<int>(run.history.size());
  if (!ok) {
    std::ostringstream msg;
    msg << "fixed-point solve did not reach tolerance " << opts.tol << " (best residual "
        << run.best_residual << ")";
    throw SolverFailure(msg.str(), run.best_residual);
  }

  result.z0 = run.best_z;
  result.theta = assemble_theta_star(result.z0, state.phi.phi, state.nodes, state.certificate.delta);
  // with packing these are the packed functions, not the real inputs
  result.residuals =
      integrate_against_phase(family, result.theta, IntervalMask::unit(), opts.quadrature).values;
  result.max_residual = inf_norm(result.residuals);
  result.norms = sobolev_report(result.theta, 1.0, static_cast<int>(n), opts.quadrature);
  return result;
}

}  // namespace ann
