#include "annihilator/hobby_rice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "annihilator/errors.hpp"
#include "annihilator/parallel.hpp"

namespace ann {

namespace {

constexpr double kPi = std::numbers::pi;

/// Real functions already multiplied by the mask indicator.
struct MaskedSystem {
  std::vector<Function> g;

  MaskedSystem(std::span<const Function> gs, const IntervalMask& mask) {
    g.reserve(gs.size());
    for (const Function& f : gs) {
      if (!f.is_real()) throw DomainError("Hobby-Rice inputs must be real-valued");
      g.push_back(restrict_to_mask(f, mask));
    }
  }

  std::size_t size() const { return g.size(); }
};

/// coefs of p(alpha + beta w) as a polynomial in w.
std::vector<double> compose_affine(const std::vector<double>& c, double alpha, double beta) {
  std::vector<double> q{0.0};
  for (std::size_t k = c.size(); k-- > 0;) {
    std::vector<double> next(q.size() + 1, 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
      next[i] += alpha * q[i];
      next[i + 1] += beta * q[i];
    }
    next[0] += c[k];
    q = std::move(next);
  }
  while (q.size() > 1 && q.back() == 0.0) q.pop_back();
  return q;
}

/// The masked system with the holes squeezed out: w in [0, 1] runs over the
/// mask at constant speed, and g~(w) = |mask| g(t(w)). A switch inside a
/// hole has no effect on the moments, so removing the holes removes flat
/// directions from the search.
struct CompressedSystem {
  std::vector<Function> g;
  std::vector<IntervalMask::Interval> pieces;  // mask intervals
  std::vector<double> starts;                  // w at the start of each interval
  double measure = 0.0;

  CompressedSystem(std::span<const Function> gs, const IntervalMask& mask) {
    for (const auto& iv : mask.intervals())
      if (iv.second > iv.first) pieces.push_back(iv);
    if (pieces.empty()) throw DomainError("Hobby-Rice mask is empty");
    for (const auto& [a, b] : pieces) measure += b - a;
    double acc = 0.0;
    for (const auto& [a, b] : pieces) {
      starts.push_back(acc / measure);
      acc += b - a;
    }
    for (const Function& f : gs) {
      if (!f.is_real()) throw DomainError("Hobby-Rice inputs must be real-valued");
      std::vector<double> bps;
      std::vector<Function::Piece> out;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto [a, b] = pieces[i];
        std::vector<double> cuts{a};
        for (double x : f.breakpoints())
          if (x > a && x < b) cuts.push_back(x);
        cuts.push_back(b);
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
          bps.push_back(to_w(i, cuts[j]));
          const auto& piece = f.pieces()[f.piece_index(0.5 * (cuts[j] + cuts[j + 1]))];
          // t = a + measure * (w - starts[i])
          std::vector<double> re = compose_affine(piece.re, a - measure * starts[i], measure);
          for (double& v : re) v *= measure;
          out.push_back({re, std::vector<double>(re.size(), 0.0)});
        }
      }
      bps.front() = 0.0;
      bps.push_back(1.0);
      g.emplace_back(std::move(bps), std::move(out));
    }
  }

  double to_w(std::size_t i, double t) const {
    return starts[i] + (t - pieces[i].first) / measure;
  }

  /// Back to [0, 1]; a w on the seam between two intervals maps to the end
  /// of the earlier one.
  double to_t(double w) const {
    std::size_t i = 0;
    while (i + 1 < pieces.size() && w > starts[i + 1]) ++i;
    return std::clamp(pieces[i].first + measure * (w - starts[i]), pieces[i].first, pieces[i].second);
  }

  std::size_t size() const { return g.size(); }
};

std::vector<double> boundaries(const Eigen::VectorXd& x) {
  // b_0 = 0, b_i = sum_{l < i} x_l^2, b_{m+1} = 1
  const std::size_t intervals = static_cast<std::size_t>(x.size());
  std::vector<double> b(intervals + 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < intervals; ++i) {
    acc += x[static_cast<Eigen::Index>(i - 1)] * x[static_cast<Eigen::Index>(i - 1)];
    b[i] = std::clamp(acc, 0.0, 1.0);
  }
  b[intervals] = 1.0;
  return b;
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

Eigen::VectorXd moment_map(const MaskedSystem& sys, const Eigen::VectorXd& x) {
  const std::vector<double> b = boundaries(x);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.size()));
  for (std::size_t k = 0; k < sys.size(); ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      if (b[i + 1] <= b[i]) continue;
      sum += sign_of(x[static_cast<Eigen::Index>(i)]) * integrate(sys.g[k], b[i], b[i + 1]).real();
    }
    F[static_cast<Eigen::Index>(k)] = sum;
  }
  return F;
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

struct SeedOutcome {
  bool converged = false;
  SignPattern pattern;
  std::vector<double> residuals;
  double max_residual = std::numeric_limits<double>::infinity();
};

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// F(t) for Phi = sign * (-1)^{#switches <= t}; the order of t is irrelevant.
Eigen::VectorXd switch_map(const CompressedSystem& sys, std::vector<double> t, int sign) {
  std::sort(t.begin(), t.end());
  Eigen::VectorXd F(static_cast<Eigen::Index>(sys.size()));
  for (std::size_t k = 0; k < sys.size(); ++k) {
    double sum = 0.0;
    double prev = 0.0;
    int s = sign;
    for (double c : t) {
      sum += s * integrate(sys.g[k], prev, c).real();
      prev = c;
      s = -s;
    }
    sum += s * integrate(sys.g[k], prev, 1.0).real();
    F[static_cast<Eigen::Index>(k)] = sum;
  }
  return F;
}

/// dF_k/dt_j = 2 sign (-1)^j g_k(t_j) for sorted t (j from 0).
Eigen::MatrixXd switch_jacobian(const CompressedSystem& sys, const std::vector<double>& t, int sign) {
  const Eigen::Index m = static_cast<Eigen::Index>(sys.size());
  Eigen::MatrixXd J(m, static_cast<Eigen::Index>(t.size()));
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double f = 2.0 * sign * (j % 2 ? -1.0 : 1.0);
    for (Eigen::Index k = 0; k < m; ++k)
      J(k, static_cast<Eigen::Index>(j)) = f * eval_f(sys.g[static_cast<std::size_t>(k)], t[j]).real();
  }
  return J;
}

/// Switches in (0, 1) with coincident pairs cancelled; a switch at 0 flips
/// the leading sign.
SignPattern pattern_from_switches(std::vector<double> t, int sign, double merge_length) {
  std::sort(t.begin(), t.end());
  std::vector<double> kept;
  for (double c : t) {
    if (c <= merge_length) {
      sign = -sign;
      continue;
    }
    if (c >= 1.0 - merge_length) continue;
    if (!kept.empty() && c - kept.back() <= merge_length) {
      kept.pop_back();
      continue;
    }
    kept.push_back(c);
  }
  return {kept, sign};
}

// Damped Gauss-Newton on the switch points with the sign alternation held
// fixed. (A search over sphere coordinates stalls whenever two neighbouring
// intervals share a sign: the switch between them has zero derivative.)
SeedOutcome run_seed(const CompressedSystem& sys, std::span<const Function> gs, const IntervalMask& mask,
                     std::vector<double> t, int sign, const HobbyRiceOptions& opts) {
  const Eigen::Index dim = static_cast<Eigen::Index>(t.size());
  const double target = 1e-3 * opts.tol;
  std::sort(t.begin(), t.end());
  Eigen::VectorXd F = switch_map(sys, t, sign);
  double merit = F.squaredNorm();
  double mu = 1e-12;
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (F.lpNorm<Eigen::Infinity>() <= target) break;
    const Eigen::MatrixXd J = switch_jacobian(sys, t, sign);
    const Eigen::MatrixXd normal = J.transpose() * J;
    const double scale = std::max(1e-300, normal.trace() / static_cast<double>(dim));
    const Eigen::VectorXd gradient = J.transpose() * F;
    bool accepted = false;
    while (mu < 1e8) {
      Eigen::MatrixXd A = normal;
      A.diagonal().array() += mu * scale;
      Eigen::VectorXd step = -A.ldlt().solve(gradient);
      const double len = step.lpNorm<Eigen::Infinity>();
      if (len > 0.25) step *= 0.25 / len;
      std::vector<double> trial(t.size());
      for (std::size_t j = 0; j < t.size(); ++j)
        trial[j] = std::clamp(t[j] + step[static_cast<Eigen::Index>(j)], 0.0, 1.0);
      std::sort(trial.begin(), trial.end());
      const Eigen::VectorXd Ft = switch_map(sys, trial, sign);
      if (Ft.squaredNorm() < merit) {
        t = std::move(trial);
        F = Ft;
        merit = Ft.squaredNorm();
        mu = std::max(1e-14, mu * 0.1);
        accepted = true;
        break;
      }
      mu *= 10.0;
    }
    if (!accepted) break;
  }

  SeedOutcome out;
  out.pattern = pattern_from_switches(t, sign, 1e-14);
  for (double& c : out.pattern.switch_points) c = sys.to_t(c);
  out.residuals = moment_residual(gs, out.pattern, mask);
  out.max_residual = inf_norm(out.residuals);
  out.converged = out.max_residual <= opts.tol &&
                  out.pattern.switch_points.size() <= static_cast<std::size_t>(sys.size());
  return out;
}

/// Values and primitives int_0^b of the shifted Chebyshev polynomials
/// T_k(2t - 1), k < m: a T-system whose sign function with m switches is
/// known in closed form.
struct ChebyshevSystem {
  std::size_t m;

  static double T(std::size_t k, double u) {
    return std::cos(static_cast<double>(k) * std::acos(std::clamp(u, -1.0, 1.0)));
  }
  double value(std::size_t k, double t) const { return T(k, 2.0 * t - 1.0); }
  double primitive(std::size_t k, double t) const {
    // int T_k du: u, u^2/2, then (T_{k+1}/(k+1) - T_{k-1}/(k-1)) / 2; dt = du/2
    auto P = [k](double u) {
      if (k == 0) return u;
      if (k == 1) return 0.5 * u * u;
      const double kk = static_cast<double>(k);
      return 0.5 * (T(k + 1, u) / (kk + 1.0) - T(k - 1, u) / (kk - 1.0));
    };
    return 0.5 * (P(2.0 * t - 1.0) - P(-1.0));
  }
  /// Switches sin^2(j pi / (2(m + 1))), j = 1..m.
  std::vector<double> switches() const {
    std::vector<double> t(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double v = std::sin(static_cast<double>(j + 1) * kPi / (2.0 * static_cast<double>(m + 1)));
      t[j] = v * v;
    }
    return t;
  }
};

/// H(x, s) = (1 - s) F_cheb(x) + s F_g(x) on the sphere, with its ambient
/// Jacobian in x and its s-derivative.
struct HomotopyMap {
  const CompressedSystem& sys;
  ChebyshevSystem cheb;

  struct Eval {
    Eigen::VectorXd H;
    Eigen::MatrixXd Jx;
    Eigen::VectorXd Hs;
  };

  Eval operator()(const Eigen::VectorXd& x, double s, bool jacobian) const {
    const std::vector<double> b = boundaries(x);
    const Eigen::Index m = static_cast<Eigen::Index>(sys.size());
    const Eigen::Index dim = x.size();
    Eval e;
    e.H.resize(m);
    e.Hs.resize(m);
    if (jacobian) e.Jx = Eigen::MatrixXd::Zero(m, dim);
    for (Eigen::Index k = 0; k < m; ++k) {
      const std::size_t kk = static_cast<std::size_t>(k);
      std::vector<double> pg(b.size()), pc(b.size());
      for (std::size_t i = 0; i < b.size(); ++i) {
        pg[i] = integrate(sys.g[kk], 0.0, b[i]).real();
        pc[i] = cheb.primitive(kk, b[i]);
      }
      double fg = 0.0, fc = 0.0;
      for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const int sg = sign_of(x[static_cast<Eigen::Index>(i)]);
        fg += sg * (pg[i + 1] - pg[i]);
        fc += sg * (pc[i + 1] - pc[i]);
      }
      e.H[k] = (1.0 - s) * fc + s * fg;
      e.Hs[k] = fg - fc;
      if (!jacobian) continue;
      double tail = 0.0;
      for (Eigen::Index l = dim - 1; l >= 0; --l) {
        e.Jx(k, l) = 2.0 * x[l] * tail;
        if (l >= 1) {
          const int jump = sign_of(x[l - 1]) - sign_of(x[l]);
          const double bl = b[static_cast<std::size_t>(l)];
          if (jump != 0)
            tail += jump * ((1.0 - s) * cheb.value(kk, bl) + s * eval_f(sys.g[kk], bl).real());
        }
      }
    }
    return e;
  }
};

/// Follows the zero curve of H from the Chebyshev solution at s = 0 to
/// s = 1 by pseudo-arclength continuation. Borsuk-Ulam, run backwards: the
/// curve through an odd map's only zero pair cannot turn back to s = 0,
/// so for generic inputs it reaches s = 1. Returns the switch points and
/// leading sign near s = 1, or nothing if the tracker gives up.
std::optional<std::pair<std::vector<double>, int>> track_homotopy(const CompressedSystem& sys) {
  const std::size_t m = sys.size();
  const Eigen::Index dim = static_cast<Eigen::Index>(m) + 1;
  const HomotopyMap map{sys, ChebyshevSystem{m}};

  Eigen::VectorXd y(dim + 1);  // (x, s)
  {
    const std::vector<double> t = map.cheb.switches();
    double prev = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
      const double next = i < m ? t[i] : 1.0;
      y[static_cast<Eigen::Index>(i)] = (i % 2 ? -1.0 : 1.0) * std::sqrt(next - prev);
      prev = next;
    }
    y[dim] = 0.0;
  }

  auto residual_and_jacobian = [&](const Eigen::VectorXd& v, Eigen::VectorXd& R, Eigen::MatrixXd& A) {
    const Eigen::VectorXd x = v.head(dim);
    const HomotopyMap::Eval e = map(x, v[dim], true);
    R.resize(dim);
    R.head(dim - 1) = e.H;
    R[dim - 1] = 0.5 * (x.squaredNorm() - 1.0);
    A.resize(dim, dim + 1);
    A.topLeftCorner(dim - 1, dim) = e.Jx;
    A.topRightCorner(dim - 1, 1) = e.Hs;
    A.bottomLeftCorner(1, dim) = x.transpose();
    A(dim - 1, dim) = 0.0;
  };
  auto tangent = [&](const Eigen::MatrixXd& A) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A.transpose());
    const Eigen::MatrixXd Q = qr.householderQ();
    return Eigen::VectorXd(Q.col(dim));
  };
  auto min_norm_solve = [&](const Eigen::MatrixXd& A, const Eigen::VectorXd& R) {
    return Eigen::VectorXd(A.transpose() * (A * A.transpose()).ldlt().solve(R));
  };

  Eigen::VectorXd R;
  Eigen::MatrixXd A;
  residual_and_jacobian(y, R, A);
  Eigen::VectorXd tau = tangent(A);
  if (tau[dim] < 0.0) tau = -tau;

  // Newton from z, switching to Broyden updates when a fresh Jacobian stops
  // contracting: at a kink the Jacobian from the near side is wrong, a
  // secant one is not.
  auto correct = [&](Eigen::VectorXd& z) {
    double prev_norm = std::numeric_limits<double>::infinity();
    bool broyden = false;
    residual_and_jacobian(z, R, A);
    for (int it = 0; it < 40; ++it) {
      const Eigen::VectorXd d = min_norm_solve(A, R);
      const double dn = d.norm();
      if (!std::isfinite(dn) || dn > 0.95 * prev_norm) return false;
      if (dn > 0.5 * prev_norm) broyden = true;
      z -= d;
      prev_norm = dn;
      if (dn <= 1e-12) return true;
      if (broyden) {
        Eigen::VectorXd R_new;
        Eigen::MatrixXd unused;
        residual_and_jacobian(z, R_new, unused);
        // secant condition A_new (-d) = R_new - R
        A += ((R_new - R) + A * d) * (-d).transpose() / d.squaredNorm();
        R = R_new;
      } else {
        residual_and_jacobian(z, R, A);
      }
    }
    return false;
  };

  constexpr double kMaxStep = 0.1;
  constexpr double kMinStep = 1e-9;
  // One predictor-corrector step from y along t, halving h on failure. The
  // new tangent is oriented along the chord: where a boundary crosses a
  // jump of some g the curve can fold, and a determinant-based orientation
  // would flip there.
  auto advance = [&](const Eigen::VectorXd& t, double& h, Eigen::VectorXd& z,
                     Eigen::VectorXd& t_next) {
    for (; h >= kMinStep; h *= 0.5) {
      z = y + h * t;
      if (!correct(z)) continue;
      const Eigen::VectorXd chord = z - y;
      if (chord.norm() > 2.0 * h || chord.dot(t) <= 0.0) continue;
      residual_and_jacobian(z, R, A);
      t_next = tangent(A);
      if (t_next.dot(chord) < 0.0) t_next = -t_next;
      // A sharp turn on a long step usually means the corrector jumped to
      // another branch.
      if (h <= 1e-6 || t_next.dot(t) >= 0.9) return true;
    }
    return false;
  };

  double h = 0.02;
  Eigen::VectorXd y_prev = y;
  for (int step = 0; step < 20000 && y[dim] < 1.0; ++step) {
    if (y[dim] < 0.0) return std::nullopt;  // turned back: lost the curve
    Eigen::VectorXd z, t_next;
    // aim the last predictor at s = 1 so the landing starts close
    if (tau[dim] > 0.0 && y[dim] + h * tau[dim] > 1.0)
      h = std::max(kMinStep, (1.0 - y[dim]) / tau[dim] + 1e-9);
    bool ok = advance(tau, h, z, t_next);
    // Stuck on a kink: take the tangent from just across it, either sign,
    // but not straight back.
    for (double eps = 1e-10; !ok && eps <= 1e-6; eps *= 10.0) {
      const Eigen::VectorXd probe = y + eps * tau;
      Eigen::VectorXd Rp;
      Eigen::MatrixXd Ap;
      residual_and_jacobian(probe, Rp, Ap);
      const Eigen::VectorXd tp = tangent(Ap);
      if (std::abs(tp.dot(tau)) > 0.999) continue;
      Eigen::VectorXd Ry;
      Eigen::MatrixXd Ay;
      residual_and_jacobian(y, Ry, Ay);
      for (double sgn : {1.0, -1.0}) {
        h = 1e-6;
        if (!advance(sgn * tp, h, z, t_next)) continue;
        // must land on the probe's side of the kink
        Eigen::VectorXd Rz;
        Eigen::MatrixXd Az;
        residual_and_jacobian(z, Rz, Az);
        if ((Az - Ap).norm() < (Az - Ay).norm()) {
          ok = true;
          break;
        }
      }
    }
    if (!ok) return std::nullopt;
    y_prev = y;
    y = z;
    tau = t_next;
    h = std::min(kMaxStep, 1.5 * h);
  }
  if (y[dim] < 1.0) return std::nullopt;

  // Land on s = 1: interpolate the last chord, then Newton in x alone.
  Eigen::VectorXd x = y_prev.head(dim) + (1.0 - y_prev[dim]) / (y[dim] - y_prev[dim]) *
                                             (y.head(dim) - y_prev.head(dim));
  // Damped, since a boundary may sit on a jump of some g.
  auto landing_residual = [&](const Eigen::VectorXd& xv) {
    Eigen::VectorXd v(dim + 1);
    v << xv, 1.0;
    residual_and_jacobian(v, R, A);
    return R.norm();
  };
  double r = landing_residual(x);
  for (int it = 0; it < 60 && r > 1e-15; ++it) {
    const Eigen::VectorXd d = A.leftCols(dim).fullPivLu().solve(R);
    double lambda = 1.0;
    for (; lambda >= 1e-4; lambda *= 0.5) {
      const double trial = landing_residual(x - lambda * d);
      if (trial < (1.0 - 1e-4 * lambda) * r) {
        x -= lambda * d;
        r = trial;
        break;
      }
    }
    if (lambda < 1e-4) break;
    landing_residual(x);
  }
  const std::vector<double> b = boundaries(x);
  std::vector<double> t;
  int lead = sign_of(x[0]);
  int current = lead;
  for (Eigen::Index i = 1; i < dim; ++i) {
    const int sg = sign_of(x[i]);
    if (sg != current) t.push_back(b[static_cast<std::size_t>(i)]);
    current = sg;
  }
  return std::make_pair(std::move(t), lead);
}

/// Halton point in [0, 1]^m, sorted.
std::vector<double> halton_switches(std::uint64_t index, std::size_t m) {
  static constexpr std::uint64_t kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                                              37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79};
  std::vector<double> t(m);
  for (std::size_t j = 0; j < m; ++j) t[j] = radical_inverse(index, kPrimes[(j + 1) % 22]);
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

int SignPattern::operator()(double t) const {
  int s = leading_sign;
  for (double p : switch_points)
    if (p <= t) s = -s;
  return s;
}

SignPattern pattern_from_sphere(const SphereCoordinates& sc, double merge_length) {
  const Eigen::Map<const Eigen::VectorXd> x(sc.x.data(), static_cast<Eigen::Index>(sc.x.size()));
  const std::vector<double> b = boundaries(x);
  const std::size_t intervals = sc.x.size();
  std::vector<int> sign(intervals, 0);
  int previous = 0;
  for (std::size_t i = 0; i < intervals; ++i) {
    const bool empty = !(b[i + 1] - b[i] > merge_length);
    sign[i] = empty ? previous : sign_of(sc.x[i]);
    if (sign[i] != 0) previous = sign[i];
  }
  // Leading empty intervals take the first real sign.
  int first = 0;
  for (int s : sign)
    if (s != 0) {
      first = s;
      break;
    }
  if (first == 0) first = 1;
  for (int& s : sign)
    if (s == 0) s = first;
    else break;

  SignPattern p;
  p.leading_sign = sign[0];
  for (std::size_t i = 1; i < intervals; ++i)
    if (sign[i] != sign[i - 1]) p.switch_points.push_back(b[i]);
  return p;
}

std::vector<double> moment_residual(std::span<const Function> gs, const SignPattern& s,
                                    const IntervalMask& mask) {
  std::vector<double> cuts{0.0};
  cuts.insert(cuts.end(), s.switch_points.begin(), s.switch_points.end());
  cuts.push_back(1.0);
  std::vector<double> out;
  out.reserve(gs.size());
  for (const Function& g : gs) {
    if (!g.is_real()) throw DomainError("moment_residual expects real functions");
    double sum = 0.0;
    int sign = s.leading_sign;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      sum += sign * integrate_masked(g, mask, cuts[i], cuts[i + 1]).real();
      sign = -sign;
    }
    out.push_back(sum);
  }
  return out;
}

std::vector<double> sphere_moment_map(std::span<const Function> gs, const IntervalMask& mask,
                                      const SphereCoordinates& x) {
  const MaskedSystem sys(gs, mask);
  const Eigen::Map<const Eigen::VectorXd> v(x.x.data(), static_cast<Eigen::Index>(x.x.size()));
  const Eigen::VectorXd F = moment_map(sys, v);
  return {F.data(), F.data() + F.size()};
}

HobbyRiceResult solve_hobby_rice(std::span<const Function> gs, const IntervalMask& mask,
                                 const HobbyRiceOptions& opts) {
  if (gs.empty()) throw DomainError("Hobby-Rice needs at least one function");
  if (!(opts.tol > 0.0) || opts.seeds < 1 || opts.max_iterations < 1)
    throw DomainError("invalid Hobby-Rice options");
  const CompressedSystem sys(gs, mask);
  std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(opts.seeds));
  parallel_for(outcomes.size(), opts.threads, [&](std::size_t s) {
    const std::uint64_t index = 1 + opts.seed * static_cast<std::uint64_t>(opts.seeds) + s;
    const int sign = radical_inverse(index, 2) < 0.5 ? 1 : -1;
    outcomes[s] = run_seed(sys, gs, mask, halton_switches(index, gs.size()), sign, opts);
  });

  const SeedOutcome* best = nullptr;
  int converged = 0;
  double best_seen = std::numeric_limits<double>::infinity();
  for (const SeedOutcome& o : outcomes) {
    best_seen = std::min(best_seen, o.max_residual);
    if (!o.converged) continue;
    ++converged;
    if (!best || o.max_residual < best->max_residual ||
        (o.max_residual == best->max_residual &&
         std::lexicographical_compare(o.pattern.switch_points.begin(), o.pattern.switch_points.end(),
                                      best->pattern.switch_points.begin(),
                                      best->pattern.switch_points.end())))
      best = &o;
  }
  // No seed converged: continue from the Chebyshev system instead.
  SeedOutcome tracked;
  if (!best) {
    if (auto path = track_homotopy(sys)) {
      tracked = run_seed(sys, gs, mask, std::move(path->first), path->second, opts);
      best_seen = std::min(best_seen, tracked.max_residual);
      if (tracked.converged) {
        best = &tracked;
        converged = 1;
      }
    }
  }
  if (!best) {
    std::ostringstream msg;
    msg << "Hobby-Rice solver: no seed reached tolerance " << opts.tol << " (best residual "
        << best_seen << ")";
    throw SolverFailure(msg.str(), best_seen);
  }
  return {best->pattern, best->residuals, best->max_residual, converged};
}

StepPhase select_phi_sharp(const SignPattern& s, std::span<const double> boundary) {
  const std::size_t n = boundary.size() / 2;
  std::size_t at_pi = 0;
  for (double t : boundary)
    if (s(t) < 0) ++at_pi;
  const bool flip = at_pi > n;
  // phi# = pi where Phi = -1 (unflipped) or where Phi = +1 (flipped).
  auto level = [&](int sign) { return (sign < 0) != flip ? kPi : 0.0; };
  std::vector<double> locations;
  std::vector<double> sizes;
  int sign = s.leading_sign;
  double current = level(sign);
  const double base = current;
  for (double p : s.switch_points) {
    sign = -sign;
    const double next = level(sign);
    locations.push_back(p);
    sizes.push_back(next - current);
    current = next;
  }
  return StepPhase(std::move(locations), std::move(sizes), base, 0.0, 1.0);
}

int count_masked_discontinuities(const StepPhase& phi, const IntervalMask& mask) {
  int count = 0;
  for (double loc : phi.jump_locations())
    for (const auto& [lo, hi] : mask.intervals())
      if (loc > lo && loc < hi) ++count;
  for (const auto& [lo, hi] : mask.intervals()) {
    if (lo > 0.0 && phi(lo) != 0.0) ++count;
    if (hi < 1.0 && phi.left_limit(hi) != 0.0) ++count;
  }
  return count;
}

StepPhase mask_step(const StepPhase& phi, const IntervalMask& mask) {
  // Candidate change points, then one value per open segment between them.
  std::vector<double> cuts;
  for (double loc : phi.jump_locations())
    if (loc > 0.0 && loc < 1.0) cuts.push_back(loc);
  for (double e : mask.interior_endpoints()) cuts.push_back(e);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> edges{0.0};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(1.0);
  auto value_on = [&](double a, double b) {
    const double mid = 0.5 * (a + b);
    return mask.contains(mid) ? phi(mid) : 0.0;
  };
  const double base = value_on(edges[0], edges[1]);
  double current = base;
  std::vector<double> locations;
  std::vector<double> sizes;
  for (std::size_t i = 1; i + 1 < edges.size(); ++i) {
    const double v = value_on(edges[i], edges[i + 1]);
    if (v != current) {
      locations.push_back(edges[i]);
      sizes.push_back(v - current);
      current = v;
    }
  }
  return StepPhase(std::move(locations), std::move(sizes), base, 0.0, 1.0);
}

}  // namespace ann
