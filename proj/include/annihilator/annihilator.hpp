#pragma once

// Smooth circle-valued annihilators: node selection, window certification,
// the Hobby-Rice phase away from the windows, and the fixed-point solve for
// the window parameters.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "annihilator/function_model.hpp"
#include "annihilator/hobby_rice.hpp"
#include "annihilator/phase_model.hpp"
#include "annihilator/sobolev.hpp"

namespace ann {

struct NodeSelection {
  std::vector<double> nodes;  // strictly increasing, interior
  Eigen::MatrixXcd M;         // M(k, j) = f_k(t_j)
  Eigen::MatrixXcd M_inverse;
  double d = 0.0;             // half the smallest gap among {0, t_1..t_n, 1}
  double condition_estimate = 0.0;
};

struct DeltaCertificate {
  double delta = 0.0;
  std::vector<double> per_node_margins;
  int z_grid_resolution = 17;
  double margin_threshold = 0.4;
  int halvings = 0;
  std::vector<double> margin_sums;  // one per tried delta, largest first
};

struct PhiConstruction {
  double eta = 0.0;
  SmoothPhase phi = SmoothPhase::constant(0.0);
  std::vector<Complex> r;
  StepPhase phi_sharp{{}, {}, 0.0, 0.0, 1.0};
  SignPattern pattern;
  int discontinuities = 0;
  double hobby_rice_residual = 0.0;
};

struct AnnihilatorOptions {
  double tol = 1e-6;
  double lambda = 0.5;
  int z_grid_resolution = 17;
  double margin_threshold = 0.4;
  int max_iterations = 200;
  int fallback_starts = 4;
  bool pack_real = false;
  std::uint64_t seed = 0;
  int threads = 1;
  QuadratureConfig quadrature{};
  HobbyRiceOptions hobby_rice{};
  /// Node candidates; empty means default_candidate_grid.
  std::vector<double> candidate_grid;
};

/// Everything the residual map needs once δ and φ are fixed.
struct PipelineState {
  std::vector<Function> fs;
  NodeSelection nodes;
  DeltaCertificate certificate;
  PhiConstruction phi;
};

struct IterateRecord {
  double residual = 0.0;         // ||T||_inf by direct quadrature
  double consistency_gap = 0.0;  // ||T_direct - (delta Q + r)||_inf
};

struct AnnihilatorResult {
  std::vector<std::size_t> kept;  // indices of the solved family in the input
  std::vector<Function> solved;   // the family the fixed point annihilates
  PipelineState state;
  std::vector<Complex> z0;
  SmoothPhase theta = SmoothPhase::constant(0.0);
  std::vector<Complex> residuals;  // for every input function (packed ones when packing)
  double max_residual = 0.0;
  NormReport norms;
  int iterations = 0;
  bool used_fallback = false;
  std::vector<IterateRecord> history;
  double consistency_tolerance = 0.0;
};

/// 16 interior points per piece of the merged partition, at the centres of
/// equal sub-cells (so never on a breakpoint).
std::vector<double> default_candidate_grid(std::span<const Function> fs);

/// Greedy pivoted node choice: each new node maximizes the eliminated
/// residual |y|; near-ties go to the smallest candidate. Nodes are returned
/// sorted. Throws NearDependenceError when a pivot is negligible.
NodeSelection select_nodes(std::span<const Function> fs, std::span<const double> candidate_grid);

/// int_{-1}^{1} f(t h + t_j) exp(i theta_{h,z}(t)) dt.
Complex window_moment(const Function& f, double t_j, double h, Complex z,
                      const QuadratureConfig& cfg);

/// All k at once for one window.
std::vector<Complex> window_moments(std::span<const Function> fs, double t_j, double h, Complex z,
                                    const QuadratureConfig& cfg);

/// Q_k(h; z) = sum_j window moment of f_k at node j with parameter z_j. At
/// h = 0 this is M z.
std::vector<Complex> compute_Q(std::span<const Function> fs, const NodeSelection& nodes, double h,
                               std::span<const Complex> z, const QuadratureConfig& cfg);

/// First δ in d, d/2, ... whose sampled per-node margins sum to at most the
/// threshold. Throws CertificationFailure below 1e-9 d.
DeltaCertificate find_delta(std::span<const Function> fs, const NodeSelection& nodes,
                            const AnnihilatorOptions& opts);

/// Per-node margin sup_w ||M^{-1}(w col_j - q_j(w))||_inf on the polar grid
/// plus a covering term.
std::vector<double> node_margins(std::span<const Function> fs, const NodeSelection& nodes,
                                 double delta, const AnnihilatorOptions& opts);

PhiConstruction build_phi(std::span<const Function> fs, const NodeSelection& nodes, double delta,
                          const AnnihilatorOptions& opts);

/// phi plus the window phases, each shifted so the whole phase climbs by
/// 2 pi across every window.
SmoothPhase assemble_theta_star(std::span<const Complex> z, const SmoothPhase& phi,
                                const NodeSelection& nodes, double delta);

/// T(z) = int_0^1 f_k exp(i theta*_z) by direct quadrature.
std::vector<Complex> residual_T(std::span<const Complex> z, const PipelineState& state,
                                const QuadratureConfig& cfg);

/// delta Q(delta; z) + r.
std::vector<Complex> residual_T_decomposed(std::span<const Complex> z, const PipelineState& state,
                                           const QuadratureConfig& cfg);

/// Tolerance allowed between the two routes to T.
double consistency_tolerance(const PipelineState& state, const QuadratureConfig& cfg);

/// z - (1/delta) M^{-1} T(z), the map whose fixed point annihilates.
std::vector<Complex> brouwer_map(std::span<const Complex> z, const PipelineState& state,
                                 const QuadratureConfig& cfg);

/// Everything up to (and including) δ and φ.
PipelineState prepare_pipeline(std::span<const Function> fs, const AnnihilatorOptions& opts);

AnnihilatorResult solve_annihilator(std::span<const Function> fs,
                                    const AnnihilatorOptions& opts = {});

}  // namespace ann
