#pragma once

#include "strata/onelayer.hpp"

namespace strata {

struct LayerSpec {
  double d = 1.0;
  FunctionSpec eta;
  SpaceTimeFunctionSpec source;
  double nu = 0.0;  // interface coefficients (nu_j, mu_j) of this layer
  double mu = 1.0;
};

/// Full n-layer problem: partition, per-layer data, outer Robin conditions,
/// continuity ratios Lambda_j and per-layer interface flux vectors.
struct StackSpec {
  std::vector<double> partition;   // x_0 < x_1 < ... < x_n
  std::vector<LayerSpec> layers;   // n entries
  RobinVector outer_left;          // (i, iota) at x_0
  RobinVector outer_right;         // (ell, l) at x_n
  FunctionSpec zeta, xi;           // outer boundary data in time
  std::vector<double> continuity;  // Lambda_j, n-1 entries, all nonzero
  WeightParams weight;

  int n() const { return static_cast<int>(layers.size()); }
  void validate() const;

  /// Per-layer boundary vectors of the reduced one-layer problems:
  /// a_1 = outer_left, a_j = (nu_j, mu_j) for j >= 2;
  /// b_j = (nu_j, mu_j) for j <= n-1, b_n = outer_right.  (j is 1-based.)
  RobinVector a_vec(int j) const;
  RobinVector b_vec(int j) const;
  LayerGeometry geometry(int j) const;
};

struct StackSolveOptions {
  int K = 64;
  int x_per_layer = 33;
  double neumann_tol = 0.0;  // <= 0: 1e-10 * (1 + sup|C|)
  int max_terms = 200;
  int quad_panels = 64;
  double root_tol = 1e-12;
};

/// Weighted per-layer boundary series chained through the interfaces:
/// zeta~_1 = lambda zeta, zeta~_j = xi~_{j-1} = h_{j-1}, xi~_n = lambda xi.
struct ChainedData {
  std::vector<TimeSeries> zeta_w;  // n entries
  std::vector<TimeSeries> xi_w;    // n entries
};
ChainedData chain_boundary_data(const StackSpec& stack, const std::vector<TimeSeries>& h,
                                const TimeGrid& grid);

/// The interface Volterra system A(0) h + A' * h = b in spectral form.
/// A(t) = phi0_part + (t/tau) secular + sum coef e^{rate t} over terms.
struct VolterraSystem {
  TimeGrid grid;
  int dim = 0;
  double tau = 1.0;
  Eigen::MatrixXd A_instant;  // exact t->0+ values of the A entries
  Eigen::MatrixXd M;          // A_instant + first-panel convolution mass (solve matrix)
  Eigen::MatrixXd phi0_part;  // Phi0 combination
  Eigen::MatrixXd secular;    // c- combination (linear-in-t part of A)
  struct ExpTerm {
    int row, col;
    double rate;  // s_k / tau
    double coef;  // phi-series coefficient v_k
  };
  std::vector<ExpTerm> terms;
  MatrixTimeSeries Aprime;  // sampled A'(t) on the grid
  MatrixTimeSeries b;       // right-hand side, dim x 1
  Eigen::VectorXd h0;       // interface data at t = 0 from the initial conditions
  double m_condition = 0.0;

  Eigen::MatrixXd A_of(double t) const;
  Eigen::MatrixXd Aprime_of(double t) const;

  /// Compute M (instantaneous matrix plus first-panel mass), its condition
  /// number, and the sampled Aprime; rejects singular instantaneous systems.
  void finalize();
};

struct InterfaceSolveReport {
  int terms_used = 0;
  double last_term_norm = 0.0;
  bool converged = false;
  double residual = 0.0;     // sup |A(0) h + A' * h - b|
  double m_condition = 0.0;
};

VolterraSystem build_volterra_system(const StackSpec& stack, const TimeGrid& grid, int K,
                                     int quad_panels = 64, double root_tol = 1e-12);

/// Interface series by the geometric (Neumann) expansion of the regularized
/// system: strictly-delayed self-convolution terms accumulated until the term
/// norm drops below tol.  Residual of the original equation is reported.
std::vector<TimeSeries> solve_interfaces(const VolterraSystem& system, double tol, int max_terms,
                                         InterfaceSolveReport* report = nullptr);

/// Per-layer assembly of the final solution from solved interface series.
SolutionField assemble_solution(const StackSpec& stack, const std::vector<TimeSeries>& h,
                                const TimeGrid& grid, const StackSolveOptions& opts = {});

/// Two-layer solve through the scalar renewal equation (the n = 2 special
/// path); exposed separately from the general matrix path for cross-checks.
SolutionField solve_two_layer(const StackSpec& stack, const TimeGrid& grid,
                              const StackSolveOptions& opts = {},
                              InterfaceSolveReport* report = nullptr);
/// The scalar path's interface series lambda xi_1 alone.
TimeSeries solve_two_layer_interface(const StackSpec& stack, const TimeGrid& grid,
                                     const StackSolveOptions& opts = {},
                                     InterfaceSolveReport* report = nullptr);

/// Full pipeline: roots, interface solve (n >= 2), assembly.
SolutionField solve_stack(const StackSpec& stack, const TimeGrid& grid,
                          const StackSolveOptions& opts = {},
                          InterfaceSolveReport* report = nullptr);

}  // namespace strata
