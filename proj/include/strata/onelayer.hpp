#pragma once

#include "strata/spectral.hpp"
#include "strata/transforms.hpp"

#include <memory>

namespace strata {

/// One-layer nonhomogeneous problem: phi_t = d phi_xx + lambda r on (alpha,beta),
/// phi(.,0) = eta, a.(phi,phi_x)(alpha) = lambda zeta, b.(phi,phi_x)(beta) = lambda xi.
struct OneLayerProblem {
  LayerGeometry geometry;
  RobinVector a, b;
  FunctionSpec eta;
  SpaceTimeFunctionSpec source;
  FunctionSpec zeta, xi;
  WeightParams weight;

  void validate() const {
    geometry.validate();
    a.validate();
    b.validate();
    weight.validate();
    if (geometry.tau != weight.tau)
      throw ValidationError("geometry.tau must equal weight.tau");
  }
};

enum class Provenance { series, finite_difference };

/// Per-layer sampled field phi_j(x, t) with truncation metadata.
struct SolutionField {
  std::vector<Eigen::VectorXd> x;       // nodes per layer
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> values;  // per layer, n_x rows by n_t columns
  Provenance provenance = Provenance::series;

  struct Meta {
    int K = 0;
    double tail_bound = 0.0;       // max over layers of exp(s_K dt / tau)
    int neumann_terms = 0;
    double neumann_last_norm = 0.0;
    double volterra_residual = 0.0;
    double instant_condition = 0.0;
  } meta;

  int layers() const { return static_cast<int>(values.size()); }
};

/// Boundary-memory operator applied to unweighted data phi:
///   Gamma_k phi(t) = lambda(t) phi(t) + (s_k/tau) int_0^t lambda e^{s_k(t-.)/tau} phi.
/// The +s_k/tau weighting of the memory integral is what reproduces constant
/// Dirichlet steady states exactly (Gamma_k c = c e^{s_k t/tau}).
TimeSeries gamma_op(int k, const TimeSeries& phi, const SpectralBasis& basis,
                    const WeightParams& weight);
/// Same operator acting on an already weighted series phi_tilde = lambda * phi.
TimeSeries gamma_weighted(int k, const TimeSeries& phi_tilde, const SpectralBasis& basis);

/// T operator of the interface system, K-truncated form:
///   T phi(y,t;L) = Phi_K(y,0;L) phi(t) + int_0^t dPhi_K/dt(y,t-.;L) phi(.) d.
TimeSeries T_op(const TimeSeries& phi, double y, const SpectralBasis& basis,
                const RobinVector& L, int K);

/// Precomputed per-layer solver: spatial quadratures of the data against the
/// spectral kernels, time responses, and field assembly.  Immutable once built.
class LayerOperator {
 public:
  LayerOperator(SpectralBasis basis, WeightParams weight, TimeGrid grid, FunctionSpec eta,
                SpaceTimeFunctionSpec source, int quad_panels = 64);

  const SpectralBasis& basis() const { return basis_; }
  const TimeGrid& grid() const { return grid_; }
  const WeightParams& weight() const { return weight_; }
  int K() const { return basis_.count(); }

  /// theta(x, .) of the layer: initial-data and weighted-source response.
  TimeSeries theta(double x) const;

  /// Field response to weighted boundary series (zeta_w at the left vector's
  /// end alpha, xi_w at beta), plus theta.
  Eigen::MatrixXd field(const Eigen::VectorXd& x_nodes, const TimeSeries& zeta_w,
                        const TimeSeries& xi_w) const;

  /// T operator with the exact instantaneous coefficient (initial-value-theorem
  /// resummation) applied to a weighted series.
  TimeSeries t_apply(const TimeSeries& g, double y, const RobinVector& L) const;

 private:
  SpectralBasis basis_;
  WeightParams weight_;
  TimeGrid grid_;
  FunctionSpec eta_;
  SpaceTimeFunctionSpec source_;

  Eigen::VectorXd quad_x_, quad_w_;     // composite Gauss-Legendre nodes/weights
  Eigen::VectorXd eta_moments_;         // E_k = int <a,C(alpha-y;s_k)> eta(y) dy
  double eta_theta0_moment_ = 0.0;      // int theta0_right(beta-y) eta(y) dy (singular branch)
  std::vector<TimeSeries> source_hist_; // per root: int_0^t e^{s_k(t-.)/tau} (lambda r-weight)(.)
  TimeSeries source_theta0_;            // cumulative weighted source against theta0
};

/// Initial-data and weighted-source response theta(x, .) of a single layer:
/// the Theta0 moments of eta and the source plus the two root series.
TimeSeries theta_field(double x, const TimeGrid& grid, const OneLayerProblem& problem,
                       const SpectralBasis& basis, int K, int quad_panels = 64);

/// Full one-layer solve at the given x nodes.
SolutionField solve_one_layer(const OneLayerProblem& problem, const Eigen::VectorXd& x_nodes,
                              const TimeGrid& grid, int K, int quad_panels = 64);

/// Evenly spaced nodes covering [left, right].
Eigen::VectorXd linspace_nodes(double left, double right, int count);

}  // namespace strata
