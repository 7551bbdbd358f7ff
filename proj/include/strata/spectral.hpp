#pragma once

#include "strata/funcspace.hpp"

#include <Eigen/Core>

namespace strata {

/// Coefficient pair (c0, c1) of a boundary operator c0*phi + c1*phi_x.
struct RobinVector {
  double c0 = 1.0;
  double c1 = 0.0;

  void validate() const {
    if (std::abs(c0) + std::abs(c1) <= 0.0)
      throw ValidationError("Robin vector must satisfy |c0|+|c1| > 0");
  }
};

struct LayerGeometry {
  double left = 0.0;
  double right = 1.0;
  double d = 1.0;
  double tau = 1.0;

  double width() const { return right - left; }
  void validate() const {
    if (!(left < right)) throw ValidationError("layer interval must satisfy left < right");
    if (!(d > 0.0)) throw ValidationError("diffusivity must be positive");
    if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  }
};

// Fundamental kernel vectors.  For s >= 0 (omega = sqrt(s/(tau d))):
//   L(y) = (cosh(omega y), omega sinh(omega y))
//   C(y) = (sinh(omega y), omega cosh(omega y))
// For s < 0 the real reduced convention with mu = sqrt(-s/(tau d)):
//   L(y) = (cos(mu y), -mu sin(mu y))          [even in omega, genuinely real]
//   C(y) = (sin(mu y),  mu cos(mu y))          [one factor i divided out]
Eigen::Vector2d kernel_L(double y, double s, const LayerGeometry& geom);
Eigen::Vector2d kernel_C(double y, double s, const LayerGeometry& geom);

/// Characteristic determinant <b,C(beta)><a,L(alpha)> - <a,C(alpha)><b,L(beta)>
/// in the matched convention (for s < 0 the common factor i is divided out).
/// Evaluated through its translation-invariant closed form
///   (a0 b0 - a1 b1 omega^2) sinh(omega w) + (a0 b1 - a1 b0) omega cosh(omega w).
double delta(double s, const RobinVector& a, const RobinVector& b, const LayerGeometry& geom);

/// delta(s) with one factor omega (or mu) divided out; analytic through s = 0
/// where it equals kappa = a0 b0 w + a0 b1 - a1 b0.  The reduced determinant's
/// value at 0 decides the Theta0/Phi0 branch.
double delta_reduced(double s, const RobinVector& a, const RobinVector& b,
                     const LayerGeometry& geom);
double kappa(const RobinVector& a, const RobinVector& b, const LayerGeometry& geom);

/// <L,C(y;s)> with one factor omega divided out; analytic through s = 0.
double c_kernel_reduced(double y, double s, const RobinVector& L, const LayerGeometry& geom);

/// psi(x,y;s,tau,L) = <L,C(y)> ch(x) - <L,L(y)> sh(x) in the matched convention;
/// equals <L,C(y-x)> identically (uniqueness of the kernel IVP; tested).
double psi(double x, double y, double s, const LayerGeometry& geom, const RobinVector& L);

enum class BranchKind { removable, simple_pole };

/// Per-layer spectral data: the K smallest-magnitude negative roots of delta,
/// the reduced derivative at each root, and the s->0 limit machinery.
class SpectralBasis {
 public:
  SpectralBasis(LayerGeometry geom, RobinVector a, RobinVector b, Eigen::VectorXd roots,
                Eigen::VectorXd mu, Eigen::VectorXd dprime);

  const LayerGeometry& geometry() const { return geom_; }
  const RobinVector& a() const { return a_; }
  const RobinVector& b() const { return b_; }
  int count() const { return static_cast<int>(roots_.size()); }
  double root(int k) const { return roots_[k]; }          // s_k < 0
  double mu(int k) const { return mu_[k]; }               // sqrt(-s_k/(tau d))
  double dprime(int k) const { return dprime_[k]; }       // d(delta_reduced)/ds at s_k
  const Eigen::VectorXd& roots() const { return roots_; }

  BranchKind theta0_branch() const {
    return singular_ ? BranchKind::simple_pole : BranchKind::removable;
  }
  BranchKind phi0_branch() const { return theta0_branch(); }
  bool singular_branch() const { return singular_; }

  /// Theta0(u, v): 0 in the removable branch, else the s->0 residue limit.
  double theta0(double u, double v) const;
  /// Phi0(y; L): the constant part of the Phi kernel (both branch rules).
  double phi0(double y, const RobinVector& L) const;
  /// c-(y; L) = lim s <L,C(y)>/delta: rate of the linear-in-t part of Phi in
  /// the simple-pole branch (0 otherwise).
  double phi_secular(double y, const RobinVector& L) const;

  /// Factorization theta0(u, v) = theta0_left(u) * theta0_right(v).
  double theta0_left(double u) const;   // (a0 u + a1)/dtil'(0); 0 in the removable branch
  double theta0_right(double v) const;  // b0 v + b1

  /// <L,C_r(y;s_k)> / (s_k * dprime_k): weight of e^{s_k t/tau} in Phi.
  double phi_coefficient(int k, double y, const RobinVector& L) const;
  /// <a,C_r(u)><b,C_r(v)> / (mu_k * dprime_k): weight of e^{s_k t/tau} in Theta.
  double theta_coefficient(int k, double u, double v) const;
  /// <L, C(y; s_k)> in the reduced convention.
  double c_dot(int k, double y, const RobinVector& L) const;
  /// c_dot(k, v, b) / (mu_k * dprime_k): the theta series factor carrying the
  /// field point, to pair with integrals of <a,C(alpha-y)> against the data.
  double theta_series_weight(int k, double v) const;

  /// Copy keeping only the first K roots (limit machinery unchanged).
  SpectralBasis truncated(int K) const;

  /// Truncated-series value of Phi(y, 0; L): phi0 + sum of all stored
  /// phi_coefficients.  This is the instantaneous coefficient consistent with
  /// the stored memory kernel: their truncation tails cancel beyond the
  /// sub-grid transient, so steady states come out exact at finite K.
  double phi_series0(double y, const RobinVector& L) const;

  /// Exact t->0+ value of Phi(y, t; L) (initial value theorem); 0 for |y| < w,
  /// a coefficient ratio at y = +-w.  Throws for an unboundedly singular pair.
  /// Diagnostic counterpart of phi_series0 (equal in the K -> infinity limit).
  double phi_instant(double y, const RobinVector& L) const;

  /// exp(s_K * t_min / tau): decay factor of the last retained mode after one
  /// step of size t_min; the truncation adequacy indicator.
  double tail_bound(double t_min) const;

 private:
  LayerGeometry geom_;
  RobinVector a_, b_;
  Eigen::VectorXd roots_, mu_, dprime_;
  bool singular_ = false;
  double kappa_ = 0.0;
  double dtil_d1_ = 0.0;  // d/ds delta_reduced at 0
  double dtil_d2_ = 0.0;  // d2/ds2 delta_reduced at 0
};

/// Locate the K smallest-magnitude strictly negative simple roots of delta by
/// scanning mu = sqrt(-s/(tau d)) with step pi/(4 w), bracketing sign changes
/// of the reduced determinant, bisecting, and one Newton polish.
SpectralBasis find_roots(const RobinVector& a, const RobinVector& b, const LayerGeometry& geom,
                         int count, double root_tol = 1e-12);

/// Theta(x, y, t) truncated at K terms (K <= basis.count()).
double theta_kernel(double x, double y, double t, const SpectralBasis& basis, int K);
/// Phi(y, t; L) truncated at K terms; includes the simple-pole branch's
/// linear-in-t residue part.
double phi_kernel(double y, double t, const SpectralBasis& basis, const RobinVector& L, int K);
/// dPhi/dt(y, t; L) truncated at K terms.
double phi_kernel_time_derivative(double y, double t, const SpectralBasis& basis,
                                  const RobinVector& L, int K);

}  // namespace strata
