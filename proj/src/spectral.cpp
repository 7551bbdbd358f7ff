#include "strata/spectral.hpp"

#include <cmath>
#include <limits>

namespace strata {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

double sinhc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0);
  }
  return std::sinh(x) / x;
}

}  // namespace

Eigen::Vector2d kernel_L(double y, double s, const LayerGeometry& geom) {
  if (s >= 0.0) {
    const double om = std::sqrt(s / (geom.tau * geom.d));
    return {std::cosh(om * y), om * std::sinh(om * y)};
  }
  const double mu = std::sqrt(-s / (geom.tau * geom.d));
  return {std::cos(mu * y), -mu * std::sin(mu * y)};
}

Eigen::Vector2d kernel_C(double y, double s, const LayerGeometry& geom) {
  if (s >= 0.0) {
    const double om = std::sqrt(s / (geom.tau * geom.d));
    return {std::sinh(om * y), om * std::cosh(om * y)};
  }
  const double mu = std::sqrt(-s / (geom.tau * geom.d));
  return {std::sin(mu * y), mu * std::cos(mu * y)};
}

double delta_reduced(double s, const RobinVector& a, const RobinVector& b,
                     const LayerGeometry& geom) {
  const double w = geom.width();
  if (s >= 0.0) {
    const double om = std::sqrt(s / (geom.tau * geom.d));
    return (a.c0 * b.c0 - a.c1 * b.c1 * om * om) * w * sinhc(om * w) +
           (a.c0 * b.c1 - a.c1 * b.c0) * std::cosh(om * w);
  }
  const double mu = std::sqrt(-s / (geom.tau * geom.d));
  return (a.c0 * b.c0 + a.c1 * b.c1 * mu * mu) * w * sinc(mu * w) +
         (a.c0 * b.c1 - a.c1 * b.c0) * std::cos(mu * w);
}

double kappa(const RobinVector& a, const RobinVector& b, const LayerGeometry& geom) {
  return a.c0 * b.c0 * geom.width() + a.c0 * b.c1 - a.c1 * b.c0;
}

double delta(double s, const RobinVector& a, const RobinVector& b, const LayerGeometry& geom) {
  const double r = std::sqrt(std::abs(s) / (geom.tau * geom.d));
  return r * delta_reduced(s, a, b, geom);
}

double c_kernel_reduced(double y, double s, const RobinVector& L, const LayerGeometry& geom) {
  if (s >= 0.0) {
    const double om = std::sqrt(s / (geom.tau * geom.d));
    return L.c0 * y * sinhc(om * y) + L.c1 * std::cosh(om * y);
  }
  const double mu = std::sqrt(-s / (geom.tau * geom.d));
  return L.c0 * y * sinc(mu * y) + L.c1 * std::cos(mu * y);
}

double psi(double x, double y, double s, const LayerGeometry& geom, const RobinVector& L) {
  const Eigen::Vector2d Lv(L.c0, L.c1);
  const double Cy = Lv.dot(kernel_C(y, s, geom));
  const double Ly = Lv.dot(kernel_L(y, s, geom));
  if (s >= 0.0) {
    const double om = std::sqrt(s / (geom.tau * geom.d));
    return Cy * std::cosh(om * x) - Ly * std::sinh(om * x);
  }
  const double mu = std::sqrt(-s / (geom.tau * geom.d));
  return Cy * std::cos(mu * x) - Ly * std::sin(mu * x);
}

// ---------------------------------------------------------------------------
// Root finding in mu = sqrt(-s/(tau d)).
//
// reduced determinant as a function of mu (roots of delta for mu > 0):
//   f(mu) = (a0 b0 + a1 b1 mu^2) w sinc(mu w) + (a0 b1 - a1 b0) cos(mu w)
// full determinant dhat(mu) = mu f(mu) with analytic derivative
//   dhat'(mu) = 2 a1 b1 mu sin(mu w) + (a0 b0 + a1 b1 mu^2) w cos(mu w)
//             + (a0 b1 - a1 b0)(cos(mu w) - mu w sin(mu w)).
// ---------------------------------------------------------------------------

namespace {

struct MuFunctions {
  double p, q, w;  // p = a0 b0, r-coef a1 b1 folded below, q = a0 b1 - a1 b0
  double r;        // a1 b1

  double f(double mu) const {
    return (p + r * mu * mu) * w * sinc(mu * w) + q * std::cos(mu * w);
  }
  double dhat(double mu) const { return mu * f(mu); }
  double dhat_prime(double mu) const {
    const double sw = std::sin(mu * w), cw = std::cos(mu * w);
    return 2.0 * r * mu * sw + (p + r * mu * mu) * w * cw + q * (cw - mu * w * sw);
  }
  double scale(double mu) const {
    return (std::abs(p) + std::abs(r) * mu * mu) * std::abs(w) + std::abs(q) * (1.0 + mu);
  }
};

}  // namespace

SpectralBasis find_roots(const RobinVector& a, const RobinVector& b, const LayerGeometry& geom,
                         int count, double root_tol) {
  a.validate();
  b.validate();
  geom.validate();
  if (count < 0) throw ParameterError("find_roots: count must be >= 0");

  const double w = geom.width();
  const MuFunctions mf{a.c0 * b.c0, a.c0 * b.c1 - a.c1 * b.c0, w, a.c1 * b.c1};
  const double taud = geom.tau * geom.d;

  // Reject configurations with a root of delta on the positive real axis: the
  // residue series assumes a strictly negative spectrum.
  {
    const double s_scale = taud * (M_PI / w) * (M_PI / w);
    double prev = delta_reduced(1e-8 * s_scale, a, b, geom);
    for (int j = -6; j <= 12; ++j) {
      const double cur = delta_reduced(s_scale * std::pow(2.0, j), a, b, geom);
      if (prev != 0.0 && cur != 0.0 && std::signbit(prev) != std::signbit(cur))
        throw ValidationError(
            "boundary coefficients place a determinant root at s > 0; "
            "the series solution requires a strictly negative spectrum");
      prev = cur;
    }
  }

  std::vector<double> mus;
  const double step = M_PI / (4.0 * w);
  double mu_lo = 0.5 * step;
  double f_lo = mf.f(mu_lo);
  long max_samples = 16L * (count + 8) + 64;
  for (long j = 1; static_cast<int>(mus.size()) < count; ++j) {
    if (j > max_samples)
      throw NonConvergenceError("find_roots: scan window exhausted before finding " +
                                std::to_string(count) + " roots");
    const double mu_hi = mu_lo + step;
    const double f_hi = mf.f(mu_hi);
    if (f_lo == 0.0) {
      mus.push_back(mu_lo);
    } else if (std::signbit(f_lo) != std::signbit(f_hi)) {
      double lo = mu_lo, hi = mu_hi, flo = f_lo;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = mf.f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (std::signbit(fm) == std::signbit(flo)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
      }
      double root = 0.5 * (lo + hi);
      const double dp = mf.dhat_prime(root);
      if (dp != 0.0) {
        const double polished = root - mf.dhat(root) / dp;
        if (polished > mu_lo && polished < mu_hi) root = polished;
      }
      mus.push_back(root);
    }
    mu_lo = mu_hi;
    f_lo = f_hi;
  }

  Eigen::VectorXd roots(count), mu_v(count), dprime(count);
  for (int k = 0; k < count; ++k) {
    const double mu = mus[k];
    const double dhat_val = mf.dhat(mu);
    const double dhat_prime = mf.dhat_prime(mu);
    if (std::abs(dhat_val) > root_tol * std::max(1.0, mu * mf.scale(mu)))
      throw NonConvergenceError("find_roots: root refinement failed at k=" + std::to_string(k));
    if (std::abs(dhat_prime) < 1e-8 * std::max(1.0, mf.scale(mu)))
      throw ValidationError("find_roots: non-simple determinant root at k=" +
                            std::to_string(k) + " (delta'(s_k) ~ 0)");
    roots[k] = -taud * mu * mu;
    mu_v[k] = mu;
    // chain rule: d(delta_reduced)/ds = dhat'(mu) * dmu/ds, ds = -2 tau d mu dmu
    dprime[k] = dhat_prime / (-2.0 * taud * mu);
  }
  return SpectralBasis(geom, a, b, std::move(roots), std::move(mu_v), std::move(dprime));
}

// ---------------------------------------------------------------------------
// SpectralBasis
// ---------------------------------------------------------------------------

SpectralBasis::SpectralBasis(LayerGeometry geom, RobinVector a, RobinVector b,
                             Eigen::VectorXd roots, Eigen::VectorXd mu, Eigen::VectorXd dprime)
    : geom_(geom), a_(a), b_(b), roots_(std::move(roots)), mu_(std::move(mu)),
      dprime_(std::move(dprime)) {
  kappa_ = kappa(a_, b_, geom_);
  const double kappa_scale = std::abs(a_.c0 * b_.c0 * geom_.width()) +
                             std::abs(a_.c0 * b_.c1) + std::abs(a_.c1 * b_.c0) + 1e-300;
  singular_ = std::abs(kappa_) <= 1e-12 * kappa_scale;
  if (singular_) {
    // Fourth-order accurate derivatives of the reduced determinant at s = 0,
    // centered across both branches of the evaluator.
    const double s_scale = geom_.tau * geom_.d * std::pow(M_PI / geom_.width(), 2);
    const double h = 3e-3 * s_scale;
    auto f = [&](double s) { return delta_reduced(s, a_, b_, geom_); };
    const double f1 = f(h), fm1 = f(-h), f2 = f(2 * h), fm2 = f(-2 * h);
    dtil_d1_ = (8.0 * (f1 - fm1) - (f2 - fm2)) / (12.0 * h);
    dtil_d2_ = (16.0 * (f1 + fm1) - (f2 + fm2) - 30.0 * kappa_) / (12.0 * h * h);
    if (dtil_d1_ == 0.0)
      throw ValidationError("spectral basis: determinant has a zero of order > 1 at s = 0");
  }
}

double SpectralBasis::theta0(double u, double v) const {
  return theta0_left(u) * theta0_right(v);
}

double SpectralBasis::theta0_left(double u) const {
  if (!singular_) return 0.0;
  return (a_.c0 * u + a_.c1) / dtil_d1_;
}

double SpectralBasis::theta0_right(double v) const { return b_.c0 * v + b_.c1; }

double SpectralBasis::phi0(double y, const RobinVector& L) const {
  const double w0 = L.c0 * y + L.c1;
  if (!singular_) return w0 / kappa_;
  const double taud = geom_.tau * geom_.d;
  const double w0p = (L.c0 * y * y * y / 6.0 + L.c1 * y * y / 2.0) / taud;
  return w0p / dtil_d1_ - w0 * dtil_d2_ / (2.0 * dtil_d1_ * dtil_d1_);
}

double SpectralBasis::phi_secular(double y, const RobinVector& L) const {
  if (!singular_) return 0.0;
  return (L.c0 * y + L.c1) / dtil_d1_;
}

double SpectralBasis::phi_coefficient(int k, double y, const RobinVector& L) const {
  const Eigen::Vector2d Lv(L.c0, L.c1);
  const double c = Lv.dot(kernel_C(y, roots_[k], geom_));
  return c / (roots_[k] * dprime_[k]);
}

double SpectralBasis::theta_coefficient(int k, double u, double v) const {
  return c_dot(k, u, a_) * theta_series_weight(k, v);
}

double SpectralBasis::c_dot(int k, double y, const RobinVector& L) const {
  const Eigen::Vector2d Lv(L.c0, L.c1);
  return Lv.dot(kernel_C(y, roots_[k], geom_));
}

double SpectralBasis::theta_series_weight(int k, double v) const {
  return c_dot(k, v, b_) / (mu_[k] * dprime_[k]);
}

SpectralBasis SpectralBasis::truncated(int K) const {
  if (K < 0 || K > count()) throw ParameterError("SpectralBasis::truncated: bad K");
  return SpectralBasis(geom_, a_, b_, roots_.head(K), mu_.head(K), dprime_.head(K));
}

double SpectralBasis::phi_series0(double y, const RobinVector& L) const {
  double acc = phi0(y, L);
  for (int k = 0; k < count(); ++k) acc += phi_coefficient(k, y, L);
  return acc;
}

double SpectralBasis::phi_instant(double y, const RobinVector& L) const {
  const double w = geom_.width();
  const double ay = std::abs(y);
  if (ay > w * (1.0 + 1e-9))
    throw ParameterError("phi_instant: |y| exceeds the layer width");
  if (ay < w * (1.0 - 1e-9)) return 0.0;
  // |y| = w: limit of (sgn(y) L0 + L1 omega) / ((b0 + b1 omega)(a0 - a1 omega)).
  const double n0 = (y > 0 ? L.c0 : -L.c0), n1 = L.c1;
  const int deg_n = (n1 != 0.0) ? 1 : 0;
  const int deg_d = (b_.c1 != 0.0 ? 1 : 0) + (a_.c1 != 0.0 ? 1 : 0);
  if (n0 == 0.0 && n1 == 0.0) return 0.0;
  if (deg_n > deg_d)
    throw ParameterError("phi_instant: unbounded instantaneous response for this (y, L) pair");
  if (deg_n < deg_d) return 0.0;
  const double num = (deg_n == 1) ? n1 : n0;
  const double den = (b_.c1 != 0.0 ? b_.c1 : b_.c0) * (a_.c1 != 0.0 ? -a_.c1 : a_.c0);
  return num / den;
}

double SpectralBasis::tail_bound(double t_min) const {
  if (count() == 0) return 1.0;
  return std::exp(roots_[count() - 1] * t_min / geom_.tau);
}

// ---------------------------------------------------------------------------

namespace {

void check_K(const SpectralBasis& basis, int K, const char* who) {
  if (K < 0 || K > basis.count())
    throw ParameterError(std::string(who) + ": K exceeds the stored root count");
}

}  // namespace

double theta_kernel(double x, double y, double t, const SpectralBasis& basis, int K) {
  check_K(basis, K, "theta_kernel");
  const double tau = basis.geometry().tau;
  double acc = basis.theta0(x, y);
  for (int k = 0; k < K; ++k)
    acc += std::exp(basis.root(k) * t / tau) * basis.theta_coefficient(k, x, y);
  return acc;
}

double phi_kernel(double y, double t, const SpectralBasis& basis, const RobinVector& L, int K) {
  check_K(basis, K, "phi_kernel");
  L.validate();
  const double tau = basis.geometry().tau;
  double acc = basis.phi0(y, L) + basis.phi_secular(y, L) * t / tau;
  for (int k = 0; k < K; ++k)
    acc += std::exp(basis.root(k) * t / tau) * basis.phi_coefficient(k, y, L);
  return acc;
}

double phi_kernel_time_derivative(double y, double t, const SpectralBasis& basis,
                                  const RobinVector& L, int K) {
  check_K(basis, K, "phi_kernel_time_derivative");
  L.validate();
  const double tau = basis.geometry().tau;
  double acc = basis.phi_secular(y, L) / tau;
  for (int k = 0; k < K; ++k)
    acc += std::exp(basis.root(k) * t / tau) * (basis.root(k) / tau) *
           basis.phi_coefficient(k, y, L);
  return acc;
}

}  // namespace strata
