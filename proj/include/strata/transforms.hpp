#pragma once

#include "strata/funcspace.hpp"

#include <functional>

namespace strata {

/// Transform variable s and the weight parameters (tau always; rho, m for the
/// weighted transform).
struct TransformQuery {
  double s = 1.0;
  WeightParams weight;

  void validate() const {
    if (!(s > 0.0)) throw ParameterError("transform variable s must be positive");
    weight.validate();
  }
};

inline double default_t_max(const TransformQuery& q) { return 40.0 * q.weight.tau / q.s; }
constexpr int kDefaultPanels = 4096;

/// integral_0^{t_max} e^{-s t} f(tau t) dt by composite trapezoid.
double natural_transform(const std::function<double(double)>& f, const TransformQuery& q,
                         double t_max, int n_panels);
double natural_transform(const FunctionSpec& f, const TransformQuery& q,
                         double t_max = 0.0, int n_panels = kDefaultPanels);

/// Weighted transform via the duality with the natural transform:
/// integral_0^{t_max} e^{-s t} f(tau t) / (t^m + tau^m)^rho dt.
double m_transform(const std::function<double(double)>& f, const TransformQuery& q,
                   double t_max, int n_panels);
double m_transform(const FunctionSpec& f, const TransformQuery& q,
                   double t_max = 0.0, int n_panels = kDefaultPanels);

/// Trapezoidal discrete convolution (f*g)(t_i) = integral_0^{t_i} f g(t_i - .);
/// result[0] = 0.  Grids must match.
TimeSeries convolve(const TimeSeries& f, const TimeSeries& g);
/// Matrix x matrix (matrix product inside the integrand) and matrix x vector.
MatrixTimeSeries convolve(const MatrixTimeSeries& f, const MatrixTimeSeries& g);

struct NeumannReport {
  int terms_used = 0;        // number of series terms beyond the zeroth
  double last_term_norm = 0.0;
  bool converged = false;
};

/// h = C + sum_{m>=1} (B_m * C) with B_m the m-fold self-convolution of B.
/// Stops when the latest term's sup norm drops below tol.  Throws
/// NonConvergenceError when max_terms is exhausted first.
TimeSeries neumann_series(const TimeSeries& B, const TimeSeries& C, double tol,
                          int max_terms, NeumannReport* report = nullptr);
MatrixTimeSeries neumann_series(const MatrixTimeSeries& B, const MatrixTimeSeries& C,
                                double tol, int max_terms, NeumannReport* report = nullptr);

/// I(t_i) = integral_0^{t_i} e^{a (t_i - u)} g(u) du with the exponential kernel
/// integrated exactly against piecewise-linear g (exponential-integrator rule).
/// Stable for arbitrarily stiff a <= 0.
TimeSeries exp_history(double a, const TimeSeries& g);

/// Weights of the current-node sample in one exp_history panel: the
/// contribution of g(t_i) to I(t_i) is dt * exp_panel_weight(a * dt).
double exp_panel_weight(double z);

/// Running trapezoid integral: J(t_i) = integral_0^{t_i} g.
TimeSeries cumulative_integral(const TimeSeries& g);

}  // namespace strata
