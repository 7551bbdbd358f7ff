#include "strata/transforms.hpp"

#include <cmath>

namespace strata {

namespace {

double trapezoid_transform(const std::function<double(double)>& integrand, double t_max,
                           int n_panels) {
  const double h = t_max / n_panels;
  double acc = 0.5 * (integrand(0.0) + integrand(t_max));
  for (int i = 1; i < n_panels; ++i) acc += integrand(i * h);
  return acc * h;
}

void check_tail(const std::function<double(double)>& integrand, double t_max) {
  // Integrand must have decayed at the truncation point.  Compare tail samples
  // (several, to dodge zeros of oscillatory integrands) against the magnitude
  // seen over the first quarter of the window.
  double scale = 0.0;
  for (int i = 0; i <= 16; ++i) scale = std::max(scale, std::abs(integrand(t_max * i / 64.0)));
  double tail = 0.0;
  for (double frac : {0.97, 0.98, 0.99, 1.0})
    tail = std::max(tail, std::abs(integrand(frac * t_max)));
  if (tail > 1e-8 * scale && tail > 1e-300)
    throw TruncationError("transform integrand has not decayed at t_max; "
                          "increase t_max or check the growth rate of f");
}

}  // namespace

double natural_transform(const std::function<double(double)>& f, const TransformQuery& q,
                         double t_max, int n_panels) {
  q.validate();
  if (!(t_max > 0.0)) t_max = default_t_max(q);
  if (n_panels < 8) throw ParameterError("natural_transform: n_panels too small");
  auto integrand = [&](double t) { return std::exp(-q.s * t) * f(q.weight.tau * t); };
  check_tail(integrand, t_max);
  return trapezoid_transform(integrand, t_max, n_panels);
}

double natural_transform(const FunctionSpec& f, const TransformQuery& q, double t_max,
                         int n_panels) {
  return natural_transform([&](double t) { return f.eval(t); }, q, t_max, n_panels);
}

double m_transform(const std::function<double(double)>& f, const TransformQuery& q,
                   double t_max, int n_panels) {
  q.validate();
  if (!(t_max > 0.0)) t_max = default_t_max(q);
  if (n_panels < 8) throw ParameterError("m_transform: n_panels too small");
  const double tau_m = std::pow(q.weight.tau, q.weight.m);
  auto integrand = [&](double t) {
    const double w = std::pow(std::pow(t, q.weight.m) + tau_m, -q.weight.rho);
    return std::exp(-q.s * t) * f(q.weight.tau * t) * w;
  };
  check_tail(integrand, t_max);
  return trapezoid_transform(integrand, t_max, n_panels);
}

double m_transform(const FunctionSpec& f, const TransformQuery& q, double t_max, int n_panels) {
  return m_transform([&](double t) { return f.eval(t); }, q, t_max, n_panels);
}

TimeSeries convolve(const TimeSeries& f, const TimeSeries& g) {
  if (!(f.grid == g.grid)) throw ParameterError("convolve: time grids differ");
  const int n = f.size();
  const double dt = f.grid.dt();
  TimeSeries out(f.grid);
  for (int i = 1; i < n; ++i) {
    double acc = 0.5 * (f[0] * g[i] + f[i] * g[0]);
    for (int j = 1; j < i; ++j) acc += f[j] * g[i - j];
    out[i] = acc * dt;
  }
  return out;
}

MatrixTimeSeries convolve(const MatrixTimeSeries& f, const MatrixTimeSeries& g) {
  if (!(f.grid == g.grid)) throw ParameterError("convolve: time grids differ");
  if (f.cols() != g.rows()) throw ParameterError("convolve: inner dimensions differ");
  const int n = f.size();
  const double dt = f.grid.dt();
  MatrixTimeSeries out(f.grid, f.rows(), g.cols());
  for (int i = 1; i < n; ++i) {
    Eigen::MatrixXd acc = 0.5 * (f.values[0] * g.values[i] + f.values[i] * g.values[0]);
    for (int j = 1; j < i; ++j) acc += f.values[j] * g.values[i - j];
    out.values[i] = acc * dt;
  }
  return out;
}

namespace {

template <class Series>
Series neumann_impl(const Series& B, const Series& C, double tol, int max_terms,
                    NeumannReport* report) {
  if (!(tol > 0.0)) throw ParameterError("neumann_series: tol must be positive");
  Series sum = C;
  Series term = C;
  NeumannReport rep;
  for (int m = 1; m <= max_terms; ++m) {
    term = convolve(B, term);  // B_m * C built recursively
    const double norm = term.sup_norm();
    rep.terms_used = m;
    rep.last_term_norm = norm;
    if (norm < tol) {
      rep.converged = true;
      break;
    }
    if constexpr (requires { sum.values += term.values; }) {
      sum.values += term.values;
    } else {
      for (int i = 0; i < sum.size(); ++i) sum.values[i] += term.values[i];
    }
  }
  if (report) *report = rep;
  if (!rep.converged)
    throw NonConvergenceError("neumann_series: term norm " + std::to_string(rep.last_term_norm) +
                              " after " + std::to_string(rep.terms_used) + " terms (tol " +
                              std::to_string(tol) + ")");
  return sum;
}

}  // namespace

TimeSeries neumann_series(const TimeSeries& B, const TimeSeries& C, double tol, int max_terms,
                          NeumannReport* report) {
  return neumann_impl(B, C, tol, max_terms, report);
}

MatrixTimeSeries neumann_series(const MatrixTimeSeries& B, const MatrixTimeSeries& C, double tol,
                                int max_terms, NeumannReport* report) {
  return neumann_impl(B, C, tol, max_terms, report);
}

namespace {

// P(z) = int_0^1 e^{z v} v dv, Q(z) = int_0^1 e^{z v} (1 - v) dv, evaluated
// stably via the series for small |z|.
void panel_weights(double z, double& P, double& Q) {
  if (std::abs(z) < 0.5) {
    // P = sum z^n (n+1)/(n+2)!,  Q = sum z^n /(n+2)!
    double pow_z = 1.0, fact = 2.0;  // (n+2)! running
    P = 0.0;
    Q = 0.0;
    for (int n = 0; n < 16; ++n) {
      P += pow_z * (n + 1) / fact;
      Q += pow_z / fact;
      pow_z *= z;
      fact *= (n + 3);
    }
    return;
  }
  const double ez = std::exp(z);
  P = (ez * (z - 1.0) + 1.0) / (z * z);
  Q = (ez - 1.0 - z) / (z * z);
}

}  // namespace

double exp_panel_weight(double z) {
  double P, Q;
  panel_weights(z, P, Q);
  return Q;
}

TimeSeries exp_history(double a, const TimeSeries& g) {
  const int n = g.size();
  const double dt = g.grid.dt();
  const double z = a * dt;
  double P, Q;
  panel_weights(z, P, Q);
  const double decay = std::exp(z);
  TimeSeries out(g.grid);
  for (int i = 1; i < n; ++i)
    out[i] = decay * out[i - 1] + dt * (P * g[i - 1] + Q * g[i]);
  return out;
}

TimeSeries cumulative_integral(const TimeSeries& g) {
  TimeSeries out(g.grid);
  const double dt = g.grid.dt();
  for (int i = 1; i < g.size(); ++i) out[i] = out[i - 1] + 0.5 * dt * (g[i - 1] + g[i]);
  return out;
}

}  // namespace strata
