#include "strata/onelayer.hpp"

#include <cmath>

namespace strata {

namespace {

// 5-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNode[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
constexpr double kGlWeight[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};

TimeSeries pointwise_weight(const TimeSeries& phi, const WeightParams& w) {
  TimeSeries out(phi.grid);
  for (int i = 0; i < phi.size(); ++i)
    out[i] = phi[i] * eval_weight(w, phi.grid.node(i));
  return out;
}

}  // namespace

Eigen::VectorXd linspace_nodes(double left, double right, int count) {
  if (count < 2) throw ParameterError("linspace_nodes: count must be >= 2");
  Eigen::VectorXd x(count);
  for (int i = 0; i < count; ++i)
    x[i] = left + (right - left) * static_cast<double>(i) / (count - 1);
  return x;
}

TimeSeries gamma_weighted(int k, const TimeSeries& phi_tilde, const SpectralBasis& basis) {
  if (k < 0 || k >= basis.count()) throw ParameterError("gamma: root index out of range");
  const double tau = basis.geometry().tau;
  const double sk = basis.root(k);
  TimeSeries hist = exp_history(sk / tau, phi_tilde);
  TimeSeries out(phi_tilde.grid);
  out.values = phi_tilde.values + (sk / tau) * hist.values;
  return out;
}

TimeSeries gamma_op(int k, const TimeSeries& phi, const SpectralBasis& basis,
                    const WeightParams& weight) {
  return gamma_weighted(k, pointwise_weight(phi, weight), basis);
}

TimeSeries T_op(const TimeSeries& phi, double y, const SpectralBasis& basis,
                const RobinVector& L, int K) {
  if (K < 0 || K > basis.count()) throw ParameterError("T_op: K exceeds stored roots");
  const double tau = basis.geometry().tau;
  double instant = basis.phi0(y, L);
  for (int k = 0; k < K; ++k) instant += basis.phi_coefficient(k, y, L);
  TimeSeries out(phi.grid);
  out.values = instant * phi.values;
  const double sec = basis.phi_secular(y, L);
  if (sec != 0.0) out.values += (sec / tau) * cumulative_integral(phi).values;
  for (int k = 0; k < K; ++k) {
    const double vk = basis.phi_coefficient(k, y, L);
    out.values += vk * (basis.root(k) / tau) * exp_history(basis.root(k) / tau, phi).values;
  }
  return out;
}

// ---------------------------------------------------------------------------
// LayerOperator
// ---------------------------------------------------------------------------

LayerOperator::LayerOperator(SpectralBasis basis, WeightParams weight, TimeGrid grid,
                             FunctionSpec eta, SpaceTimeFunctionSpec source, int quad_panels)
    : basis_(std::move(basis)), weight_(weight), grid_(grid), eta_(std::move(eta)),
      source_(std::move(source)) {
  weight_.validate();
  const auto& geom = basis_.geometry();
  if (geom.tau != weight_.tau) throw ValidationError("layer tau differs from weight tau");
  const int K = basis_.count();
  const double alpha = geom.left, beta = geom.right;

  // Composite Gauss-Legendre nodes over the layer.
  if (quad_panels < 1) throw ParameterError("quad_panels must be >= 1");
  const int nq = 5 * quad_panels;
  quad_x_.resize(nq);
  quad_w_.resize(nq);
  const double hp = (beta - alpha) / quad_panels;
  for (int p = 0; p < quad_panels; ++p) {
    const double mid = alpha + (p + 0.5) * hp;
    for (int g = 0; g < 5; ++g) {
      quad_x_[5 * p + g] = mid + 0.5 * hp * kGlNode[g];
      quad_w_[5 * p + g] = 0.5 * hp * kGlWeight[g];
    }
  }

  // Initial-data moments against <a, C(alpha - y; s_k)>.
  eta_moments_ = Eigen::VectorXd::Zero(K);
  const bool have_eta = !eta_.is_zero();
  if (have_eta) {
    for (int q = 0; q < nq; ++q) {
      const double y = quad_x_[q];
      const double ev = eta_.eval(y);
      if (!std::isfinite(ev))
        throw EvaluationError("layer data: eta is non-finite inside the layer");
      const double ew = quad_w_[q] * ev;
      for (int k = 0; k < K; ++k)
        eta_moments_[k] += ew * basis_.c_dot(k, alpha - y, basis_.a());
      eta_theta0_moment_ += ew * basis_.theta0_right(beta - y);
    }
  }

  // Source responses.  For each separable term X(y) T(t): the spatial moments
  // against the kernels and the exponential histories of the weighted factor.
  source_hist_.assign(K, TimeSeries(grid_));
  source_theta0_ = TimeSeries(grid_);
  for (const auto& [fx, ft] : source_.terms()) {
    Eigen::VectorXd xk = Eigen::VectorXd::Zero(K);
    double x0_moment = 0.0;
    for (int q = 0; q < nq; ++q) {
      const double y = quad_x_[q];
      const double xv = fx.eval(y);
      if (!std::isfinite(xv))
        throw EvaluationError("layer data: source x-factor is non-finite inside the layer");
      const double xw = quad_w_[q] * xv;
      for (int k = 0; k < K; ++k) xk[k] += xw * basis_.c_dot(k, alpha - y, basis_.a());
      x0_moment += xw * basis_.theta0_right(beta - y);
    }
    const TimeSeries tw = sample_weighted(ft, weight_, grid_);
    for (int k = 0; k < K; ++k)
      source_hist_[k].values += xk[k] * exp_history(basis_.root(k) / weight_.tau, tw).values;
    source_theta0_.values += x0_moment * cumulative_integral(tw).values;
  }
}

TimeSeries LayerOperator::theta(double x) const {
  const auto& geom = basis_.geometry();
  const double pref = -1.0 / (geom.tau * geom.d);
  const int K = basis_.count();
  const double t0l = basis_.theta0_left(geom.left - x);
  TimeSeries out(grid_);
  for (int j = 0; j < grid_.size(); ++j)
    out[j] = t0l * (eta_theta0_moment_ + source_theta0_[j]);
  for (int k = 0; k < K; ++k) {
    const double wk = basis_.theta_series_weight(k, geom.right - x);
    if (wk == 0.0) continue;
    const double decay = basis_.root(k) / geom.tau;
    for (int j = 0; j < grid_.size(); ++j)
      out[j] += wk * (eta_moments_[k] * std::exp(decay * grid_.node(j)) + source_hist_[k][j]);
  }
  out.values *= pref;
  return out;
}

Eigen::MatrixXd LayerOperator::field(const Eigen::VectorXd& x_nodes, const TimeSeries& zeta_w,
                                     const TimeSeries& xi_w) const {
  if (!(zeta_w.grid == grid_) || !(xi_w.grid == grid_))
    throw ParameterError("field: boundary series grid mismatch");
  const auto& geom = basis_.geometry();
  const double tau = geom.tau;
  const int K = basis_.count();
  const int nt = grid_.size();
  const int nx = static_cast<int>(x_nodes.size());

  std::vector<TimeSeries> hz(K), hx(K);
  for (int k = 0; k < K; ++k) {
    hz[k] = exp_history(basis_.root(k) / tau, zeta_w);
    hx[k] = exp_history(basis_.root(k) / tau, xi_w);
  }
  const TimeSeries cz = cumulative_integral(zeta_w);
  const TimeSeries cx = cumulative_integral(xi_w);

  Eigen::MatrixXd out(nx, nt);
  for (int i = 0; i < nx; ++i) {
    const double x = x_nodes[i];
    const double yb = geom.right - x;
    const double ya = geom.left - x;
    const double inst_b = basis_.phi_series0(yb, basis_.b());
    const double inst_a = basis_.phi_series0(ya, basis_.a());
    const double sec_b = basis_.phi_secular(yb, basis_.b()) / tau;
    const double sec_a = basis_.phi_secular(ya, basis_.a()) / tau;
    TimeSeries th = theta(x);
    for (int j = 0; j < nt; ++j)
      out(i, j) = inst_b * zeta_w[j] + sec_b * cz[j] - inst_a * xi_w[j] - sec_a * cx[j] + th[j];
    for (int k = 0; k < K; ++k) {
      const double rk = basis_.root(k) / tau;
      const double vb = basis_.phi_coefficient(k, yb, basis_.b()) * rk;
      const double va = basis_.phi_coefficient(k, ya, basis_.a()) * rk;
      for (int j = 0; j < nt; ++j) out(i, j) += vb * hz[k][j] - va * hx[k][j];
    }
  }
  return out;
}

TimeSeries LayerOperator::t_apply(const TimeSeries& g, double y, const RobinVector& L) const {
  const double tau = basis_.geometry().tau;
  TimeSeries out(grid_);
  out.values = basis_.phi_series0(y, L) * g.values;
  const double sec = basis_.phi_secular(y, L);
  if (sec != 0.0) out.values += (sec / tau) * cumulative_integral(g).values;
  for (int k = 0; k < basis_.count(); ++k) {
    const double vk = basis_.phi_coefficient(k, y, L);
    out.values += vk * (basis_.root(k) / tau) * exp_history(basis_.root(k) / tau, g).values;
  }
  return out;
}

// ---------------------------------------------------------------------------

TimeSeries theta_field(double x, const TimeGrid& grid, const OneLayerProblem& problem,
                       const SpectralBasis& basis, int K, int quad_panels) {
  if (K < 0 || K > basis.count()) throw ParameterError("theta_field: K exceeds stored roots");
  if (x < problem.geometry.left || x > problem.geometry.right)
    throw DomainError("theta_field: x outside the layer");
  LayerOperator op(basis.truncated(K), problem.weight, grid, problem.eta, problem.source,
                   quad_panels);
  return op.theta(x);
}

SolutionField solve_one_layer(const OneLayerProblem& problem, const Eigen::VectorXd& x_nodes,
                              const TimeGrid& grid, int K, int quad_panels) {
  problem.validate();
  SpectralBasis basis = find_roots(problem.a, problem.b, problem.geometry, K);
  LayerOperator op(std::move(basis), problem.weight, grid, problem.eta, problem.source,
                   quad_panels);
  const TimeSeries zw = sample_weighted(problem.zeta, problem.weight, grid);
  const TimeSeries xw = sample_weighted(problem.xi, problem.weight, grid);

  SolutionField out;
  out.grid = grid;
  out.x.push_back(x_nodes);
  out.values.push_back(op.field(x_nodes, zw, xw));
  out.provenance = Provenance::series;
  out.meta.K = K;
  out.meta.tail_bound = op.basis().tail_bound(grid.dt());
  return out;
}

}  // namespace strata
