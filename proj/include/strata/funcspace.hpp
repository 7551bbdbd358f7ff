#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace strata {

/// Thrown when an argument leaves the declared domain of a function.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by config / problem validation.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reported when a truncated quadrature window is demonstrably inadequate.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when problem data evaluates to a non-finite value inside a quadrature.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FunctionKind {
  Constant,
  Polynomial,   // c0 + c1 x + ... + c_n x^n, n <= 8
  Exponential,  // A exp(a x)
  Sinusoid,     // A sin(w x + p)
  Gaussian,     // A exp(-((x-c)/sigma)^2)
  Tabulated,    // linear interpolation, strictly increasing abscissae
  Sum           // sum of terms
};

/// Closed-form scalar function of one variable.  Evaluation is total on the
/// declared domain; tabulated data is clamped to its abscissa range.
class FunctionSpec {
 public:
  FunctionSpec() : kind_(FunctionKind::Constant), coeffs_{0.0} {}

  static FunctionSpec constant(double c);
  static FunctionSpec polynomial(std::vector<double> coeffs);
  static FunctionSpec exponential(double amplitude, double rate);
  static FunctionSpec sinusoid(double amplitude, double omega, double phase = 0.0);
  static FunctionSpec gaussian(double amplitude, double center, double width);
  static FunctionSpec tabulated(std::vector<double> x, std::vector<double> y);
  static FunctionSpec sum(std::vector<FunctionSpec> terms);

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  /// First derivative; exact for the closed-form kinds, slope of the active
  /// segment for tabulated data.
  double deriv(double x) const;

  bool is_zero() const;
  FunctionKind kind() const { return kind_; }

 private:
  FunctionKind kind_;
  std::vector<double> coeffs_;     // meaning depends on kind
  std::vector<double> tab_x_, tab_y_;
  std::vector<FunctionSpec> terms_;
};

/// Separable space-time function: sum of X_i(x) * T_i(t) terms.
class SpaceTimeFunctionSpec {
 public:
  SpaceTimeFunctionSpec() = default;

  void add_term(FunctionSpec in_x, FunctionSpec in_t) {
    terms_.emplace_back(std::move(in_x), std::move(in_t));
  }
  double eval(double x, double t) const {
    double v = 0.0;
    for (const auto& [fx, ft] : terms_) v += fx.eval(x) * ft.eval(t);
    return v;
  }
  bool empty() const { return terms_.empty(); }
  const std::vector<std::pair<FunctionSpec, FunctionSpec>>& terms() const { return terms_; }

 private:
  std::vector<std::pair<FunctionSpec, FunctionSpec>> terms_;
};

/// Parameters (rho, m, tau) of the weight lambda(t, tau) = (t^m/tau^m + tau^m)^(-rho).
struct WeightParams {
  double rho = 0.0;
  int m = 1;
  double tau = 1.0;

  void validate() const {
    if (rho < 0.0) throw ValidationError("weight: rho >= 0 required");
    if (m < 1) throw ValidationError("weight: m >= 1 required");
    if (!(tau > 0.0)) throw ValidationError("weight: tau > 0 required");
  }
};

/// lambda(t, tau) of the weight; strictly positive for t >= 0.
double eval_weight(const WeightParams& w, double t);

/// Uniform time grid t_i = i * dt, i = 0..n_steps.
struct TimeGrid {
  double t_end = 1.0;
  int n_steps = 2;

  TimeGrid() = default;
  TimeGrid(double end, int steps) : t_end(end), n_steps(steps) {
    if (!(t_end > 0.0) || n_steps < 2)
      throw ValidationError("grid: t_end > 0 and n_steps >= 2 required");
  }
  double dt() const { return t_end / n_steps; }
  int size() const { return n_steps + 1; }
  double node(int i) const { return t_end * static_cast<double>(i) / n_steps; }
  bool operator==(const TimeGrid& o) const {
    return t_end == o.t_end && n_steps == o.n_steps;
  }
};

/// Uniformly sampled scalar function of time.
struct TimeSeries {
  TimeGrid grid;
  Eigen::VectorXd values;

  TimeSeries() = default;
  explicit TimeSeries(const TimeGrid& g) : grid(g), values(Eigen::VectorXd::Zero(g.size())) {}
  TimeSeries(const TimeGrid& g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw ValidationError("time series length mismatch");
  }
  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
  double sup_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

/// Uniformly sampled matrix (or column-vector) function of time; constant dimensions.
struct MatrixTimeSeries {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> values;

  MatrixTimeSeries() = default;
  MatrixTimeSeries(const TimeGrid& g, Eigen::Index rows, Eigen::Index cols)
      : grid(g), values(static_cast<size_t>(g.size()), Eigen::MatrixXd::Zero(rows, cols)) {}
  int size() const { return static_cast<int>(values.size()); }
  Eigen::Index rows() const { return values.empty() ? 0 : values.front().rows(); }
  Eigen::Index cols() const { return values.empty() ? 0 : values.front().cols(); }
  double sup_norm() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
  }
};

/// Sample f on the grid; with weight: values[i] = f(t_i) * lambda(t_i, tau).
TimeSeries sample(const FunctionSpec& f, const TimeGrid& grid);
TimeSeries sample_weighted(const FunctionSpec& f, const WeightParams& w, const TimeGrid& grid);

}  // namespace strata
