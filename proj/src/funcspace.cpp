#include "strata/funcspace.hpp"

#include <algorithm>
#include <cmath>

namespace strata {

FunctionSpec FunctionSpec::constant(double c) {
  FunctionSpec f;
  f.kind_ = FunctionKind::Constant;
  f.coeffs_ = {c};
  return f;
}

FunctionSpec FunctionSpec::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  if (coeffs.size() > 9) throw ValidationError("polynomial degree must be <= 8");
  FunctionSpec f;
  f.kind_ = FunctionKind::Polynomial;
  f.coeffs_ = std::move(coeffs);
  return f;
}

FunctionSpec FunctionSpec::exponential(double amplitude, double rate) {
  FunctionSpec f;
  f.kind_ = FunctionKind::Exponential;
  f.coeffs_ = {amplitude, rate};
  return f;
}

FunctionSpec FunctionSpec::sinusoid(double amplitude, double omega, double phase) {
  FunctionSpec f;
  f.kind_ = FunctionKind::Sinusoid;
  f.coeffs_ = {amplitude, omega, phase};
  return f;
}

FunctionSpec FunctionSpec::gaussian(double amplitude, double center, double width) {
  if (!(width > 0.0)) throw ValidationError("gaussian width must be positive");
  FunctionSpec f;
  f.kind_ = FunctionKind::Gaussian;
  f.coeffs_ = {amplitude, center, width};
  return f;
}

FunctionSpec FunctionSpec::tabulated(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("tabulated data needs matching x/y with at least 2 samples");
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw ValidationError("tabulated abscissae must be strictly increasing");
  FunctionSpec f;
  f.kind_ = FunctionKind::Tabulated;
  f.tab_x_ = std::move(x);
  f.tab_y_ = std::move(y);
  return f;
}

FunctionSpec FunctionSpec::sum(std::vector<FunctionSpec> terms) {
  FunctionSpec f;
  f.kind_ = FunctionKind::Sum;
  f.terms_ = std::move(terms);
  return f;
}

double FunctionSpec::eval(double x) const {
  switch (kind_) {
    case FunctionKind::Constant:
      return coeffs_[0];
    case FunctionKind::Polynomial: {
      double v = 0.0;
      for (size_t i = coeffs_.size(); i-- > 0;) v = v * x + coeffs_[i];
      return v;
    }
    case FunctionKind::Exponential:
      return coeffs_[0] * std::exp(coeffs_[1] * x);
    case FunctionKind::Sinusoid:
      return coeffs_[0] * std::sin(coeffs_[1] * x + coeffs_[2]);
    case FunctionKind::Gaussian: {
      const double u = (x - coeffs_[1]) / coeffs_[2];
      return coeffs_[0] * std::exp(-u * u);
    }
    case FunctionKind::Tabulated: {
      if (x < tab_x_.front() || x > tab_x_.back())
        throw DomainError("tabulated function evaluated outside its abscissa range");
      auto it = std::upper_bound(tab_x_.begin(), tab_x_.end(), x);
      size_t hi = std::min<size_t>(tab_x_.size() - 1,
                                   static_cast<size_t>(it - tab_x_.begin()));
      if (hi == 0) hi = 1;
      const size_t lo = hi - 1;
      const double u = (x - tab_x_[lo]) / (tab_x_[hi] - tab_x_[lo]);
      return tab_y_[lo] * (1.0 - u) + tab_y_[hi] * u;
    }
    case FunctionKind::Sum: {
      double v = 0.0;
      for (const auto& t : terms_) v += t.eval(x);
      return v;
    }
  }
  return 0.0;
}

double FunctionSpec::deriv(double x) const {
  switch (kind_) {
    case FunctionKind::Constant:
      return 0.0;
    case FunctionKind::Polynomial: {
      double v = 0.0;
      for (size_t i = coeffs_.size(); i-- > 1;)
        v = v * x + coeffs_[i] * static_cast<double>(i);
      return v;
    }
    case FunctionKind::Exponential:
      return coeffs_[0] * coeffs_[1] * std::exp(coeffs_[1] * x);
    case FunctionKind::Sinusoid:
      return coeffs_[0] * coeffs_[1] * std::cos(coeffs_[1] * x + coeffs_[2]);
    case FunctionKind::Gaussian: {
      const double u = (x - coeffs_[1]) / coeffs_[2];
      return coeffs_[0] * std::exp(-u * u) * (-2.0 * u / coeffs_[2]);
    }
    case FunctionKind::Tabulated: {
      if (x < tab_x_.front() || x > tab_x_.back())
        throw DomainError("tabulated function evaluated outside its abscissa range");
      auto it = std::upper_bound(tab_x_.begin(), tab_x_.end(), x);
      size_t hi = std::min<size_t>(tab_x_.size() - 1,
                                   static_cast<size_t>(it - tab_x_.begin()));
      if (hi == 0) hi = 1;
      const size_t lo = hi - 1;
      return (tab_y_[hi] - tab_y_[lo]) / (tab_x_[hi] - tab_x_[lo]);
    }
    case FunctionKind::Sum: {
      double v = 0.0;
      for (const auto& t : terms_) v += t.deriv(x);
      return v;
    }
  }
  return 0.0;
}

bool FunctionSpec::is_zero() const {
  switch (kind_) {
    case FunctionKind::Constant:
      return coeffs_[0] == 0.0;
    case FunctionKind::Polynomial:
      return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
    case FunctionKind::Exponential:
    case FunctionKind::Sinusoid:
    case FunctionKind::Gaussian:
      return coeffs_[0] == 0.0;
    case FunctionKind::Tabulated:
      return std::all_of(tab_y_.begin(), tab_y_.end(), [](double y) { return y == 0.0; });
    case FunctionKind::Sum:
      return std::all_of(terms_.begin(), terms_.end(),
                         [](const FunctionSpec& t) { return t.is_zero(); });
  }
  return false;
}

double eval_weight(const WeightParams& w, double t) {
  if (w.rho == 0.0) return 1.0;
  const double base = std::pow(t / w.tau, w.m) + std::pow(w.tau, w.m);
  return std::pow(base, -w.rho);
}

TimeSeries sample(const FunctionSpec& f, const TimeGrid& grid) {
  TimeSeries s(grid);
  for (int i = 0; i < s.size(); ++i) s[i] = f.eval(grid.node(i));
  return s;
}

TimeSeries sample_weighted(const FunctionSpec& f, const WeightParams& w, const TimeGrid& grid) {
  TimeSeries s(grid);
  for (int i = 0; i < s.size(); ++i) {
    const double t = grid.node(i);
    s[i] = f.eval(t) * eval_weight(w, t);
  }
  return s;
}

}  // namespace strata
