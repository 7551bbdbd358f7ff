#include <doctest.h>

#include "strata/fdoracle.hpp"

#include <cmath>

using namespace strata;

namespace {

StackSpec single_layer_dirichlet() {
  StackSpec s;
  s.partition = {0.0, 1.0};
  s.layers.resize(1);
  s.layers[0].d = 1.0;
  s.outer_left = {1.0, 0.0};
  s.outer_right = {1.0, 0.0};
  s.weight = {0.0, 1, 1.0};
  return s;
}

double closed_form_error(const StackSpec& s, int cells, double dt, const TimeGrid& grid) {
  FdConfig cfg;
  cfg.nodes_per_layer = {cells};
  cfg.dt = dt;
  const SolutionField f = solve_fd(s, cfg, grid);
  double err = 0.0;
  for (int i = 0; i <= cells; ++i)
    for (int t = 0; t < grid.size(); ++t) {
      const double exact =
          std::exp(-M_PI * M_PI * grid.node(t)) * std::sin(M_PI * f.x[0][i]);
      err = std::max(err, std::abs(f.values[0](i, t) - exact));
    }
  return err;
}

}  // namespace

TEST_CASE("fd: closed-form single layer") {
  StackSpec s = single_layer_dirichlet();
  s.layers[0].eta = FunctionSpec::sinusoid(1.0, M_PI);
  const TimeGrid grid(0.1, 10);
  FdConfig cfg;
  cfg.nodes_per_layer = {256};
  cfg.dt = 1e-4;
  const SolutionField f = solve_fd(s, cfg, grid);
  CHECK(f.values[0](128, 10) == doctest::Approx(std::exp(-M_PI * M_PI * 0.1)).epsilon(3e-4));
}

TEST_CASE("fd: zero data stays identically zero") {
  StackSpec s = single_layer_dirichlet();
  const TimeGrid grid(0.2, 20);
  FdConfig cfg;
  cfg.nodes_per_layer = {32};
  cfg.dt = 1e-3;
  const SolutionField f = solve_fd(s, cfg, grid);
  CHECK(f.values[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fd: constant Dirichlet steady state is exact") {
  StackSpec s = single_layer_dirichlet();
  const double c = 0.6;
  s.layers[0].eta = FunctionSpec::constant(c);
  s.zeta = FunctionSpec::constant(c);
  s.xi = FunctionSpec::constant(c);
  const TimeGrid grid(0.3, 30);
  FdConfig cfg;
  cfg.nodes_per_layer = {32};
  cfg.dt = 1e-3;
  const SolutionField f = solve_fd(s, cfg, grid);
  CHECK((f.values[0].array() - c).abs().maxCoeff() < 1e-13);
}

TEST_CASE("fd: second-order convergence on the closed form") {
  StackSpec s = single_layer_dirichlet();
  s.layers[0].eta = FunctionSpec::sinusoid(1.0, M_PI);
  const TimeGrid grid(0.1, 10);
  const double e1 = closed_form_error(s, 32, 2e-3, grid);
  const double e2 = closed_form_error(s, 64, 1e-3, grid);
  const double ratio = e1 / e2;
  CHECK(ratio > 3.4);
  CHECK(ratio < 4.6);
}

TEST_CASE("fd: pure-Neumann homogeneous run conserves mass") {
  StackSpec s = single_layer_dirichlet();
  s.outer_left = {0.0, 1.0};
  s.outer_right = {0.0, 1.0};
  s.layers[0].eta = FunctionSpec::gaussian(1.0, 0.4, 0.15);
  const TimeGrid grid(0.2, 40);
  FdConfig cfg;
  cfg.nodes_per_layer = {128};
  cfg.dt = 5e-4;
  const SolutionField f = solve_fd(s, cfg, grid);
  const double h = f.x[0][1] - f.x[0][0];
  auto mass = [&](int t) {
    double acc = 0.5 * (f.values[0](0, t) + f.values[0](128, t));
    for (int i = 1; i < 128; ++i) acc += f.values[0](i, t);
    return acc * h;
  };
  const double m0 = mass(0);
  for (int t = 1; t <= 40; ++t)
    CHECK(std::abs(mass(t) - m0) / std::abs(m0) < 1e-8);
}

TEST_CASE("fd: interface rows are satisfied to machine precision") {
  StackSpec s;
  s.partition = {0.0, 0.5, 1.0};
  s.layers.resize(2);
  s.layers[0].d = 1.0;
  s.layers[0].nu = 0.0;
  s.layers[0].mu = 1.0;
  s.layers[1].d = 0.4;
  s.layers[1].nu = 0.0;
  s.layers[1].mu = 0.4;
  s.continuity = {1.5};
  s.outer_left = {1.0, 0.0};
  s.outer_right = {1.0, 0.0};
  s.zeta = FunctionSpec::sinusoid(1.0, 3.0);
  s.xi = FunctionSpec::constant(0.0);
  s.weight = {0.0, 1, 1.0};
  const TimeGrid grid(0.2, 20);
  FdConfig cfg;
  cfg.nodes_per_layer = {48, 48};
  cfg.dt = 1e-3;
  const SolutionField f = solve_fd(s, cfg, grid);
  const double hl = f.x[0][1] - f.x[0][0], hr = f.x[1][1] - f.x[1][0];
  for (int t = 1; t < grid.size(); ++t) {
    const double L = f.values[0](48, t), R = f.values[1](0, t);
    CHECK(std::abs(L - 1.5 * R) < 1e-12);
    const double dl =
        (3 * f.values[0](48, t) - 4 * f.values[0](47, t) + f.values[0](46, t)) / (2 * hl);
    const double dr =
        (-3 * f.values[1](0, t) + 4 * f.values[1](1, t) - f.values[1](2, t)) / (2 * hr);
    CHECK(std::abs(1.0 * dl - 0.4 * dr) < 1e-11);
  }
}

TEST_CASE("fd: field sampling interpolates linearly") {
  StackSpec s = single_layer_dirichlet();
  s.layers[0].eta = FunctionSpec::polynomial({0.0, 1.0});  // linear steady profile
  s.zeta = FunctionSpec::constant(0.0);
  s.xi = FunctionSpec::constant(1.0);
  const TimeGrid grid(0.05, 5);
  FdConfig cfg;
  cfg.nodes_per_layer = {64};
  cfg.dt = 1e-3;
  const SolutionField f = solve_fd(s, cfg, grid);
  std::vector<Eigen::VectorXd> xs = {linspace_nodes(0.0, 1.0, 11)};
  const SolutionField g = sample_field(f, xs);
  for (int i = 0; i <= 10; ++i)
    CHECK(g.values[0](i, 5) == doctest::Approx(g.x[0][i]).epsilon(1e-10));
}

TEST_CASE("fd: analytic and finite-difference paths agree on a two-layer case") {
  StackSpec s;
  s.partition = {0.0, 0.6, 1.5};
  s.layers.resize(2);
  s.layers[0].d = 1.0;
  s.layers[0].nu = 0.0;
  s.layers[0].mu = 1.0;
  s.layers[1].d = 0.3;
  s.layers[1].nu = 0.0;
  s.layers[1].mu = 0.3;
  s.continuity = {1.7};
  s.outer_left = {2.0, -0.5};
  s.outer_right = {1.0, 0.4};
  s.zeta = FunctionSpec::sinusoid(1.0, 3.0);
  s.xi = FunctionSpec::constant(0.0);
  s.weight = {0.0, 1, 1.0};

  const TimeGrid grid(0.5, 50);
  StackSolveOptions opts;
  opts.K = 64;
  opts.x_per_layer = 17;
  const SolutionField series = solve_stack(s, grid, opts);

  FdConfig cfg;
  cfg.nodes_per_layer = {128, 192};
  cfg.dt = 2.5e-4;
  const SolutionField fd = sample_field(solve_fd(s, cfg, grid), series.x);

  for (int j = 0; j < 2; ++j) {
    const double rel =
        (series.values[j] - fd.values[j]).norm() / std::max(fd.values[j].norm(), 1e-300);
    CHECK(rel < 5e-3);
  }
}

TEST_CASE("fd: weighted one-layer problem matches the series path") {
  StackSpec s = single_layer_dirichlet();
  s.outer_left = {1.0, -0.3};
  s.zeta = FunctionSpec::sinusoid(0.7, 2.0);
  s.xi = FunctionSpec::polynomial({0.0, 0.5});
  s.weight = {1.0, 2, 1.3};
  SpaceTimeFunctionSpec src;
  src.add_term(FunctionSpec::gaussian(1.5, 0.5, 0.25), FunctionSpec::constant(1.0));
  s.layers[0].source = src;

  const TimeGrid grid(0.5, 50);
  StackSolveOptions opts;
  opts.K = 64;
  opts.x_per_layer = 17;
  const SolutionField series = solve_stack(s, grid, opts);

  FdConfig cfg;
  cfg.nodes_per_layer = {192};
  cfg.dt = 2.5e-4;
  const SolutionField fd = sample_field(solve_fd(s, cfg, grid), series.x);
  const double rel =
      (series.values[0] - fd.values[0]).norm() / std::max(fd.values[0].norm(), 1e-300);
  CHECK(rel < 5e-3);
}

TEST_CASE("fd: Neumann-outer two-layer stack (vanishing reduced determinant)") {
  // both layer bases sit in the simple-pole branch: Theta0, Phi0 and the
  // linear-in-t kernel parts all participate
  StackSpec s;
  s.partition = {0.0, 0.7, 1.2};
  s.layers.resize(2);
  s.layers[0].d = 0.8;
  s.layers[0].nu = 0.0;
  s.layers[0].mu = 0.8;
  s.layers[1].d = 0.25;
  s.layers[1].nu = 0.0;
  s.layers[1].mu = 0.25;
  s.continuity = {1.3};
  s.outer_left = {0.0, 1.0};
  s.outer_right = {0.0, 1.0};
  s.zeta = FunctionSpec::constant(0.4);
  s.xi = FunctionSpec::sinusoid(0.3, 2.0);
  s.layers[0].eta = FunctionSpec::constant(0.2);
  s.layers[1].eta = FunctionSpec::constant(0.2 / 1.3);
  s.weight = {0.0, 1, 1.0};

  const TimeGrid grid(0.4, 40);
  StackSolveOptions opts;
  opts.K = 64;
  opts.x_per_layer = 17;
  const SolutionField series = solve_stack(s, grid, opts);

  FdConfig cfg;
  cfg.nodes_per_layer = {112, 80};
  cfg.dt = 2.5e-4;
  const SolutionField fd = sample_field(solve_fd(s, cfg, grid), series.x);
  for (int j = 0; j < 2; ++j) {
    const double rel =
        (series.values[j] - fd.values[j]).norm() / std::max(fd.values[j].norm(), 1e-300);
    CHECK(rel < 5e-3);
  }
}
