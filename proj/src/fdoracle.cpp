#include "strata/fdoracle.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>

namespace strata {

namespace {

struct FdLayout {
  std::vector<int> base;   // first global index of each layer
  std::vector<int> cells;  // m_j
  std::vector<double> dx;
  int total = 0;
};

FdLayout make_layout(const StackSpec& stack, const FdConfig& cfg) {
  FdLayout lay;
  const int nl = stack.n();
  lay.base.resize(nl);
  lay.cells.resize(nl);
  lay.dx.resize(nl);
  int at = 0;
  for (int j = 0; j < nl; ++j) {
    lay.base[j] = at;
    lay.cells[j] = cfg.cells(j);
    lay.dx[j] = stack.geometry(j + 1).width() / lay.cells[j];
    at += lay.cells[j] + 1;
  }
  lay.total = at;
  return lay;
}

}  // namespace

SolutionField solve_fd(const StackSpec& stack, const FdConfig& cfg, const TimeGrid& grid) {
  stack.validate();
  const int nl = stack.n();
  cfg.validate(nl);
  const FdLayout lay = make_layout(stack, cfg);
  const int N = lay.total;

  const int substeps = std::max(1, static_cast<int>(std::ceil(grid.dt() / cfg.dt - 1e-12)));
  const double dt = grid.dt() / substeps;
  const double th = cfg.theta_cn;

  // Row classification.
  enum class Row { pde, dirichlet_left, dirichlet_right, continuity, flux };
  std::vector<Row> row_kind(N, Row::pde);

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips_L;    // spatial operator L (PDE rows only)
  std::vector<Trip> trips_lhs;  // I - dt*theta*L on PDE rows; algebraic rows verbatim

  const RobinVector al = stack.outer_left, br = stack.outer_right;

  for (int j = 0; j < nl; ++j) {
    const double d = stack.layers[j].d;
    const double h = lay.dx[j];
    const int m = lay.cells[j];
    const int b0 = lay.base[j];
    for (int i = 0; i <= m; ++i) {
      const int g = b0 + i;
      const bool left_outer = (j == 0 && i == 0);
      const bool right_outer = (j == nl - 1 && i == m);
      const bool iface_left = (j < nl - 1 && i == m);   // continuity row
      const bool iface_right = (j > 0 && i == 0);       // flux row
      if (left_outer) {
        if (al.c1 == 0.0) {
          row_kind[g] = Row::dirichlet_left;
          trips_lhs.emplace_back(g, g, al.c0);
        } else {
          trips_L.emplace_back(g, g, d * (-2.0 / (h * h) + 2.0 * al.c0 / (al.c1 * h)));
          trips_L.emplace_back(g, g + 1, 2.0 * d / (h * h));
        }
      } else if (right_outer) {
        if (br.c1 == 0.0) {
          row_kind[g] = Row::dirichlet_right;
          trips_lhs.emplace_back(g, g, br.c0);
        } else {
          trips_L.emplace_back(g, g, d * (-2.0 / (h * h) - 2.0 * br.c0 / (br.c1 * h)));
          trips_L.emplace_back(g, g - 1, 2.0 * d / (h * h));
        }
      } else if (iface_left) {
        row_kind[g] = Row::continuity;
        trips_lhs.emplace_back(g, g, 1.0);
        trips_lhs.emplace_back(g, g + 1, -stack.continuity[j]);
      } else if (iface_right) {
        row_kind[g] = Row::flux;
        const double hl = lay.dx[j - 1];
        const double nu_l = stack.layers[j - 1].nu, mu_l = stack.layers[j - 1].mu;
        const double nu_r = stack.layers[j].nu, mu_r = stack.layers[j].mu;
        // one-sided second-order derivatives on each side of the interface
        trips_lhs.emplace_back(g, g - 1, nu_l + 3.0 * mu_l / (2.0 * hl));
        trips_lhs.emplace_back(g, g - 2, -4.0 * mu_l / (2.0 * hl));
        trips_lhs.emplace_back(g, g - 3, mu_l / (2.0 * hl));
        trips_lhs.emplace_back(g, g, -(nu_r - 3.0 * mu_r / (2.0 * h)));
        trips_lhs.emplace_back(g, g + 1, -4.0 * mu_r / (2.0 * h));
        trips_lhs.emplace_back(g, g + 2, mu_r / (2.0 * h));
      } else {
        trips_L.emplace_back(g, g - 1, d / (h * h));
        trips_L.emplace_back(g, g, -2.0 * d / (h * h));
        trips_L.emplace_back(g, g + 1, d / (h * h));
      }
    }
  }

  Eigen::SparseMatrix<double> L(N, N);
  L.setFromTriplets(trips_L.begin(), trips_L.end());
  for (int g = 0; g < N; ++g)
    if (row_kind[g] == Row::pde) trips_lhs.emplace_back(g, g, 1.0);
  Eigen::SparseMatrix<double> LHS(N, N);
  LHS.setFromTriplets(trips_lhs.begin(), trips_lhs.end());
  LHS -= (dt * th) * L;  // no-op on algebraic rows (their L rows are empty)

  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.analyzePattern(LHS);
  solver.factorize(LHS);
  if (solver.info() != Eigen::Success)
    throw ValidationError("fd: linear system factorization failed");

  // Node coordinates once.
  Eigen::VectorXd coord(N);
  for (int j = 0; j < nl; ++j)
    for (int i = 0; i <= lay.cells[j]; ++i)
      coord[lay.base[j] + i] = stack.partition[j] + i * lay.dx[j];

  // Boundary-data affine parts of the ghost-eliminated PDE rows.
  auto bc_affine = [&](int g, double t) -> double {
    if (g == 0 && row_kind[0] == Row::pde) {
      const double h = lay.dx[0];
      const double lz = eval_weight(stack.weight, t) * stack.zeta.eval(t);
      return -stack.layers[0].d * 2.0 / (al.c1 * h) * lz;
    }
    if (g == N - 1 && row_kind[N - 1] == Row::pde) {
      const double h = lay.dx[nl - 1];
      const double lx = eval_weight(stack.weight, t) * stack.xi.eval(t);
      return stack.layers[nl - 1].d * 2.0 / (br.c1 * h) * lx;
    }
    return 0.0;
  };
  auto layer_of = [&](int g) {
    int j = nl - 1;
    while (j > 0 && g < lay.base[j]) --j;
    return j;
  };

  Eigen::VectorXd phi(N);
  for (int j = 0; j < nl; ++j)
    for (int i = 0; i <= lay.cells[j]; ++i)
      phi[lay.base[j] + i] = stack.layers[j].eta.eval(coord[lay.base[j] + i]);

  SolutionField out;
  out.grid = grid;
  out.provenance = Provenance::finite_difference;
  for (int j = 0; j < nl; ++j) {
    out.x.push_back(coord.segment(lay.base[j], lay.cells[j] + 1));
    out.values.emplace_back(lay.cells[j] + 1, grid.size());
    out.values[j].col(0) = phi.segment(lay.base[j], lay.cells[j] + 1);
  }

  Eigen::VectorXd rhs(N);
  double t = 0.0;
  for (int step = 1; step <= grid.n_steps * substeps; ++step) {
    const double t1 = t + dt;
    const double th_mid = t + 0.5 * dt;
    const Eigen::VectorXd Lphi = L * phi;
    for (int g = 0; g < N; ++g) {
      switch (row_kind[g]) {
        case Row::pde: {
          const int j = layer_of(g);
          const double src = stack.layers[j].source.empty()
                                 ? 0.0
                                 : eval_weight(stack.weight, th_mid) *
                                       stack.layers[j].source.eval(coord[g], th_mid);
          rhs[g] = phi[g] + dt * (1.0 - th) * Lphi[g] +
                   dt * (th * bc_affine(g, t1) + (1.0 - th) * bc_affine(g, t) + src);
          break;
        }
        case Row::dirichlet_left:
          rhs[g] = eval_weight(stack.weight, t1) * stack.zeta.eval(t1);
          break;
        case Row::dirichlet_right:
          rhs[g] = eval_weight(stack.weight, t1) * stack.xi.eval(t1);
          break;
        case Row::continuity:
        case Row::flux:
          rhs[g] = 0.0;
          break;
      }
    }
    phi = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw ValidationError("fd: linear solve failed");
    t = t1;
    if (step % substeps == 0) {
      const int col = step / substeps;
      for (int j = 0; j < nl; ++j)
        out.values[j].col(col) = phi.segment(lay.base[j], lay.cells[j] + 1);
    }
  }
  return out;
}

SolutionField sample_field(const SolutionField& field, const std::vector<Eigen::VectorXd>& x) {
  if (x.size() != field.x.size())
    throw ParameterError("sample_field: layer count mismatch");
  SolutionField out;
  out.grid = field.grid;
  out.provenance = field.provenance;
  out.meta = field.meta;
  for (size_t j = 0; j < x.size(); ++j) {
    const Eigen::VectorXd& xs = field.x[j];
    Eigen::MatrixXd vals(x[j].size(), field.grid.size());
    for (int i = 0; i < x[j].size(); ++i) {
      const double xv = x[j][i];
      int hi = 1;
      while (hi < xs.size() - 1 && xs[hi] < xv) ++hi;
      const double u = (xv - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
      vals.row(i) = (1.0 - u) * field.values[j].row(hi - 1) + u * field.values[j].row(hi);
    }
    out.values.push_back(std::move(vals));
    out.x.push_back(x[j]);
  }
  return out;
}

}  // namespace strata
