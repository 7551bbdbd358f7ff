#include "strata/cli.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace strata {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void report_exception(bool quiet, const std::exception& e) {
  if (!quiet) std::cerr << e.what() << "\n";
}

SolutionField analytic_solve(const RunConfig& cfg, InterfaceSolveReport* rep) {
  return solve_stack(cfg.stack, cfg.grid, cfg.solve, rep);
}

void write_metadata(const std::string& path, const RunConfig& cfg, const SolutionField& field) {
  nlohmann::json meta;
  meta["K"] = field.meta.K;
  meta["tail_bound"] = field.meta.tail_bound;
  meta["neumann_terms"] = field.meta.neumann_terms;
  meta["neumann_last_term_norm"] = field.meta.neumann_last_norm;
  meta["volterra_residual"] = field.meta.volterra_residual;
  meta["instant_matrix_condition"] = field.meta.instant_condition;
  meta["grid"] = {{"t_end", cfg.grid.t_end}, {"n_steps", cfg.grid.n_steps}};
  meta["layers"] = field.layers();
  meta["provenance"] = field.provenance == Provenance::series ? "series" : "finite-difference";
  std::ofstream os(path);
  os << meta.dump(2) << "\n";
}

}  // namespace

void write_solution_csv(std::ostream& os, const SolutionField& field) {
  os << "x,t,layer,phi\n";
  for (int j = 0; j < field.layers(); ++j)
    for (int i = 0; i < field.x[j].size(); ++i)
      for (int t = 0; t < field.grid.size(); ++t)
        os << fmt17(field.x[j][i]) << ',' << fmt17(field.grid.node(t)) << ',' << (j + 1) << ','
           << fmt17(field.values[j](i, t)) << '\n';
}

std::vector<SolutionRow> read_solution_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "x,t,layer,phi")
    throw ValidationError("solution csv: bad header");
  std::vector<SolutionRow> rows;
  while (std::getline(is, line)) {
    SolutionRow row;
    char* end = nullptr;
    const char* p = line.c_str();
    row.x = std::strtod(p, &end);
    if (*end != ',') throw ValidationError("solution csv: bad row");
    row.t = std::strtod(end + 1, &end);
    if (*end != ',') throw ValidationError("solution csv: bad row");
    row.layer = static_cast<int>(std::strtol(end + 1, &end, 10));
    if (*end != ',') throw ValidationError("solution csv: bad row");
    row.phi = std::strtod(end + 1, &end);
    rows.push_back(row);
  }
  return rows;
}

VerifyMetrics verify_fields(const StackSpec& stack, const SolutionField& field,
                            const SolutionField& reference, const VerifyThresholds& thr) {
  VerifyMetrics m;
  m.tail_bound = field.meta.tail_bound;
  const int nl = field.layers();
  double sup_phi = 0.0;
  for (int j = 0; j < nl; ++j)
    sup_phi = std::max(sup_phi, reference.values[j].cwiseAbs().maxCoeff());
  if (sup_phi == 0.0) sup_phi = 1.0;
  m.sup_phi = sup_phi;

  auto line = [&](const std::string& name, double value, double tol) {
    const bool ok = value <= tol;
    m.pass = m.pass && ok;
    std::ostringstream os;
    os << (ok ? "PASS " : "FAIL ") << name << " = " << value << " (tol " << tol << ")";
    m.lines.push_back(os.str());
  };

  for (int j = 0; j < nl; ++j) {
    const Eigen::MatrixXd diff = field.values[j] - reference.values[j];
    const double ref_norm = reference.values[j].norm();
    const double l2 = diff.norm() / (ref_norm > 0 ? ref_norm : 1.0);
    const double mx = diff.cwiseAbs().maxCoeff() / sup_phi;
    m.l2_rel.push_back(l2);
    m.max_rel.push_back(mx);
    line("layer " + std::to_string(j + 1) + " rel_l2", l2, thr.l2_rel);
    line("layer " + std::to_string(j + 1) + " rel_max", mx, thr.max_rel);
  }

  // Interface residuals of the analytic field.
  for (int j = 0; j + 1 < nl; ++j) {
    const auto& L = field.values[j];
    const auto& R = field.values[j + 1];
    const int ml = static_cast<int>(L.rows()) - 1;
    const double hl = field.x[j][1] - field.x[j][0];
    const double hr = field.x[j + 1][1] - field.x[j + 1][0];
    const double lam = stack.continuity[j];
    const double nu_l = stack.layers[j].nu, mu_l = stack.layers[j].mu;
    const double nu_r = stack.layers[j + 1].nu, mu_r = stack.layers[j + 1].mu;
    double cont = 0.0, flux = 0.0;
    for (int t = 0; t < field.grid.size(); ++t) {
      cont = std::max(cont, std::abs(L(ml, t) - lam * R(0, t)));
      const double dl = (3.0 * L(ml, t) - 4.0 * L(ml - 1, t) + L(ml - 2, t)) / (2.0 * hl);
      const double dr = (-3.0 * R(0, t) + 4.0 * R(1, t) - R(2, t)) / (2.0 * hr);
      flux = std::max(flux, std::abs(nu_l * L(ml, t) + mu_l * dl - nu_r * R(0, t) - mu_r * dr));
    }
    m.interface_continuity.push_back(cont / sup_phi);
    m.interface_flux.push_back(flux / sup_phi);
    line("interface " + std::to_string(j + 1) + " continuity", cont / sup_phi,
         thr.interface_tol);
    line("interface " + std::to_string(j + 1) + " flux", flux / sup_phi, thr.interface_tol);
  }

  // Interior PDE residual by high-order differences on the sampled field.
  double pde = 0.0;
  const double dt = field.grid.dt();
  for (int j = 0; j < nl; ++j) {
    const auto& V = field.values[j];
    const int nx = static_cast<int>(V.rows());
    const int nt = static_cast<int>(V.cols());
    if (nx < 5 || nt < 5) continue;
    const double h = field.x[j][1] - field.x[j][0];
    const double d = stack.layers[j].d;
    for (int i = 2; i < nx - 2; ++i)
      for (int t = 2; t < nt - 2; ++t) {
        const double ut = (V(i, t - 2) - 8.0 * V(i, t - 1) + 8.0 * V(i, t + 1) - V(i, t + 2)) /
                          (12.0 * dt);
        const double uxx = (-V(i - 2, t) + 16.0 * V(i - 1, t) - 30.0 * V(i, t) +
                            16.0 * V(i + 1, t) - V(i + 2, t)) /
                           (12.0 * h * h);
        const double src = stack.layers[j].source.empty()
                               ? 0.0
                               : eval_weight(stack.weight, field.grid.node(t)) *
                                     stack.layers[j].source.eval(field.x[j][i],
                                                                 field.grid.node(t));
        pde = std::max(pde, std::abs(ut - d * uxx - src));
      }
  }
  m.pde_residual = pde / sup_phi;
  line("pde residual", m.pde_residual, thr.pde_tol);
  line("tail bound", m.tail_bound, thr.tail_tol);
  return m;
}

int run_solve(const std::string& config_path, const std::string& out_dir, bool quiet) {
  RunConfig cfg;
  try {
    cfg = parse_config_file(config_path);
  } catch (const std::exception& e) {
    report_exception(quiet, e);
    return kExitValidation;
  }
  try {
    std::filesystem::create_directories(out_dir);
    InterfaceSolveReport rep;
    const SolutionField field = analytic_solve(cfg, &rep);
    std::ofstream os(out_dir + "/solution.csv");
    write_solution_csv(os, field);
    write_metadata(out_dir + "/metadata.json", cfg, field);
    if (!quiet)
      std::cout << "solution.csv written (" << field.layers() << " layers, K=" << field.meta.K
                << ", tail " << field.meta.tail_bound << ")\n";
    return kExitOk;
  } catch (const std::exception& e) {
    report_exception(quiet, e);
    return kExitSolver;
  }
}

int run_verify(const std::string& config_path, const std::string& out_dir, bool quiet) {
  RunConfig cfg;
  try {
    cfg = parse_config_file(config_path);
  } catch (const std::exception& e) {
    report_exception(quiet, e);
    return kExitValidation;
  }
  try {
    std::filesystem::create_directories(out_dir);
    InterfaceSolveReport rep;
    const SolutionField analytic = analytic_solve(cfg, &rep);
    const SolutionField fd = sample_field(solve_fd(cfg.stack, cfg.fd, cfg.grid), analytic.x);
    const VerifyMetrics metrics = verify_fields(cfg.stack, analytic, fd, cfg.verify);

    std::ofstream os(out_dir + "/verify_report.txt");
    for (const auto& l : metrics.lines) os << l << "\n";
    os << (metrics.pass ? "VERIFY PASS" : "VERIFY FAIL") << "\n";
    if (!quiet) {
      for (const auto& l : metrics.lines) std::cout << l << "\n";
      std::cout << (metrics.pass ? "VERIFY PASS" : "VERIFY FAIL") << "\n";
    }
    return metrics.pass ? kExitOk : kExitVerifyFail;
  } catch (const std::exception& e) {
    report_exception(quiet, e);
    return kExitSolver;
  }
}

int run_roots(const std::string& config_path, const std::string& out_dir, int layer, int count,
              bool quiet) {
  RunConfig cfg;
  try {
    cfg = parse_config_file(config_path);
    if (layer < 1 || layer > cfg.stack.n())
      throw ValidationError("error: --layer: index out of range");
    if (count < 0) throw ValidationError("error: --count: must be >= 0");
  } catch (const std::exception& e) {
    report_exception(quiet, e);
    return kExitValidation;
  }
  try {
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir + "/roots.csv");
    os << "layer,k,s_k,delta_prime,tail_bound\n";
    if (count > 0) {
      const SpectralBasis basis = find_roots(cfg.stack.a_vec(layer), cfg.stack.b_vec(layer),
                                             cfg.stack.geometry(layer), count,
                                             cfg.solve.root_tol);
      const double t_min = cfg.grid.dt();
      for (int k = 0; k < count; ++k)
        os << layer << ',' << (k + 1) << ',' << fmt17(basis.root(k)) << ','
           << fmt17(basis.dprime(k)) << ','
           << fmt17(std::exp(basis.root(k) * t_min / cfg.stack.weight.tau)) << '\n';
    }
    if (!quiet) std::cout << "roots.csv written\n";
    return kExitOk;
  } catch (const std::exception& e) {
    report_exception(quiet, e);
    return kExitSolver;
  }
}

}  // namespace strata
