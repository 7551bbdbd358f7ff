#pragma once

#include "strata/config.hpp"

#include <iosfwd>
#include <string>

namespace strata {

// CLI exit codes.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerifyFail = 3;

/// Comparison and self-consistency metrics of an analytic solve.
struct VerifyMetrics {
  std::vector<double> l2_rel;          // per layer, against the reference field
  std::vector<double> max_rel;         // per layer
  std::vector<double> interface_continuity;  // per interface, / sup|phi|
  std::vector<double> interface_flux;        // per interface, / sup|phi|
  double pde_residual = 0.0;           // max interior residual / scale
  double tail_bound = 0.0;
  double sup_phi = 0.0;
  bool pass = true;
  std::vector<std::string> lines;      // formatted report lines with PASS/FAIL
};

/// Relative L2 / max error of `field` against `reference`, interface residuals
/// of `field`, and PDE residual; thresholds decide pass/fail.
VerifyMetrics verify_fields(const StackSpec& stack, const SolutionField& field,
                            const SolutionField& reference, const VerifyThresholds& thr);

/// Write the solution as CSV rows "x,t,layer,phi" (17 significant digits).
void write_solution_csv(std::ostream& os, const SolutionField& field);

struct SolutionRow {
  double x, t, phi;
  int layer;
};
/// Read back a solution.csv written by this tool; throws ValidationError on a
/// malformed document.
std::vector<SolutionRow> read_solution_csv(std::istream& is);

int run_solve(const std::string& config_path, const std::string& out_dir, bool quiet);
int run_verify(const std::string& config_path, const std::string& out_dir, bool quiet);
int run_roots(const std::string& config_path, const std::string& out_dir, int layer, int count,
              bool quiet);

}  // namespace strata
