#pragma once

#include "strata/multilayer.hpp"

namespace strata {

/// Crank-Nicolson configuration for the finite-difference reference solver.
struct FdConfig {
  std::vector<int> nodes_per_layer;  // cells per layer (>= 8 each); one entry broadcast
  double dt = 1e-3;                  // internal step; rounded down to divide the output step
  double theta_cn = 0.5;             // in [0.5, 1]

  void validate(int n_layers) const {
    if (nodes_per_layer.empty())
      throw ValidationError("fd: nodes_per_layer must not be empty");
    if (static_cast<int>(nodes_per_layer.size()) != 1 &&
        static_cast<int>(nodes_per_layer.size()) != n_layers)
      throw ValidationError("fd: nodes_per_layer must have one entry or one per layer");
    for (int m : nodes_per_layer)
      if (m < 8) throw ValidationError("fd: at least 8 cells per layer required");
    if (!(dt > 0.0)) throw ValidationError("fd: dt must be positive");
    if (theta_cn < 0.5 || theta_cn > 1.0)
      throw ValidationError("fd: theta must lie in [0.5, 1]");
  }
  int cells(int layer) const {
    return nodes_per_layer.size() == 1 ? nodes_per_layer[0] : nodes_per_layer[layer];
  }
};

/// Independent Crank-Nicolson multilayer solve; second order in space and time.
/// Returns the field on the scheme's own nodes (cells+1 per layer, duplicated
/// interface nodes carried by both adjacent layers).
SolutionField solve_fd(const StackSpec& stack, const FdConfig& cfg, const TimeGrid& grid);

/// Linear interpolation of a SolutionField onto new per-layer x nodes.
SolutionField sample_field(const SolutionField& field, const std::vector<Eigen::VectorXd>& x);

}  // namespace strata
