#pragma once

#include "strata/fdoracle.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace strata {

struct VerifyThresholds {
  double l2_rel = 5e-3;         // relative L2 error vs the FD oracle, per layer
  double max_rel = 5e-2;        // relative max error per layer
  double interface_tol = 1e-3;  // continuity and flux residuals, scaled by sup|phi|
  double pde_tol = 5e-2;        // interior PDE residual, scaled
  double tail_tol = 1e-6;       // exp(s_K dt/tau) truncation indicator
};

struct RunConfig {
  StackSpec stack;
  TimeGrid grid;
  StackSolveOptions solve;
  FdConfig fd;
  VerifyThresholds verify;
};

/// Parse and validate a JSON config document.  Throws ValidationError whose
/// message is a newline-separated list of "error: <path>: <what>" lines.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

FunctionSpec parse_function(const nlohmann::json& j, const std::string& path);

}  // namespace strata
