// Batch front end: solve | verify | roots over a JSON problem config.

#include "strata/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"strata - semi-analytical multilayer diffusion solver"};
  app.require_subcommand(1);

  std::string config, out = "out";
  int layer = 1, count = 0;
  bool quiet = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "problem config (JSON)")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--quiet", quiet, "suppress console output");
  };
  auto* solve = app.add_subcommand("solve", "run the series solver, write solution.csv");
  add_common(solve);
  auto* verify = app.add_subcommand("verify", "compare against the finite-difference oracle");
  add_common(verify);
  auto* roots = app.add_subcommand("roots", "write the determinant root table");
  add_common(roots);
  roots->add_option("--layer", layer, "layer index (1-based)");
  roots->add_option("--count", count, "number of roots");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) return strata::run_solve(config, out, quiet);
  if (verify->parsed()) return strata::run_verify(config, out, quiet);
  return strata::run_roots(config, out, layer, count, quiet);
}
