#include "strata/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace strata {

using nlohmann::json;

namespace {

struct ErrorList {
  std::vector<std::string> errors;
  void add(const std::string& path, const std::string& what) {
    errors.push_back("error: " + path + ": " + what);
  }
  void raise_if_any() const {
    if (errors.empty()) return;
    std::ostringstream os;
    for (size_t i = 0; i < errors.size(); ++i) {
      if (i) os << '\n';
      os << errors[i];
    }
    throw ValidationError(os.str());
  }
};

double need_number(const json& j, const std::string& key, const std::string& path,
                   ErrorList& errs, double fallback = 0.0) {
  if (!j.contains(key) || !j[key].is_number()) {
    errs.add(path + "." + key, "number required");
    return fallback;
  }
  return j[key].get<double>();
}

std::vector<double> number_array(const json& j, const std::string& path, ErrorList& errs) {
  std::vector<double> out;
  if (!j.is_array()) {
    errs.add(path, "array of numbers required");
    return out;
  }
  for (const auto& v : j) {
    if (!v.is_number()) {
      errs.add(path, "array of numbers required");
      return out;
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

FunctionSpec parse_function(const json& j, const std::string& path) {
  if (j.is_null()) return FunctionSpec::constant(0.0);
  if (j.is_number()) return FunctionSpec::constant(j.get<double>());
  if (!j.is_object() || !j.contains("kind"))
    throw ValidationError("error: " + path + ": function object with \"kind\" required");
  const std::string kind = j["kind"].get<std::string>();
  auto num = [&](const char* key, double dflt = 0.0) {
    return j.contains(key) ? j[key].get<double>() : dflt;
  };
  if (kind == "constant") return FunctionSpec::constant(num("value"));
  if (kind == "polynomial") {
    if (!j.contains("coeffs"))
      throw ValidationError("error: " + path + ": polynomial needs coeffs");
    return FunctionSpec::polynomial(j["coeffs"].get<std::vector<double>>());
  }
  if (kind == "exponential") return FunctionSpec::exponential(num("amplitude", 1.0), num("rate"));
  if (kind == "sinusoid")
    return FunctionSpec::sinusoid(num("amplitude", 1.0), num("omega", 1.0), num("phase"));
  if (kind == "gaussian")
    return FunctionSpec::gaussian(num("amplitude", 1.0), num("center"), num("width", 1.0));
  if (kind == "tabulated") {
    if (!j.contains("x") || !j.contains("y"))
      throw ValidationError("error: " + path + ": tabulated needs x and y");
    return FunctionSpec::tabulated(j["x"].get<std::vector<double>>(),
                                   j["y"].get<std::vector<double>>());
  }
  if (kind == "sum") {
    std::vector<FunctionSpec> terms;
    for (size_t i = 0; i < j.value("terms", json::array()).size(); ++i)
      terms.push_back(parse_function(j["terms"][i], path + ".terms[" + std::to_string(i) + "]"));
    return FunctionSpec::sum(std::move(terms));
  }
  throw ValidationError("error: " + path + ": unknown function kind \"" + kind + "\"");
}

namespace {

SpaceTimeFunctionSpec parse_space_time(const json& j, const std::string& path) {
  SpaceTimeFunctionSpec st;
  if (j.is_null()) return st;
  if (!j.is_object() || !j.contains("terms"))
    throw ValidationError("error: " + path + ": object with \"terms\" required");
  for (size_t i = 0; i < j["terms"].size(); ++i) {
    const auto& term = j["terms"][i];
    const std::string tp = path + ".terms[" + std::to_string(i) + "]";
    st.add_term(parse_function(term.value("x", json(nullptr)), tp + ".x"),
                parse_function(term.value("t", json(nullptr)), tp + ".t"));
  }
  return st;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("error: <document>: JSON parse failure: ") + e.what());
  }

  ErrorList errs;
  RunConfig cfg;

  // weight
  if (j.contains("weight")) {
    const auto& w = j["weight"];
    cfg.stack.weight.rho = need_number(w, "rho", "weight", errs, 0.0);
    cfg.stack.weight.m = static_cast<int>(need_number(w, "m", "weight", errs, 1.0));
    cfg.stack.weight.tau = need_number(w, "tau", "weight", errs, 1.0);
  }

  // grid
  if (!j.contains("grid")) {
    errs.add("grid", "required (t_end, n_steps)");
  } else {
    const double t_end = need_number(j["grid"], "t_end", "grid", errs, 1.0);
    const double ns = need_number(j["grid"], "n_steps", "grid", errs, 2.0);
    if (t_end > 0.0 && ns >= 2) cfg.grid = TimeGrid(t_end, static_cast<int>(ns));
    else errs.add("grid", "t_end > 0 and n_steps >= 2 required");
  }

  // stack
  if (!j.contains("stack")) {
    errs.add("stack", "required");
    errs.raise_if_any();
  }
  const auto& st = j["stack"];
  if (st.contains("partition")) cfg.stack.partition = number_array(st["partition"], "stack.partition", errs);
  else errs.add("stack.partition", "required");

  if (st.contains("outer_left")) {
    cfg.stack.outer_left.c0 = need_number(st["outer_left"], "c0", "stack.outer_left", errs, 1.0);
    cfg.stack.outer_left.c1 = need_number(st["outer_left"], "c1", "stack.outer_left", errs, 0.0);
  }
  if (st.contains("outer_right")) {
    cfg.stack.outer_right.c0 = need_number(st["outer_right"], "c0", "stack.outer_right", errs, 1.0);
    cfg.stack.outer_right.c1 = need_number(st["outer_right"], "c1", "stack.outer_right", errs, 0.0);
  }
  if (std::abs(cfg.stack.outer_left.c0) + std::abs(cfg.stack.outer_left.c1) <= 0.0)
    errs.add("stack.outer_left", "|i|+|iota|>0 violated");
  if (std::abs(cfg.stack.outer_right.c0) + std::abs(cfg.stack.outer_right.c1) <= 0.0)
    errs.add("stack.outer_right", "|ell|+|l|>0 violated");

  try {
    cfg.stack.zeta = parse_function(st.value("zeta", json(nullptr)), "stack.zeta");
    cfg.stack.xi = parse_function(st.value("xi", json(nullptr)), "stack.xi");
  } catch (const ValidationError& e) {
    errs.errors.push_back(e.what());
  }

  if (st.contains("continuity"))
    cfg.stack.continuity = number_array(st["continuity"], "stack.continuity", errs);

  if (!st.contains("layers") || !st["layers"].is_array() || st["layers"].empty()) {
    errs.add("stack.layers", "non-empty array required");
  } else {
    for (size_t i = 0; i < st["layers"].size(); ++i) {
      const auto& lj = st["layers"][i];
      const std::string lp = "stack.layers[" + std::to_string(i) + "]";
      LayerSpec lay;
      lay.d = need_number(lj, "d", lp, errs, 1.0);
      if (!(lay.d > 0.0)) errs.add(lp + ".d", "positive diffusivity required");
      try {
        lay.eta = parse_function(lj.value("eta", json(nullptr)), lp + ".eta");
        lay.source = parse_space_time(lj.value("source", json(nullptr)), lp + ".source");
      } catch (const ValidationError& e) {
        errs.errors.push_back(e.what());
      }
      lay.nu = lj.value("nu", 0.0);
      lay.mu = lj.value("mu", 1.0);
      cfg.stack.layers.push_back(std::move(lay));
    }
  }

  const int n = cfg.stack.n();
  if (cfg.stack.continuity.empty() && n >= 1)
    cfg.stack.continuity.assign(std::max(0, n - 1), 1.0);
  if (static_cast<int>(cfg.stack.partition.size()) != n + 1)
    errs.add("stack.partition", "needs exactly layers+1 points");
  if (static_cast<int>(cfg.stack.continuity.size()) != n - 1 && n >= 2)
    errs.add("stack.continuity", "needs exactly layers-1 ratios");
  for (double lam : cfg.stack.continuity)
    if (lam == 0.0) errs.add("stack.continuity", "Lambda != 0 required");
  for (size_t i = 1; i < cfg.stack.partition.size(); ++i)
    if (!(cfg.stack.partition[i] > cfg.stack.partition[i - 1])) {
      errs.add("stack.partition", "strictly increasing required");
      break;
    }
  if (n >= 2)
    for (int i = 0; i < n; ++i)
      if (std::abs(cfg.stack.layers[i].nu) + std::abs(cfg.stack.layers[i].mu) <= 0.0)
        errs.add("stack.layers[" + std::to_string(i) + "]", "|nu|+|mu|>0 violated");
  if (cfg.stack.weight.rho < 0.0) errs.add("weight.rho", "rho >= 0 required");
  if (cfg.stack.weight.m < 1) errs.add("weight.m", "m >= 1 required");
  if (!(cfg.stack.weight.tau > 0.0)) errs.add("weight.tau", "tau > 0 required");

  // solve options
  if (j.contains("solve")) {
    const auto& s = j["solve"];
    cfg.solve.K = static_cast<int>(s.value("K", 64.0));
    cfg.solve.x_per_layer = static_cast<int>(s.value("x_per_layer", 33.0));
    cfg.solve.neumann_tol = s.value("neumann_tol", 0.0);
    cfg.solve.max_terms = static_cast<int>(s.value("max_terms", 200.0));
    cfg.solve.quad_panels = static_cast<int>(s.value("quad_panels", 64.0));
    if (cfg.solve.K < 1) errs.add("solve.K", "K >= 1 required");
    if (cfg.solve.x_per_layer < 2) errs.add("solve.x_per_layer", ">= 2 required");
  }

  // fd options
  if (j.contains("fd")) {
    const auto& f = j["fd"];
    if (f.contains("nodes_per_layer")) {
      if (f["nodes_per_layer"].is_number())
        cfg.fd.nodes_per_layer = {static_cast<int>(f["nodes_per_layer"].get<double>())};
      else
        for (const auto& v : f["nodes_per_layer"])
          cfg.fd.nodes_per_layer.push_back(static_cast<int>(v.get<double>()));
    }
    cfg.fd.dt = f.value("dt", 1e-3);
    cfg.fd.theta_cn = f.value("theta", 0.5);
  }
  if (cfg.fd.nodes_per_layer.empty()) cfg.fd.nodes_per_layer = {128};

  // verify thresholds
  if (j.contains("verify")) {
    const auto& v = j["verify"];
    cfg.verify.l2_rel = v.value("l2_rel", cfg.verify.l2_rel);
    cfg.verify.max_rel = v.value("max_rel", cfg.verify.max_rel);
    cfg.verify.interface_tol = v.value("interface_tol", cfg.verify.interface_tol);
    cfg.verify.pde_tol = v.value("pde_tol", cfg.verify.pde_tol);
    cfg.verify.tail_tol = v.value("tail_tol", cfg.verify.tail_tol);
  }

  errs.raise_if_any();
  try {
    cfg.stack.validate();
    cfg.fd.validate(n);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("error: stack: ") + e.what());
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("error: <config>: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace strata
