#include "sim_config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

#include "hartree/io.hpp"
#include "hartree/riesz.hpp"

namespace hartree::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kDiagnostics{"evolution", "picard", "scattering", "scaling", "dependence"};

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw ConfigError(path + "/" + key, "unknown key");
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) throw ConfigError(path, "must be positive");
  return x;
}

int integer(const json& v, const std::string& path, int lo) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < lo || x > 1 << 30) throw ConfigError(path, "out of range");
  return static_cast<int>(x);
}

/// Integers or "a/b" strings; floats are refused so exponents stay exact.
Rational rational(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) {
    try {
      return Rational::parse(v.get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }
  throw ConfigError(path, "expected an integer or an \"a/b\" string");
}

std::array<double, 3> triple(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(path, "expected an array of 3 numbers");
  return {number(v[0], path + "/0"), number(v[1], path + "/1"), number(v[2], path + "/2")};
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "/" + std::to_string(i)));
  return out;
}

std::string rational_text(const Rational& r) { return r.str(); }

}  // namespace

Field InitialDatum::sample(const GridSpec& grid) const {
  const double inv = 1.0 / (2.0 * width * width);
  return Field::from_function(grid, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    double phase = 0.0;
    for (int d = 0; d < grid.dim; ++d) {
      const double y = x[d] - center[d];
      r2 += y * y;
      phase += momentum[d] * x[d];
    }
    return std::polar(amplitude * std::exp(-r2 * inv), phase);
  });
}

ModelParams SimulationConfig::model() const { return ModelParams::make(point, epsilon, grid.dim, kernel); }

bool SimulationConfig::wants(const std::string& diagnostic) const {
  return std::find(diagnostics.begin(), diagnostics.end(), diagnostic) != diagnostics.end();
}

SimulationConfig parse_simulation_config(const json& doc) {
  SimulationConfig cfg;
  only_keys(doc, "", {"grid", "params", "initial", "evolution", "diagnostics", "picard", "scattering", "scaling",
                      "dependence", "output"});

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    only_keys(g, "/grid", {"dim", "points", "half_width"});
    const int dim = g.contains("dim") ? integer(g["dim"], "/grid/dim", 1) : 3;
    const int points = g.contains("points") ? integer(g["points"], "/grid/points", 2) : 64;
    const double half_width = g.contains("half_width") ? positive(g["half_width"], "/grid/half_width") : 8.0;
    if (dim > 3) throw ConfigError("/grid/dim", "grids go up to dimension 3");
    if (points % 2 != 0) throw ConfigError("/grid/points", "must be even");
    cfg.grid = GridSpec(dim, points, half_width);
  }

  if (doc.contains("params")) {
    const json& p = doc["params"];
    only_keys(p, "/params", {"n", "alpha", "b", "epsilon", "kernel", "weight_regularization"});
    const int n = p.contains("n") ? integer(p["n"], "/params/n", 3) : 3;
    const Rational alpha = p.contains("alpha") ? rational(p["alpha"], "/params/alpha") : Rational(2);
    const Rational b = p.contains("b") ? rational(p["b"], "/params/b") : Rational(1);
    cfg.point = ParamPoint(n, alpha, b);
    if (p.contains("epsilon")) {
      cfg.epsilon = integer(p["epsilon"], "/params/epsilon", -1);
      if (cfg.epsilon != 1 && cfg.epsilon != -1) throw ConfigError("/params/epsilon", "must be 1 or -1");
    }
    if (p.contains("kernel")) {
      if (!p["kernel"].is_string()) throw ConfigError("/params/kernel", "expected a string");
      try {
        cfg.kernel = kernel_mode_from_string(p["kernel"].get<std::string>().c_str());
      } catch (const std::exception& e) {
        throw ConfigError("/params/kernel", e.what());
      }
    }
    if (p.contains("weight_regularization")) {
      const json& w = p["weight_regularization"];
      if (w.is_string() && (w == "half-cell" || w == "lattice")) {
        cfg.weight_rule = w.get<std::string>();
      } else if (w.is_number()) {
        positive(w, "/params/weight_regularization");
        cfg.weight_rule = format_double(w.get<double>());
      } else {
        throw ConfigError("/params/weight_regularization", "expected \"half-cell\", \"lattice\" or a positive number");
      }
    }
  }
  try {
    (void)cfg.model();
  } catch (const std::exception& e) {
    throw ConfigError("/params", e.what());
  }

  std::optional<double> delta;
  if (cfg.weight_rule == "lattice") {
    delta = lattice_corrected_delta(cfg.grid.dim, -cfg.point.b.to_double(), cfg.grid.spacing());
  } else if (cfg.weight_rule != "half-cell") {
    delta = std::stod(cfg.weight_rule);
  }

  if (doc.contains("initial")) {
    const json& i = doc["initial"];
    only_keys(i, "/initial", {"kind", "amplitude", "width", "center", "momentum"});
    if (i.contains("kind") && i["kind"] != "gaussian") throw ConfigError("/initial/kind", "only \"gaussian\" is supported");
    if (i.contains("amplitude")) cfg.initial.amplitude = number(i["amplitude"], "/initial/amplitude");
    if (i.contains("width")) cfg.initial.width = positive(i["width"], "/initial/width");
    if (i.contains("center")) cfg.initial.center = triple(i["center"], "/initial/center");
    if (i.contains("momentum")) cfg.initial.momentum = triple(i["momentum"], "/initial/momentum");
  }

  if (doc.contains("evolution")) {
    const json& e = doc["evolution"];
    only_keys(e, "/evolution", {"scheme", "dt", "t_end", "snapshot_every", "diagnostics_every", "write_snapshots"});
    if (e.contains("scheme") && e["scheme"] != "strang") throw ConfigError("/evolution/scheme", "only \"strang\" is supported");
    if (e.contains("dt")) cfg.evolution.dt = positive(e["dt"], "/evolution/dt");
    if (e.contains("t_end")) cfg.evolution.t_end = positive(e["t_end"], "/evolution/t_end");
    if (e.contains("snapshot_every")) cfg.evolution.snapshot_every = integer(e["snapshot_every"], "/evolution/snapshot_every", 0);
    if (e.contains("diagnostics_every")) {
      cfg.evolution.diagnostics_every = integer(e["diagnostics_every"], "/evolution/diagnostics_every", 0);
    }
    if (e.contains("write_snapshots")) {
      if (!e["write_snapshots"].is_boolean()) throw ConfigError("/evolution/write_snapshots", "expected a boolean");
      cfg.write_snapshots = e["write_snapshots"].get<bool>();
    }
  }
  try {
    (void)cfg.evolution.steps();
  } catch (const std::exception& e) {
    throw ConfigError("/evolution", e.what());
  }
  cfg.evolution.weight_regularization = delta;

  if (doc.contains("diagnostics")) {
    const json& d = doc["diagnostics"];
    if (!d.is_array()) throw ConfigError("/diagnostics", "expected an array of names");
    cfg.diagnostics.clear();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string path = "/diagnostics/" + std::to_string(i);
      if (!d[i].is_string() || kDiagnostics.count(d[i].get<std::string>()) == 0) {
        throw ConfigError(path, "expected one of evolution, picard, scattering, scaling, dependence");
      }
      if (!cfg.wants(d[i].get<std::string>())) cfg.diagnostics.push_back(d[i].get<std::string>());
    }
  }

  if (doc.contains("picard")) {
    const json& p = doc["picard"];
    only_keys(p, "/picard", {"T", "nodes", "max_iterations", "inv_q", "inv_r", "divergence_patience", "amplitudes"});
    PicardConfig& pc = cfg.picard.config;
    if (p.contains("T")) pc.T = positive(p["T"], "/picard/T");
    if (p.contains("nodes")) pc.nodes = integer(p["nodes"], "/picard/nodes", 1);
    if (p.contains("max_iterations")) pc.max_iterations = integer(p["max_iterations"], "/picard/max_iterations", 1);
    if (p.contains("inv_q")) pc.inv_q = rational(p["inv_q"], "/picard/inv_q");
    if (p.contains("inv_r")) pc.inv_r = rational(p["inv_r"], "/picard/inv_r");
    if (p.contains("divergence_patience")) {
      pc.divergence_patience = integer(p["divergence_patience"], "/picard/divergence_patience", 1);
    }
    if (p.contains("amplitudes")) cfg.picard.amplitudes = number_list(p["amplitudes"], "/picard/amplitudes");
    if (!schrodinger_admissible(cfg.grid.dim, pc.inv_q, pc.inv_r)) {
      throw ConfigError("/picard", "(inv_q, inv_r) is not an admissible pair for the grid dimension");
    }
  }
  cfg.picard.config.weight_regularization = delta;

  if (doc.contains("scattering")) {
    const json& s = doc["scattering"];
    only_keys(s, "/scattering", {"times", "dyadic_count", "horizon_tail"});
    if (s.contains("times")) {
      cfg.scattering.times = number_list(s["times"], "/scattering/times");
      if (cfg.scattering.times.size() < 2) throw ConfigError("/scattering/times", "need at least two times");
    }
    if (s.contains("dyadic_count")) cfg.scattering.dyadic_count = integer(s["dyadic_count"], "/scattering/dyadic_count", 2);
    if (s.contains("horizon_tail")) cfg.scattering.horizon_tail = positive(s["horizon_tail"], "/scattering/horizon_tail");
  }

  if (doc.contains("scaling")) {
    const json& s = doc["scaling"];
    only_keys(s, "/scaling", {"delta", "t", "max_tail"});
    if (s.contains("delta")) cfg.scaling.delta = rational(s["delta"], "/scaling/delta");
    if (s.contains("t")) cfg.scaling.t = positive(s["t"], "/scaling/t");
    if (s.contains("max_tail")) cfg.scaling.max_tail = positive(s["max_tail"], "/scaling/max_tail");
  }

  if (doc.contains("dependence")) {
    const json& s = doc["dependence"];
    only_keys(s, "/dependence", {"perturbation"});
    if (s.contains("perturbation")) cfg.dependence.perturbation = positive(s["perturbation"], "/dependence/perturbation");
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    only_keys(o, "/output", {"directory"});
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) throw ConfigError("/output/directory", "expected a string");
      cfg.output_directory = o["directory"].get<std::string>();
    }
  }
  return cfg;
}

json to_json(const SimulationConfig& c) {
  json out;
  out["grid"] = hartree::to_json(c.grid);
  out["params"] = {{"n", c.point.n},
                   {"alpha", rational_text(c.point.alpha)},
                   {"b", rational_text(c.point.b)},
                   {"p", rational_text(critical_power(c.point).p)},
                   {"epsilon", c.epsilon},
                   {"kernel", to_string(c.kernel)},
                   {"weight_regularization", c.weight_rule},
                   {"toy_mode", c.model().toy_mode()}};
  if (c.evolution.weight_regularization) out["params"]["origin_delta"] = *c.evolution.weight_regularization;
  out["initial"] = {{"kind", "gaussian"},
                    {"amplitude", c.initial.amplitude},
                    {"width", c.initial.width},
                    {"center", c.initial.center},
                    {"momentum", c.initial.momentum}};
  out["evolution"] = {{"scheme", "strang"},
                      {"dt", c.evolution.dt},
                      {"t_end", c.evolution.t_end},
                      {"snapshot_every", c.evolution.snapshot_every},
                      {"diagnostics_every", c.evolution.diagnostics_every},
                      {"write_snapshots", c.write_snapshots}};
  out["diagnostics"] = c.diagnostics;
  const PicardConfig& pc = c.picard.config;
  out["picard"] = {{"T", pc.T},
                   {"nodes", pc.nodes},
                   {"max_iterations", pc.max_iterations},
                   {"inv_q", rational_text(pc.inv_q)},
                   {"inv_r", rational_text(pc.inv_r)},
                   {"divergence_patience", pc.divergence_patience},
                   {"amplitudes", c.picard.amplitudes}};
  out["scattering"] = {{"times", c.scattering.times},
                       {"dyadic_count", c.scattering.dyadic_count},
                       {"horizon_tail", c.scattering.horizon_tail}};
  out["scaling"] = {{"delta", rational_text(c.scaling.delta)}, {"t", c.scaling.t}, {"max_tail", c.scaling.max_tail}};
  out["dependence"] = {{"perturbation", c.dependence.perturbation}};
  if (c.output_directory) out["output"] = {{"directory", *c.output_directory}};
  return out;
}

}  // namespace hartree::cli
