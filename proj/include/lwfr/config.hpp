#ifndef LWFR_CONFIG_HPP
#define LWFR_CONFIG_HPP

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lwfr/options.hpp"

namespace lwfr {

/// Run description shared by the CLI flags and the JSON config file.
/// Keys of the file match the long flag names with '-' replaced by '_'.
struct RunConfig {
  std::string case_name;
  int degree = 0;               // 0: case default
  std::vector<int> cells;       // empty: case default; one or two entries
  std::string limiter;          // empty: case default
  double cfl_safety = 0.0;      // 0: case default (0.98 unless the case overrides)
  double cfl = 0.0;             // 0: default_cfl(N)
  double dt = 0.0;              // fixed step
  double tend = -1.0;           // < 0: case default
  std::string out = "out";
  std::string format = "csv";
  int snapshots = 1;
  std::optional<double> gamma;
  IndicatorConfig indicator{};
  bool alpha_smoothing = true;
  double tvb_M = 300.0;
  bool tvb_characteristic = true;
  bool flux_correction = true;
  bool scaling_limiter = true;
  bool mean_audit = false;
  std::string nodes = "gl";
  double kx = 0.5;

  void validate() const {
    if (case_name.empty()) throw ConfigError("no case given");
    if (degree < 0 || degree > 4) throw ConfigError("degree must be in 1..4");
    if (cells.size() > 2) throw ConfigError("cells takes NX or NX,NY");
    for (int c : cells)
      if (c < 1) throw ConfigError("cell counts must be positive");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (snapshots < 1) throw ConfigError("snapshots must be >= 1");
    if (nodes != "gl" && nodes != "gll") throw ConfigError("nodes must be gl or gll");
    if (!limiter.empty()) parse_limiter(limiter);
    indicator.validate();
  }

  /// Overlay onto options already configured by the case.
  void apply(SolverOptions& o) const {
    if (!limiter.empty()) o.limiter = parse_limiter(limiter);
    if (cfl_safety > 0.0) o.cfl_safety = cfl_safety;
    o.cfl = cfl;
    o.fixed_dt = dt;
    o.indicator = indicator;
    o.alpha_smoothing = alpha_smoothing;
    o.tvb_M = tvb_M;
    o.tvb_characteristic = tvb_characteristic;
    o.flux_correction = flux_correction;
    o.scaling_limiter = scaling_limiter;
    o.mean_audit = mean_audit;
    o.family = nodes == "gll" ? NodeFamily::GaussLobatto : NodeFamily::GaussLegendre;
    o.kx = kx;
  }
};

inline void to_json(nlohmann::json& j, const IndicatorConfig& c) {
  j = {{"a", c.a}, {"c", c.c}, {"s", c.s}, {"alpha_min", c.alpha_min}, {"alpha_max", c.alpha_max}};
}

inline void from_json(const nlohmann::json& j, IndicatorConfig& c) {
  c.a = j.value("a", c.a);
  c.c = j.value("c", c.c);
  c.s = j.value("s", c.s);
  c.alpha_min = j.value("alpha_min", c.alpha_min);
  c.alpha_max = j.value("alpha_max", c.alpha_max);
}

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"case", c.case_name},
       {"degree", c.degree},
       {"cells", c.cells},
       {"limiter", c.limiter},
       {"cfl_safety", c.cfl_safety},
       {"cfl", c.cfl},
       {"dt", c.dt},
       {"tend", c.tend},
       {"out", c.out},
       {"format", c.format},
       {"snapshots", c.snapshots},
       {"indicator", c.indicator},
       {"alpha_smoothing", c.alpha_smoothing},
       {"tvb_M", c.tvb_M},
       {"tvb_characteristic", c.tvb_characteristic},
       {"flux_correction", c.flux_correction},
       {"scaling_limiter", c.scaling_limiter},
       {"mean_audit", c.mean_audit},
       {"nodes", c.nodes},
       {"kx", c.kx}};
  j["gamma"] = c.gamma ? nlohmann::json(*c.gamma) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
  static const std::vector<std::string> known = {
      "case", "degree", "cells", "limiter", "cfl_safety", "cfl", "dt", "tend", "out", "format", "snapshots",
      "indicator", "alpha_smoothing", "tvb_M", "tvb_characteristic", "flux_correction", "scaling_limiter",
      "mean_audit", "nodes", "kx", "gamma"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key '" + k + "'");
  c.case_name = j.value("case", c.case_name);
  c.degree = j.value("degree", c.degree);
  if (j.contains("cells")) {
    if (j["cells"].is_number())
      c.cells = {j["cells"].get<int>()};
    else
      c.cells = j["cells"].get<std::vector<int>>();
  }
  c.limiter = j.value("limiter", c.limiter);
  c.cfl_safety = j.value("cfl_safety", c.cfl_safety);
  c.cfl = j.value("cfl", c.cfl);
  c.dt = j.value("dt", c.dt);
  c.tend = j.value("tend", c.tend);
  c.out = j.value("out", c.out);
  c.format = j.value("format", c.format);
  c.snapshots = j.value("snapshots", c.snapshots);
  if (j.contains("indicator")) c.indicator = j["indicator"].get<IndicatorConfig>();
  c.alpha_smoothing = j.value("alpha_smoothing", c.alpha_smoothing);
  c.tvb_M = j.value("tvb_M", c.tvb_M);
  c.tvb_characteristic = j.value("tvb_characteristic", c.tvb_characteristic);
  c.flux_correction = j.value("flux_correction", c.flux_correction);
  c.scaling_limiter = j.value("scaling_limiter", c.scaling_limiter);
  c.mean_audit = j.value("mean_audit", c.mean_audit);
  c.nodes = j.value("nodes", c.nodes);
  c.kx = j.value("kx", c.kx);
  if (j.contains("gamma") && !j["gamma"].is_null()) c.gamma = j["gamma"].get<double>();
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return j.get<RunConfig>();
}

}  // namespace lwfr

#endif
