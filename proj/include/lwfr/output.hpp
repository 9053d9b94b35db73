#ifndef LWFR_OUTPUT_HPP
#define LWFR_OUTPUT_HPP

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lwfr/solver1d.hpp"
#include "lwfr/solver2d.hpp"

namespace lwfr {

inline constexpr int kSchemaVersion = 1;

// Column names of conserved and derived primitive variables.
inline std::vector<std::string> conserved_names(const Advection1D&) { return {"u"}; }
inline std::vector<std::string> conserved_names(const Burgers1D&) { return {"u"}; }
inline std::vector<std::string> conserved_names(const Advection2D&) { return {"u"}; }
inline std::vector<std::string> conserved_names(const Euler1D&) { return {"rho", "rho_v", "E"}; }
inline std::vector<std::string> conserved_names(const Euler2D&) { return {"rho", "rho_u", "rho_v", "E"}; }

inline std::vector<std::string> primitive_names(const Advection1D&) { return {}; }
inline std::vector<std::string> primitive_names(const Burgers1D&) { return {}; }
inline std::vector<std::string> primitive_names(const Advection2D&) { return {}; }
inline std::vector<std::string> primitive_names(const Euler1D&) { return {"v", "p"}; }
inline std::vector<std::string> primitive_names(const Euler2D&) { return {"u", "v", "p"}; }

template <class Eq>
std::vector<double> primitive_values(const Eq& eq, const typename Eq::State& u) {
  if constexpr (requires { eq.to_prim(u); }) {
    const auto w = eq.to_prim(u);
    return std::vector<double>(w.begin() + 1, w.end());
  } else {
    return {};
  }
}

template <class Eq>
std::vector<std::string> snapshot_columns(const Eq& eq) {
  std::vector<std::string> c;
  if constexpr (Eq::dim == 1) {
    c = {"x", "element"};
  } else {
    c = {"x", "y", "ex", "ey"};
  }
  for (auto& s : conserved_names(eq)) c.push_back(s);
  for (auto& s : primitive_names(eq)) c.push_back(s);
  c.push_back("alpha");
  return c;
}

/// One row per solution point.
template <int N, class Eq>
std::vector<std::vector<double>> snapshot_rows(const Solver1D<N, Eq>& s) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(s.elements()) * (N + 1));
  for (int e = 0; e < s.elements(); ++e)
    for (int j = 0; j <= N; ++j) {
      const auto& u = s.node(e, j);
      std::vector<double> r{s.node_x(e, j), static_cast<double>(e)};
      r.insert(r.end(), u.begin(), u.end());
      for (double p : primitive_values(s.equation(), u)) r.push_back(p);
      r.push_back(s.alpha(e));
      rows.push_back(std::move(r));
    }
  return rows;
}

template <int N, class Eq>
std::vector<std::vector<double>> snapshot_rows(const Solver2D<N, Eq>& s) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(s.nx()) * s.ny() * (N + 1) * (N + 1));
  for (int ey = 0; ey < s.ny(); ++ey)
    for (int ex = 0; ex < s.nx(); ++ex)
      for (int j = 0; j <= N; ++j)
        for (int i = 0; i <= N; ++i) {
          const auto& u = s.node(ex, ey, i, j);
          std::vector<double> r{s.node_x(ex, i), s.node_y(ey, j), static_cast<double>(ex), static_cast<double>(ey)};
          r.insert(r.end(), u.begin(), u.end());
          for (double p : primitive_values(s.equation(), u)) r.push_back(p);
          r.push_back(s.alpha(ex, ey));
          rows.push_back(std::move(r));
        }
  return rows;
}

/// CSV with two '#' comment lines (schema, case, time) ahead of the header.
template <class S>
void write_snapshot_csv(std::ostream& os, const S& s, const std::string& case_name) {
  const auto cols = snapshot_columns(s.equation());
  os << "# lwfr-snapshot schema_version=" << kSchemaVersion << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", s.time());
  os << "# case=" << case_name << " degree=" << s.basis().degree << " t=" << buf << "\n";
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << "\n";
  for (const auto& r : snapshot_rows(s)) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", r[k]);
      os << (k ? "," : "") << buf;
    }
    os << "\n";
  }
}

template <class S>
nlohmann::json snapshot_json(const S& s, const std::string& case_name) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "lwfr-snapshot"},
          {"case", case_name},
          {"degree", s.basis().degree},
          {"time", s.time()},
          {"columns", snapshot_columns(s.equation())},
          {"rows", snapshot_rows(s)}};
}

/// Snapshot file name carrying the time stamp also written inside the file.
inline std::string snapshot_name(const std::string& case_name, int index, double t, const std::string& ext) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s_%04d_t%.6e.%s", case_name.c_str(), index, t, ext.c_str());
  return buf;
}

/// Alpha history thinned to at most max_entries samples (always keeping the last).
inline nlohmann::json alpha_history_json(const std::vector<AlphaSample>& h, std::size_t max_entries = 1000) {
  nlohmann::json arr = nlohmann::json::array();
  if (h.empty()) return arr;
  const std::size_t stride = std::max<std::size_t>(1, (h.size() + max_entries - 1) / max_entries);
  for (std::size_t k = 0; k < h.size(); k += stride)
    arr.push_back({{"t", h[k].t}, {"fraction", h[k].fraction}, {"max_alpha", h[k].max_alpha}});
  if ((h.size() - 1) % stride != 0)
    arr.push_back({{"t", h.back().t}, {"fraction", h.back().fraction}, {"max_alpha", h.back().max_alpha}});
  return arr;
}

template <class State>
nlohmann::json conservation_json(const State& initial, const State& final_, const State& inflow) {
  std::vector<double> resid(initial.size()), rel(initial.size());
  for (std::size_t k = 0; k < initial.size(); ++k) {
    resid[k] = final_[k] - initial[k] - inflow[k];
    rel[k] = std::abs(resid[k]) / std::max(1.0, std::abs(initial[k]));
  }
  return {{"initial", initial}, {"final", final_}, {"boundary_inflow", inflow}, {"residual", resid},
          {"relative_residual", rel}};
}

template <class S>
nlohmann::json run_manifest(const S& s, const nlohmann::json& config, const typename S::State& initial_totals,
                            double wall_seconds, const std::vector<std::string>& snapshots) {
  const auto& st = s.stats();
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "lwfr-manifest";
  j["config"] = config;
  j["equation"] = s.equation().name();
  j["limiter"] = to_string(s.options().limiter);
  j["time"] = s.time();
  j["steps"] = st.steps;
  j["retries"] = st.retries;
  j["retry_log"] = st.retry_log;
  j["scaling_events"] = st.scaling_events;
  j["corrected_faces"] = st.corrected_faces;
  j["conservation"] = conservation_json(initial_totals, s.totals(), s.boundary_inflow());
  const auto& h = s.alpha_history();
  double peak = 0.0, peak_fraction = 0.0;
  for (const auto& a : h) {
    peak = std::max(peak, a.max_alpha);
    peak_fraction = std::max(peak_fraction, a.fraction);
  }
  j["alpha"] = {{"max", peak},
                {"max_fraction", peak_fraction},
                {"final_fraction", h.empty() ? 0.0 : h.back().fraction},
                {"history", alpha_history_json(h)}};
  j["timings"] = {{"wall_seconds", wall_seconds},
                  {"seconds_per_step", st.steps > 0 ? wall_seconds / st.steps : 0.0}};
  j["snapshots"] = snapshots;
  return j;
}

/// Checks a manifest for the keys and version this writer produces.
inline void validate_manifest(const nlohmann::json& j) {
  if (!j.is_object() || j.value("kind", "") != "lwfr-manifest") throw ConfigError("not an lwfr manifest");
  if (j.value("schema_version", -1) != kSchemaVersion)
    throw ConfigError("manifest schema version mismatch");
  for (const char* k : {"config", "time", "steps", "conservation", "alpha", "timings", "snapshots"})
    if (!j.contains(k)) throw ConfigError(std::string("manifest lacks key '") + k + "'");
}

}  // namespace lwfr

#endif
