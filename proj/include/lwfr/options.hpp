#ifndef LWFR_OPTIONS_HPP
#define LWFR_OPTIONS_HPP

#include <string>
#include <vector>

#include "lwfr/basis.hpp"
#include "lwfr/limiters.hpp"

namespace lwfr {

enum class LimiterKind { BlendFO, BlendMH, TVB, None };

inline LimiterKind parse_limiter(const std::string& s) {
  if (s == "blend-fo") return LimiterKind::BlendFO;
  if (s == "blend-mh") return LimiterKind::BlendMH;
  if (s == "tvb") return LimiterKind::TVB;
  if (s == "none") return LimiterKind::None;
  throw ConfigError("unknown limiter '" + s + "' (expected blend-fo, blend-mh, tvb, none)");
}

inline std::string to_string(LimiterKind k) {
  switch (k) {
    case LimiterKind::BlendFO: return "blend-fo";
    case LimiterKind::BlendMH: return "blend-mh";
    case LimiterKind::TVB: return "tvb";
    case LimiterKind::None: return "none";
  }
  return "?";
}

inline bool is_blending(LimiterKind k) { return k == LimiterKind::BlendFO || k == LimiterKind::BlendMH; }

/// CFL(N) for the LW scheme with D2 dissipation.
inline double default_cfl(int N) {
  switch (N) {
    case 1: return 0.259;
    case 2: return 0.170;
    case 3: return 0.103;
    case 4: return 0.069;
  }
  throw InvalidArgument("default_cfl: no CFL number for degree " + std::to_string(N));
}

struct SolverOptions {
  LimiterKind limiter = LimiterKind::BlendMH;
  IndicatorConfig indicator{};
  bool alpha_smoothing = true;
  double cfl_safety = 0.98;
  double cfl = 0.0;  // 0 selects default_cfl(N)
  double fixed_dt = 0.0;
  bool flux_correction = true;
  bool scaling_limiter = true;
  double tvb_M = 300.0;
  bool tvb_characteristic = true;
  bool mean_audit = false;
  double audit_tol = 1e-13;
  int max_retries = 3;
  bool dt_include_ghosts = false;
  bool cell_average_ic = false;
  double kx = 0.5;  // 2-D convex split, ky = 1 - kx
  NodeFamily family = NodeFamily::GaussLegendre;

  void validate() const {
    indicator.validate();
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0) && fixed_dt <= 0.0)
      throw ConfigError("cfl safety factor must lie in (0, 1]");
    if (cfl < 0.0) throw ConfigError("cfl must be non-negative");
    if (!(kx > 0.0 && kx < 1.0)) throw ConfigError("kx must lie in (0, 1)");
    if (max_retries < 0) throw ConfigError("max_retries must be non-negative");
    if (tvb_M < 0.0) throw ConfigError("TVB parameter M must be non-negative");
  }
};

struct StepStats {
  long steps = 0;
  long retries = 0;
  long scaling_events = 0;
  long corrected_faces = 0;
  double max_audit_mismatch = 0.0;
  std::vector<std::string> retry_log;
};

struct AlphaSample {
  double t;
  double fraction;  // fraction of elements with alpha > 0
  double max_alpha;
};

}  // namespace lwfr

#endif
