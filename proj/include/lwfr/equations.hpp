#ifndef LWFR_EQUATIONS_HPP
#define LWFR_EQUATIONS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "lwfr/types.hpp"

namespace lwfr {

// 1-D systems expose flux(u), max_speed(u), constraints(u), indicator(u).
// 2-D systems expose flux_x/flux_y(u, x, y) and speed_x/speed_y(u, x, y);
// the position arguments are only used by variable-coefficient advection.

template <class Eq, std::size_t K>
bool admissible_values(const std::array<double, K>& p) {
  for (double v : p)
    if (!(v > 0.0)) return false;
  return true;
}

template <class Eq>
bool is_admissible(const Eq& eq, const typename Eq::State& u) {
  if (!all_finite(u)) return false;
  return admissible_values<Eq>(eq.constraints(u));
}

/// u_t + a u_x = 0
struct Advection1D {
  static constexpr int nvar = 1;
  static constexpr int nconstraints = 0;
  static constexpr int dim = 1;
  using State = Vec<1>;

  double a = 1.0;

  State flux(const State& u) const { return {a * u[0]}; }
  double max_speed(const State&) const { return std::abs(a); }
  std::array<double, 0> constraints(const State&) const { return {}; }
  double constraint(int, const State&) const { return 1.0; }
  double indicator(const State& u) const { return u[0]; }
  std::string name() const { return "advection1d"; }
};

/// u_t + (u^2/2)_x = 0
struct Burgers1D {
  static constexpr int nvar = 1;
  static constexpr int nconstraints = 0;
  static constexpr int dim = 1;
  using State = Vec<1>;

  State flux(const State& u) const { return {0.5 * u[0] * u[0]}; }
  double max_speed(const State& u) const { return std::abs(u[0]); }
  std::array<double, 0> constraints(const State&) const { return {}; }
  double constraint(int, const State&) const { return 1.0; }
  double indicator(const State& u) const { return u[0]; }
  std::string name() const { return "burgers1d"; }
};

struct Euler1D {
  static constexpr int nvar = 3;
  static constexpr int nconstraints = 2;
  static constexpr int dim = 1;
  using State = Vec<3>;

  double gamma = 1.4;

  Euler1D() = default;
  explicit Euler1D(double g) : gamma(g) {
    if (!(g > 1.0)) throw InvalidArgument("Euler1D: gamma must exceed 1");
  }

  double pressure(const State& u) const {
    return (gamma - 1.0) * (u[2] - 0.5 * u[1] * u[1] / u[0]);
  }

  State flux(const State& u) const {
    const double v = u[1] / u[0];
    const double p = (gamma - 1.0) * (u[2] - 0.5 * u[1] * v);
    return {u[1], p + u[1] * v, (u[2] + p) * v};
  }

  /// |v| + c; throws on inadmissible states.
  double max_speed(const State& u) const {
    const double p = pressure(u);
    if (!(u[0] > 0.0) || !(p > 0.0))
      throw AdmissibilityError("Euler1D::max_speed: inadmissible state (rho=" +
                               std::to_string(u[0]) + ", p=" + std::to_string(p) + ")");
    return std::abs(u[1] / u[0]) + std::sqrt(gamma * p / u[0]);
  }

  std::array<double, 2> constraints(const State& u) const { return {u[0], pressure(u)}; }
  double constraint(int k, const State& u) const { return k == 0 ? u[0] : pressure(u); }
  double indicator(const State& u) const { return u[0] * pressure(u); }

  /// (rho, v, p)
  State to_prim(const State& u) const {
    if (u[0] == 0.0 || !all_finite(u))
      throw NonFiniteState("Euler1D::to_prim: zero or non-finite density");
    return {u[0], u[1] / u[0], pressure(u)};
  }

  State to_cons(const State& w) const {
    return {w[0], w[0] * w[1], w[2] / (gamma - 1.0) + 0.5 * w[0] * w[1] * w[1]};
  }

  /// Right (columns) and left (rows) eigenvectors of the flux Jacobian at u.
  void eigenvectors(const State& u, std::array<State, 3>& R, std::array<State, 3>& L) const {
    const double rho = u[0];
    const double v = u[1] / rho;
    const double p = pressure(u);
    const double c = std::sqrt(gamma * p / rho);
    const double H = (u[2] + p) / rho;
    const double g1 = gamma - 1.0;
    // R[i] is the i-th row of the right-eigenvector matrix
    R[0] = {1.0, 1.0, 1.0};
    R[1] = {v - c, v, v + c};
    R[2] = {H - v * c, 0.5 * v * v, H + v * c};
    const double b1 = g1 / (c * c);
    const double b2 = 0.5 * v * v * b1;
    L[0] = {0.5 * (b2 + v / c), -0.5 * (b1 * v + 1.0 / c), 0.5 * b1};
    L[1] = {1.0 - b2, b1 * v, -b1};
    L[2] = {0.5 * (b2 - v / c), -0.5 * (b1 * v - 1.0 / c), 0.5 * b1};
  }

  std::string name() const { return "euler1d"; }
};

/// u_t + div(a(x,y) u) = 0 with a constant or solid-body rotation velocity.
struct Advection2D {
  static constexpr int nvar = 1;
  static constexpr int nconstraints = 0;
  static constexpr int dim = 2;
  using State = Vec<1>;

  double ax = 1.0, ay = 1.0;
  bool rotation = false;

  std::array<double, 2> velocity(double x, double y) const {
    if (rotation) return {0.5 - y, x - 0.5};
    return {ax, ay};
  }

  State flux_x(const State& u, double x, double y) const { return {velocity(x, y)[0] * u[0]}; }
  State flux_y(const State& u, double x, double y) const { return {velocity(x, y)[1] * u[0]}; }
  double speed_x(const State&, double x, double y) const { return std::abs(velocity(x, y)[0]); }
  double speed_y(const State&, double x, double y) const { return std::abs(velocity(x, y)[1]); }
  std::array<double, 0> constraints(const State&) const { return {}; }
  double constraint(int, const State&) const { return 1.0; }
  double indicator(const State& u) const { return u[0]; }
  std::string name() const { return "advection2d"; }
};

struct Euler2D {
  static constexpr int nvar = 4;
  static constexpr int nconstraints = 2;
  static constexpr int dim = 2;
  using State = Vec<4>;

  double gamma = 1.4;

  Euler2D() = default;
  explicit Euler2D(double g) : gamma(g) {
    if (!(g > 1.0)) throw InvalidArgument("Euler2D: gamma must exceed 1");
  }

  double pressure(const State& u) const {
    return (gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]);
  }

  State flux_x(const State& u, double = 0.0, double = 0.0) const {
    const double r = 1.0 / u[0];
    const double vx = u[1] * r;
    const double p = (gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) * r);
    return {u[1], u[1] * vx + p, u[2] * vx, (u[3] + p) * vx};
  }

  State flux_y(const State& u, double = 0.0, double = 0.0) const {
    const double r = 1.0 / u[0];
    const double vy = u[2] * r;
    const double p = (gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) * r);
    return {u[2], u[1] * vy, u[2] * vy + p, (u[3] + p) * vy};
  }

  double sound_speed_checked(const State& u) const {
    const double p = pressure(u);
    if (!(u[0] > 0.0) || !(p > 0.0))
      throw AdmissibilityError("Euler2D: inadmissible state (rho=" + std::to_string(u[0]) +
                               ", p=" + std::to_string(p) + ")");
    return std::sqrt(gamma * p / u[0]);
  }

  double speed_x(const State& u, double = 0.0, double = 0.0) const {
    return std::abs(u[1] / u[0]) + sound_speed_checked(u);
  }
  double speed_y(const State& u, double = 0.0, double = 0.0) const {
    return std::abs(u[2] / u[0]) + sound_speed_checked(u);
  }

  std::array<double, 2> constraints(const State& u) const { return {u[0], pressure(u)}; }
  double constraint(int k, const State& u) const { return k == 0 ? u[0] : pressure(u); }
  double indicator(const State& u) const { return u[0] * pressure(u); }

  /// (rho, u, v, p)
  State to_prim(const State& u) const {
    if (u[0] == 0.0 || !all_finite(u))
      throw NonFiniteState("Euler2D::to_prim: zero or non-finite density");
    return {u[0], u[1] / u[0], u[2] / u[0], pressure(u)};
  }

  State to_cons(const State& w) const {
    return {w[0], w[0] * w[1], w[0] * w[2],
            w[3] / (gamma - 1.0) + 0.5 * w[0] * (w[1] * w[1] + w[2] * w[2])};
  }

  std::string name() const { return "euler2d"; }
};

// Wave speed estimates and numerical fluxes ---------------------------------

/// sigma(uL, uR) = max(|v|+c at uL, at uR).
template <class Eq>
double wave_speed(const Eq& eq, const typename Eq::State& uL, const typename Eq::State& uR) {
  return std::max(eq.max_speed(uL), eq.max_speed(uR));
}

template <class Eq>
typename Eq::State rusanov_flux(const Eq& eq, const typename Eq::State& uL,
                                const typename Eq::State& uR) {
  const double s = wave_speed(eq, uL, uR);
  const auto fl = eq.flux(uL);
  const auto fr = eq.flux(uR);
  typename Eq::State r;
  for (int i = 0; i < Eq::nvar; ++i) r[i] = 0.5 * (fl[i] + fr[i]) - 0.5 * s * (uR[i] - uL[i]);
  return r;
}

/// Rusanov flux in direction dir (0 = x, 1 = y) for a 2-D system at (x, y).
template <class Eq>
typename Eq::State rusanov_flux_2d(const Eq& eq, int dir, const typename Eq::State& uL,
                                   const typename Eq::State& uR, double x, double y) {
  double s;
  typename Eq::State fl, fr;
  if (dir == 0) {
    s = std::max(eq.speed_x(uL, x, y), eq.speed_x(uR, x, y));
    fl = eq.flux_x(uL, x, y);
    fr = eq.flux_x(uR, x, y);
  } else {
    s = std::max(eq.speed_y(uL, x, y), eq.speed_y(uR, x, y));
    fl = eq.flux_y(uL, x, y);
    fr = eq.flux_y(uR, x, y);
  }
  typename Eq::State r;
  for (int i = 0; i < Eq::nvar; ++i) r[i] = 0.5 * (fl[i] + fr[i]) - 0.5 * s * (uR[i] - uL[i]);
  return r;
}

namespace detail {

inline void check_admissible_euler(double rho, double p, const char* where) {
  if (!(rho > 0.0) || !(p > 0.0))
    throw AdmissibilityError(std::string(where) + ": inadmissible state");
}

// HLLC in the normal direction for a state given by (rho, un, ut, p) with
// conserved layout handled by the callers below.
struct HllcSide {
  double rho, un, ut, p, E;
};

inline std::array<double, 4> hllc_core(const HllcSide& L, const HllcSide& R, double gamma) {
  const double cL = std::sqrt(gamma * L.p / L.rho);
  const double cR = std::sqrt(gamma * R.p / R.rho);
  // Roe averages for the Einfeldt bounds
  const double sl = std::sqrt(L.rho), sr = std::sqrt(R.rho);
  const double HL = (L.E + L.p) / L.rho, HR = (R.E + R.p) / R.rho;
  const double un_roe = (sl * L.un + sr * R.un) / (sl + sr);
  const double ut_roe = (sl * L.ut + sr * R.ut) / (sl + sr);
  const double H_roe = (sl * HL + sr * HR) / (sl + sr);
  const double c2_roe = (gamma - 1.0) * (H_roe - 0.5 * (un_roe * un_roe + ut_roe * ut_roe));
  const double c_roe = std::sqrt(std::max(c2_roe, 0.0));
  const double SL = std::min(L.un - cL, un_roe - c_roe);
  const double SR = std::max(R.un + cR, un_roe + c_roe);

  auto phys = [](const HllcSide& s) -> std::array<double, 4> {
    return {s.rho * s.un, s.rho * s.un * s.un + s.p, s.rho * s.un * s.ut, (s.E + s.p) * s.un};
  };
  if (SL >= 0.0) return phys(L);
  if (SR <= 0.0) return phys(R);

  const double SM = (R.p - L.p + L.rho * L.un * (SL - L.un) - R.rho * R.un * (SR - R.un)) /
                    (L.rho * (SL - L.un) - R.rho * (SR - R.un));
  auto star = [&](const HllcSide& s, double S) -> std::array<double, 4> {
    const double fac = s.rho * (S - s.un) / (S - SM);
    const double Estar = fac * (s.E / s.rho + (SM - s.un) * (SM + s.p / (s.rho * (S - s.un))));
    return {fac, fac * SM, fac * s.ut, Estar};
  };
  if (SM >= 0.0) {
    const auto us = star(L, SL);
    if (!(us[0] > 0.0)) throw AdmissibilityError("hllc_flux: negative star density");
    auto f = phys(L);
    const std::array<double, 4> u = {L.rho, L.rho * L.un, L.rho * L.ut, L.E};
    for (int i = 0; i < 4; ++i) f[i] += SL * (us[i] - u[i]);
    return f;
  }
  const auto us = star(R, SR);
  if (!(us[0] > 0.0)) throw AdmissibilityError("hllc_flux: negative star density");
  auto f = phys(R);
  const std::array<double, 4> u = {R.rho, R.rho * R.un, R.rho * R.ut, R.E};
  for (int i = 0; i < 4; ++i) f[i] += SR * (us[i] - u[i]);
  return f;
}

}  // namespace detail

/// HLLC flux for 1-D Euler with Einfeldt wave-speed bounds.
inline Euler1D::State hllc_flux(const Euler1D& eq, const Euler1D::State& uL, const Euler1D::State& uR) {
  const double pL = eq.pressure(uL), pR = eq.pressure(uR);
  detail::check_admissible_euler(uL[0], pL, "hllc_flux");
  detail::check_admissible_euler(uR[0], pR, "hllc_flux");
  const detail::HllcSide L{uL[0], uL[1] / uL[0], 0.0, pL, uL[2]};
  const detail::HllcSide R{uR[0], uR[1] / uR[0], 0.0, pR, uR[2]};
  const auto f = detail::hllc_core(L, R, eq.gamma);
  return {f[0], f[1], f[3]};
}

/// HLLC flux for 2-D Euler in direction dir.
inline Euler2D::State hllc_flux(const Euler2D& eq, int dir, const Euler2D::State& uL,
                                const Euler2D::State& uR) {
  const double pL = eq.pressure(uL), pR = eq.pressure(uR);
  detail::check_admissible_euler(uL[0], pL, "hllc_flux");
  detail::check_admissible_euler(uR[0], pR, "hllc_flux");
  const int n = dir == 0 ? 1 : 2, t = dir == 0 ? 2 : 1;
  const detail::HllcSide L{uL[0], uL[n] / uL[0], uL[t] / uL[0], pL, uL[3]};
  const detail::HllcSide R{uR[0], uR[n] / uR[0], uR[t] / uR[0], pR, uR[3]};
  const auto f = detail::hllc_core(L, R, eq.gamma);
  Euler2D::State r;
  r[0] = f[0];
  r[n] = f[1];
  r[t] = f[2];
  r[3] = f[3];
  return r;
}

}  // namespace lwfr

#endif
