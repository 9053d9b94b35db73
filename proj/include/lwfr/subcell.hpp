#ifndef LWFR_SUBCELL_HPP
#define LWFR_SUBCELL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "lwfr/basis.hpp"
#include "lwfr/equations.hpp"

namespace lwfr {

/// Subcell partition of one element: subcell j has width w_j dx and contains
/// the solution point x_j.
struct SubcellGrid {
  std::vector<double> faces;    // N+2 positions, faces[0] = left edge
  std::vector<double> points;   // N+1 solution points
  std::vector<double> widths;   // N+1
  std::vector<double> mu_minus; // (x_{j+1/2} - x_j) / width_j
  std::vector<double> mu_plus;  // (x_j - x_{j-1/2}) / width_j
};

inline SubcellGrid build_subcell_grid(const Basis& b, double dx, double x0 = 0.0) {
  if (!(dx > 0.0)) throw InvalidArgument("build_subcell_grid: dx must be positive");
  SubcellGrid g;
  const int n = b.size();
  g.faces.resize(n + 1);
  g.faces[0] = x0;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    acc += b.weights[j];
    g.faces[j + 1] = x0 + acc * dx;
  }
  g.faces[n] = x0 + dx;
  for (int j = 0; j < n; ++j) {
    const double xj = x0 + b.nodes[j] * dx;
    const double w = b.weights[j] * dx;
    g.points.push_back(xj);
    g.widths.push_back(w);
    g.mu_minus.push_back((g.faces[j + 1] - xj) / w);
    g.mu_plus.push_back((xj - g.faces[j]) / w);
  }
  return g;
}

/// Remark-2 style coefficient: 1/2 min_j (xi_j - sum_{k<j} w_k) w_j.
inline double mh_remark2_coefficient(const Basis& b) {
  double best = std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (int j = 0; j < b.size(); ++j) {
    best = std::min(best, (b.nodes[j] - acc) * b.weights[j]);
    acc += b.weights[j];
  }
  return 0.5 * best;
}

/// delta = minmod(beta D+, Dc, beta D-) componentwise on a non-uniform grid
/// with h1 = x_j - x_{j-1}, h2 = x_{j+1} - x_j.
template <class State>
State mh_slope(const State& um, const State& u0, const State& up, double h1, double h2,
               double beta) {
  State d;
  const double a = -h2 / (h1 * (h1 + h2));
  const double b = (h2 - h1) / (h1 * h2);
  const double c = h1 / (h2 * (h1 + h2));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double dp = (up[i] - u0[i]) / h2;
    const double dm = (u0[i] - um[i]) / h1;
    const double dc = a * um[i] + b * u0[i] + c * up[i];
    const double x = beta * dp, z = beta * dm;
    if (x > 0.0 && dc > 0.0 && z > 0.0) d[i] = std::min({x, dc, z});
    else if (x < 0.0 && dc < 0.0 && z < 0.0) d[i] = std::max({x, dc, z});
    else d[i] = 0.0;
  }
  return d;
}

/// Scale the slope so that u + 2 dl delta and u + 2 dr delta satisfy
/// p_k >= p_k(u)/10 for every constraint, in order. dl = x_{j-1/2} - x_j < 0,
/// dr = x_{j+1/2} - x_j > 0. Only violating faces contribute to theta.
template <class Eq>
typename Eq::State slope_limit_admissible(const Eq& eq, const typename Eq::State& u,
                                          typename Eq::State delta, double dl, double dr) {
  using State = typename Eq::State;
  for (int k = 0; k < Eq::nconstraints; ++k) {
    const double pu = eq.constraint(k, u);
    const double eps = 0.1 * pu;
    double theta = 1.0;
    for (double d : {dl, dr}) {
      State us = u;
      axpy(us, 2.0 * d, delta);
      const double ps = eq.constraint(k, us);
      if (!(ps >= eps)) {
        const double t = std::isfinite(ps) ? std::min(std::abs((eps - pu) / (ps - pu)), 1.0) : 0.0;
        theta = std::min(theta, t);
      }
    }
    if (theta < 1.0) {
      auto ok = [&](double t) {
        for (double d : {dl, dr}) {
          State us = u;
          axpy(us, 2.0 * d, t * delta);
          if (!(eq.constraint(k, us) >= eps)) return false;
        }
        return true;
      };
      for (int it = 0; it < 60 && theta > 0.0 && !ok(theta); ++it) theta *= 0.999;
      if (!ok(theta)) theta = 0.0;
      delta = theta * delta;
    }
  }
  return delta;
}

/// Reconstructed and half-step evolved traces of the subcells of one element.
template <int N, class State>
struct MhTraces {
  std::array<State, N + 1> rec_minus, rec_plus;  // u^{n,-}, u^{n,+}
  std::array<State, N + 1> minus, plus;          // u^{n+1/2,-}, u^{n+1/2,+}
};

/// 1-D MUSCL-Hancock traces in one element. ul, ur are the nearest nodal
/// values of the neighbouring elements at distances hl = x_0 - x_left and
/// hr = x_right - x_N.
template <int N, class Eq>
void mh_element_traces(const Eq& eq, const Operators<N>& op, const typename Eq::State* u,
                       const typename Eq::State& ul, const typename Eq::State& ur, double hl,
                       double hr, double dx, double dt, double beta,
                       MhTraces<N, typename Eq::State>& out) {
  using State = typename Eq::State;
  double face = 0.0;
  for (int j = 0; j <= N; ++j) {
    const double xl = face;
    face += op.weights[j];
    const double xr = (j == N) ? 1.0 : face;
    const State& um = j == 0 ? ul : u[j - 1];
    const State& up = j == N ? ur : u[j + 1];
    const double h1 = j == 0 ? hl : (op.nodes[j] - op.nodes[j - 1]) * dx;
    const double h2 = j == N ? hr : (op.nodes[j + 1] - op.nodes[j]) * dx;
    const double dl = (xl - op.nodes[j]) * dx, dr = (xr - op.nodes[j]) * dx;
    State d = mh_slope(um, u[j], up, h1, h2, beta);
    d = slope_limit_admissible(eq, u[j], d, dl, dr);
    State rm = u[j], rp = u[j];
    axpy(rm, dl, d);
    axpy(rp, dr, d);
    const State ut = (-1.0 / (op.weights[j] * dx)) * (eq.flux(rp) - eq.flux(rm));
    out.rec_minus[j] = rm;
    out.rec_plus[j] = rp;
    State em = rm, ep = rp;
    axpy(em, 0.5 * dt, ut);
    axpy(ep, 0.5 * dt, ut);
    out.minus[j] = em;
    out.plus[j] = ep;
  }
}

/// Traces of a single boundary subcell (j = 0 or j = N) of an element.
template <int N, class Eq>
void mh_single_subcell(const Eq& eq, const Operators<N>& op, const typename Eq::State& um,
                       const typename Eq::State& u0, const typename Eq::State& up, double h1,
                       double h2, int j, double dx, double dt, double beta,
                       typename Eq::State& evolved_minus, typename Eq::State& evolved_plus) {
  using State = typename Eq::State;
  double xl = 0.0;
  for (int k = 0; k < j; ++k) xl += op.weights[k];
  const double xr = j == N ? 1.0 : xl + op.weights[j];
  const double dl = (xl - op.nodes[j]) * dx, dr = (xr - op.nodes[j]) * dx;
  State d = mh_slope(um, u0, up, h1, h2, beta);
  d = slope_limit_admissible(eq, u0, d, dl, dr);
  State rm = u0, rp = u0;
  axpy(rm, dl, d);
  axpy(rp, dr, d);
  const State ut = (-1.0 / (op.weights[j] * dx)) * (eq.flux(rp) - eq.flux(rm));
  evolved_minus = rm;
  evolved_plus = rp;
  axpy(evolved_minus, 0.5 * dt, ut);
  axpy(evolved_plus, 0.5 * dt, ut);
}

// CFL diagnostic ------------------------------------------------------------

struct CflReport {
  bool satisfied = true;
  double max_ratio = 0.0;
};

namespace detail {
template <class Eq>
double safe_sigma(const Eq& eq, const typename Eq::State& a, const typename Eq::State& b) {
  if (!is_admissible(eq, a) || !is_admissible(eq, b)) return std::numeric_limits<double>::infinity();
  return wave_speed(eq, a, b);
}
}  // namespace detail

/// Evaluates the three families of MUSCL-Hancock admissibility CFL
/// conditions on a periodic or bounded sequence of subcells. Neighbour
/// conditions at the ends of the sequence are skipped unless periodic.
template <class Eq>
CflReport mh_cfl_diagnostic(const Eq& eq, const std::vector<typename Eq::State>& u,
                            const std::vector<typename Eq::State>& rec_minus,
                            const std::vector<typename Eq::State>& rec_plus,
                            const std::vector<typename Eq::State>& ev_minus,
                            const std::vector<typename Eq::State>& ev_plus,
                            const std::vector<double>& widths, const std::vector<double>& mu_minus,
                            const std::vector<double>& mu_plus, double dt, bool periodic) {
  using State = typename Eq::State;
  CflReport r;
  if (dt == 0.0) return r;
  const int n = static_cast<int>(u.size());
  auto upd = [&](double coeff, const State& a, const State& b) {
    r.max_ratio = std::max(r.max_ratio, coeff * detail::safe_sigma(eq, a, b));
  };
  for (int j = 0; j < n; ++j) {
    const double W = widths[j], mm = mu_minus[j], mp = mu_plus[j];
    const State d = rec_plus[j] - rec_minus[j];
    // u*± = u + 2 (x_{j±1/2} - x_j) delta ; x_{j+1/2}-x_j = mm W, x_{j-1/2}-x_j = -mp W
    State sp = u[j], sm = u[j];
    axpy(sp, 2.0 * mm, d);
    axpy(sm, -2.0 * mp, d);
    for (const State* s : {&sm, &sp}) {
      upd(dt / (mm * W), rec_minus[j], *s);
      upd(dt / (mp * W), *s, rec_plus[j]);
    }
    State star = 2.0 * u[j];
    axpy(star, -mm, ev_minus[j]);
    axpy(star, -mp, ev_plus[j]);
    upd(dt / (mm * W / 2), ev_minus[j], star);
    upd(dt / (W / 2), star, ev_plus[j]);
    upd(dt / (W / 2), ev_minus[j], star);
    upd(dt / (mp * W / 2), star, ev_plus[j]);
    const int jl = j - 1, jr = j + 1;
    if (jl >= 0 || periodic) upd(dt / (mm * W / 2), ev_plus[(jl + n) % n], ev_minus[j]);
    if (jr < n || periodic) upd(dt / (mp * W / 2), ev_plus[j], ev_minus[jr % n]);
    upd(dt / (mm * W), u[j], rec_minus[j]);
    upd(dt / (mp * W), rec_plus[j], u[j]);
  }
  r.satisfied = r.max_ratio <= 1.0;
  return r;
}

// Standalone MUSCL-Hancock finite volume scheme on a periodic 1-D grid -------

/// One step of MUSCL-Hancock on a periodic, possibly non-cell-centred grid.
/// faces has size n+1 (faces[n] - faces[0] is the period), points has size n.
template <class Eq>
void mh_periodic_step(const Eq& eq, const std::vector<double>& faces,
                      const std::vector<double>& points, std::vector<typename Eq::State>& u,
                      double dt, double beta) {
  using State = typename Eq::State;
  const int n = static_cast<int>(u.size());
  const double L = faces[n] - faces[0];
  std::vector<State> em(n), ep(n);
  for (int j = 0; j < n; ++j) {
    const int jl = (j - 1 + n) % n, jr = (j + 1) % n;
    const double h1 = j == 0 ? points[0] - (points[n - 1] - L) : points[j] - points[j - 1];
    const double h2 = j == n - 1 ? points[0] + L - points[n - 1] : points[j + 1] - points[j];
    const double dl = faces[j] - points[j], dr = faces[j + 1] - points[j];
    State d = mh_slope(u[jl], u[j], u[jr], h1, h2, beta);
    d = slope_limit_admissible(eq, u[j], d, dl, dr);
    State rm = u[j], rp = u[j];
    axpy(rm, dl, d);
    axpy(rp, dr, d);
    const State ut = (-1.0 / (faces[j + 1] - faces[j])) * (eq.flux(rp) - eq.flux(rm));
    em[j] = rm;
    ep[j] = rp;
    axpy(em[j], 0.5 * dt, ut);
    axpy(ep[j], 0.5 * dt, ut);
  }
  std::vector<State> f(n + 1);
  for (int j = 0; j <= n; ++j) {
    const int l = (j - 1 + n) % n, r = j % n;
    f[j] = rusanov_flux(eq, ep[l], em[r]);
  }
  for (int j = 0; j < n; ++j) axpy(u[j], -dt / (faces[j + 1] - faces[j]), f[j + 1] - f[j]);
}

/// One step of the first-order Rusanov finite volume scheme on a periodic grid.
template <class Eq>
void fo_periodic_step(const Eq& eq, const std::vector<double>& faces,
                      std::vector<typename Eq::State>& u, double dt) {
  using State = typename Eq::State;
  const int n = static_cast<int>(u.size());
  std::vector<State> f(n + 1);
  for (int j = 0; j <= n; ++j) f[j] = rusanov_flux(eq, u[(j - 1 + n) % n], u[j % n]);
  for (int j = 0; j < n; ++j) axpy(u[j], -dt / (faces[j + 1] - faces[j]), f[j + 1] - f[j]);
}

}  // namespace lwfr

#endif
