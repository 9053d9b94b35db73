#ifndef LWFR_LWFR_CORE_HPP
#define LWFR_LWFR_CORE_HPP

#include <array>
#include <cmath>

#include "lwfr/basis.hpp"
#include "lwfr/equations.hpp"

namespace lwfr {

/// Finite-difference stencil in the pseudo-time parameter k used for the
/// m-th temporal derivative of the flux at degree N.
struct TimeStencil {
  int size;
  std::array<int, 5> k;
  std::array<double, 5> c;
};

constexpr TimeStencil time_stencil(int N, int m) {
  const TimeStencil d1_2{2, {-1, 1, 0, 0, 0}, {-0.5, 0.5, 0, 0, 0}};
  const TimeStencil d1_4{4, {-2, -1, 1, 2, 0}, {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12, 0}};
  const TimeStencil d2_2{3, {-1, 0, 1, 0, 0}, {1, -2, 1, 0, 0}};
  const TimeStencil d2_4{5, {-2, -1, 0, 1, 2}, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}};
  const TimeStencil d3{4, {-2, -1, 1, 2, 0}, {-0.5, 1, -1, 0.5, 0}};
  const TimeStencil d4{5, {-2, -1, 0, 1, 2}, {1, -4, 6, -4, 1}};
  if (m == 1) return N <= 2 ? d1_2 : d1_4;
  if (m == 2) return N <= 3 ? d2_2 : d2_4;
  if (m == 3) return d3;
  return d4;
}

constexpr double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

inline void check_degree(int N) {
  if (N < 1 || N > 4) throw InvalidArgument("supported degrees are 1..4, got " + std::to_string(N));
}

/// Time-averaged flux data of one 1-D element.
template <int N, class Eq>
struct ElementTaf1D {
  using State = typename Eq::State;
  std::array<State, N + 1> F;  // nodal time-averaged flux
  State F_left, F_right;       // EA face fluxes
  State U_left, U_right;       // time-averaged solution traces
  State u_left, u_right;       // solution traces at t^n
};

namespace detail {

// Coefficients k^i/i! of the Taylor shift for stencil point s of derivative m.
template <int N>
struct ShiftTable {
  std::array<TimeStencil, N + 1> st{};
  std::array<std::array<std::array<double, N + 1>, 5>, N + 1> c{};
  constexpr ShiftTable() {
    for (int m = 1; m <= N; ++m) {
      st[m] = time_stencil(N, m);
      for (int s = 0; s < st[m].size; ++s) {
        double kp = 1.0;
        for (int i = 1; i <= m; ++i) {
          kp *= st[m].k[s];
          c[m][s][i] = kp / factorial(i);
        }
      }
    }
  }
};

template <int N>
inline constexpr ShiftTable<N> shift_table{};

// Taylor-shifted state u + sum_{i=1}^{m} k_s^i/i! ut_i
template <int N, class State>
inline State shifted_state(const std::array<State, N + 1>& ut, int m, int s) {
  State r = ut[0];
  for (int i = 1; i <= m; ++i) axpy(r, shift_table<N>.c[m][s][i], ut[i]);
  return r;
}

// f-stencil at one point: given all scaled derivatives ut[0..N] at that
// point, returns F = f(u) + sum_m ftilde_m/(m+1)!.
template <int N, class FluxFn, class State>
inline State ea_point_flux(const std::array<State, N + 1>& ut, FluxFn&& flux) {
  State F = flux(ut[0]);
  for (int m = 1; m <= N; ++m) {
    const TimeStencil& st = shift_table<N>.st[m];
    State ft{};
    for (int s = 0; s < st.size; ++s) axpy(ft, st.c[s], flux(shifted_state<N>(ut, m, s)));
    axpy(F, 1.0 / factorial(m + 1), ft);
  }
  return F;
}

}  // namespace detail

/// Approximate Lax-Wendroff time-averaged flux on one element (EA variant).
template <int N, class Eq>
void element_time_averaged_flux(const Eq& eq, const Operators<N>& op,
                                const typename Eq::State* u, double dt, double dx,
                                ElementTaf1D<N, Eq>& out) {
  using State = typename Eq::State;
  constexpr int n = N + 1;
  const double c = dt / dx;
  // ut[m][j] = dt^m d^m u / dt^m at node j
  std::array<std::array<State, N + 1>, n> ut{};
  std::array<State, n> ft{};
  for (int j = 0; j < n; ++j) {
    ut[j][0] = u[j];
    ft[j] = eq.flux(u[j]);
    out.F[j] = ft[j];
  }
  auto apply_d = [&](int m) {
    for (int i = 0; i < n; ++i) {
      State s{};
      for (int j = 0; j < n; ++j) axpy(s, op.D[i][j], ft[j]);
      ut[i][m] = (-c) * s;
    }
  };
  apply_d(1);
  for (int m = 1; m <= N; ++m) {
    const TimeStencil& st = detail::shift_table<N>.st[m];
    for (int j = 0; j < n; ++j) {
      State f{};
      for (int s = 0; s < st.size; ++s)
        axpy(f, st.c[s], eq.flux(detail::shifted_state<N>(ut[j], m, s)));
      ft[j] = f;
      axpy(out.F[j], 1.0 / factorial(m + 1), f);
    }
    if (m < N) apply_d(m + 1);
  }

  // face extrapolation of all derivative levels, then EA stencils at faces
  std::array<State, N + 1> ul{}, ur{};
  for (int m = 0; m <= N; ++m) {
    State a{}, b{};
    for (int j = 0; j < n; ++j) {
      axpy(a, op.left[j], ut[j][m]);
      axpy(b, op.right[j], ut[j][m]);
    }
    ul[m] = a;
    ur[m] = b;
  }
  auto flux = [&](const State& s) { return eq.flux(s); };
  out.F_left = detail::ea_point_flux<N>(ul, flux);
  out.F_right = detail::ea_point_flux<N>(ur, flux);
  out.u_left = ul[0];
  out.u_right = ur[0];
  State Ul{}, Ur{};
  for (int m = 0; m <= N; ++m) {
    axpy(Ul, 1.0 / factorial(m + 1), ul[m]);
    axpy(Ur, 1.0 / factorial(m + 1), ur[m]);
  }
  out.U_left = Ul;
  out.U_right = Ur;
}

/// Dissipation speed for the interface flux: current solution traces when
/// admissible, otherwise the adjacent nodal values.
template <class Eq>
double interface_sigma(const Eq& eq, const typename Eq::State& tl, const typename Eq::State& tr,
                       const typename Eq::State& nl, const typename Eq::State& nr) {
  if (is_admissible(eq, tl) && is_admissible(eq, tr)) return wave_speed(eq, tl, tr);
  return wave_speed(eq, nl, nr);
}

/// F^LW = (F_EA^- + F_EA^+)/2 - sigma/2 (U^+ - U^-)
template <class State>
State lw_interface_flux(const State& FL, const State& FR, const State& UL, const State& UR,
                        double sigma) {
  State r;
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = 0.5 * (FL[i] + FR[i]) - 0.5 * sigma * (UR[i] - UL[i]);
  return r;
}

/// F_h^delta evaluated at the left/right face.
template <int N, class State>
void nodal_flux_traces(const Operators<N>& op, const std::array<State, N + 1>& F, State& at0,
                       State& at1) {
  State a{}, b{};
  for (int j = 0; j <= N; ++j) {
    axpy(a, op.left[j], F[j]);
    axpy(b, op.right[j], F[j]);
  }
  at0 = a;
  at1 = b;
}

/// Residual R^H with du/dt = -R^H at each node.
template <int N, class State>
void lw_element_residual(const Operators<N>& op, const std::array<State, N + 1>& F,
                         const State& F_left_face, const State& F_right_face, double dx,
                         std::array<State, N + 1>& R) {
  State d0, d1;
  nodal_flux_traces<N>(op, F, d0, d1);
  const State jl = F_left_face - d0;
  const State jr = F_right_face - d1;
  for (int i = 0; i <= N; ++i) {
    State s{};
    for (int j = 0; j <= N; ++j) axpy(s, op.D[i][j], F[j]);
    axpy(s, op.gl[i], jl);
    axpy(s, op.gr[i], jr);
    R[i] = (1.0 / dx) * s;
  }
}

// 2-D ----------------------------------------------------------------------

/// Time-averaged flux data of one 2-D element. Nodal arrays are indexed
/// [i + (N+1) j] with i along x and j along y.
template <int N, class Eq>
struct ElementTaf2D {
  using State = typename Eq::State;
  static constexpr int n = N + 1;
  std::array<State, n * n> F, G;
  // faces: 0 = x-left, 1 = x-right, 2 = y-bottom, 3 = y-top; index by transverse node
  std::array<std::array<State, n>, 4> Fface, Uface, uface;
};

template <int N, class Eq>
void element_time_averaged_flux_2d(const Eq& eq, const Operators<N>& op,
                                   const typename Eq::State* u, double dt, double x0, double dx,
                                   double y0, double dy, ElementTaf2D<N, Eq>& out) {
  using State = typename Eq::State;
  constexpr int n = N + 1;
  constexpr int nn = n * n;
  const double cx = dt / dx, cy = dt / dy;
  std::array<double, n> xs, ys;
  for (int i = 0; i < n; ++i) {
    xs[i] = x0 + op.nodes[i] * dx;
    ys[i] = y0 + op.nodes[i] * dy;
  }
  std::array<std::array<State, N + 1>, nn> ut{};
  std::array<State, nn> ft{}, gt{};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int q = i + n * j;
      ut[q][0] = u[q];
      ft[q] = eq.flux_x(u[q], xs[i], ys[j]);
      gt[q] = eq.flux_y(u[q], xs[i], ys[j]);
      out.F[q] = ft[q];
      out.G[q] = gt[q];
    }
  auto apply_d = [&](int m) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        State sx{}, sy{};
        for (int k = 0; k < n; ++k) {
          axpy(sx, op.D[i][k], ft[k + n * j]);
          axpy(sy, op.D[j][k], gt[i + n * k]);
        }
        State r;
        for (int v = 0; v < Eq::nvar; ++v) r[v] = -cx * sx[v] - cy * sy[v];
        ut[i + n * j][m] = r;
      }
  };
  apply_d(1);
  for (int m = 1; m <= N; ++m) {
    const TimeStencil& st = detail::shift_table<N>.st[m];
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int q = i + n * j;
        State f{}, g{};
        for (int s = 0; s < st.size; ++s) {
          const State sh = detail::shifted_state<N>(ut[q], m, s);
          axpy(f, st.c[s], eq.flux_x(sh, xs[i], ys[j]));
          axpy(g, st.c[s], eq.flux_y(sh, xs[i], ys[j]));
        }
        ft[q] = f;
        gt[q] = g;
        axpy(out.F[q], 1.0 / factorial(m + 1), f);
        axpy(out.G[q], 1.0 / factorial(m + 1), g);
      }
    if (m < N) apply_d(m + 1);
  }

  // faces
  for (int t = 0; t < n; ++t) {
    std::array<State, N + 1> a{}, b{}, c{}, d{};
    for (int m = 0; m <= N; ++m) {
      State sa{}, sb{}, sc{}, sd{};
      for (int k = 0; k < n; ++k) {
        axpy(sa, op.left[k], ut[k + n * t][m]);
        axpy(sb, op.right[k], ut[k + n * t][m]);
        axpy(sc, op.left[k], ut[t + n * k][m]);
        axpy(sd, op.right[k], ut[t + n * k][m]);
      }
      a[m] = sa;
      b[m] = sb;
      c[m] = sc;
      d[m] = sd;
    }
    const double xl = x0, xr = x0 + dx, yb = y0, yt = y0 + dy;
    out.Fface[0][t] = detail::ea_point_flux<N>(a, [&](const State& s) { return eq.flux_x(s, xl, ys[t]); });
    out.Fface[1][t] = detail::ea_point_flux<N>(b, [&](const State& s) { return eq.flux_x(s, xr, ys[t]); });
    out.Fface[2][t] = detail::ea_point_flux<N>(c, [&](const State& s) { return eq.flux_y(s, xs[t], yb); });
    out.Fface[3][t] = detail::ea_point_flux<N>(d, [&](const State& s) { return eq.flux_y(s, xs[t], yt); });
    const std::array<const std::array<State, N + 1>*, 4> lv = {&a, &b, &c, &d};
    for (int f = 0; f < 4; ++f) {
      State U{};
      for (int m = 0; m <= N; ++m) axpy(U, 1.0 / factorial(m + 1), (*lv[f])[m]);
      out.Uface[f][t] = U;
      out.uface[f][t] = (*lv[f])[0];
    }
  }
}

/// 2-D high-order residual given face fluxes on the 4 faces (per transverse node).
template <int N, class State>
void lw_element_residual_2d(const Operators<N>& op, const std::array<State, (N + 1) * (N + 1)>& F,
                            const std::array<State, (N + 1) * (N + 1)>& G,
                            const std::array<std::array<State, N + 1>, 4>& face, double dx,
                            double dy, std::array<State, (N + 1) * (N + 1)>& R) {
  constexpr int n = N + 1;
  for (int q = 0; q < n * n; ++q) R[q] = State{};
  for (int j = 0; j < n; ++j) {
    State d0{}, d1{};
    for (int k = 0; k < n; ++k) {
      axpy(d0, op.left[k], F[k + n * j]);
      axpy(d1, op.right[k], F[k + n * j]);
    }
    const State jl = face[0][j] - d0, jr = face[1][j] - d1;
    for (int i = 0; i < n; ++i) {
      State s{};
      for (int k = 0; k < n; ++k) axpy(s, op.D[i][k], F[k + n * j]);
      axpy(s, op.gl[i], jl);
      axpy(s, op.gr[i], jr);
      axpy(R[i + n * j], 1.0 / dx, s);
    }
  }
  for (int i = 0; i < n; ++i) {
    State d0{}, d1{};
    for (int k = 0; k < n; ++k) {
      axpy(d0, op.left[k], G[i + n * k]);
      axpy(d1, op.right[k], G[i + n * k]);
    }
    const State jl = face[2][i] - d0, jr = face[3][i] - d1;
    for (int j = 0; j < n; ++j) {
      State s{};
      for (int k = 0; k < n; ++k) axpy(s, op.D[j][k], G[i + n * k]);
      axpy(s, op.gl[j], jl);
      axpy(s, op.gr[j], jr);
      axpy(R[i + n * j], 1.0 / dy, s);
    }
  }
}

}  // namespace lwfr

#endif
