#ifndef LWFR_LIMITERS_HPP
#define LWFR_LIMITERS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "lwfr/basis.hpp"
#include "lwfr/equations.hpp"

namespace lwfr {

// Smoothness indicator ------------------------------------------------------

struct IndicatorConfig {
  double a = 0.5;
  double c = 1.8;
  double s = 9.21024;
  double alpha_min = 0.001;
  double alpha_max = 1.0;

  void validate() const {
    if (!(alpha_min > 0.0 && alpha_min < alpha_max && alpha_max <= 1.0))
      throw ConfigError("indicator: require 0 < alpha_min < alpha_max <= 1");
    if (!(s > 0.0)) throw ConfigError("indicator: sharpness s must be positive");
    if (!(a > 0.0)) throw ConfigError("indicator: amplitude a must be positive");
  }
};

inline double indicator_threshold(int N, const IndicatorConfig& cfg) {
  return cfg.a * std::pow(10.0, -cfg.c * std::pow(N + 1.0, 0.25));
}

inline double logistic_alpha(double E, double T, double s) {
  return 1.0 / (1.0 + std::exp(-(s / T) * (E - T)));
}

/// max(q_{N-1}^2 / sum_{j<=N-1} q_j^2, q_N^2 / sum_{j<=N} q_j^2); a ratio with a
/// zero denominator contributes 0.
inline double highest_mode_energy(const double* qhat, int N) {
  double s1 = 0.0;
  for (int j = 0; j <= N - 1; ++j) s1 += qhat[j] * qhat[j];
  const double s2 = s1 + qhat[N] * qhat[N];
  const double e1 = s1 > 0.0 ? qhat[N - 1] * qhat[N - 1] / s1 : 0.0;
  const double e2 = s2 > 0.0 ? qhat[N] * qhat[N] / s2 : 0.0;
  return std::max(e1, e2);
}

/// Raw (unclipped) blending coefficient from nodal values of q on one element.
template <int N>
double smoothness_alpha_1d(const std::array<double, N + 1>& q, const Operators<N>& op,
                           const IndicatorConfig& cfg) {
  std::array<double, N + 1> qh{};
  for (int k = 0; k <= N; ++k) {
    double s = 0.0;
    for (int j = 0; j <= N; ++j) s += op.vandermonde[k][j] * q[j];
    qh[k] = s;
  }
  const double E = highest_mode_energy(qh.data(), N);
  if (!std::isfinite(E)) return 1.0;
  return logistic_alpha(E, indicator_threshold(N, cfg), cfg.s);
}

/// 2-D variant: tensor Legendre coefficients; the energy fractions use the
/// modes outside the (N-1)^2 and (N-2)^2 index boxes, which reduces to the
/// 1-D formula for data varying in one direction only.
template <int N>
double smoothness_alpha_2d(const std::array<double, (N + 1) * (N + 1)>& q, const Operators<N>& op,
                           const IndicatorConfig& cfg) {
  constexpr int n = N + 1;
  std::array<double, n * n> tmp{}, qh{};
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += op.vandermonde[k][i] * q[i + n * j];
      tmp[k + n * j] = s;
    }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += op.vandermonde[l][j] * tmp[k + n * j];
      qh[k + n * l] = s;
    }
  double total = 0.0, clip1 = 0.0, clip2 = 0.0;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      const double e = qh[k + n * l] * qh[k + n * l];
      total += e;
      if (k < N && l < N) clip1 += e;
      if (k < N - 1 && l < N - 1) clip2 += e;
    }
  const double e1 = total > 0.0 ? (total - clip1) / total : 0.0;
  const double e2 = clip1 > 0.0 ? (clip1 - clip2) / clip1 : 0.0;
  const double E = std::max(e1, e2);
  if (!std::isfinite(E)) return 1.0;
  return logistic_alpha(E, indicator_threshold(N, cfg), cfg.s);
}

inline double clip_alpha(double a, const IndicatorConfig& cfg) {
  if (!std::isfinite(a)) return cfg.alpha_max;
  if (a < cfg.alpha_min) a = 0.0;
  else if (a > 1.0 - cfg.alpha_min) a = 1.0;
  return std::min(a, cfg.alpha_max);
}

/// One two-buffer pass alpha_e <- max(alpha_e, max_{e'} alpha_{e'}/2) over
/// face neighbours given as an adjacency list (-1 entries are skipped).
inline std::vector<double> smooth_alpha(const std::vector<double>& alpha,
                                        const std::vector<std::array<int, 4>>& neighbours) {
  std::vector<double> out(alpha.size());
  for (std::size_t e = 0; e < alpha.size(); ++e) {
    double a = alpha[e];
    for (int nb : neighbours[e])
      if (nb >= 0) a = std::max(a, 0.5 * alpha[nb]);
    out[e] = a;
  }
  return out;
}

// TVB limiter -------------------------------------------------------------

inline double minmod(double a, double b, double c) {
  if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
  if (a < 0.0 && b < 0.0 && c < 0.0) return std::max({a, b, c});
  return 0.0;
}

/// TVB-modified minmod: returns a when |a| <= M dx^2.
inline double minmod_tvb(double a, double b, double c, double Mdx2) {
  if (std::abs(a) <= Mdx2) return a;
  return minmod(a, b, c);
}

template <class Eq>
concept HasEigenvectors = requires(const Eq& eq, const typename Eq::State& u,
                                   std::array<typename Eq::State, Eq::nvar>& R) {
  eq.eigenvectors(u, R, R);
};

/// TVB limiting of a 1-D solution. u holds (nel+2)*(N+1) nodal states
/// including one ghost element on each side, filled at the current time.
template <int N, class Eq>
void tvb_limit_1d(const Eq& eq, const Operators<N>& op, std::vector<typename Eq::State>& u,
                  int nel, const std::vector<double>& dx, double M, bool characteristic) {
  using State = typename Eq::State;
  constexpr int n = N + 1;
  constexpr int nv = Eq::nvar;
  std::vector<State> mean(nel + 2);
  for (int e = 0; e < nel + 2; ++e) {
    State m{};
    for (int j = 0; j < n; ++j) axpy(m, op.weights[j], u[e * n + j]);
    mean[e] = m;
  }
  for (int e = 1; e <= nel; ++e) {
    State ul{}, ur{};
    for (int j = 0; j < n; ++j) {
      axpy(ul, op.left[j], u[e * n + j]);
      axpy(ur, op.right[j], u[e * n + j]);
    }
    State dm = mean[e] - ul, dp = ur - mean[e];
    State dbm = mean[e] - mean[e - 1], dbp = mean[e + 1] - mean[e];
    std::array<State, nv> R{}, L{};
    bool use_char = false;
    if constexpr (HasEigenvectors<Eq>) {
      if (characteristic && is_admissible(eq, mean[e])) {
        eq.eigenvectors(mean[e], R, L);
        use_char = true;
      }
    }
    auto project = [&](const State& v) {
      if (!use_char) return v;
      State w{};
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b) w[a] += L[a][b] * v[b];
      return w;
    };
    const State cm = project(dm), cp = project(dp), cbm = project(dbm), cbp = project(dbp);
    const double Mdx2 = M * dx[e - 1] * dx[e - 1];
    State lm, lp;
    bool changed = false;
    for (int a = 0; a < nv; ++a) {
      lm[a] = minmod_tvb(cm[a], cbm[a], cbp[a], Mdx2);
      lp[a] = minmod_tvb(cp[a], cbm[a], cbp[a], Mdx2);
      if (lm[a] != cm[a] || lp[a] != cp[a]) changed = true;
    }
    if (!changed) continue;
    State slope_c = 0.5 * (lm + lp);
    State slope = slope_c;
    if (use_char) {
      slope = State{};
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b) slope[a] += R[a][b] * slope_c[b];
    }
    for (int j = 0; j < n; ++j) {
      State v = mean[e];
      axpy(v, 2.0 * op.nodes[j] - 1.0, slope);
      u[e * n + j] = v;
    }
  }
}

// Scaling limiter ---------------------------------------------------------

/// Contract nodal values towards the element mean so that p_k >= eps_k with
/// eps_k = min(1e-10, p_k(mean)). Returns true when anything changed.
template <class Eq, std::size_t n>
bool scaling_limit_element(const Eq& eq, std::array<typename Eq::State, n>& u,
                           const std::array<double, n>& weights) {
  using State = typename Eq::State;
  if constexpr (Eq::nconstraints == 0) {
    return false;
  } else {
    State mean{};
    for (std::size_t j = 0; j < n; ++j) axpy(mean, weights[j], u[j]);
    const auto pm = eq.constraints(mean);
    if (!all_finite(mean) || !admissible_values<Eq>(pm))
      throw AdmissibilityError("scaling limiter: inadmissible element mean (p1=" +
                               std::to_string(pm[0]) + ", p2=" +
                               std::to_string(Eq::nconstraints > 1 ? pm[Eq::nconstraints - 1] : 0.0) + ")");
    bool changed = false;
    for (int k = 0; k < Eq::nconstraints; ++k) {
      const double pbar = eq.constraint(k, mean);
      const double eps = std::min(1e-10, pbar);
      double theta = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double pj = eq.constraint(k, u[j]);
        if (!(pj >= eps)) {
          const double t = std::isfinite(pj) ? std::abs((eps - pbar) / (pj - pbar)) : 0.0;
          theta = std::min(theta, t);
        }
      }
      if (theta < 1.0) {
        theta *= 1.0 - 8.0 * std::numeric_limits<double>::epsilon();
        for (std::size_t j = 0; j < n; ++j) {
          State v = mean;
          axpy(v, theta, u[j] - mean);
          u[j] = v;
        }
        changed = true;
      }
    }
    return changed;
  }
}

}  // namespace lwfr

#endif
