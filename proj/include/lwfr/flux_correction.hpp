#ifndef LWFR_FLUX_CORRECTION_HPP
#define LWFR_FLUX_CORRECTION_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "lwfr/equations.hpp"

namespace lwfr {

/// Data of one side of a face needed by the correction: the nodal value
/// next to the face, the stored inner low-order flux of that element and
/// the coefficient c = dt / (k w dx) of the boundary subcell.
template <class State>
struct FaceSide {
  bool active = true;
  State u{};
  State f_inner{};
  double c = 0.0;
};

template <class State>
struct CorrectedFlux {
  State F{};
  double lambda = 1.0;  // F = lambda F^LW + (1 - lambda) f_low
};

namespace detail {

// tilde update of the left element's last subcell / right element's first subcell
template <class State>
State tilde_left(const FaceSide<State>& s, const State& F) {
  State r = s.u;
  axpy(r, -s.c, F - s.f_inner);
  return r;
}

template <class State>
State tilde_right(const FaceSide<State>& s, const State& F) {
  State r = s.u;
  axpy(r, -s.c, s.f_inner - F);
  return r;
}

}  // namespace detail

/// Blends F^LW with f_low using alpha and then limits the result along the
/// segment towards f_low so that the boundary-subcell updates on both sides
/// satisfy p_k >= p_k(low update)/10 for every constraint, in order.
template <class Eq>
CorrectedFlux<typename Eq::State> correct_interface_flux(
    const Eq& eq, const typename Eq::State& F_lw, const typename Eq::State& f_low, double alpha,
    const FaceSide<typename Eq::State>& left, const FaceSide<typename Eq::State>& right,
    bool enabled = true) {
  using State = typename Eq::State;
  CorrectedFlux<State> out;
  out.lambda = 1.0 - alpha;
  out.F = (1.0 - alpha) * F_lw + alpha * f_low;
  if (!enabled || Eq::nconstraints == 0 || alpha >= 1.0) return out;

  const State lowL = detail::tilde_left(left, f_low);
  const State lowR = detail::tilde_right(right, f_low);
  if ((left.active && !is_admissible(eq, lowL)) || (right.active && !is_admissible(eq, lowR)))
    throw InvariantBreach("flux correction: low-order update is inadmissible");

  for (int k = 0; k < Eq::nconstraints; ++k) {
    const double epsL = 0.1 * eq.constraint(k, lowL);
    const double epsR = 0.1 * eq.constraint(k, lowR);
    auto feasible = [&](const State& F) {
      if (left.active && !(eq.constraint(k, detail::tilde_left(left, F)) >= epsL)) return false;
      if (right.active && !(eq.constraint(k, detail::tilde_right(right, F)) >= epsR)) return false;
      return true;
    };
    double theta = 1.0;
    auto consider = [&](bool active, const State& ut, const State& ul, double eps) {
      if (!active) return;
      const double p = eq.constraint(k, ut);
      if (p >= eps) return;
      const double pl = eq.constraint(k, ul);
      const double den = pl - p;
      double t = 0.0;
      if (std::isfinite(p) && den != 0.0) t = std::min(std::abs((eps - p) / den), 1.0);
      else if (den == 0.0) t = 1.0;
      theta = std::min(theta, t);
    };
    consider(left.active, detail::tilde_left(left, out.F), lowL, epsL);
    consider(right.active, detail::tilde_right(right, out.F), lowR, epsR);
    if (theta < 1.0) {
      auto blend = [&](double t) { return t * out.F + (1.0 - t) * f_low; };
      for (int it = 0; it < 60 && theta > 0.0 && !feasible(blend(theta)); ++it) theta *= 0.999;
      if (!feasible(blend(theta))) theta = 0.0;
      out.F = theta == 0.0 ? f_low : blend(theta);
      out.lambda *= theta;
    }
  }
  return out;
}

/// Largest |mean(high update) - mean(low update)| over the components of one
/// element, relative to max(1, sum_j w_j |high_j|, sum_j w_j |low_j|).
template <class State, class Weights>
double mean_update_mismatch(const State* high, const State* low, const Weights& w, int n) {
  State mh{}, ml{}, ah{}, al{};
  for (int j = 0; j < n; ++j) {
    axpy(mh, w[j], high[j]);
    axpy(ml, w[j], low[j]);
    for (std::size_t i = 0; i < mh.size(); ++i) {
      ah[i] += w[j] * std::abs(high[j][i]);
      al[i] += w[j] * std::abs(low[j][i]);
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < mh.size(); ++i)
    worst = std::max(worst, std::abs(mh[i] - ml[i]) / std::max({1.0, ah[i], al[i]}));
  return worst;
}

/// Throws InvariantBreach when the element means of the high and low order
/// updates differ by more than tol.
template <class State, class Weights>
void mean_audit(const State* high, const State* low, const Weights& w, int n, double tol,
                long element) {
  const double d = mean_update_mismatch(high, low, w, n);
  if (!(d <= tol))
    throw InvariantBreach("mean audit failed at element " + std::to_string(element) +
                          ": mismatch " + std::to_string(d));
}

}  // namespace lwfr

#endif
