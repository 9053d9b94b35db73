#ifndef LWFR_EXACT_RIEMANN_HPP
#define LWFR_EXACT_RIEMANN_HPP

#include <algorithm>
#include <cmath>

#include "lwfr/equations.hpp"

namespace lwfr {

/// Exact solution of the 1-D Euler Riemann problem (ideal gas).
/// States are primitive (rho, v, p). Initial data that generate vacuum give
/// two rarefactions into a vacuum region with p* = 0.
class ExactRiemann {
 public:
  ExactRiemann(const Vec<3>& left, const Vec<3>& right, double gamma)
      : wl_(left), wr_(right), g_(gamma) {
    if (!(left[0] > 0 && left[2] > 0 && right[0] > 0 && right[2] > 0))
      throw InvalidArgument("ExactRiemann: states must have positive density and pressure");
    cl_ = std::sqrt(g_ * wl_[2] / wl_[0]);
    cr_ = std::sqrt(g_ * wr_[2] / wr_[0]);
    vacuum_ = 2.0 / (g_ - 1.0) * (cl_ + cr_) <= wr_[1] - wl_[1];
    if (vacuum_) {
      ps_ = 0.0;
      us_ = 0.5 * (wl_[1] + 2.0 * cl_ / (g_ - 1.0) + wr_[1] - 2.0 * cr_ / (g_ - 1.0));
    } else {
      solve_star();
    }
  }

  double p_star() const { return ps_; }
  double u_star() const { return us_; }
  bool vacuum() const { return vacuum_; }

  /// Primitive state at similarity coordinate s = x/t.
  Vec<3> sample(double s) const {
    const double g = g_;
    if (vacuum_) return sample_vacuum(s);
    if (s <= us_) {
      const double rho = wl_[0], u = wl_[1], p = wl_[2], c = cl_;
      if (ps_ > p) {
        const double SL = u - c * std::sqrt((g + 1) / (2 * g) * ps_ / p + (g - 1) / (2 * g));
        if (s <= SL) return wl_;
        const double r = rho * ((ps_ / p + (g - 1) / (g + 1)) / ((g - 1) / (g + 1) * ps_ / p + 1));
        return {r, us_, ps_};
      }
      const double SHL = u - c;
      if (s <= SHL) return wl_;
      const double cs = c * std::pow(ps_ / p, (g - 1) / (2 * g));
      const double STL = us_ - cs;
      if (s > STL) return {rho * std::pow(ps_ / p, 1.0 / g), us_, ps_};
      const double f = 2.0 / (g + 1) + (g - 1) / ((g + 1) * c) * (u - s);
      return {rho * std::pow(f, 2.0 / (g - 1)), 2.0 / (g + 1) * (c + (g - 1) / 2 * u + s),
              p * std::pow(f, 2 * g / (g - 1))};
    }
    const double rho = wr_[0], u = wr_[1], p = wr_[2], c = cr_;
    if (ps_ > p) {
      const double SR = u + c * std::sqrt((g + 1) / (2 * g) * ps_ / p + (g - 1) / (2 * g));
      if (s >= SR) return wr_;
      const double r = rho * ((ps_ / p + (g - 1) / (g + 1)) / ((g - 1) / (g + 1) * ps_ / p + 1));
      return {r, us_, ps_};
    }
    const double SHR = u + c;
    if (s >= SHR) return wr_;
    const double cs = c * std::pow(ps_ / p, (g - 1) / (2 * g));
    const double STR = us_ + cs;
    if (s < STR) return {rho * std::pow(ps_ / p, 1.0 / g), us_, ps_};
    const double f = 2.0 / (g + 1) - (g - 1) / ((g + 1) * c) * (u - s);
    return {rho * std::pow(f, 2.0 / (g - 1)), 2.0 / (g + 1) * (-c + (g - 1) / 2 * u + s),
            p * std::pow(f, 2 * g / (g - 1))};
  }

  /// Physical flux of the exact solution at x/t = s.
  Vec<3> flux(double s) const {
    Euler1D eq(g_);
    const Vec<3> w = sample(s);
    if (w[0] == 0.0) return {0.0, 0.0, 0.0};
    return eq.flux(eq.to_cons(w));
  }

 private:
  Vec<3> sample_vacuum(double s) const {
    const double g = g_;
    const double tl = wl_[1] + 2.0 * cl_ / (g - 1), tr = wr_[1] - 2.0 * cr_ / (g - 1);
    if (s <= wl_[1] - cl_) return wl_;
    if (s < tl) {
      const double f = 2.0 / (g + 1) + (g - 1) / ((g + 1) * cl_) * (wl_[1] - s);
      return {wl_[0] * std::pow(f, 2.0 / (g - 1)), 2.0 / (g + 1) * (cl_ + (g - 1) / 2 * wl_[1] + s),
              wl_[2] * std::pow(f, 2 * g / (g - 1))};
    }
    if (s <= tr) return {0.0, s, 0.0};
    if (s < wr_[1] + cr_) {
      const double f = 2.0 / (g + 1) - (g - 1) / ((g + 1) * cr_) * (wr_[1] - s);
      return {wr_[0] * std::pow(f, 2.0 / (g - 1)), 2.0 / (g + 1) * (-cr_ + (g - 1) / 2 * wr_[1] + s),
              wr_[2] * std::pow(f, 2 * g / (g - 1))};
    }
    return wr_;
  }

  // pressure function and derivative for one side
  void side(double p, const Vec<3>& w, double c, double& f, double& df) const {
    const double g = g_;
    if (p > w[2]) {
      const double A = 2.0 / ((g + 1) * w[0]);
      const double B = (g - 1) / (g + 1) * w[2];
      const double q = std::sqrt(A / (p + B));
      f = (p - w[2]) * q;
      df = q * (1.0 - 0.5 * (p - w[2]) / (B + p));
    } else {
      const double r = p / w[2];
      f = 2.0 * c / (g - 1) * (std::pow(r, (g - 1) / (2 * g)) - 1.0);
      df = 1.0 / (w[0] * c) * std::pow(r, -(g + 1) / (2 * g));
    }
  }

  void solve_star() {
    const double g = g_;
    const double du = wr_[1] - wl_[1];
    // two-rarefaction initial guess
    const double z = (g - 1) / (2 * g);
    double p = std::pow((cl_ + cr_ - 0.5 * (g - 1) * du) /
                            (cl_ / std::pow(wl_[2], z) + cr_ / std::pow(wr_[2], z)),
                        1.0 / z);
    p = std::max(p, 1e-14 * std::min(wl_[2], wr_[2]));
    for (int it = 0; it < 200; ++it) {
      double fl, dfl, fr, dfr;
      side(p, wl_, cl_, fl, dfl);
      side(p, wr_, cr_, fr, dfr);
      double pn = p - (fl + fr + du) / (dfl + dfr);
      if (pn <= 0.0) pn = 0.1 * p;
      const double change = 2.0 * std::abs(pn - p) / (pn + p);
      p = pn;
      if (change < 1e-15) break;
    }
    double fl, dfl, fr, dfr;
    side(p, wl_, cl_, fl, dfl);
    side(p, wr_, cr_, fr, dfr);
    ps_ = p;
    us_ = 0.5 * (wl_[1] + wr_[1]) + 0.5 * (fr - fl);
  }

  Vec<3> wl_, wr_;
  double g_;
  double cl_ = 0, cr_ = 0, ps_ = 0, us_ = 0;
  bool vacuum_ = false;
};

}  // namespace lwfr

#endif
