#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lwfr/flux_correction.hpp"

using namespace lwfr;

namespace {

using S3 = Vec<3>;

FaceSide<S3> side(const S3& u, const S3& f_inner, double c) {
  FaceSide<S3> s;
  s.u = u;
  s.f_inner = f_inner;
  s.c = c;
  return s;
}

bool feasible(const Euler1D& eq, const S3& F, const S3& f_low, const FaceSide<S3>& l, const FaceSide<S3>& r) {
  S3 lowL = l.u, lowR = r.u, ul = l.u, ur = r.u;
  axpy(lowL, -l.c, f_low - l.f_inner);
  axpy(lowR, -r.c, r.f_inner - f_low);
  axpy(ul, -l.c, F - l.f_inner);
  axpy(ur, -r.c, r.f_inner - F);
  for (int k = 0; k < Euler1D::nconstraints; ++k) {
    if (!(eq.constraint(k, ul) >= 0.1 * eq.constraint(k, lowL))) return false;
    if (!(eq.constraint(k, ur) >= 0.1 * eq.constraint(k, lowR))) return false;
  }
  return true;
}

// largest theta on a 1e-3 grid for which theta F + (1 - theta) f_low is feasible
double brute_theta(const Euler1D& eq, const S3& F, const S3& f_low, const FaceSide<S3>& l, const FaceSide<S3>& r) {
  for (int k = 1000; k >= 0; --k) {
    const double t = k * 1e-3;
    if (feasible(eq, t * F + (1.0 - t) * f_low, f_low, l, r)) return t;
  }
  return -1.0;
}

}  // namespace

TEST(FluxCorrection, FullBlendReturnsLowOrderFlux) {
  Euler1D eq;
  const S3 u = eq.to_cons({1.0, 0.0, 1.0});
  const auto s = side(u, eq.flux(u), 0.5);
  const S3 Flw{5.0, -3.0, 100.0}, flow = eq.flux(u);
  const auto cf = correct_interface_flux(eq, Flw, flow, 1.0, s, s);
  EXPECT_EQ(cf.F, flow);
  EXPECT_EQ(cf.lambda, 0.0);
}

TEST(FluxCorrection, SafeFluxIsUnchanged) {
  Euler1D eq;
  const S3 u = eq.to_cons({1.0, 0.1, 1.0});
  const auto s = side(u, eq.flux(u), 0.1);
  S3 Flw = eq.flux(u);
  Flw[0] += 1e-3;
  const auto cf = correct_interface_flux(eq, Flw, eq.flux(u), 0.25, s, s);
  const S3 blend = 0.75 * Flw + 0.25 * eq.flux(u);
  EXPECT_EQ(cf.F, blend);
  EXPECT_EQ(cf.lambda, 0.75);
}

TEST(FluxCorrection, StrongShockFluxIsPulledBack) {
  Euler1D eq;
  const S3 ul = eq.to_cons({1.0, 0.0, 1000.0}), ur = eq.to_cons({1.0, 0.0, 0.01});
  const auto l = side(ul, eq.flux(ul), 0.01), r = side(ur, eq.flux(ur), 0.01);
  const S3 flow = rusanov_flux(eq, ul, ur);
  // central flux with an exaggerated energy transport drains the right cell
  S3 Flw = 0.5 * (eq.flux(ul) + eq.flux(ur));
  Flw[2] = -200.0;
  ASSERT_FALSE(feasible(eq, Flw, flow, l, r));
  const auto cf = correct_interface_flux(eq, Flw, flow, 0.0, l, r);
  EXPECT_LT(cf.lambda, 1.0);
  EXPECT_TRUE(feasible(eq, cf.F, flow, l, r));
  const double tb = brute_theta(eq, Flw, flow, l, r);
  EXPECT_LE(cf.lambda, tb + 1e-3);
  // F is the convex combination recorded by lambda
  const S3 rec = cf.lambda * Flw + (1.0 - cf.lambda) * flow;
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(cf.F[i], rec[i], 1e-12 * std::max(1.0, std::abs(rec[i])));
}

TEST(FluxCorrection, RandomFacesAgreeWithBruteForceOracle) {
  Euler1D eq;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int corrected = 0, tested = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const S3 ul = eq.to_cons({0.01 + U(rng), U(rng) - 0.5, 0.01 + U(rng)});
    const S3 ur = eq.to_cons({0.01 + U(rng), U(rng) - 0.5, 0.01 + U(rng)});
    const S3 gl = eq.to_cons({0.01 + U(rng), U(rng) - 0.5, 0.01 + U(rng)});
    const S3 gr = eq.to_cons({0.01 + U(rng), U(rng) - 0.5, 0.01 + U(rng)});
    const auto l = side(ul, rusanov_flux(eq, gl, ul), 0.05);
    const auto r = side(ur, rusanov_flux(eq, ur, gr), 0.05);
    const S3 flow = rusanov_flux(eq, ul, ur);
    S3 Flw = flow;
    for (auto& v : Flw) v += 40.0 * (U(rng) - 0.5);
    const double alpha = U(rng) < 0.3 ? 0.0 : U(rng);
    FaceSide<S3> lt = l, rt = r;
    S3 lowL = ul, lowR = ur;
    axpy(lowL, -l.c, flow - l.f_inner);
    axpy(lowR, -r.c, r.f_inner - flow);
    if (!is_admissible(eq, lowL) || !is_admissible(eq, lowR)) continue;
    ++tested;
    const auto cf = correct_interface_flux(eq, Flw, flow, alpha, lt, rt);
    EXPECT_TRUE(feasible(eq, cf.F, flow, l, r));
    EXPECT_GE(cf.lambda, 0.0);
    EXPECT_LE(cf.lambda, 1.0 - alpha);
    const S3 blend = (1.0 - alpha) * Flw + alpha * flow;
    const double tb = brute_theta(eq, blend, flow, l, r);
    ASSERT_GE(tb, 0.0);
    if (tb == 1.0 && feasible(eq, blend, flow, l, r)) EXPECT_EQ(cf.lambda, 1.0 - alpha);
    else {
      ++corrected;
      EXPECT_LE(cf.lambda, (1.0 - alpha) * (tb + 1e-3) + 1e-12);
    }
  }
  EXPECT_GT(tested, 1000);
  EXPECT_GT(corrected, 100);
}

TEST(FluxCorrection, InactiveSideIsIgnored) {
  Euler1D eq;
  const S3 u = eq.to_cons({1.0, 0.0, 1.0});
  auto l = side(u, eq.flux(u), 0.4);
  l.active = false;
  const auto r = side(u, eq.flux(u), 0.4);
  S3 Flw = eq.flux(u);
  Flw[0] = 10.0;  // would empty the left subcell only
  const auto cf = correct_interface_flux(eq, Flw, eq.flux(u), 0.0, l, r);
  EXPECT_EQ(cf.lambda, 1.0);
}

TEST(FluxCorrection, DisabledKeepsBlend) {
  Euler1D eq;
  const S3 u = eq.to_cons({1.0, 0.0, 1.0});
  const auto s = side(u, eq.flux(u), 0.4);
  S3 Flw = eq.flux(u);
  Flw[0] = 10.0;
  const auto cf = correct_interface_flux(eq, Flw, eq.flux(u), 0.0, s, s, false);
  EXPECT_EQ(cf.F, Flw);
}

TEST(FluxCorrection, InadmissibleLowOrderUpdateIsBreach) {
  Euler1D eq;
  const S3 u = eq.to_cons({1.0, 0.0, 1.0});
  const auto s = side(u, S3{-100.0, 0.0, 0.0}, 0.5);
  EXPECT_THROW(correct_interface_flux(eq, eq.flux(u), eq.flux(u), 0.5, s, s), InvariantBreach);
}

TEST(MeanAudit, DetectsMismatch) {
  const std::array<double, 3> w{0.25, 0.5, 0.25};
  const std::array<Vec<1>, 3> a{Vec<1>{1.0}, Vec<1>{2.0}, Vec<1>{3.0}};
  const std::array<Vec<1>, 3> b{Vec<1>{2.0}, Vec<1>{1.5}, Vec<1>{3.0}};
  EXPECT_NEAR(mean_update_mismatch(a.data(), b.data(), w, 3), 0.0, 1e-16);
  EXPECT_NO_THROW(mean_audit(a.data(), b.data(), w, 3, 1e-13, 0));
  const std::array<Vec<1>, 3> c{Vec<1>{1.0}, Vec<1>{2.0}, Vec<1>{3.1}};
  EXPECT_THROW(mean_audit(a.data(), c.data(), w, 3, 1e-13, 4), InvariantBreach);
}
