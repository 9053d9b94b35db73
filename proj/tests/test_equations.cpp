#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lwfr/equations.hpp"
#include "lwfr/exact_riemann.hpp"

using namespace lwfr;

TEST(Euler1D, PrimitiveRoundTrip) {
  Euler1D eq;
  const Vec<3> w{1.3, -0.7, 2.1};
  const auto back = eq.to_prim(eq.to_cons(w));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(back[i], w[i], 1e-14);
}

TEST(Euler1D, FluxOfRestStateIsPressure) {
  Euler1D eq;
  const auto f = eq.flux(eq.to_cons({2.0, 0.0, 3.0}));
  EXPECT_DOUBLE_EQ(f[0], 0.0);
  EXPECT_DOUBLE_EQ(f[1], 3.0);
  EXPECT_DOUBLE_EQ(f[2], 0.0);
}

TEST(Euler1D, InadmissibleSpeedThrows) {
  Euler1D eq;
  EXPECT_THROW(eq.max_speed({1.0, 0.0, -1.0}), AdmissibilityError);
  EXPECT_THROW(Euler1D(1.0), InvalidArgument);
}

TEST(Euler1D, EigenvectorsAreInverse) {
  Euler1D eq;
  std::array<Vec<3>, 3> R, L;
  eq.eigenvectors(eq.to_cons({1.2, 0.4, 0.9}), R, L);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += L[a][k] * R[k][b];
      EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-13);
    }
}

TEST(NumericalFlux, ConsistentOnEqualStates) {
  Euler1D eq;
  const auto u = eq.to_cons({0.8, 0.3, 1.7});
  const auto f = eq.flux(u);
  const auto r = rusanov_flux(eq, u, u);
  const auto h = hllc_flux(eq, u, u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(r[i], f[i], 1e-14);
    EXPECT_NEAR(h[i], f[i], 1e-13);
  }
  Euler2D e2;
  const auto v = e2.to_cons({0.8, 0.3, -0.2, 1.7});
  for (int dir = 0; dir < 2; ++dir) {
    const auto f2 = dir == 0 ? e2.flux_x(v) : e2.flux_y(v);
    const auto r2 = rusanov_flux_2d(e2, dir, v, v, 0.0, 0.0);
    const auto h2 = hllc_flux(e2, dir, v, v);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(r2[i], f2[i], 1e-14);
      EXPECT_NEAR(h2[i], f2[i], 1e-13);
    }
  }
}

TEST(NumericalFlux, HllcResolvesStationaryContact) {
  Euler1D eq;
  const auto l = eq.to_cons({1.0, 0.0, 1.0}), r = eq.to_cons({0.1, 0.0, 1.0});
  const auto h = hllc_flux(eq, l, r);
  EXPECT_NEAR(h[0], 0.0, 1e-14);
  EXPECT_NEAR(h[1], 1.0, 1e-14);
  EXPECT_NEAR(h[2], 0.0, 1e-14);
}

TEST(Euler2D, ReducesToEuler1DForXFlow) {
  Euler1D e1;
  Euler2D e2;
  const auto u1 = e1.to_cons({1.1, 0.6, 0.9});
  const auto u2 = e2.to_cons({1.1, 0.6, 0.0, 0.9});
  const auto f1 = e1.flux(u1);
  const auto f2 = e2.flux_x(u2);
  EXPECT_NEAR(f1[0], f2[0], 1e-15);
  EXPECT_NEAR(f1[1], f2[1], 1e-15);
  EXPECT_NEAR(f1[2], f2[3], 1e-15);
  EXPECT_NEAR(f2[2], 0.0, 1e-15);
}

TEST(Advection2D, RotationVelocity) {
  Advection2D eq;
  eq.rotation = true;
  const auto v = eq.velocity(0.25, 0.75);
  EXPECT_DOUBLE_EQ(v[0], -0.25);
  EXPECT_DOUBLE_EQ(v[1], -0.25);
}

TEST(ExactRiemann, SodStarState) {
  ExactRiemann rp({1.0, 0.0, 1.0}, {0.125, 0.0, 0.1}, 1.4);
  EXPECT_NEAR(rp.p_star(), 0.30313, 1e-5);
  EXPECT_NEAR(rp.u_star(), 0.92745, 1e-5);
  const auto w = rp.sample(-10.0);
  EXPECT_DOUBLE_EQ(w[0], 1.0);
}

TEST(ExactRiemann, SymmetricDoubleRarefaction) {
  ExactRiemann rp({1.0, -0.5, 0.4}, {1.0, 0.5, 0.4}, 1.4);
  EXPECT_FALSE(rp.vacuum());
  EXPECT_NEAR(rp.u_star(), 0.0, 1e-12);
  EXPECT_GT(rp.p_star(), 0.0);
  EXPECT_LT(rp.p_star(), 0.4);
}

// (7, +-1, 0.2) sits on the vacuum threshold: 2 (cL + cR) / (gamma - 1) = du
TEST(ExactRiemann, VacuumGeneratingRarefactions) {
  ExactRiemann rp({7.0, -1.0, 0.2}, {7.0, 1.0, 0.2}, 1.4);
  EXPECT_EQ(rp.p_star(), 0.0);
  EXPECT_NEAR(rp.u_star(), 0.0, 1e-12);
  EXPECT_EQ(rp.sample(-2.0)[0], 7.0);
  EXPECT_NEAR(rp.sample(0.0)[0], 0.0, 1e-12);
  const auto w = rp.sample(-0.5);
  EXPECT_GT(w[0], 0.0);
  EXPECT_LT(w[0], 7.0);
  EXPECT_NEAR(rp.flux(0.0)[1], 0.0, 1e-12);
  ExactRiemann wide({1.0, -7.0, 1.0}, {1.0, 7.0, 1.0}, 1.4);
  EXPECT_TRUE(wide.vacuum());
  EXPECT_EQ(wide.sample(0.0)[0], 0.0);
}

TEST(Admissibility, ConstraintsOfRandomStates) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Euler1D eq;
  for (int k = 0; k < 1000; ++k) {
    const Vec<3> u{d(rng), d(rng), d(rng)};
    const auto c = eq.constraints(u);
    EXPECT_EQ(is_admissible(eq, u), c[0] > 0.0 && c[1] > 0.0);
  }
}
