#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lwfr/subcell.hpp"

using namespace lwfr;

namespace {

// faces and points of nel elements tiled by the GL subcells of degree N
void tiling(int N, int nel, double L, std::vector<double>& faces, std::vector<double>& points) {
  const Basis b = build_basis(N);
  const double dx = L / nel;
  faces = {0.0};
  points.clear();
  for (int e = 0; e < nel; ++e) {
    const auto g = build_subcell_grid(b, dx, e * dx);
    for (int j = 0; j <= N; ++j) {
      faces.push_back(g.faces[j + 1]);
      points.push_back(g.points[j]);
    }
  }
  faces.back() = L;
}

double sine(double x) { return std::sin(2.0 * std::numbers::pi * x); }

// subcell values are point values at the solution points
double mh_advection_error(int nel, double beta) {
  std::vector<double> faces, points;
  tiling(4, nel, 1.0, faces, points);
  const int n = static_cast<int>(points.size());
  std::vector<Vec<1>> u(n);
  double hmin = 1.0;
  for (int j = 0; j < n; ++j) {
    u[j] = {sine(points[j])};
    hmin = std::min(hmin, faces[j + 1] - faces[j]);
  }
  const Advection1D eq{1.0};
  const double T = 0.5;
  const int steps = static_cast<int>(std::ceil(T / (0.4 * hmin)));
  const double dt = T / steps;
  for (int s = 0; s < steps; ++s) mh_periodic_step(eq, faces, points, u, dt, beta);
  double err = 0.0;
  for (int j = 0; j < n; ++j) {
    const double h = faces[j + 1] - faces[j];
    err += h * std::abs(u[j][0] - sine(points[j] - T));
  }
  return err;
}

}  // namespace

TEST(SubcellGrid, FacesFollowQuadratureWeights) {
  const Basis b = build_basis(3);
  const auto g = build_subcell_grid(b, 2.0, 1.0);
  ASSERT_EQ(g.faces.size(), 5u);
  EXPECT_DOUBLE_EQ(g.faces.front(), 1.0);
  EXPECT_DOUBLE_EQ(g.faces.back(), 3.0);
  for (int j = 0; j <= 3; ++j) {
    EXPECT_NEAR(g.faces[j + 1] - g.faces[j], 2.0 * b.weights[j], 1e-14);
    EXPECT_GT(g.points[j], g.faces[j]);
    EXPECT_LT(g.points[j], g.faces[j + 1]);
    EXPECT_NEAR(g.mu_minus[j] + g.mu_plus[j], 1.0, 1e-14);
  }
  EXPECT_THROW(build_subcell_grid(b, 0.0), InvalidArgument);
}

TEST(MhSlope, ExactForLinearDataOnNonUniformGrid) {
  const Vec<1> um{1.0 - 0.3 * 2.0}, u0{1.0}, up{1.0 + 0.7 * 2.0};
  EXPECT_NEAR(mh_slope(um, u0, up, 0.3, 0.7, 1.0)[0], 2.0, 1e-13);
  EXPECT_NEAR(mh_slope(um, u0, up, 0.3, 0.7, 2.0)[0], 2.0, 1e-13);
}

TEST(MhSlope, ZeroAtExtremaAndBoundedByBetaOneSided) {
  EXPECT_EQ(mh_slope(Vec<1>{0.0}, Vec<1>{1.0}, Vec<1>{0.5}, 1.0, 1.0, 2.0)[0], 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0), H(0.1, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const Vec<1> a{U(rng)}, b{U(rng)}, c{U(rng)};
    const double h1 = H(rng), h2 = H(rng), beta = 1.0 + U(rng) * 0.5 + 0.5;
    const double d = mh_slope(a, b, c, h1, h2, beta)[0];
    const double dm = (b[0] - a[0]) / h1, dp = (c[0] - b[0]) / h2;
    if (dm * dp <= 0.0) EXPECT_EQ(d, 0.0);
    EXPECT_LE(std::abs(d), beta * std::min(std::abs(dm), std::abs(dp)) + 1e-14);
  }
}

TEST(SlopeLimit, TracesKeepTenthOfCentralConstraint) {
  Euler1D eq;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double dl = -0.02, dr = 0.03;
  int scaled = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto u = eq.to_cons({0.01 + U(rng), U(rng) - 0.5, 0.01 + U(rng)});
    const Vec<3> delta{50.0 * (U(rng) - 0.5), 50.0 * (U(rng) - 0.5), 100.0 * (U(rng) - 0.5)};
    const auto d = slope_limit_admissible(eq, u, delta, dl, dr);
    if (d != delta) ++scaled;
    for (double s : {dl, dr}) {
      Vec<3> us = u;
      axpy(us, 2.0 * s, d);
      for (int c = 0; c < Euler1D::nconstraints; ++c)
        EXPECT_GE(eq.constraint(c, us), 0.1 * eq.constraint(c, u) * (1.0 - 1e-12));
    }
  }
  EXPECT_GT(scaled, 100);
}

TEST(SlopeLimit, AdmissibleSlopeIsUntouched) {
  Euler1D eq;
  const auto u = eq.to_cons({1.0, 0.2, 1.0});
  const Vec<3> delta{0.1, 0.0, 0.1};
  EXPECT_EQ(slope_limit_admissible(eq, u, delta, -0.1, 0.1), delta);
}

TEST(PeriodicSchemes, PreserveConstantStates) {
  std::vector<double> faces, points;
  tiling(3, 5, 1.0, faces, points);
  Euler1D eq;
  const auto c = eq.to_cons({0.7, 0.4, 1.3});
  std::vector<Vec<3>> u(points.size(), c), v(points.size(), c);
  mh_periodic_step(eq, faces, points, u, 1e-3, 1.5);
  fo_periodic_step(eq, faces, v, 1e-3);
  for (std::size_t j = 0; j < u.size(); ++j)
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(u[j][i], c[i], 1e-13);
      EXPECT_NEAR(v[j][i], c[i], 1e-13);
    }
}

TEST(PeriodicSchemes, ConserveTotals) {
  std::vector<double> faces, points;
  tiling(4, 6, 1.0, faces, points);
  Euler1D eq;
  std::vector<Vec<3>> u(points.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = eq.to_cons({points[j] < 0.5 ? 1.0 : 0.125, 0.0, points[j] < 0.5 ? 1.0 : 0.1});
  auto total = [&] {
    Vec<3> s{};
    for (std::size_t j = 0; j < u.size(); ++j) axpy(s, faces[j + 1] - faces[j], u[j]);
    return s;
  };
  const auto t0 = total();
  for (int k = 0; k < 20; ++k) mh_periodic_step(eq, faces, points, u, 2e-4, 2.0);
  const auto t1 = total();
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(t1[i], t0[i], 1e-14);
}

TEST(PeriodicSchemes, MusclHancockIsSecondOrderOnSubcellTiling) {
  const double e1 = mh_advection_error(20, 2.0);
  const double e2 = mh_advection_error(40, 2.0);
  EXPECT_GE(std::log2(e1 / e2), 1.8);
}

TEST(CflDiagnostic, SmallStepSatisfiedLargeStepNot) {
  Euler1D eq;
  const Basis b = build_basis(4);
  const auto g = build_subcell_grid(b, 1.0);
  const int n = 5;
  std::vector<Vec<3>> u(n), rm(n), rp(n);
  for (int j = 0; j < n; ++j) {
    u[j] = eq.to_cons({1.0 + 0.1 * j, 0.0, 1.0});
    rm[j] = rp[j] = u[j];
  }
  auto report = [&](double dt) {
    return mh_cfl_diagnostic(eq, u, rm, rp, rm, rp, g.widths, g.mu_minus, g.mu_plus, dt, true);
  };
  EXPECT_TRUE(report(0.0).satisfied);
  EXPECT_TRUE(report(1e-4).satisfied);
  EXPECT_FALSE(report(1.0).satisfied);
  EXPECT_NEAR(report(2e-4).max_ratio, 2.0 * report(1e-4).max_ratio, 1e-12);
}
