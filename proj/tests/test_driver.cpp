#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lwfr/cases.hpp"

using namespace lwfr;

namespace {

using B3 = Boundary<Vec<3>>;

Solver1D<4, Euler1D> sod_solver(int cells, SolverOptions o = {}) {
  const auto c = cases::sod({});
  c.configure(o);
  Solver1D<4, Euler1D> s(c.eq, c.mesh(cells), c.left, c.right, o);
  s.set_initial([&](double x, int e) { return c.initial(x, e, s.mesh()); });
  return s;
}

template <class S>
bool same_state(const S& a, const S& b) {
  for (int e = 0; e < a.elements(); ++e)
    for (int j = 0; j < S::n; ++j)
      if (a.node(e, j) != b.node(e, j)) return false;
  return true;
}

template <class S>
double max_diff(const S& a, const S& b) {
  double d = 0.0;
  for (int e = 0; e < a.elements(); ++e)
    for (int j = 0; j < S::n; ++j)
      for (std::size_t i = 0; i < a.node(e, j).size(); ++i)
        d = std::max(d, std::abs(a.node(e, j)[i] - b.node(e, j)[i]));
  return d;
}

}  // namespace

TEST(TimeStep, MatchesCflFormula) {
  Euler1D eq;
  Solver1D<4, Euler1D> s(eq, Mesh1D::uniform(0.0, 1.0, 1), B3::transmissive(), B3::transmissive());
  s.set_initial([&](double, int) { return eq.to_cons({1.0, 0.0, 1.0}); });
  EXPECT_NEAR(s.compute_dt(), 0.98 * 0.069 / std::sqrt(1.4), 1e-15);
  EXPECT_NEAR(s.compute_dt(), 0.05715, 1e-5);
}

TEST(TimeStep, TwoDimensionalIsHalfOfOneDimensional) {
  Euler2D eq;
  Boundaries2D<Vec<4>> bc;
  bc.xl = bc.xr = bc.yb = bc.yt = Boundary<Vec<4>>::transmissive();
  Solver2D<4, Euler2D> s(eq, {Mesh1D::uniform(0.0, 1.0, 1), Mesh1D::uniform(0.0, 1.0, 1)}, bc);
  s.set_initial([&](double, double) { return eq.to_cons({1.0, 0.0, 0.0, 1.0}); });
  EXPECT_NEAR(s.compute_dt(), 0.5 * 0.98 * 0.069 / std::sqrt(1.4), 1e-15);
}

TEST(TimeStep, InvalidOptionsRejected) {
  SolverOptions o;
  o.cfl_safety = 0.0;
  EXPECT_THROW(sod_solver(10, o), ConfigError);
  o = {};
  o.kx = 1.0;
  EXPECT_THROW(sod_solver(10, o), ConfigError);
}

TEST(Boundaries, GhostValues) {
  Euler1D eq;
  EXPECT_EQ(ghost_value(eq, B3::reflecting(), Vec<3>{1.0, 2.0, 1.0}, 0, 0.0, 0.0, 0.0), (Vec<3>{1.0, -2.0, 1.0}));
  EXPECT_EQ(ghost_value(eq, B3::transmissive(), Vec<3>{1.0, 2.0, 1.0}, 0, 0.0, 0.0, 0.0), (Vec<3>{1.0, 2.0, 1.0}));
  Euler2D e2;
  EXPECT_EQ(reflect_state(e2, Vec<4>{1.0, 2.0, 3.0, 9.0}, 1), (Vec<4>{1.0, 2.0, -3.0, 9.0}));
}

TEST(Boundaries, DmrTopCarriesPostShockStateAndBottomSwitchesAtWedge) {
  const auto c = cases::dmr({});
  const Vec<4> interior = c.eq.to_cons({1.4, 0.3, -0.2, 1.0});
  const auto top = c.bc.yt.state(interior, 0.2, 1.01, 0.0);
  EXPECT_NEAR(top[0], 8.0, 1e-14);
  const auto ahead = c.bc.yt.state(interior, 3.5, 1.01, 0.0);
  EXPECT_NEAR(ahead[0], 1.4, 1e-14);
  EXPECT_EQ(c.bc.yb.state(interior, 0.1, -0.01, 0.0), interior);
  EXPECT_EQ(c.bc.yb.state(interior, 0.5, -0.01, 0.0)[2], -interior[2]);
}

TEST(Boundaries, UnpairedPeriodicRejected) {
  Euler1D eq;
  using S = Solver1D<2, Euler1D>;
  EXPECT_THROW(S(eq, Mesh1D::uniform(0.0, 1.0, 4), B3::periodic(), B3::transmissive()), ConfigError);
  EXPECT_THROW(S(eq, Mesh1D::uniform(0.0, 1.0, 4), B3{BcKind::Dirichlet, {}}, B3::transmissive()), ConfigError);
}

TEST(Boundaries, ReflectingWallsKeepMassAndStopFlow) {
  Euler1D eq;
  Solver1D<3, Euler1D> s(eq, Mesh1D::uniform(0.0, 1.0, 10), B3::reflecting(), B3::reflecting());
  s.set_initial([&](double x, int) { return eq.to_cons({1.0 + 0.1 * std::sin(6.0 * x), 0.0, 1.0}); });
  const auto m0 = s.totals();
  s.advance_to(0.2);
  EXPECT_NEAR(s.totals()[0], m0[0], 1e-13);
  EXPECT_NEAR(s.totals()[2], m0[2], 1e-13);
  EXPECT_TRUE(s.all_admissible());
}

TEST(Driver, MeanAuditDoesNotChangeTheUpdate) {
  auto a = sod_solver(50);
  SolverOptions o;
  o.mean_audit = true;
  auto b = sod_solver(50, o);
  const double dt = a.compute_dt();
  a.step(dt);
  b.step(dt);
  EXPECT_TRUE(same_state(a, b));
  EXPECT_LE(b.stats().max_audit_mismatch, 1e-13);
}

TEST(Driver, ZeroAlphaEqualsUnlimitedScheme) {
  auto c = cases::density_wave({});
  SolverOptions on, off;
  on.limiter = LimiterKind::BlendMH;
  on.scaling_limiter = off.scaling_limiter = false;
  off.limiter = LimiterKind::None;
  Solver1D<4, Euler1D> a(c.eq, c.mesh(8), c.left, c.right, on), b(c.eq, c.mesh(8), c.left, c.right, off);
  for (auto* s : {&a, &b}) s->set_initial([&](double x, int e) { return c.initial(x, e, s->mesh()); });
  a.force_alpha(std::vector<double>(8, 0.0));
  const double dt = a.compute_dt();
  a.raw_step(dt);
  b.raw_step(dt);
  EXPECT_TRUE(same_state(a, b));
}

TEST(Driver, UnitAlphaEqualsFirstOrderSubcellScheme) {
  Advection1D eq{1.0};
  SolverOptions o;
  o.limiter = LimiterKind::BlendFO;
  const int nel = 6;
  using B1 = Boundary<Vec<1>>;
  Solver1D<3, Advection1D> s(eq, Mesh1D::uniform(0.0, 1.0, nel), B1::periodic(), B1::periodic(), o);
  auto f = [](double x) { return Vec<1>{std::sin(2.0 * std::numbers::pi * x) + (x > 0.5 ? 1.0 : 0.0)}; };
  s.set_initial([&](double x, int) { return f(x); });
  std::vector<double> faces{0.0};
  std::vector<Vec<1>> v;
  for (int e = 0; e < nel; ++e) {
    const auto g = build_subcell_grid(s.basis(), 1.0 / nel, e * 1.0 / nel);
    for (int j = 0; j <= 3; ++j) {
      faces.push_back(g.faces[j + 1]);
      v.push_back(s.node(e, j));
    }
  }
  s.force_alpha(std::vector<double>(nel, 1.0));
  const double dt = 0.01;
  s.raw_step(dt);
  fo_periodic_step(eq, faces, v, dt);
  for (int e = 0; e < nel; ++e)
    for (int j = 0; j <= 3; ++j) EXPECT_NEAR(s.node(e, j)[0], v[e * 4 + j][0], 1e-14);
}

TEST(Driver, RestartIsBitwiseIdentical) {
  auto a = sod_solver(40);
  a.advance_to(0.05);
  const auto path = (std::filesystem::temp_directory_path() / "lwfr_restart_test.bin").string();
  a.save_checkpoint(path);
  auto b = sod_solver(40);
  b.load_checkpoint(path);
  EXPECT_EQ(b.time(), a.time());
  a.advance_to(0.1);
  b.advance_to(0.1);
  EXPECT_TRUE(same_state(a, b));
  std::filesystem::remove(path);
}

TEST(Driver, RunsAreDeterministic) {
  auto a = sod_solver(40), b = sod_solver(40);
  a.advance_to(0.1);
  b.advance_to(0.1);
  EXPECT_TRUE(same_state(a, b));
  EXPECT_EQ(a.stats().steps, b.stats().steps);
}

TEST(Driver, ZeroFinalTimeKeepsProjection) {
  auto a = sod_solver(20), b = sod_solver(20);
  a.advance_to(0.0);
  EXPECT_EQ(a.stats().steps, 0);
  EXPECT_TRUE(same_state(a, b));
}

TEST(Driver, SodConservesUpToBoundaryFlux) {
  auto s = sod_solver(50);
  const auto m0 = s.totals();
  s.advance_to(0.2);
  const auto m1 = s.totals();
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(m1[i] - m0[i] - s.boundary_inflow()[i], 0.0, 1e-13);
  EXPECT_TRUE(s.all_admissible());
  EXPECT_NEAR(s.time(), 0.2, 1e-15);
}

TEST(Driver, SodErrorIsSmall) {
  const auto c = cases::sod({});
  auto s = sod_solver(100);
  s.advance_to(0.2);
  const auto m = s.mesh();
  std::vector<double> xr, vr;
  for (double x : sample_points(m, 4)) {
    xr.push_back(x);
    vr.push_back(c.exact(x, 0.2)[0]);
  }
  EXPECT_LT(l1_error_at(s, xr, vr, 0), 5e-3);
}

TEST(Driver, TwoDimensionalConstantStateIsPreserved) {
  Euler2D eq;
  Boundaries2D<Vec<4>> bc;
  bc.xl = bc.xr = bc.yb = bc.yt = Boundary<Vec<4>>::periodic();
  Solver2D<3, Euler2D> s(eq, {Mesh1D::uniform(0.0, 1.0, 4), Mesh1D::uniform(0.0, 1.0, 3)}, bc);
  const auto c = eq.to_cons({1.0, 0.3, -0.2, 2.0});
  s.set_initial([&](double, double) { return c; });
  s.advance_to(0.1);
  for (int ey = 0; ey < 3; ++ey)
    for (int ex = 0; ex < 4; ++ex)
      for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.node(ex, ey, 1, 2)[i], c[i], 1e-13);
  EXPECT_EQ(s.alpha_fraction(0.0, 1.0, 0.0, 1.0), 0.0);
}

TEST(Driver, TvbRejectedInTwoDimensions) {
  Euler2D eq;
  Boundaries2D<Vec<4>> bc;
  bc.xl = bc.xr = bc.yb = bc.yt = Boundary<Vec<4>>::periodic();
  SolverOptions o;
  o.limiter = LimiterKind::TVB;
  EXPECT_THROW((Solver2D<3, Euler2D>(eq, {Mesh1D::uniform(0.0, 1.0, 2), Mesh1D::uniform(0.0, 1.0, 2)}, bc, o)),
               ConfigError);
}

TEST(Driver, RetryHalvesStepOnFailure) {
  // a far too large fixed step on a strong shock forces retries, then succeeds or gives up
  SolverOptions o;
  o.fixed_dt = 5e-3;
  o.max_retries = 3;
  const auto c = cases::blast({});
  Solver1D<4, Euler1D> s(c.eq, c.mesh(100), c.left, c.right, o);
  s.set_initial([&](double x, int e) { return c.initial(x, e, s.mesh()); });
  try {
    s.step(5e-3);
  } catch (const std::runtime_error&) {
  }
  EXPECT_GT(s.stats().retries, 0);
  EXPECT_FALSE(s.stats().retry_log.empty());
}
