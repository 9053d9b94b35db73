#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lwfr/limiters.hpp"

using namespace lwfr;

TEST(Indicator, LogisticAnchors) {
  const IndicatorConfig cfg;
  const double T = indicator_threshold(4, cfg);
  EXPECT_NEAR(logistic_alpha(0.0, T, cfg.s), 1.0e-4, 1e-6);
  EXPECT_EQ(logistic_alpha(T, T, cfg.s), 0.5);
}

TEST(Indicator, ThresholdFormula) {
  const IndicatorConfig cfg;
  EXPECT_NEAR(indicator_threshold(4, cfg), 0.5 * std::pow(10.0, -1.8 * std::pow(5.0, 0.25)), 1e-18);
  EXPECT_GT(indicator_threshold(1, cfg), indicator_threshold(4, cfg));
}

TEST(Indicator, HighestModeEnergy) {
  const double top[5] = {0, 0, 0, 0, 2.0};
  EXPECT_DOUBLE_EQ(highest_mode_energy(top, 4), 1.0);
  const double mean_only[5] = {3.0, 0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(highest_mode_energy(mean_only, 4), 0.0);
  const double zero[5] = {0, 0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(highest_mode_energy(zero, 4), 0.0);
}

TEST(Indicator, SmoothDataIsClippedToZeroAndStepToOne) {
  const Basis b = build_basis(4);
  const Operators<4> op(b);
  const IndicatorConfig cfg;
  std::array<double, 5> smooth, step;
  for (int j = 0; j < 5; ++j) {
    smooth[j] = 1.0 + 0.01 * b.nodes[j];
    step[j] = b.nodes[j] < 0.5 ? 1.0 : 0.1;
  }
  EXPECT_EQ(clip_alpha(smoothness_alpha_1d<4>(smooth, op, cfg), cfg), 0.0);
  EXPECT_GT(smoothness_alpha_1d<4>(step, op, cfg), 0.9);
}

TEST(Indicator, TwoDimensionalReducesForOneDimensionalData) {
  const Basis b = build_basis(3);
  const Operators<3> op(b);
  const IndicatorConfig cfg;
  std::array<double, 4> q1;
  std::array<double, 16> q2;
  for (int i = 0; i < 4; ++i) q1[i] = std::exp(3.0 * b.nodes[i]) + (b.nodes[i] > 0.6 ? 1.0 : 0.0);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) q2[i + 4 * j] = q1[i];
  EXPECT_NEAR(smoothness_alpha_2d<3>(q2, op, cfg), smoothness_alpha_1d<3>(q1, op, cfg), 1e-12);
}

TEST(Indicator, ClipAndSmooth) {
  IndicatorConfig cfg;
  EXPECT_EQ(clip_alpha(0.0005, cfg), 0.0);
  EXPECT_EQ(clip_alpha(0.9995, cfg), 1.0);
  EXPECT_EQ(clip_alpha(0.3, cfg), 0.3);
  EXPECT_EQ(clip_alpha(std::nan(""), cfg), 1.0);
  cfg.alpha_max = 0.5;
  EXPECT_EQ(clip_alpha(0.9995, cfg), 0.5);
  const auto s = smooth_alpha({0.0, 1.0, 0.0, 0.0}, {{{-1, 1, -1, -1}}, {{0, 2, -1, -1}}, {{1, 3, -1, -1}}, {{2, -1, -1, -1}}});
  EXPECT_EQ(s[0], 0.5);
  EXPECT_EQ(s[1], 1.0);
  EXPECT_EQ(s[2], 0.5);
  EXPECT_EQ(s[3], 0.0);
}

TEST(IndicatorConfig, Validation) {
  IndicatorConfig cfg;
  cfg.alpha_min = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Minmod, Basics) {
  EXPECT_EQ(minmod(1.0, 2.0, 3.0), 1.0);
  EXPECT_EQ(minmod(-1.0, -2.0, -0.5), -0.5);
  EXPECT_EQ(minmod(1.0, -2.0, 3.0), 0.0);
  EXPECT_EQ(minmod_tvb(0.01, -1.0, 1.0, 0.1), 0.01);
  EXPECT_EQ(minmod_tvb(1.0, -1.0, 1.0, 0.1), 0.0);
}

template <class Eq>
std::vector<typename Eq::State> fill_1d(const Eq&, const Basis& b, int nel, double dx,
                                        const std::function<typename Eq::State(double)>& f) {
  std::vector<typename Eq::State> u((nel + 2) * (b.degree + 1));
  for (int e = 0; e < nel + 2; ++e)
    for (int j = 0; j <= b.degree; ++j) u[e * (b.degree + 1) + j] = f((e - 1 + b.nodes[j]) * dx);
  return u;
}

TEST(Tvb, LinearDataIsUntouched) {
  Advection1D eq;
  const Basis b = build_basis(3);
  const Operators<3> op(b);
  const int nel = 8;
  auto u = fill_1d<Advection1D>(eq, b, nel, 0.1, [](double x) { return Vec<1>{2.0 * x}; });
  const auto before = u;
  tvb_limit_1d<3>(eq, op, u, nel, std::vector<double>(nel, 0.1), 0.0, false);
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(u[k][0], before[k][0], 1e-14);
}

TEST(Tvb, OscillationAtJumpIsLimitedAndMeansKept) {
  Euler1D eq;
  const Basis b = build_basis(4);
  const Operators<4> op(b);
  const int nel = 6;
  auto u = fill_1d<Euler1D>(eq, b, nel, 1.0 / nel, [&](double x) {
    const double wiggle = 0.05 * std::sin(40.0 * x);
    return eq.to_cons({x < 0.5 ? 1.0 + wiggle : 0.2 + wiggle, 0.0, x < 0.5 ? 1.0 : 0.1});
  });
  auto mean = [&](int e) {
    Vec<3> m{};
    for (int j = 0; j <= 4; ++j) axpy(m, op.weights[j], u[e * 5 + j]);
    return m;
  };
  std::vector<Vec<3>> m0;
  for (int e = 1; e <= nel; ++e) m0.push_back(mean(e));
  const auto before = u;
  tvb_limit_1d<4>(eq, op, u, nel, std::vector<double>(nel, 1.0 / nel), 0.0, true);
  int changed = 0;
  for (int e = 1; e <= nel; ++e) {
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(mean(e)[i], m0[e - 1][i], 1e-13);
    bool same = true;
    for (int j = 0; j < 5; ++j) same = same && u[e * 5 + j] == before[e * 5 + j];
    if (same) continue;
    ++changed;
    // limited elements are linear: equal divided differences
    for (int i = 0; i < 3; ++i) {
      const double s1 = (u[e * 5 + 2][i] - u[e * 5][i]) / (b.nodes[2] - b.nodes[0]);
      const double s2 = (u[e * 5 + 4][i] - u[e * 5 + 2][i]) / (b.nodes[4] - b.nodes[2]);
      EXPECT_NEAR(s1, s2, 1e-9 * std::max(1.0, std::abs(s1)));
    }
  }
  EXPECT_GT(changed, 0);
}

TEST(ScalingLimiter, RestoresAdmissibilityAndKeepsMean) {
  Euler1D eq;
  const Basis b = build_basis(4);
  std::array<double, 5> w;
  for (int j = 0; j < 5; ++j) w[j] = b.weights[j];
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int limited = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::array<Vec<3>, 5> u;
    for (auto& s : u) s = eq.to_cons({0.05 + U(rng), 2.0 * U(rng) - 1.0, 0.01 + U(rng)});
    // push one node out of the admissible set
    const int bad = trial % 5;
    u[bad][0] = -0.3 * U(rng) * 0.1;
    Vec<3> m{};
    for (int j = 0; j < 5; ++j) axpy(m, w[j], u[j]);
    if (!is_admissible(eq, m)) continue;
    const bool changed = scaling_limit_element(eq, u, w);
    limited += changed;
    Vec<3> m2{};
    for (int j = 0; j < 5; ++j) {
      axpy(m2, w[j], u[j]);
      EXPECT_TRUE(is_admissible(eq, u[j]));
    }
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(m2[i], m[i], 1e-13 * std::max(1.0, std::abs(m[i])));
  }
  EXPECT_GT(limited, 100);
}

TEST(ScalingLimiter, AdmissibleElementIsBitwiseUntouched) {
  Euler1D eq;
  const Basis b = build_basis(2);
  std::array<double, 3> w{b.weights[0], b.weights[1], b.weights[2]};
  std::array<Vec<3>, 3> u{eq.to_cons({1.0, 0.1, 1.0}), eq.to_cons({0.5, 0.2, 0.3}), eq.to_cons({2.0, -0.3, 4.0})};
  const auto before = u;
  EXPECT_FALSE(scaling_limit_element(eq, u, w));
  EXPECT_EQ(u, before);
}

TEST(ScalingLimiter, InadmissibleMeanThrows) {
  Euler1D eq;
  std::array<double, 2> w{0.5, 0.5};
  std::array<Vec<3>, 2> u{Vec<3>{-1.0, 0.0, 1.0}, Vec<3>{0.5, 0.0, 1.0}};
  EXPECT_THROW(scaling_limit_element(eq, u, w), AdmissibilityError);
}
