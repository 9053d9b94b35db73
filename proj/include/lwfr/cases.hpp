#ifndef LWFR_CASES_HPP
#define LWFR_CASES_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lwfr/exact_riemann.hpp"
#include "lwfr/solver1d.hpp"
#include "lwfr/solver2d.hpp"

namespace lwfr {

struct Window {
  double xa, xb, ya, yb;
  bool contains(double x, double y) const { return x >= xa && x <= xb && y >= ya && y <= yb; }
};

template <class Eq>
struct Case1D {
  using State = typename Eq::State;
  std::string name;
  std::string description;
  Eq eq;
  double xa = 0.0, xb = 1.0;
  int cells = 100;
  int degree = 4;
  double T = 1.0;
  LimiterKind limiter = LimiterKind::BlendMH;
  // conserved initial state; the element is passed for mesh-dependent data
  std::function<State(double x, int e, const Mesh1D& m)> initial;
  std::function<State(double x, double t)> exact;  // optional
  Boundary<State> left = Boundary<State>::transmissive();
  Boundary<State> right = Boundary<State>::transmissive();
  std::optional<double> cfl_safety;

  Mesh1D mesh(int n = 0) const { return Mesh1D::uniform(xa, xb, n > 0 ? n : cells); }

  void configure(SolverOptions& o) const {
    o.limiter = limiter;
    if (cfl_safety) o.cfl_safety = *cfl_safety;
  }

  /// Initial state at x on mesh m (element found by bisection).
  State sample(double x, const Mesh1D& m) const {
    int e = static_cast<int>(std::upper_bound(m.edges.begin(), m.edges.end(), x) - m.edges.begin()) - 1;
    e = std::clamp(e, 0, m.size() - 1);
    return initial(x, e, m);
  }
};

template <class Eq>
struct Case2D {
  using State = typename Eq::State;
  std::string name;
  std::string description;
  Eq eq;
  double xa = 0.0, xb = 1.0, ya = 0.0, yb = 1.0;
  int nx = 64, ny = 64;
  int degree = 4;
  double T = 1.0;
  LimiterKind limiter = LimiterKind::BlendMH;
  std::function<State(double x, double y)> initial;
  std::function<State(double x, double y, double t)> exact;  // optional
  Boundaries2D<State> bc;
  std::optional<Window> crop;
  std::optional<double> cfl_safety;
  bool dt_include_ghosts = false;

  Mesh2D mesh(int mx = 0, int my = 0) const {
    if (mx <= 0) mx = nx;
    if (my <= 0) my = std::max(1, static_cast<int>(std::lround(static_cast<double>(mx) * ny / nx)));
    return {Mesh1D::uniform(xa, xb, mx), Mesh1D::uniform(ya, yb, my)};
  }

  void configure(SolverOptions& o) const {
    o.limiter = limiter;
    if (cfl_safety) o.cfl_safety = *cfl_safety;
    o.dt_include_ghosts = dt_include_ghosts;
  }

  Window window() const { return crop ? *crop : Window{xa, xb, ya, yb}; }
};

using AnyCase = std::variant<Case1D<Advection1D>, Case1D<Euler1D>, Case2D<Advection2D>, Case2D<Euler2D>>;

struct CaseParams {
  std::optional<double> gamma;
};

struct CaseInfo {
  std::string name;
  int dim;
  std::string equation;
  std::string description;
};

namespace cases {

constexpr double pi = std::numbers::pi;

inline auto euler1d_prim(const Euler1D& eq, std::function<Vec<3>(double)> w) {
  return [eq, w](double x, int, const Mesh1D&) { return eq.to_cons(w(x)); };
}

inline Case1D<Advection1D> advection_sine() {
  Case1D<Advection1D> c;
  c.name = "advection_sine";
  c.description = "u = sin(2 pi x), unit speed, periodic on [0,1]";
  c.eq = Advection1D{};
  c.cells = 40;
  c.degree = 3;
  c.T = 1.0;
  c.limiter = LimiterKind::None;
  c.initial = [](double x, int, const Mesh1D&) { return Vec<1>{std::sin(2.0 * pi * x)}; };
  c.exact = [](double x, double t) { return Vec<1>{std::sin(2.0 * pi * (x - t))}; };
  c.left = c.right = Boundary<Vec<1>>::periodic();
  return c;
}

inline Case1D<Euler1D> density_wave(const CaseParams& p) {
  Case1D<Euler1D> c;
  c.name = "density_wave";
  c.description = "rho = 1 + 0.2 sin(2 pi x), v = 1, p = 1, periodic on [0,1]";
  c.eq = Euler1D(p.gamma.value_or(1.4));
  c.cells = 50;
  c.T = 1.0;
  c.initial = euler1d_prim(c.eq, [](double x) { return Vec<3>{1.0 + 0.2 * std::sin(2.0 * pi * x), 1.0, 1.0}; });
  c.exact = [eq = c.eq](double x, double t) {
    return eq.to_cons({1.0 + 0.2 * std::sin(2.0 * pi * (x - t)), 1.0, 1.0});
  };
  c.left = c.right = Boundary<Vec<3>>::periodic();
  return c;
}

inline Case1D<Euler1D> riemann1d(std::string name, std::string desc, const Euler1D& eq, double xa,
                                 double xb, double x0, Vec<3> wl, Vec<3> wr, int cells, double T) {
  Case1D<Euler1D> c;
  c.name = std::move(name);
  c.description = std::move(desc);
  c.eq = eq;
  c.xa = xa;
  c.xb = xb;
  c.cells = cells;
  c.T = T;
  c.initial = euler1d_prim(eq, [=](double x) { return x <= x0 ? wl : wr; });
  return c;
}

inline Case1D<Euler1D> sod(const CaseParams& p) {
  Euler1D eq(p.gamma.value_or(1.4));
  auto c = riemann1d("sod", "Sod shock tube on [0,1], t = 0.2", eq, 0.0, 1.0, 0.5, {1.0, 0.0, 1.0},
                     {0.125, 0.0, 0.1}, 100, 0.2);
  ExactRiemann rp({1.0, 0.0, 1.0}, {0.125, 0.0, 0.1}, eq.gamma);
  c.exact = [rp, eq](double x, double t) {
    return eq.to_cons(t > 0.0 ? rp.sample((x - 0.5) / t) : (x <= 0.5 ? Vec<3>{1.0, 0.0, 1.0} : Vec<3>{0.125, 0.0, 0.1}));
  };
  return c;
}

inline Case1D<Euler1D> double_rarefaction(const CaseParams& p) {
  Euler1D eq(p.gamma.value_or(1.4));
  auto c = riemann1d("double_rarefaction", "two receding rarefactions with near-vacuum centre, t = 0.6", eq,
                     -1.0, 1.0, 0.0, {7.0, -1.0, 0.2}, {7.0, 1.0, 0.2}, 200, 0.6);
  ExactRiemann rp({7.0, -1.0, 0.2}, {7.0, 1.0, 0.2}, eq.gamma);
  c.exact = [rp, eq](double x, double t) {
    return eq.to_cons(t > 0.0 ? rp.sample(x / t) : (x <= 0.0 ? Vec<3>{7.0, -1.0, 0.2} : Vec<3>{7.0, 1.0, 0.2}));
  };
  return c;
}

inline Case1D<Euler1D> leblanc(const CaseParams& p) {
  Euler1D eq(p.gamma.value_or(1.4));
  return riemann1d("leblanc", "Leblanc shock tube, pressure ratio 1e9, t = 0.001", eq, -1.0, 1.0, 0.0,
                   {2.0, 0.0, 1e9}, {0.001, 0.0, 1.0}, 800, 0.001);
}

inline Case1D<Euler1D> shu_osher(const CaseParams& p) {
  Case1D<Euler1D> c;
  c.name = "shu_osher";
  c.description = "Mach 3 shock hitting a density sine wave on [-5,5], t = 1.8";
  c.eq = Euler1D(p.gamma.value_or(1.4));
  c.xa = -5.0;
  c.xb = 5.0;
  c.cells = 400;
  c.T = 1.8;
  c.initial = euler1d_prim(c.eq, [](double x) {
    if (x < -4.0) return Vec<3>{3.857143, 2.629369, 10.333333};
    return Vec<3>{1.0 + 0.2 * std::sin(5.0 * x), 0.0, 1.0};
  });
  return c;
}

inline Case1D<Euler1D> blast(const CaseParams& p) {
  Case1D<Euler1D> c;
  c.name = "blast";
  c.description = "interacting blast waves between reflecting walls on [0,1], t = 0.038";
  c.eq = Euler1D(p.gamma.value_or(1.4));
  c.cells = 400;
  c.T = 0.038;
  c.initial = euler1d_prim(c.eq, [](double x) {
    if (x < 0.1) return Vec<3>{1.0, 0.0, 1000.0};
    if (x < 0.9) return Vec<3>{1.0, 0.0, 0.01};
    return Vec<3>{1.0, 0.0, 100.0};
  });
  c.left = c.right = Boundary<Vec<3>>::reflecting();
  return c;
}

/// Energy 3.2e6/dx in the element containing the origin, 1e-12 elsewhere.
inline Case1D<Euler1D> sedov1d(const CaseParams& p) {
  Case1D<Euler1D> c;
  c.name = "sedov1d";
  c.description = "point energy release between walls on [-1,1], t = 0.001";
  c.eq = Euler1D(p.gamma.value_or(1.4));
  c.xa = -1.0;
  c.xb = 1.0;
  c.cells = 201;
  c.T = 0.001;
  c.initial = [](double, int e, const Mesh1D& m) {
    const bool centre = m.edges[e] <= 0.0 && 0.0 < m.edges[e + 1];
    return Vec<3>{1.0, 0.0, centre ? 3.2e6 / m.dx(e) : 1e-12};
  };
  c.left = c.right = Boundary<Vec<3>>::reflecting();
  return c;
}

inline Case2D<Advection2D> rotation_composite() {
  Case2D<Advection2D> c;
  c.name = "rotation_composite";
  c.description = "hump, cone and slotted disc in solid body rotation, one revolution";
  c.eq = Advection2D{};
  c.eq.rotation = true;
  c.nx = c.ny = 100;
  c.T = 2.0 * pi;
  c.initial = [](double x, double y) {
    const double r0 = 0.15;
    double u = 0.0;
    {
      const double q = std::min(std::hypot(x - 0.25, y - 0.5), r0) / r0;
      u += 0.25 * (1.0 + std::cos(pi * q));
    }
    {
      const double r = std::hypot(x - 0.5, y - 0.25);
      if (r <= r0) u += 1.0 - r / r0;
    }
    {
      const double r = std::hypot(x - 0.5, y - 0.75);
      const bool slot = std::abs(x - 0.5) < 0.025 && y < 0.85;
      if (r <= r0 && !slot) u += 1.0;
    }
    return Vec<1>{u};
  };
  c.exact = [init = c.initial](double x, double y, double t) {
    // rotate back about the centre
    const double cs = std::cos(t), sn = std::sin(t);
    const double dx = x - 0.5, dy = y - 0.5;
    return init(0.5 + cs * dx + sn * dy, 0.5 - sn * dx + cs * dy);
  };
  auto tr = Boundary<Vec<1>>::transmissive();
  c.bc = {tr, tr, tr, tr};
  return c;
}

inline Case2D<Euler2D> isentropic_vortex(const CaseParams& p) {
  Case2D<Euler2D> c;
  c.name = "isentropic_vortex";
  c.description = "isentropic vortex advected once across the periodic square [-10,10]^2";
  c.eq = Euler2D(p.gamma.value_or(1.4));
  c.xa = c.ya = -10.0;
  c.xb = c.yb = 10.0;
  c.nx = c.ny = 40;
  c.degree = 4;
  const double M = 0.5, beta = 5.0, ang = pi / 4.0;
  c.T = 20.0 * std::sqrt(2.0) / M;
  auto vortex = [eq = c.eq, M, beta, ang](double x, double y) {
    const double g = eq.gamma;
    const double r2 = x * x + y * y;
    const double rho = std::pow(1.0 - beta * beta * (g - 1.0) / (8.0 * g * pi * pi) * std::exp(1.0 - r2),
                                1.0 / (g - 1.0));
    const double b = beta / (2.0 * pi) * std::exp(0.5 * (1.0 - r2));
    return eq.to_cons({rho, M * std::cos(ang) - b * y, M * std::sin(ang) + b * x, std::pow(rho, g)});
  };
  c.initial = vortex;
  c.exact = [vortex, M, ang](double x, double y, double t) {
    auto wrap = [](double s) { return s - 20.0 * std::floor((s + 10.0) / 20.0); };
    return vortex(wrap(x - M * std::cos(ang) * t), wrap(y - M * std::sin(ang) * t));
  };
  auto per = Boundary<Vec<4>>::periodic();
  c.bc = {per, per, per, per};
  return c;
}

/// Configuration 12 on [0,1]^2 embedded in [-0.25,1.25]^2 with transmissive sides.
inline Case2D<Euler2D> riemann2d(const CaseParams& p) {
  Case2D<Euler2D> c;
  c.name = "riemann2d";
  c.description = "2-D Riemann problem configuration 12, t = 0.25, output cropped to [0,1]^2";
  c.eq = Euler2D(p.gamma.value_or(1.4));
  c.xa = c.ya = -0.25;
  c.xb = c.yb = 1.25;
  c.nx = c.ny = 128;
  c.T = 0.25;
  c.initial = [eq = c.eq](double x, double y) {
    if (x >= 0.5 && y >= 0.5) return eq.to_cons({0.5313, 0.0, 0.0, 0.4});
    if (x < 0.5 && y >= 0.5) return eq.to_cons({1.0, 0.7276, 0.0, 1.0});
    if (x < 0.5) return eq.to_cons({0.8, 0.0, 0.0, 1.0});
    return eq.to_cons({1.0, 0.0, 0.7276, 1.0});
  };
  auto tr = Boundary<Vec<4>>::transmissive();
  c.bc = {tr, tr, tr, tr};
  c.crop = Window{0.0, 1.0, 0.0, 1.0};
  return c;
}

inline Vec<4> dmr_state(const Euler2D& eq, double x, double y, double t) {
  if (x < 1.0 / 6.0 + (y + 20.0 * t) / std::sqrt(3.0))
    return eq.to_cons({8.0, 8.25 * std::cos(pi / 6.0), -8.25 * std::sin(pi / 6.0), 116.5});
  return eq.to_cons({1.4, 0.0, 0.0, 1.0});
}

inline Case2D<Euler2D> dmr(const CaseParams& p) {
  Case2D<Euler2D> c;
  c.name = "dmr";
  c.description = "double Mach reflection on [0,4]x[0,1], t = 0.2";
  c.eq = Euler2D(p.gamma.value_or(1.4));
  c.xb = 4.0;
  c.nx = 600;
  c.ny = 150;
  c.T = 0.2;
  c.initial = [eq = c.eq](double x, double y) { return dmr_state(eq, x, y, 0.0); };
  using B = Boundary<Vec<4>>;
  auto inflow = B::dirichlet([eq = c.eq](const Vec<4>&, double x, double y, double t) { return dmr_state(eq, x, y, t); });
  auto bottom = B::dirichlet([eq = c.eq](const Vec<4>& u, double x, double, double) {
    return x < 1.0 / 6.0 ? u : reflect_state(eq, u, 1);
  });
  c.bc = {inflow, B::transmissive(), bottom, inflow};
  return c;
}

inline Case2D<Euler2D> kelvin_helmholtz(const CaseParams& p) {
  Case2D<Euler2D> c;
  c.name = "kelvin_helmholtz";
  c.description = "Kelvin-Helmholtz shear layers, periodic unit square, t = 0.4";
  c.eq = Euler2D(p.gamma.value_or(1.4));
  c.nx = c.ny = 512;
  c.T = 0.4;
  c.initial = [eq = c.eq](double x, double y) {
    const double w0 = 0.1, s = 0.05 / std::sqrt(2.0);
    const bool band = 0.25 < y && y < 0.75;
    const double v = w0 * std::sin(4.0 * pi * x) *
                     (std::exp(-(y - 0.25) * (y - 0.25) / (2.0 * s * s)) +
                      std::exp(-(y - 0.75) * (y - 0.75) / (2.0 * s * s)));
    return eq.to_cons({band ? 2.0 : 1.0, band ? 0.5 : -0.5, v, 2.5});
  };
  auto per = Boundary<Vec<4>>::periodic();
  c.bc = {per, per, per, per};
  return c;
}

/// Jet enters through |y| <= 0.05 on the left side.
inline Case2D<Euler2D> astro_jet(const CaseParams& p) {
  Case2D<Euler2D> c;
  c.name = "astro_jet";
  c.description = "Mach 2000 jet into ambient gas on [0,1]x[-0.5,0.5], t = 0.001";
  c.eq = Euler2D(p.gamma.value_or(5.0 / 3.0));
  c.ya = -0.5;
  c.yb = 0.5;
  c.nx = c.ny = 400;
  c.T = 0.001;
  c.cfl_safety = 0.5;
  c.dt_include_ghosts = true;
  const auto ambient = c.eq.to_cons({0.5, 0.0, 0.0, 0.4127});
  const auto jet = c.eq.to_cons({5.0, 800.0, 0.0, 0.4127});
  c.initial = [ambient](double, double) { return ambient; };
  using B = Boundary<Vec<4>>;
  auto left = B::dirichlet([=](const Vec<4>&, double, double y, double) {
    return std::abs(y) <= 0.05 ? jet : ambient;
  });
  c.bc = {left, B::transmissive(), B::transmissive(), B::transmissive()};
  return c;
}

inline Case2D<Euler2D> sedov2d_periodic(const CaseParams& p) {
  Case2D<Euler2D> c;
  c.name = "sedov2d_periodic";
  c.description = "Gaussian energy release on the periodic square [-1.5,1.5]^2, t = 20";
  c.eq = Euler2D(p.gamma.value_or(1.4));
  c.xa = c.ya = -1.5;
  c.xb = c.yb = 1.5;
  c.nx = c.ny = 64;
  c.T = 20.0;
  c.initial = [eq = c.eq](double x, double y) {
    const double sr = 0.25, sp = 0.15, g = eq.gamma;
    const double r2 = x * x + y * y;
    const double rho = 1.0 + std::exp(-r2 / (2.0 * sr * sr)) / (4.0 * pi * sr * sr);
    const double pr = 1e-5 + (g - 1.0) * std::exp(-r2 / (2.0 * sp * sp)) / (4.0 * pi * sp * sp);
    return eq.to_cons({rho, 0.0, 0.0, pr});
  };
  auto per = Boundary<Vec<4>>::periodic();
  c.bc = {per, per, per, per};
  return c;
}

}  // namespace cases

inline std::vector<CaseInfo> case_list() {
  return {
      {"advection_sine", 1, "advection1d", "u = sin(2 pi x), unit speed, periodic on [0,1]"},
      {"density_wave", 1, "euler1d", "smooth density wave, periodic on [0,1]"},
      {"sod", 1, "euler1d", "Sod shock tube on [0,1], t = 0.2"},
      {"shu_osher", 1, "euler1d", "shock / entropy wave interaction on [-5,5], t = 1.8"},
      {"blast", 1, "euler1d", "interacting blast waves, reflecting walls, t = 0.038"},
      {"sedov1d", 1, "euler1d", "point energy release on [-1,1], t = 0.001"},
      {"double_rarefaction", 1, "euler1d", "near-vacuum double rarefaction, t = 0.6"},
      {"leblanc", 1, "euler1d", "Leblanc shock tube, t = 0.001"},
      {"rotation_composite", 2, "advection2d", "hump, cone and slotted disc rotating once"},
      {"isentropic_vortex", 2, "euler2d", "periodic isentropic vortex, one diagonal crossing"},
      {"riemann2d", 2, "euler2d", "2-D Riemann configuration 12, t = 0.25"},
      {"dmr", 2, "euler2d", "double Mach reflection, t = 0.2"},
      {"kelvin_helmholtz", 2, "euler2d", "Kelvin-Helmholtz instability, t = 0.4"},
      {"astro_jet", 2, "euler2d", "Mach 2000 astrophysical jet, t = 0.001"},
      {"sedov2d_periodic", 2, "euler2d", "periodic Gaussian blast, t = 20"},
  };
}

inline AnyCase build_case(const std::string& name, const CaseParams& p = {}) {
  using namespace cases;
  if (name == "advection_sine") return advection_sine();
  if (name == "density_wave") return density_wave(p);
  if (name == "sod") return sod(p);
  if (name == "shu_osher") return shu_osher(p);
  if (name == "blast") return blast(p);
  if (name == "sedov1d") return sedov1d(p);
  if (name == "double_rarefaction") return double_rarefaction(p);
  if (name == "leblanc") return leblanc(p);
  if (name == "rotation_composite") return rotation_composite();
  if (name == "isentropic_vortex") return isentropic_vortex(p);
  if (name == "riemann2d") return riemann2d(p);
  if (name == "dmr") return dmr(p);
  if (name == "kelvin_helmholtz") return kelvin_helmholtz(p);
  if (name == "astro_jet") return astro_jet(p);
  if (name == "sedov2d_periodic") return sedov2d_periodic(p);
  std::string all;
  for (const auto& c : case_list()) all += (all.empty() ? "" : ", ") + c.name;
  throw ConfigError("unknown case '" + name + "'; available: " + all);
}

// Sampling, hashing and error norms -----------------------------------------

inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

/// Points (k + 1/2)/(m) of each element, m = factor per element.
inline std::vector<double> sample_points(const Mesh1D& m, int per_element) {
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(m.size()) * per_element);
  for (int e = 0; e < m.size(); ++e)
    for (int k = 0; k < per_element; ++k) x.push_back(m.edges[e] + (k + 0.5) / per_element * m.dx(e));
  return x;
}

/// Hash of the IC sampled on the default mesh, values rounded to 12 significant digits.
template <class C>
std::uint64_t ic_hash(const C& c, int per_element = 4) {
  std::uint64_t h = 1469598103934665603ULL;
  auto add = [&](const auto& u) {
    for (double v : u) {
      char buf[32];
      const int len = std::snprintf(buf, sizeof buf, "%.12e", v);
      h = fnv1a(buf, static_cast<std::size_t>(len), h);
    }
  };
  if constexpr (requires { c.left; }) {
    const auto m = c.mesh();
    for (double x : sample_points(m, per_element)) add(c.sample(x, m));
  } else {
    const auto m = c.mesh();
    const auto xs = sample_points(m.x, per_element);
    const auto ys = sample_points(m.y, per_element);
    const int stride = std::max<int>(1, static_cast<int>(xs.size() / 200));
    for (std::size_t j = 0; j < ys.size(); j += stride)
      for (std::size_t i = 0; i < xs.size(); i += stride) add(c.initial(xs[i], ys[j]));
  }
  return h;
}

/// Admissibility of the IC on the default mesh oversampled by a factor.
template <class C>
bool ic_admissible(const C& c, int oversample = 10) {
  if constexpr (requires { c.left; }) {
    const auto m = c.mesh();
    for (double x : sample_points(m, oversample))
      if (!is_admissible(c.eq, c.sample(x, m))) return false;
  } else {
    const auto m = c.mesh();
    const int f = std::max(1, oversample * 64 / std::max(m.nx(), m.ny()));
    for (double y : sample_points(m.y, f))
      for (double x : sample_points(m.x, f))
        if (!is_admissible(c.eq, c.initial(x, y))) return false;
  }
  return true;
}

/// Solution value of variable var at reference position xi in element e.
template <int N, class Eq>
double evaluate(const Solver1D<N, Eq>& s, int e, double xi, int var) {
  const auto row = s.basis().interpolation_row(xi);
  double v = 0.0;
  for (int j = 0; j <= N; ++j) v += row[j] * s.node(e, j)[var];
  return v;
}

template <int N, class Eq>
double evaluate(const Solver2D<N, Eq>& s, int ex, int ey, double xi, double eta, int var) {
  const auto rx = s.basis().interpolation_row(xi);
  const auto ry = s.basis().interpolation_row(eta);
  double v = 0.0;
  for (int j = 0; j <= N; ++j)
    for (int i = 0; i <= N; ++i) v += rx[i] * ry[j] * s.node(ex, ey, i, j)[var];
  return v;
}

/// Discrete L2 error of variable var sampled at N+3 equispaced points per
/// element (endpoints included), weighted by element width.
template <int N, class Eq>
double l2_error(const Solver1D<N, Eq>& s, const std::function<typename Eq::State(double, double)>& exact,
                int var = 0) {
  const int m = N + 3;
  double sum = 0.0, len = 0.0;
  for (int e = 0; e < s.elements(); ++e) {
    const double dx = s.mesh().dx(e);
    for (int k = 0; k < m; ++k) {
      const double xi = static_cast<double>(k) / (m - 1);
      const double d = evaluate(s, e, xi, var) - exact(s.mesh().edges[e] + xi * dx, s.time())[var];
      sum += d * d * dx / m;
    }
    len += dx;
  }
  return std::sqrt(sum / len);
}

template <int N, class Eq>
double l2_error(const Solver2D<N, Eq>& s,
                const std::function<typename Eq::State(double, double, double)>& exact, int var = 0) {
  const int m = N + 3;
  double sum = 0.0, area = 0.0;
  for (int ey = 0; ey < s.ny(); ++ey)
    for (int ex = 0; ex < s.nx(); ++ex) {
      const double x0 = s.mesh().x.edges[ex], dx = s.mesh().x.dx(ex);
      const double y0 = s.mesh().y.edges[ey], dy = s.mesh().y.dx(ey);
      for (int l = 0; l < m; ++l)
        for (int k = 0; k < m; ++k) {
          const double xi = static_cast<double>(k) / (m - 1), eta = static_cast<double>(l) / (m - 1);
          const double d = evaluate(s, ex, ey, xi, eta, var) - exact(x0 + xi * dx, y0 + eta * dy, s.time())[var];
          sum += d * d * dx * dy / (m * m);
        }
      area += dx * dy;
    }
  return std::sqrt(sum / area);
}

/// L1 difference of variable var against a sampled reference (x_k, v_k),
/// evaluated at the reference points, linear interpolation not needed.
template <int N, class Eq>
double l1_error_at(const Solver1D<N, Eq>& s, const std::vector<double>& xr, const std::vector<double>& vr,
                   int var = 0) {
  const auto& m = s.mesh();
  double sum = 0.0;
  for (std::size_t k = 0; k < xr.size(); ++k) {
    int e = static_cast<int>(std::upper_bound(m.edges.begin(), m.edges.end(), xr[k]) - m.edges.begin()) - 1;
    e = std::clamp(e, 0, m.size() - 1);
    const double xi = (xr[k] - m.edges[e]) / m.dx(e);
    sum += std::abs(evaluate(s, e, xi, var) - vr[k]);
  }
  return sum * (m.right() - m.left()) / xr.size();
}

struct ConvergenceRow {
  int cells;
  double error;
  std::optional<double> rate;  // empty for the first row or a degenerate pair
  bool degenerate = false;
};

/// Observed rates log(e_{k-1}/e_k)/log(h_{k-1}/h_k); equal grids are flagged.
inline std::vector<ConvergenceRow> convergence_rates(const std::vector<int>& cells, const std::vector<double>& errors) {
  if (cells.size() < 2) throw InvalidArgument("convergence_rates: need at least two grids");
  if (cells.size() != errors.size()) throw InvalidArgument("convergence_rates: size mismatch");
  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    ConvergenceRow r{cells[k], errors[k], std::nullopt, false};
    if (k > 0) {
      if (cells[k] == cells[k - 1] || !(errors[k] > 0.0) || !(errors[k - 1] > 0.0))
        r.degenerate = true;
      else
        r.rate = std::log(errors[k - 1] / errors[k]) / std::log(static_cast<double>(cells[k]) / cells[k - 1]);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace lwfr

#endif
