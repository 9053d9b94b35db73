#ifndef LWFR_MESH_HPP
#define LWFR_MESH_HPP

#include <functional>
#include <string>
#include <vector>

#include "lwfr/equations.hpp"

namespace lwfr {

/// 1-D mesh given by strictly increasing element edges.
struct Mesh1D {
  std::vector<double> edges;

  Mesh1D() = default;
  explicit Mesh1D(std::vector<double> e) : edges(std::move(e)) { validate(); }

  static Mesh1D uniform(double a, double b, int n) {
    if (n < 1) throw InvalidArgument("Mesh1D::uniform: need at least one element");
    if (!(b > a)) throw InvalidArgument("Mesh1D::uniform: empty interval");
    std::vector<double> e(n + 1);
    for (int i = 0; i <= n; ++i) e[i] = a + (b - a) * i / n;
    e[n] = b;
    return Mesh1D(std::move(e));
  }

  /// Piecewise uniform spacing: h_fine inside the listed windows, h_coarse elsewhere.
  static Mesh1D refined(double a, double b, double h_coarse, double h_fine,
                        const std::vector<std::pair<double, double>>& windows) {
    std::vector<double> e{a};
    double x = a;
    auto inside = [&](double s) {
      for (auto [l, r] : windows)
        if (s >= l - 1e-12 && s < r - 1e-12) return true;
      return false;
    };
    while (x < b - 1e-12) {
      double h = inside(x) ? h_fine : h_coarse;
      double nx = std::min(x + h, b);
      // do not step across a window boundary
      for (auto [l, r] : windows) {
        if (x < l - 1e-12 && nx > l + 1e-12) nx = l;
        if (x < r - 1e-12 && nx > r + 1e-12) nx = r;
      }
      e.push_back(nx);
      x = nx;
    }
    return Mesh1D(std::move(e));
  }

  int size() const { return static_cast<int>(edges.size()) - 1; }
  double dx(int e) const { return edges[e + 1] - edges[e]; }
  double left() const { return edges.front(); }
  double right() const { return edges.back(); }

  void validate() const {
    if (edges.size() < 2) throw InvalidArgument("Mesh1D: need at least one element");
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (!(edges[i] > edges[i - 1])) throw InvalidArgument("Mesh1D: edges must increase strictly");
  }
};

enum class BcKind { Periodic, Transmissive, Reflecting, Dirichlet };

inline std::string to_string(BcKind k) {
  switch (k) {
    case BcKind::Periodic: return "periodic";
    case BcKind::Transmissive: return "transmissive";
    case BcKind::Reflecting: return "reflecting";
    case BcKind::Dirichlet: return "dirichlet";
  }
  return "?";
}

/// Boundary condition on one side. The ghost value at a node is computed
/// from the interior value at the mirrored node; Dirichlet states receive
/// the ghost node position and time.
template <class State>
struct Boundary {
  BcKind kind = BcKind::Transmissive;
  std::function<State(const State& interior, double x, double y, double t)> state;

  static Boundary periodic() { return {BcKind::Periodic, {}}; }
  static Boundary transmissive() { return {BcKind::Transmissive, {}}; }
  static Boundary reflecting() { return {BcKind::Reflecting, {}}; }
  static Boundary dirichlet(std::function<State(const State&, double, double, double)> f) {
    return {BcKind::Dirichlet, std::move(f)};
  }
};

/// Interior state with the velocity component normal to direction dir negated.
inline Vec<3> reflect_state(const Euler1D&, const Vec<3>& u, int) { return {u[0], -u[1], u[2]}; }
inline Vec<4> reflect_state(const Euler2D&, const Vec<4>& u, int dir) {
  Vec<4> r = u;
  r[1 + dir] = -r[1 + dir];
  return r;
}
template <class Eq>
typename Eq::State reflect_state(const Eq&, const typename Eq::State& u, int) {
  return u;
}

template <class Eq>
typename Eq::State ghost_value(const Eq& eq, const Boundary<typename Eq::State>& bc,
                               const typename Eq::State& interior, int dir, double x, double y,
                               double t) {
  switch (bc.kind) {
    case BcKind::Reflecting: return reflect_state(eq, interior, dir);
    case BcKind::Dirichlet: return bc.state(interior, x, y, t);
    default: return interior;
  }
}

template <class State>
void check_periodic_pair(const Boundary<State>& a, const Boundary<State>& b, const char* axis) {
  if ((a.kind == BcKind::Periodic) != (b.kind == BcKind::Periodic))
    throw ConfigError(std::string("unpaired periodic boundary along ") + axis);
  if ((a.kind == BcKind::Dirichlet && !a.state) || (b.kind == BcKind::Dirichlet && !b.state))
    throw ConfigError(std::string("dirichlet boundary without a state function along ") + axis);
}

}  // namespace lwfr

#endif
