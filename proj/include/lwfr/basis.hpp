#ifndef LWFR_BASIS_HPP
#define LWFR_BASIS_HPP

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "lwfr/types.hpp"

namespace lwfr {

enum class NodeFamily { GaussLegendre, GaussLobatto };

namespace detail {

/// P_n(x) and P_n'(x) on [-1,1] by the three-term recurrence.
inline std::pair<double, double> legendre_and_derivative(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  // p1 = P_n, p0 = P_{n-1}
  double dp;
  if (std::abs(x) == 1.0) {
    dp = 0.5 * n * (n + 1.0) * std::pow(x, n + 1);
  } else {
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  }
  return {p1, dp};
}

inline double legendre(int n, double x) { return legendre_and_derivative(n, x).first; }

}  // namespace detail

/// Gauss-Legendre rule with n points mapped to [0,1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_01(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre_01: point count must be >= 1");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess for the i-th root counted from the right
    double r = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = detail::legendre_and_derivative(n, r);
      const double dr = p / dp;
      r -= dr;
      if (std::abs(dr) < 1e-15) break;
    }
    auto [p, dp] = detail::legendre_and_derivative(n, r);
    (void)p;
    // roots come out in decreasing order; store increasing
    x[n - 1 - i] = 0.5 * (r + 1.0);
    w[n - 1 - i] = 1.0 / ((1.0 - r * r) * dp * dp);  // 2/((1-r^2)P'^2) halved
  }
  // enforce exact mirror symmetry
  for (int i = 0; i < n / 2; ++i) {
    const double xs = 0.5 * (x[i] + (1.0 - x[n - 1 - i]));
    x[i] = xs;
    x[n - 1 - i] = 1.0 - xs;
    const double ws = 0.5 * (w[i] + w[n - 1 - i]);
    w[i] = w[n - 1 - i] = ws;
  }
  if (n % 2 == 1) x[n / 2] = 0.5;
  return {x, w};
}

/// Gauss-Lobatto-Legendre rule with n >= 2 points mapped to [0,1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_lobatto_01(int n) {
  if (n < 2) throw InvalidArgument("gauss_lobatto_01: point count must be >= 2");
  const int N = n - 1;
  std::vector<double> x(n), w(n);
  x[0] = 0.0;
  x[N] = 1.0;
  for (int i = 1; i < N; ++i) {
    double r = -std::cos(std::numbers::pi * i / N);
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = detail::legendre_and_derivative(N, r);
      // (1 - r^2) P'' = 2 r P' - N(N+1) P
      const double d2p = (2.0 * r * dp - N * (N + 1.0) * p) / (1.0 - r * r);
      const double dr = dp / d2p;
      r -= dr;
      if (std::abs(dr) < 1e-15) break;
    }
    x[i] = 0.5 * (r + 1.0);
  }
  for (int i = 0; i <= N; ++i) {
    const double p = detail::legendre(N, 2.0 * x[i] - 1.0);
    w[i] = 1.0 / (N * (N + 1.0) * p * p);
  }
  for (int i = 0; i < n / 2; ++i) {
    const double xs = 0.5 * (x[i] + (1.0 - x[N - i]));
    x[i] = xs;
    x[N - i] = 1.0 - xs;
    const double ws = 0.5 * (w[i] + w[N - i]);
    w[i] = w[N - i] = ws;
  }
  if (n % 2 == 1) x[n / 2] = 0.5;
  return {x, w};
}

/// Nodal basis on the reference element [0,1].
///
/// Matrices are stored row-major: diff_matrix[i * (N+1) + j] = l_j'(xi_i),
/// legendre_vandermonde[k * (N+1) + q] = L_k(xi_q) w_q with L_k orthonormal on [0,1].
struct Basis {
  int degree = 0;
  NodeFamily family = NodeFamily::GaussLegendre;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> barycentric;
  std::vector<double> diff_matrix;
  std::vector<double> interp_left;   // l_j(0)
  std::vector<double> interp_right;  // l_j(1)
  std::vector<double> correction_grad_left;   // g_L'(xi_j)
  std::vector<double> correction_grad_right;  // g_R'(xi_j)
  std::vector<double> legendre_vandermonde;

  int size() const { return degree + 1; }
  double D(int i, int j) const { return diff_matrix[i * size() + j]; }

  /// Row of Lagrange values l_j(x) at an arbitrary point of [0,1].
  std::vector<double> interpolation_row(double x) const {
    const int n = size();
    std::vector<double> row(n, 0.0);
    for (int j = 0; j < n; ++j) {
      if (x == nodes[j]) {
        row[j] = 1.0;
        return row;
      }
    }
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      row[j] = barycentric[j] / (x - nodes[j]);
      denom += row[j];
    }
    for (double& r : row) r /= denom;
    return row;
  }
};

/// Orthonormal Legendre polynomial on [0,1]: sqrt(2k+1) P_k(2x-1).
inline double legendre01(int k, double x) {
  return std::sqrt(2.0 * k + 1.0) * detail::legendre(k, 2.0 * x - 1.0);
}

inline Basis build_basis(int N, NodeFamily family = NodeFamily::GaussLegendre) {
  if (N < 1) throw InvalidArgument("build_basis: degree must be >= 1");
  Basis b;
  b.degree = N;
  b.family = family;
  const int n = N + 1;
  switch (family) {
    case NodeFamily::GaussLegendre:
      std::tie(b.nodes, b.weights) = gauss_legendre_01(n);
      break;
    case NodeFamily::GaussLobatto:
      std::tie(b.nodes, b.weights) = gauss_lobatto_01(n);
      break;
    default:
      throw InvalidArgument("build_basis: unsupported node family");
  }

  const auto& x = b.nodes;
  b.barycentric.assign(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) b.barycentric[j] /= (x[j] - x[k]);

  b.diff_matrix.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = (b.barycentric[j] / b.barycentric[i]) / (x[i] - x[j]);
      b.diff_matrix[i * n + j] = d;
      diag -= d;
    }
    b.diff_matrix[i * n + i] = diag;
  }

  b.interp_left = b.interpolation_row(0.0);
  b.interp_right = b.interpolation_row(1.0);

  // Radau correction functions. On [-1,1]: g_L = (-1)^N/2 (P_N - P_{N+1}),
  // g_R(x) = g_L(-x). Mapping to [0,1] multiplies derivatives by 2.
  b.correction_grad_left.resize(n);
  b.correction_grad_right.resize(n);
  const double sign = (N % 2 == 0) ? 1.0 : -1.0;
  for (int j = 0; j < n; ++j) {
    const double r = 2.0 * x[j] - 1.0;
    const double dpn = detail::legendre_and_derivative(N, r).second;
    const double dpn1 = detail::legendre_and_derivative(N + 1, r).second;
    b.correction_grad_left[j] = 2.0 * sign * 0.5 * (dpn - dpn1);
    b.correction_grad_right[j] = 2.0 * 0.5 * (dpn + dpn1);
  }

  b.legendre_vandermonde.assign(n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int q = 0; q < n; ++q)
      b.legendre_vandermonde[k * n + q] = legendre01(k, x[q]) * b.weights[q];
  return b;
}

/// Modal coefficients q_k = sum_q values_q L_k(xi_q) w_q (orthonormal on [0,1]).
inline std::vector<double> nodal_to_legendre(const std::vector<double>& values, const Basis& basis) {
  const int n = basis.size();
  if (static_cast<int>(values.size()) != n)
    throw InvalidArgument("nodal_to_legendre: value count does not match basis");
  std::vector<double> coeffs(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int q = 0; q < n; ++q) coeffs[k] += basis.legendre_vandermonde[k * n + q] * values[q];
  return coeffs;
}

/// Inverse of nodal_to_legendre: evaluate the modal expansion at the nodes.
inline std::vector<double> legendre_to_nodal(const std::vector<double>& coeffs, const Basis& basis) {
  const int n = basis.size();
  std::vector<double> values(n, 0.0);
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < n; ++k) values[q] += coeffs[k] * legendre01(k, basis.nodes[q]);
  return values;
}

/// Compile-time sized copy of the operators used in the hot loops.
template <int N>
struct Operators {
  static constexpr int n = N + 1;
  std::array<double, n> nodes{};
  std::array<double, n> weights{};
  std::array<std::array<double, n>, n> D{};
  std::array<double, n> left{};
  std::array<double, n> right{};
  std::array<double, n> gl{};
  std::array<double, n> gr{};
  std::array<std::array<double, n>, n> vandermonde{};

  Operators() = default;
  explicit Operators(const Basis& b) {
    if (b.degree != N) throw InvalidArgument("Operators: basis degree mismatch");
    for (int i = 0; i < n; ++i) {
      nodes[i] = b.nodes[i];
      weights[i] = b.weights[i];
      left[i] = b.interp_left[i];
      right[i] = b.interp_right[i];
      gl[i] = b.correction_grad_left[i];
      gr[i] = b.correction_grad_right[i];
      for (int j = 0; j < n; ++j) {
        D[i][j] = b.diff_matrix[i * n + j];
        vandermonde[i][j] = b.legendre_vandermonde[i * n + j];
      }
    }
  }
};

}  // namespace lwfr

#endif
