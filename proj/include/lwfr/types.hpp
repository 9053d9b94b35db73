#ifndef LWFR_TYPES_HPP
#define LWFR_TYPES_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace lwfr {

/// Fixed-size vector of conserved variables.
template <std::size_t M>
using Vec = std::array<double, M>;

template <std::size_t M>
constexpr Vec<M> operator+(const Vec<M>& a, const Vec<M>& b) {
  Vec<M> r{};
  for (std::size_t i = 0; i < M; ++i) r[i] = a[i] + b[i];
  return r;
}

template <std::size_t M>
constexpr Vec<M> operator-(const Vec<M>& a, const Vec<M>& b) {
  Vec<M> r{};
  for (std::size_t i = 0; i < M; ++i) r[i] = a[i] - b[i];
  return r;
}

template <std::size_t M>
constexpr Vec<M> operator*(double s, const Vec<M>& a) {
  Vec<M> r{};
  for (std::size_t i = 0; i < M; ++i) r[i] = s * a[i];
  return r;
}

template <std::size_t M>
constexpr Vec<M>& operator+=(Vec<M>& a, const Vec<M>& b) {
  for (std::size_t i = 0; i < M; ++i) a[i] += b[i];
  return a;
}

template <std::size_t M>
constexpr Vec<M>& operator-=(Vec<M>& a, const Vec<M>& b) {
  for (std::size_t i = 0; i < M; ++i) a[i] -= b[i];
  return a;
}

/// a += s * b
template <std::size_t M>
constexpr void axpy(Vec<M>& a, double s, const Vec<M>& b) {
  for (std::size_t i = 0; i < M; ++i) a[i] += s * b[i];
}

template <std::size_t M>
bool all_finite(const Vec<M>& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

template <std::size_t M>
Vec<M> zero_vec() {
  Vec<M> r;
  r.fill(0.0);
  return r;
}

// Error taxonomy. Everything derives from std::runtime_error so callers that
// only care about "the run failed" can catch one type.

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a state that must lie in the admissible set does not.
struct AdmissibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A broken internal invariant (conservation audit, low-order admissibility).
struct InvariantBreach : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lwfr

#endif
