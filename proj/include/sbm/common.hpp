#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace sbm {

/// Points and vectors always carry three components; entries beyond the
/// problem dimension are kept at zero so that dot products and norms can
/// ignore the dimension.
using Point = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;
using Tensor2 = std::array<std::array<double, 3>, 3>;

/// Selects between the OpenMP kernel and its serial reference.
enum class Exec { serial, parallel };

enum Side : int { low = 0, high = 1 };

class ProjectionFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SingularBlock : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SolverBreakdown : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class NoConvergence : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double dot(const Point &a, const Point &b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Point &a) { return std::sqrt(dot(a, a)); }

inline Point operator+(const Point &a, const Point &b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Point operator-(const Point &a, const Point &b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Point operator*(double s, const Point &a) {
  return {s * a[0], s * a[1], s * a[2]};
}

/// Unit vector along `axis`, pointing to the `side` of a cell.
inline Point axis_normal(int axis, Side side) {
  Point n{0.0, 0.0, 0.0};
  n[axis] = side == Side::high ? 1.0 : -1.0;
  return n;
}

} // namespace sbm
