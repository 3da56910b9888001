#include "sbm/basis.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbm {

namespace {

// Legendre polynomial P_n and its derivative on [-1,1].
void legendre(int n, double x, double &p, double &dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

constexpr int max_1d_points = 16;

} // namespace

void gauss_legendre(int n, std::vector<double> &points,
                    std::vector<double> &weights) {
  if (n < 1 || n > max_1d_points)
    throw std::invalid_argument("unsupported Gauss-Legendre order");
  points.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0, dp = 1;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    legendre(n, x, p, dp);
    // map from [-1,1] to [0,1], ascending order
    points[n - 1 - i] = 0.5 * (x + 1.0);
    weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

std::vector<double> gauss_lobatto_points(int n) {
  if (n < 2 || n > max_1d_points)
    throw std::invalid_argument("unsupported Gauss-Lobatto size");
  const int p = n - 1;
  std::vector<double> x(n);
  x[0] = 0.0;
  x[p] = 1.0;
  // interior points are the roots of P_p'
  for (int i = 1; i < p; ++i) {
    double t = -std::cos(std::numbers::pi * i / p);
    for (int it = 0; it < 100; ++it) {
      double pp, dp;
      legendre(p, t, pp, dp);
      const double d2p = (2.0 * t * dp - p * (p + 1) * pp) / (1.0 - t * t);
      const double dt = dp / d2p;
      t -= dt;
      if (std::abs(dt) < 1e-16)
        break;
    }
    x[i] = 0.5 * (t + 1.0);
  }
  return x;
}

LagrangeBasis1D::LagrangeBasis1D(std::vector<double> nodes)
    : nodes_(std::move(nodes)) {
  if (nodes_.empty())
    throw std::invalid_argument("Lagrange basis needs at least one node");
  inv_denominator_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    double d = 1.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j)
      if (j != i)
        d *= nodes_[i] - nodes_[j];
    inv_denominator_[i] = 1.0 / d;
  }
}

LagrangeBasis1D LagrangeBasis1D::for_degree(int degree) {
  if (degree < 1)
    throw std::invalid_argument("polynomial degree must be >= 1");
  return LagrangeBasis1D(gauss_lobatto_points(degree + 1));
}

void LagrangeBasis1D::evaluate(double x, double *values, double *first,
                               double *second) const {
  const int n = size();
  std::array<double, max_1d_points> diff{};
  for (int j = 0; j < n; ++j)
    diff[j] = x - nodes_[j];

  for (int i = 0; i < n; ++i) {
    if (values) {
      double v = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i)
          v *= diff[j];
      values[i] = v * inv_denominator_[i];
    }
    if (first) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i)
          continue;
        double t = 1.0;
        for (int j = 0; j < n; ++j)
          if (j != i && j != k)
            t *= diff[j];
        s += t;
      }
      first[i] = s * inv_denominator_[i];
    }
    if (second) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i)
          continue;
        for (int l = 0; l < n; ++l) {
          if (l == i || l == k)
            continue;
          double t = 1.0;
          for (int j = 0; j < n; ++j)
            if (j != i && j != k && j != l)
              t *= diff[j];
          s += t;
        }
      }
      second[i] = s * inv_denominator_[i];
    }
  }
}

TensorBasis::TensorBasis(int degree, int dim)
    : basis_(LagrangeBasis1D::for_degree(degree)), dim_(dim) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("basis dimension must be 1, 2 or 3");
  n_dofs_ = 1;
  for (int k = 0; k < dim; ++k)
    n_dofs_ *= degree + 1;
}

std::vector<Point> TensorBasis::support_points() const {
  const int m = basis_.size();
  const auto &nodes = basis_.nodes();
  std::vector<Point> pts(n_dofs_);
  for (int i = 0; i < n_dofs_; ++i) {
    int r = i;
    Point p{0.0, 0.0, 0.0};
    for (int k = 0; k < dim_; ++k) {
      p[k] = nodes[r % m];
      r /= m;
    }
    pts[i] = p;
  }
  return pts;
}

namespace {

struct AxisTables {
  std::array<std::array<double, max_1d_points>, 3> v{}, d{}, dd{};
};

} // namespace

void TensorBasis::values(const Point &xi, std::span<double> out) const {
  const int m = basis_.size();
  AxisTables t;
  for (int k = 0; k < dim_; ++k)
    basis_.evaluate(xi[k], t.v[k].data());
  for (int i = 0; i < n_dofs_; ++i) {
    int r = i;
    double v = 1.0;
    for (int k = 0; k < dim_; ++k) {
      v *= t.v[k][r % m];
      r /= m;
    }
    out[i] = v;
  }
}

void TensorBasis::values_and_gradients(const Point &xi, std::span<double> vals,
                                       std::span<Point> grads) const {
  const int m = basis_.size();
  AxisTables t;
  for (int k = 0; k < dim_; ++k)
    basis_.evaluate(xi[k], t.v[k].data(), t.d[k].data());
  for (int i = 0; i < n_dofs_; ++i) {
    std::array<int, 3> a{0, 0, 0};
    int r = i;
    for (int k = 0; k < dim_; ++k) {
      a[k] = r % m;
      r /= m;
    }
    double v = 1.0;
    Point g{0.0, 0.0, 0.0};
    for (int k = 0; k < dim_; ++k) {
      v *= t.v[k][a[k]];
      double gk = 1.0;
      for (int j = 0; j < dim_; ++j)
        gk *= j == k ? t.d[j][a[j]] : t.v[j][a[j]];
      g[k] = gk;
    }
    if (!vals.empty())
      vals[i] = v;
    grads[i] = g;
  }
}

void TensorBasis::hessians(const Point &xi, std::span<double> vals,
                           std::span<Point> grads,
                           std::span<Tensor2> hess) const {
  const int m = basis_.size();
  AxisTables t;
  for (int k = 0; k < dim_; ++k)
    basis_.evaluate(xi[k], t.v[k].data(), t.d[k].data(), t.dd[k].data());
  for (int i = 0; i < n_dofs_; ++i) {
    std::array<int, 3> a{0, 0, 0};
    int r = i;
    for (int k = 0; k < dim_; ++k) {
      a[k] = r % m;
      r /= m;
    }
    double v = 1.0;
    Point g{0.0, 0.0, 0.0};
    Tensor2 h{};
    for (int k = 0; k < dim_; ++k)
      v *= t.v[k][a[k]];
    for (int k = 0; k < dim_; ++k) {
      double gk = 1.0;
      for (int j = 0; j < dim_; ++j)
        gk *= j == k ? t.d[j][a[j]] : t.v[j][a[j]];
      g[k] = gk;
      for (int l = 0; l < dim_; ++l) {
        double hkl = 1.0;
        for (int j = 0; j < dim_; ++j) {
          if (j == k && j == l)
            hkl *= t.dd[j][a[j]];
          else if (j == k || j == l)
            hkl *= t.d[j][a[j]];
          else
            hkl *= t.v[j][a[j]];
        }
        h[k][l] = hkl;
      }
    }
    if (!vals.empty())
      vals[i] = v;
    if (!grads.empty())
      grads[i] = g;
    hess[i] = h;
  }
}

BasisValues eval_basis(const TensorBasis &basis, const Point &xi,
                       bool need_gradient) {
  BasisValues out;
  out.values.resize(basis.n_dofs());
  if (need_gradient) {
    out.gradients.resize(basis.n_dofs());
    basis.values_and_gradients(xi, out.values, out.gradients);
  } else {
    basis.values(xi, out.values);
  }
  return out;
}

QuadratureRule quadrature(int order, int dim) {
  if (order < 1)
    throw std::invalid_argument("quadrature order must be >= 1");
  if (dim < 0 || dim > 3)
    throw std::invalid_argument("quadrature dimension must be 0..3");
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  QuadratureRule rule;
  rule.dim = dim;
  int n = 1;
  for (int k = 0; k < dim; ++k)
    n *= order;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int q = 0; q < n; ++q) {
    int r = q;
    Point p{0.0, 0.0, 0.0};
    double wt = 1.0;
    for (int k = 0; k < dim; ++k) {
      p[k] = x[r % order];
      wt *= w[r % order];
      r /= order;
    }
    rule.points[q] = p;
    rule.weights[q] = wt;
  }
  return rule;
}

QuadratureRule face_quadrature(int order, int dim, int axis, Side side) {
  const QuadratureRule sub = quadrature(order, dim - 1);
  QuadratureRule rule;
  rule.dim = dim;
  rule.weights = sub.weights;
  rule.points.resize(sub.points.size());
  for (std::size_t q = 0; q < sub.points.size(); ++q) {
    Point p{0.0, 0.0, 0.0};
    int j = 0;
    for (int k = 0; k < dim; ++k)
      p[k] = k == axis ? (side == Side::high ? 1.0 : 0.0) : sub.points[q][j++];
    rule.points[q] = p;
  }
  return rule;
}

Point map_to_reference(const MeshLevel &mesh, std::int64_t cell,
                       const Point &x) {
  const Point lo = mesh.cell_lower(cell);
  Point xi{0.0, 0.0, 0.0};
  for (int k = 0; k < mesh.dim(); ++k)
    xi[k] = (x[k] - lo[k]) / mesh.cell_size(k);
  return xi;
}

Point map_from_reference(const MeshLevel &mesh, std::int64_t cell,
                         const Point &xi) {
  const Point lo = mesh.cell_lower(cell);
  Point x{0.0, 0.0, 0.0};
  for (int k = 0; k < mesh.dim(); ++k)
    x[k] = lo[k] + xi[k] * mesh.cell_size(k);
  return x;
}

} // namespace sbm
