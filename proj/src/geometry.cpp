#include "sbm/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sbm/basis.hpp"

namespace sbm {

// ---------------------------------------------------------------------------
// Level-set functions

struct LevelSetFunction::Interpolant {
  MeshLevel mesh;
  LagrangeBasis1D basis;
  int degree;
  int nodes_per_axis;
  std::vector<double> values;

  Interpolant(const MeshLevel &m, int q)
      : mesh(m), basis(LagrangeBasis1D::for_degree(q)), degree(q),
        nodes_per_axis(m.cells_per_axis() * q + 1) {}

  std::int64_t node_index(const MultiIndex &cell, const std::array<int, 3> &a,
                          int dim) const {
    std::int64_t idx = 0;
    for (int k = dim - 1; k >= 0; --k)
      idx = idx * nodes_per_axis + (cell[k] * degree + a[k]);
    return idx;
  }

  double value(const Point &x) const {
    const int dim = mesh.dim();
    const MultiIndex ci = mesh.multi_index(mesh.locate(x));
    const int m = degree + 1;
    std::array<std::array<double, 8>, 3> v{};
    std::int64_t base = 0, stride[3] = {1, 1, 1};
    for (int k = dim - 1; k >= 0; --k)
      base = base * nodes_per_axis + ci[k] * degree;
    for (int k = 0; k < dim; ++k) {
      const double lo = mesh.box().lower[k] + ci[k] * mesh.cell_size(k);
      basis.evaluate((x[k] - lo) / mesh.cell_size(k), v[k].data(), nullptr, nullptr);
      if (k > 0)
        stride[k] = stride[k - 1] * nodes_per_axis;
    }
    if (dim == 1) {
      double s = 0.0;
      for (int a0 = 0; a0 < m; ++a0)
        s += values[base + a0] * v[0][a0];
      return s;
    }
    const int m2 = dim > 2 ? m : 1;
    if (dim == 2)
      v[2][0] = 1.0;
    double s = 0.0;
    for (int a2 = 0; a2 < m2; ++a2) {
      double s1 = 0.0;
      for (int a1 = 0; a1 < m; ++a1) {
        const double *row = values.data() + base + a2 * stride[2] + a1 * stride[1];
        double s0 = 0.0;
        for (int a0 = 0; a0 < m; ++a0)
          s0 += row[a0] * v[0][a0];
        s1 += s0 * v[1][a1];
      }
      s += s1 * v[2][a2];
    }
    return s;
  }

  // order: 0 = value, 1 = + gradient, 2 = + Hessian
  LevelSetSample evaluate(const Point &x, int order) const {
    const int dim = mesh.dim();
    const std::int64_t cell = mesh.locate(x);
    const MultiIndex ci = mesh.multi_index(cell);
    const Point lo = mesh.cell_lower(cell);
    const int m = degree + 1;

    std::array<std::array<double, 8>, 3> v{}, d{}, dd{};
    for (int k = 0; k < 3; ++k) {
      v[k][0] = 1.0;
    }
    for (int k = 0; k < dim; ++k) {
      const double xi = (x[k] - lo[k]) / mesh.cell_size(k);
      basis.evaluate(xi, v[k].data(), order > 0 ? d[k].data() : nullptr,
                     order > 1 ? dd[k].data() : nullptr);
      const double inv_h = 1.0 / mesh.cell_size(k);
      for (int a = 0; a < m; ++a) {
        d[k][a] *= inv_h;
        dd[k][a] *= inv_h * inv_h;
      }
    }

    LevelSetSample s;
    const int m1 = dim > 1 ? m : 1;
    const int m2 = dim > 2 ? m : 1;
    for (int a2 = 0; a2 < m2; ++a2)
      for (int a1 = 0; a1 < m1; ++a1)
        for (int a0 = 0; a0 < m; ++a0) {
          const std::array<int, 3> a{a0, a1, a2};
          const double u = values[node_index(ci, a, dim)];
          s.value += u * v[0][a0] * v[1][a1] * v[2][a2];
          if (order == 0)
            continue;
          for (int k = 0; k < dim; ++k) {
            double g = u;
            for (int j = 0; j < dim; ++j)
              g *= j == k ? d[j][a[j]] : v[j][a[j]];
            s.gradient[k] += g;
            if (order < 2)
              continue;
            for (int l = 0; l < dim; ++l) {
              double hkl = u;
              for (int j = 0; j < dim; ++j) {
                if (j == k && j == l)
                  hkl *= dd[j][a[j]];
                else if (j == k || j == l)
                  hkl *= d[j][a[j]];
                else
                  hkl *= v[j][a[j]];
              }
              s.hessian[k][l] += hkl;
            }
          }
        }
    return s;
  }
};

LevelSetFunction LevelSetFunction::analytic(int dim, ValueFn value,
                                            SampleFn sample, std::string name) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("level set dimension must be 1, 2 or 3");
  if (!value || !sample)
    throw std::invalid_argument("analytic level set needs value and sample callbacks");
  LevelSetFunction f;
  f.dim_ = dim;
  f.name_ = std::move(name);
  f.value_ = std::move(value);
  f.sample_ = std::move(sample);
  return f;
}

LevelSetFunction LevelSetFunction::interpolate(const LevelSetFunction &exact,
                                               const MeshLevel &mesh,
                                               int degree) {
  if (mesh.dim() != exact.dim())
    throw std::invalid_argument("level set and mesh dimensions differ");
  auto data = std::make_shared<Interpolant>(mesh, degree);
  const int dim = mesh.dim();
  const int np = data->nodes_per_axis;
  std::int64_t total = 1;
  for (int k = 0; k < dim; ++k)
    total *= np;
  data->values.resize(total);

  const auto &nodes = data->basis.nodes();
  const Point lower = mesh.box().lower;
#pragma omp parallel for schedule(static)
  for (std::int64_t n = 0; n < total; ++n) {
    std::int64_t r = n;
    Point x{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) {
      const int i = static_cast<int>(r % np);
      r /= np;
      const int c = std::min(i / degree, mesh.cells_per_axis() - 1);
      const int a = i - c * degree;
      x[k] = lower[k] + (c + nodes[a]) * mesh.cell_size(k);
    }
    data->values[n] = exact.value(x);
  }

  LevelSetFunction f;
  f.dim_ = dim;
  f.name_ = exact.name_;
  f.interp_ = std::move(data);
  return f;
}

LevelSetFunction
LevelSetFunction::with_exact_projection(ProjectionFn projection) const {
  LevelSetFunction f = *this;
  f.projection_ = std::move(projection);
  return f;
}

double LevelSetFunction::value(const Point &x) const {
  if (interp_)
    return interp_->value(x);
  return value_(x);
}

LevelSetSample LevelSetFunction::evaluate(const Point &x) const {
  if (interp_)
    return interp_->evaluate(x, 2);
  return sample_(x);
}

LevelSetFunction::BoxSampler LevelSetFunction::sampler(const Point &lower,
                                                      const Point &upper) const {
  BoxSampler s;
  s.phi_ = this;
  if (!interp_ || interp_->degree > 3)
    return s;
  const MeshLevel &mesh = interp_->mesh;
  Point center{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k)
    center[k] = 0.5 * (lower[k] + upper[k]);
  const std::int64_t cell = mesh.locate(center);
  const Point lo = mesh.cell_lower(cell), hi = mesh.cell_upper(cell);
  for (int k = 0; k < dim_; ++k) {
    const double slack = 1e-12 * mesh.cell_size(k);
    if (lower[k] < lo[k] - slack || upper[k] > hi[k] + slack)
      return s;
  }
  const MultiIndex ci = mesh.multi_index(cell);
  const int m = interp_->degree + 1;
  const int m1 = dim_ > 1 ? m : 1;
  const int m2 = dim_ > 2 ? m : 1;
  for (int a2 = 0; a2 < m2; ++a2)
    for (int a1 = 0; a1 < m1; ++a1)
      for (int a0 = 0; a0 < m; ++a0)
        s.coefficients_[(a2 * m + a1) * m + a0] =
            interp_->values[interp_->node_index(ci, {a0, a1, a2}, dim_)];
  s.lower_ = mesh.cell_lower(cell);
  for (int k = 0; k < dim_; ++k)
    s.inv_h_[k] = 1.0 / mesh.cell_size(k);
  s.n_nodes_ = m;
  const auto &nodes = interp_->basis.nodes();
  for (int i = 0; i < m; ++i) {
    s.nodes_[i] = nodes[i];
    double den = 1.0;
    for (int j = 0; j < m; ++j)
      if (j != i)
        den *= nodes[i] - nodes[j];
    s.inv_denominator_[i] = 1.0 / den;
  }
  s.local_ = interp_.get();
  return s;
}

void LevelSetFunction::BoxSampler::weights(
    const Point &x, std::array<std::array<double, 4>, 3> &v,
    std::array<std::array<double, 4>, 3> *d) const {
  const int n = n_nodes_;
  for (int k = 0; k < 3; ++k) {
    v[k].fill(0.0);
    v[k][0] = 1.0;
    if (d)
      (*d)[k].fill(0.0);
  }
  for (int k = 0; k < phi_->dim_; ++k) {
    const double t = (x[k] - lower_[k]) * inv_h_[k];
    std::array<double, 4> diff{};
    for (int j = 0; j < n; ++j)
      diff[j] = t - nodes_[j];
    for (int i = 0; i < n; ++i) {
      double w = inv_denominator_[i];
      for (int j = 0; j < n; ++j)
        if (j != i)
          w *= diff[j];
      v[k][i] = w;
      if (!d)
        continue;
      double s = 0.0;
      for (int l = 0; l < n; ++l) {
        if (l == i)
          continue;
        double p = 1.0;
        for (int j = 0; j < n; ++j)
          if (j != i && j != l)
            p *= diff[j];
        s += p;
      }
      (*d)[k][i] = s * inv_denominator_[i] * inv_h_[k];
    }
  }
}

double LevelSetFunction::BoxSampler::operator()(const Point &x) const {
  if (!local_)
    return phi_->value(x);
  const int dim = phi_->dim_;
  const int m = n_nodes_;
  std::array<std::array<double, 4>, 3> v;
  weights(x, v, nullptr);
  const int m1 = dim > 1 ? m : 1;
  const int m2 = dim > 2 ? m : 1;
  double s = 0.0;
  for (int a2 = 0; a2 < m2; ++a2) {
    double s1 = 0.0;
    for (int a1 = 0; a1 < m1; ++a1) {
      const double *row = coefficients_.data() + (a2 * m + a1) * m;
      double s0 = 0.0;
      for (int a0 = 0; a0 < m; ++a0)
        s0 += row[a0] * v[0][a0];
      s1 += s0 * v[1][a1];
    }
    s += s1 * v[2][a2];
  }
  return s;
}

Point LevelSetFunction::BoxSampler::gradient(const Point &x) const {
  if (!local_)
    return phi_->gradient(x);
  const int dim = phi_->dim_;
  const int m = n_nodes_;
  std::array<std::array<double, 4>, 3> v, d;
  weights(x, v, &d);
  const int m1 = dim > 1 ? m : 1;
  const int m2 = dim > 2 ? m : 1;
  Point g{0.0, 0.0, 0.0};
  for (int a2 = 0; a2 < m2; ++a2)
    for (int a1 = 0; a1 < m1; ++a1)
      for (int a0 = 0; a0 < m; ++a0) {
        const double c = coefficients_[(a2 * m + a1) * m + a0];
        g[0] += c * d[0][a0] * v[1][a1] * v[2][a2];
        if (dim > 1)
          g[1] += c * v[0][a0] * d[1][a1] * v[2][a2];
        if (dim > 2)
          g[2] += c * v[0][a0] * v[1][a1] * d[2][a2];
      }
  return g;
}

Point LevelSetFunction::gradient(const Point &x) const {
  if (interp_)
    return interp_->evaluate(x, 1).gradient;
  return sample_(x).gradient;
}

int LevelSetFunction::interpolation_degree() const {
  return interp_ ? interp_->degree : 0;
}

int level_set_degree(int solver_degree) {
  return solver_degree == 1 ? 2 : solver_degree;
}

LevelSetFunction make_geometry(const std::string &name, int dim) {
  if (name == "disk") {
    auto value = [](const Point &x) { return dot(x, x) - 1.0; };
    auto sample = [dim](const Point &x) {
      LevelSetSample s;
      s.value = dot(x, x) - 1.0;
      for (int k = 0; k < dim; ++k) {
        s.gradient[k] = 2.0 * x[k];
        s.hessian[k][k] = 2.0;
      }
      return s;
    };
    return LevelSetFunction::analytic(dim, value, sample, "disk");
  }
  if (name == "deformed") {
    if (dim != 2)
      throw std::invalid_argument("the deformed geometry is two-dimensional");
    constexpr double pi = std::numbers::pi;
    auto value = [](const Point &x) {
      const double sn = std::sin(pi * x[0]);
      return (1.0 - 0.75 * sn * sn) * (x[0] * x[0] + x[1] * x[1]) - 0.2;
    };
    auto sample = [](const Point &x) {
      const double sn = std::sin(pi * x[0]);
      const double s = 1.0 - 0.75 * sn * sn;
      const double ds = -0.75 * pi * std::sin(2.0 * pi * x[0]);
      const double dds = -1.5 * pi * pi * std::cos(2.0 * pi * x[0]);
      const double r2 = x[0] * x[0] + x[1] * x[1];
      LevelSetSample out;
      out.value = s * r2 - 0.2;
      out.gradient = {ds * r2 + 2.0 * x[0] * s, 2.0 * x[1] * s, 0.0};
      out.hessian[0][0] = dds * r2 + 4.0 * x[0] * ds + 2.0 * s;
      out.hessian[0][1] = out.hessian[1][0] = 2.0 * x[1] * ds;
      out.hessian[1][1] = 2.0 * s;
      return out;
    };
    return LevelSetFunction::analytic(2, value, sample, "deformed");
  }
  throw std::invalid_argument("unknown geometry '" + name + "'");
}

LevelSetFunction box_domain(const Point &center, const Point &half_widths,
                            int dim) {
  auto value = [=](const Point &x) {
    double v = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim; ++k)
      v = std::max(v, std::abs(x[k] - center[k]) - half_widths[k]);
    return v;
  };
  auto sample = [=](const Point &x) {
    LevelSetSample s;
    s.value = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int k = 0; k < dim; ++k) {
      const double t = std::abs(x[k] - center[k]) - half_widths[k];
      if (t > s.value) {
        s.value = t;
        arg = k;
      }
    }
    s.gradient[arg] = x[arg] >= center[arg] ? 1.0 : -1.0;
    return s;
  };
  auto project = [=](const Point &x) {
    Point y = x;
    bool inside = true;
    for (int k = 0; k < dim; ++k)
      if (std::abs(x[k] - center[k]) > half_widths[k])
        inside = false;
    if (!inside) {
      for (int k = 0; k < dim; ++k)
        y[k] = std::clamp(x[k], center[k] - half_widths[k],
                          center[k] + half_widths[k]);
      return y;
    }
    int arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim; ++k) {
      const double t = std::abs(x[k] - center[k]) - half_widths[k];
      if (t > best) {
        best = t;
        arg = k;
      }
    }
    y[arg] = x[arg] >= center[arg] ? center[arg] + half_widths[arg]
                                   : center[arg] - half_widths[arg];
    return y;
  };
  return LevelSetFunction::analytic(dim, value, sample, "box")
      .with_exact_projection(project);
}

// ---------------------------------------------------------------------------
// Classification

std::int64_t CellClassification::n_active() const {
  std::int64_t n = 0;
  for (auto a : active)
    n += a;
  return n;
}

int default_fraction_depth(int dim) { return dim >= 3 ? 5 : 8; }

namespace {

double fraction_recursive(const Point &lo, const Point &hi, int dim,
                          const LevelSetFunction::BoxSampler &sample, int depth) {
  const int n_corners = 1 << dim;
  Point center{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k)
    center[k] = 0.5 * (lo[k] + hi[k]);

  int n_inside = 0;
  for (int c = 0; c < n_corners; ++c) {
    Point x{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k)
      x[k] = (c >> k) & 1 ? hi[k] : lo[k];
    n_inside += sample(x) < 0.0;
  }
  const double phi_c = sample(center);
  n_inside += phi_c < 0.0;
  const int n_samples = n_corners + 1;

  if (n_inside == 0 || n_inside == n_samples) {
    const double diag = norm(hi - lo);
    if (std::abs(phi_c) > diag * norm(sample.gradient(center)))
      return n_inside == 0 ? 0.0 : 1.0;
  }
  if (depth == 0)
    return static_cast<double>(n_inside) / n_samples;

  double sum = 0.0;
  for (int c = 0; c < n_corners; ++c) {
    Point clo = lo, chi = hi;
    for (int k = 0; k < dim; ++k) {
      if ((c >> k) & 1)
        clo[k] = center[k];
      else
        chi[k] = center[k];
    }
    sum += fraction_recursive(clo, chi, dim, sample, depth - 1);
  }
  return sum / n_corners;
}

} // namespace

double volume_fraction(const Point &lower, const Point &upper, int dim,
                       const LevelSetFunction &phi, int depth) {
  if (depth < 0)
    throw std::invalid_argument("volume fraction depth must be >= 0");
  if (depth == 0) {
    Point c{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k)
      c[k] = 0.5 * (lower[k] + upper[k]);
    return phi.value(c) < 0.0 ? 1.0 : 0.0;
  }
  return fraction_recursive(lower, upper, dim, phi.sampler(lower, upper), depth);
}

CellClassification classify(const MeshLevel &mesh, const LevelSetFunction &phi,
                            double lambda, int depth, Exec exec) {
  if (!(lambda > 0.0) || lambda > 1.0)
    throw std::invalid_argument("activity threshold must lie in (0, 1]");
  const std::int64_t n = mesh.n_cells();
  CellClassification cls;
  cls.threshold = lambda;
  cls.category.resize(n);
  cls.fraction.resize(n);
  cls.active.resize(n);
#pragma omp parallel for schedule(dynamic, 64) if (exec == Exec::parallel)
  for (std::int64_t c = 0; c < n; ++c) {
    const double f = volume_fraction(mesh.cell_lower(c), mesh.cell_upper(c),
                                     mesh.dim(), phi, depth);
    cls.fraction[c] = f;
    cls.category[c] = f == 1.0   ? CellCategory::interior
                      : f == 0.0 ? CellCategory::exterior
                                 : CellCategory::intersected;
    cls.active[c] = (f == 1.0 || f >= lambda) ? 1 : 0;
  }
  return cls;
}

std::vector<SurrogateFace> surrogate_boundary(const MeshLevel &mesh,
                                              const CellClassification &cls) {
  std::vector<SurrogateFace> faces;
  for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
    if (!cls.is_active(c))
      continue;
    for (int axis = 0; axis < mesh.dim(); ++axis)
      for (Side side : {Side::low, Side::high}) {
        const std::int64_t nb = mesh.neighbor_of(c, axis, side);
        if (nb == outside_box || !cls.is_active(nb))
          faces.push_back({c, axis, side, axis_normal(axis, side)});
      }
  }
  return faces;
}

// ---------------------------------------------------------------------------
// Closest-point projection

namespace {

// Gaussian elimination with partial pivoting on a (n x n) system, n <= 4.
bool solve_small(std::array<std::array<double, 5>, 4> &a, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col]))
        piv = r;
    if (std::abs(a[piv][col]) < 1e-300)
      return false;
    std::swap(a[piv], a[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int k = col; k <= n; ++k)
        a[r][k] -= f * a[col][k];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = a[r][n];
    for (int k = r + 1; k < n; ++k)
      s -= a[r][k] * a[k][n];
    a[r][n] = s / a[r][r];
  }
  return true;
}

bool finite(const Point &x) {
  return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
}

ShiftRecord make_record(const Point &x_tilde, const Point &x,
                        const Point &normal, double h, bool fallback) {
  ShiftRecord r;
  r.surrogate_point = x_tilde;
  r.boundary_point = x;
  r.shift = x - x_tilde;
  r.normal = normal;
  const double mag = norm(r.shift) / h;
  r.signed_shift = dot(r.shift, normal) < 0.0 ? -mag : mag;
  r.fallback = fallback;
  return r;
}

} // namespace

ShiftRecord closest_point(const Point &x_tilde, const LevelSetFunction &phi,
                          const Point &normal, double h,
                          const ProjectionOptions &opts) {
  if (const auto *proj = phi.exact_projection())
    return make_record(x_tilde, (*proj)(x_tilde), normal, h, false);

  const int dim = phi.dim();
  const double tol = opts.tolerance;
  int steps = 0;

  const LevelSetSample s0 = phi.evaluate(x_tilde);
  const double g2 = dot(s0.gradient, s0.gradient);
  if (std::abs(s0.value) <= tol)
    return make_record(x_tilde, x_tilde, normal, h, false);

  if (g2 > 0.0) {
    Point x = x_tilde - (s0.value / g2) * s0.gradient;
    double mu = 2.0 * s0.value / g2;
    const double radius = 10.0 * norm(x - x_tilde) + 1e-8;

    for (int it = 0; it < opts.max_newton_iterations; ++it, ++steps) {
      const LevelSetSample s = phi.evaluate(x);
      Point stationarity{0.0, 0.0, 0.0};
      for (int k = 0; k < dim; ++k)
        stationarity[k] = 2.0 * (x[k] - x_tilde[k]) + mu * s.gradient[k];
      if (std::abs(s.value) <= tol && norm(stationarity) <= tol)
        return make_record(x_tilde, x, normal, h, false);

      // [2I + mu H, grad phi; grad phi^T, 0] [dx; dmu] = -[stationarity; phi]
      std::array<std::array<double, 5>, 4> a{};
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j)
          a[i][j] = (i == j ? 2.0 : 0.0) + mu * s.hessian[i][j];
        a[i][dim] = s.gradient[i];
        a[dim][i] = s.gradient[i];
        a[i][dim + 1] = -stationarity[i];
      }
      a[dim][dim] = 0.0;
      a[dim][dim + 1] = -s.value;
      if (!solve_small(a, dim + 1))
        break;
      for (int k = 0; k < dim; ++k)
        x[k] += a[k][dim + 1];
      mu += a[dim][dim + 1];
      if (!finite(x) || !std::isfinite(mu) || norm(x - x_tilde) > radius)
        break;
    }
  }

  // Damped gradient flow onto the zero level set.
  Point x = x_tilde;
  double tau = 1.0;
  LevelSetSample s = s0;
  while (steps < opts.max_total_steps) {
    if (std::abs(s.value) <= tol)
      return make_record(x_tilde, x, normal, h, true);
    const double gg = dot(s.gradient, s.gradient);
    if (!(gg > 0.0))
      break;
    const Point trial = x - (tau * s.value / gg) * s.gradient;
    const LevelSetSample st = phi.evaluate(trial);
    ++steps;
    if (std::abs(st.value) < std::abs(s.value)) {
      x = trial;
      s = st;
      tau = std::min(1.0, 2.0 * tau);
    } else {
      tau *= 0.5;
    }
  }
  throw ProjectionFailure("closest-point projection did not converge; the "
                          "geometry is likely under-resolved near this point");
}

std::pair<double, double> shift_statistics(std::span<const ShiftRecord> records) {
  if (records.empty())
    throw std::invalid_argument("shift statistics need at least one record");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto &r : records) {
    lo = std::min(lo, r.signed_shift);
    hi = std::max(hi, r.signed_shift);
  }
  return {lo, hi};
}

} // namespace sbm
