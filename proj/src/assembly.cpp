#include "sbm/assembly.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace sbm {

namespace {

// First failure (by loop index) raised inside a parallel loop, rethrown after
// the loop so the reported error does not depend on the thread count.
template <class E> class FirstError {
public:
  void record(std::int64_t index, const std::string &what) {
#pragma omp critical(sbm_first_error)
    {
      if (index < index_) {
        index_ = index;
        what_ = what;
      }
    }
  }
  void rethrow() const {
    if (index_ != std::numeric_limits<std::int64_t>::max())
      throw E(what_);
  }

private:
  std::int64_t index_ = std::numeric_limits<std::int64_t>::max();
  std::string what_;
};

double degree_factor(PenaltyScaling scaling, int degree) {
  return scaling == PenaltyScaling::p2_over_h ? static_cast<double>(degree) * degree
                                              : static_cast<double>(degree) * (degree + 1);
}

} // namespace

double SbmParameters::sigma_gamma(int degree, double h) const {
  return scaling == PenaltyScaling::flat ? c_gamma
                                         : c_gamma * degree_factor(scaling, degree) / h;
}

double SbmParameters::sigma_face(int degree, double h) const {
  return scaling == PenaltyScaling::flat ? c_face
                                         : c_face * degree_factor(scaling, degree) / h;
}

// ---------------------------------------------------------------------------

LevelOperator::LevelOperator(const MeshLevel &m, int p, CellClassification cls)
    : mesh(m), degree(p), basis(p, m.dim()), classification(std::move(cls)) {
  const std::int64_t n = mesh.n_cells();
  if (static_cast<std::int64_t>(classification.active.size()) != n)
    throw std::invalid_argument("classification does not match the mesh level");
  const int bs = basis.n_dofs();
  layout = {bs, n};
  if (layout.size() > std::numeric_limits<std::int32_t>::max())
    throw std::invalid_argument("number of unknowns exceeds the column index type");

  pattern.block_ptr.assign(n + 1, 0);
  pattern.block_col.reserve(n * (2 * mesh.dim() + 1));
  for (std::int64_t c = 0; c < n; ++c) {
    const std::size_t begin = pattern.block_col.size();
    pattern.block_col.push_back(c);
    if (classification.is_active(c))
      for (int axis = 0; axis < mesh.dim(); ++axis)
        for (Side side : {Side::low, Side::high}) {
          const std::int64_t nb = mesh.neighbor_of(c, axis, side);
          if (nb != outside_box && classification.is_active(nb))
            pattern.block_col.push_back(nb);
        }
    std::sort(pattern.block_col.begin() + begin, pattern.block_col.end());
    pattern.block_ptr[c + 1] = static_cast<std::int64_t>(pattern.block_col.size());
  }

  std::vector<std::int64_t> row_ptr(layout.size() + 1, 0);
  for (std::int64_t c = 0; c < n; ++c) {
    const std::int64_t width = (pattern.block_ptr[c + 1] - pattern.block_ptr[c]) * bs;
    for (int i = 0; i < bs; ++i) {
      const std::int64_t r = layout.offset(c) + i;
      row_ptr[r + 1] = row_ptr[r] + width;
    }
  }
  std::vector<std::int32_t> cols(row_ptr.back());
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < n; ++c)
    for (int i = 0; i < bs; ++i) {
      std::int64_t k = row_ptr[layout.offset(c) + i];
      for (std::int64_t b = pattern.block_ptr[c]; b < pattern.block_ptr[c + 1]; ++b)
        for (int j = 0; j < bs; ++j)
          cols[k++] = static_cast<std::int32_t>(layout.offset(pattern.block_col[b]) + j);
    }
  std::vector<double> vals(cols.size(), 0.0);
  matrix = CsrMatrix(layout.size(), layout.size(), std::move(row_ptr),
                     std::move(cols), std::move(vals));
  rhs.assign(layout.size(), 0.0);
  block_lu.resize(n);
}

std::int64_t LevelOperator::entry(std::int64_t cell, int pos, int i, int j) const {
  const int bs = layout.dofs_per_cell;
  return matrix.row_ptr()[layout.offset(cell) + i] + pos * bs + j;
}

int LevelOperator::block_position(std::int64_t cell, std::int64_t col_cell) const {
  for (std::int64_t b = pattern.block_ptr[cell]; b < pattern.block_ptr[cell + 1]; ++b)
    if (pattern.block_col[b] == col_cell)
      return static_cast<int>(b - pattern.block_ptr[cell]);
  return -1;
}

DenseMatrix LevelOperator::diagonal_block(std::int64_t cell) const {
  const int bs = layout.dofs_per_cell;
  const int pos = block_position(cell, cell);
  DenseMatrix m(bs, bs);
  for (int i = 0; i < bs; ++i)
    for (int j = 0; j < bs; ++j)
      m(i, j) = matrix.values()[entry(cell, pos, i, j)];
  return m;
}

// ---------------------------------------------------------------------------

LocalMatrices local_matrices(const MeshLevel &mesh, const TensorBasis &basis,
                             double sigma_face) {
  const int dim = mesh.dim();
  const int bs = basis.n_dofs();
  const int order = basis.degree() + 1;
  const double vol = mesh.cell_volume();

  LocalMatrices lm;
  lm.dofs = bs;
  lm.stiffness = DenseMatrix(bs, bs);
  std::vector<double> v(bs), vn(bs);
  std::vector<Point> g(bs), gn(bs);

  const QuadratureRule cell_rule = quadrature(order, dim);
  for (std::size_t q = 0; q < cell_rule.points.size(); ++q) {
    basis.values_and_gradients(cell_rule.points[q], v, g);
    const double w = cell_rule.weights[q] * vol;
    for (int i = 0; i < bs; ++i)
      for (int j = 0; j < bs; ++j) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k)
          s += g[j][k] * g[i][k] / (mesh.cell_size(k) * mesh.cell_size(k));
        lm.stiffness(i, j) += w * s;
      }
  }

  for (int a = 0; a < dim; ++a) {
    const double ha = mesh.cell_size(a);
    const double area = vol / ha;
    for (Side side : {Side::low, Side::high}) {
      DenseMatrix self(bs, bs), nb(bs, bs);
      const double n_sign = side == Side::high ? 1.0 : -1.0;
      const QuadratureRule rule = face_quadrature(order, dim, a, side);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        Point xi_nb = rule.points[q];
        xi_nb[a] = side == Side::high ? 0.0 : 1.0;
        basis.values_and_gradients(rule.points[q], v, g);
        basis.values_and_gradients(xi_nb, vn, gn);
        const double w = rule.weights[q] * area;
        for (int i = 0; i < bs; ++i) {
          const double dn_i = n_sign * g[i][a] / ha;
          for (int j = 0; j < bs; ++j) {
            const double dn_j = n_sign * g[j][a] / ha;
            const double dn_nb_j = n_sign * gn[j][a] / ha;
            self(i, j) += w * (-0.5 * dn_j * v[i] - 0.5 * dn_i * v[j] +
                               sigma_face * v[j] * v[i]);
            nb(i, j) += w * (-0.5 * dn_nb_j * v[i] + 0.5 * dn_i * vn[j] -
                             sigma_face * vn[j] * v[i]);
          }
        }
      }
      lm.face_self[a][side] = std::move(self);
      lm.face_neighbor[a][side] = std::move(nb);
    }
  }
  return lm;
}

void assemble_volume_and_faces(LevelOperator &op, const SbmParameters &params,
                               Exec exec) {
  const MeshLevel &mesh = op.mesh;
  const auto &cls = op.classification;
  const LocalMatrices lm = local_matrices(
      mesh, op.basis, params.sigma_face(op.degree, mesh.h()));
  const int bs = op.layout.dofs_per_cell;
  auto &val = op.matrix.values();
  const std::int64_t n = mesh.n_cells();

#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t c = 0; c < n; ++c) {
    if (!cls.is_active(c))
      continue;
    const int self = op.block_position(c, c);
    for (int i = 0; i < bs; ++i)
      for (int j = 0; j < bs; ++j)
        val[op.entry(c, self, i, j)] += lm.stiffness(i, j);
    for (int a = 0; a < mesh.dim(); ++a)
      for (Side side : {Side::low, Side::high}) {
        const std::int64_t nb = mesh.neighbor_of(c, a, side);
        if (nb == outside_box || !cls.is_active(nb))
          continue;
        const int pos = op.block_position(c, nb);
        const DenseMatrix &ms = lm.face_self[a][side];
        const DenseMatrix &mn = lm.face_neighbor[a][side];
        for (int i = 0; i < bs; ++i)
          for (int j = 0; j < bs; ++j) {
            val[op.entry(c, self, i, j)] += ms(i, j);
            val[op.entry(c, pos, i, j)] += mn(i, j);
          }
      }
  }
}

void sbm_face_contribution(const MeshLevel &mesh, const TensorBasis &basis,
                           std::int64_t cell, int axis, Side side,
                           const QuadratureRule &quad,
                           std::span<const ShiftRecord> records, double sigma,
                           double alpha, DenseMatrix &block,
                           const ScalarFunction *g, std::span<double> rhs) {
  const int bs = basis.n_dofs();
  const double ha = mesh.cell_size(axis);
  const double area = mesh.cell_volume() / ha;
  const double n_sign = side == Side::high ? 1.0 : -1.0;
  std::vector<double> v(bs), e(bs), dn(bs);
  std::vector<Point> grad(bs);

  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    basis.values_and_gradients(quad.points[q], v, grad);
    const Point xi_shifted = map_to_reference(mesh, cell, records[q].boundary_point);
    basis.values(xi_shifted, e);
    for (int i = 0; i < bs; ++i)
      dn[i] = n_sign * grad[i][axis] / ha;
    const double w = quad.weights[q] * area;
    for (int i = 0; i < bs; ++i)
      for (int j = 0; j < bs; ++j)
        block(i, j) += w * (-dn[j] * v[i] - alpha * dn[i] * e[j] + sigma * e[j] * v[i]);
    if (g) {
      const double gx = (*g)(records[q].boundary_point);
      for (int i = 0; i < bs; ++i)
        rhs[i] += w * (-alpha * dn[i] * gx + sigma * gx * v[i]);
    }
  }
}

void assemble_sbm_boundary(LevelOperator &op, const LevelSetFunction &phi,
                           const SbmParameters &params, const ScalarFunction *g,
                           Exec exec, const ProjectionOptions &projection) {
  const MeshLevel &mesh = op.mesh;
  const int dim = mesh.dim();
  const int bs = op.layout.dofs_per_cell;
  const int order = op.degree + 1;
  const double sigma = params.sigma_gamma(op.degree, mesh.h());

  std::array<std::array<QuadratureRule, 2>, 3> rules;
  for (int a = 0; a < dim; ++a)
    for (Side side : {Side::low, Side::high})
      rules[a][side] = face_quadrature(order, dim, a, side);
  const std::size_t nq = rules[0][0].points.size();

  op.boundary_faces = surrogate_boundary(mesh, op.classification);
  const auto &faces = op.boundary_faces;
  const std::int64_t nf = static_cast<std::int64_t>(faces.size());
  op.shifts.assign(nf * nq, ShiftRecord{});
  std::vector<double> blocks(nf * bs * bs, 0.0);
  std::vector<double> face_rhs(g ? nf * bs : 0, 0.0);
  FirstError<ProjectionFailure> failure;

#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::parallel)
  for (std::int64_t f = 0; f < nf; ++f) {
    const SurrogateFace &face = faces[f];
    const QuadratureRule &rule = rules[face.axis][face.side];
    std::span<ShiftRecord> rec(op.shifts.data() + f * nq, nq);
    try {
      for (std::size_t q = 0; q < nq; ++q) {
        const Point xt = map_from_reference(mesh, face.cell, rule.points[q]);
        rec[q] = closest_point(xt, phi, face.normal, mesh.h(), projection);
      }
    } catch (const ProjectionFailure &e) {
      failure.record(f, e.what());
      continue;
    }
    DenseMatrix block(bs, bs);
    std::span<double> r = g ? std::span<double>(face_rhs.data() + f * bs, bs)
                            : std::span<double>();
    sbm_face_contribution(mesh, op.basis, face.cell, face.axis, face.side, rule,
                          rec, sigma, params.alpha, block, g, r);
    std::copy(block.data(), block.data() + bs * bs, blocks.data() + f * bs * bs);
  }
  failure.rethrow();

  auto &val = op.matrix.values();
  for (std::int64_t f = 0; f < nf; ++f) {
    const std::int64_t c = faces[f].cell;
    if (!op.classification.is_active(c))
      throw std::logic_error("surrogate face owned by an inactive cell");
    const int self = op.block_position(c, c);
    const double *b = blocks.data() + f * bs * bs;
    for (int i = 0; i < bs; ++i)
      for (int j = 0; j < bs; ++j)
        val[op.entry(c, self, i, j)] += b[i * bs + j];
    if (g)
      for (int i = 0; i < bs; ++i)
        op.rhs[op.layout.offset(c) + i] += face_rhs[f * bs + i];
  }
}

void assemble_rhs_volume(LevelOperator &op, const ScalarFunction &f, Exec exec) {
  const MeshLevel &mesh = op.mesh;
  const int bs = op.layout.dofs_per_cell;
  const QuadratureRule rule = quadrature(op.degree + 1, mesh.dim());
  std::vector<std::vector<double>> table(rule.points.size(), std::vector<double>(bs));
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    op.basis.values(rule.points[q], table[q]);
  const double vol = mesh.cell_volume();
  const std::int64_t n = mesh.n_cells();

#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t c = 0; c < n; ++c) {
    if (!op.classification.is_active(c))
      continue;
    double *r = op.rhs.data() + op.layout.offset(c);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double fx = f(map_from_reference(mesh, c, rule.points[q]));
      const double w = rule.weights[q] * vol * fx;
      for (int i = 0; i < bs; ++i)
        r[i] += w * table[q][i];
    }
  }
}

void finalize(LevelOperator &op, Exec exec) {
  const int bs = op.layout.dofs_per_cell;
  auto &val = op.matrix.values();
  const std::int64_t n = op.mesh.n_cells();
  FirstError<SingularBlock> failure;

#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t c = 0; c < n; ++c) {
    const int self = op.block_position(c, c);
    if (!op.classification.is_active(c)) {
      for (int i = 0; i < bs; ++i) {
        for (std::int64_t k = op.matrix.row_ptr()[op.layout.offset(c) + i];
             k < op.matrix.row_ptr()[op.layout.offset(c) + i + 1]; ++k)
          val[k] = 0.0;
        val[op.entry(c, self, i, i)] = 1.0;
        op.rhs[op.layout.offset(c) + i] = 0.0;
      }
      op.block_lu[c] = DenseLU();
      continue;
    }
    try {
      op.block_lu[c] = DenseLU(op.diagonal_block(c));
    } catch (const SingularBlock &e) {
      failure.record(c, "cell " + std::to_string(c) + ": " + e.what());
    }
  }
  failure.rethrow();
}

LevelOperator assemble_level(const MeshLevel &mesh, int degree,
                             const CellClassification &cls,
                             const LevelSetFunction &phi,
                             const SbmParameters &params,
                             const BoundaryValueProblem *problem, Exec exec) {
  if (cls.n_active() == 0)
    throw std::invalid_argument("no active cells on mesh level " +
                                std::to_string(mesh.level_index()));
  LevelOperator op(mesh, degree, cls);
  assemble_volume_and_faces(op, params, exec);
  assemble_sbm_boundary(op, phi, params, problem ? &problem->g : nullptr, exec);
  if (problem)
    assemble_rhs_volume(op, problem->f, exec);
  finalize(op, exec);
  return op;
}

// ---------------------------------------------------------------------------

double evaluate_solution(const LevelOperator &op, std::span<const double> u,
                         std::int64_t cell, const Point &x) {
  const int bs = op.layout.dofs_per_cell;
  std::vector<double> v(bs);
  op.basis.values(map_to_reference(op.mesh, cell, x), v);
  double s = 0.0;
  for (int i = 0; i < bs; ++i)
    s += u[op.layout.offset(cell) + i] * v[i];
  return s;
}

double l2_error(const LevelOperator &op, std::span<const double> u,
                const ScalarFunction &exact, int order) {
  const MeshLevel &mesh = op.mesh;
  const int bs = op.layout.dofs_per_cell;
  const QuadratureRule rule = quadrature(order, mesh.dim());
  std::vector<std::vector<double>> table(rule.points.size(), std::vector<double>(bs));
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    op.basis.values(rule.points[q], table[q]);
  const std::int64_t n = mesh.n_cells();
  std::vector<double> cell_err(n, 0.0);

#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < n; ++c) {
    if (!op.classification.is_active(c))
      continue;
    double s = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      double uh = 0.0;
      for (int i = 0; i < bs; ++i)
        uh += u[op.layout.offset(c) + i] * table[q][i];
      const double e = uh - exact(map_from_reference(mesh, c, rule.points[q]));
      s += rule.weights[q] * e * e;
    }
    cell_err[c] = s * mesh.cell_volume();
  }
  double total = 0.0;
  for (double e : cell_err)
    total += e;
  return std::sqrt(total);
}

std::vector<double> interpolate(const LevelOperator &op, const ScalarFunction &fn) {
  const auto nodes = op.basis.support_points();
  std::vector<double> u(op.layout.size(), 0.0);
  for (std::int64_t c = 0; c < op.mesh.n_cells(); ++c) {
    if (!op.classification.is_active(c))
      continue;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      u[op.layout.offset(c) + i] = fn(map_from_reference(op.mesh, c, nodes[i]));
  }
  return u;
}

} // namespace sbm
