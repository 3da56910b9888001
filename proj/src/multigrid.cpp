#include "sbm/multigrid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sbm {

Transfer::Transfer(const LevelOperator &coarse, const LevelOperator &fine) {
  const int dim = fine.mesh.dim();
  if (coarse.mesh.dim() != dim)
    throw std::invalid_argument("transfer between meshes of different dimension");
  if (fine.mesh.level_index() == coarse.mesh.level_index() + 1 &&
      fine.degree == coarse.degree)
    h_transfer_ = true;
  else if (fine.mesh.level_index() == coarse.mesh.level_index() &&
           fine.degree > coarse.degree)
    h_transfer_ = false;
  else
    throw std::invalid_argument("levels are not consecutive in the hierarchy");

  const auto nodes = fine.basis.support_points();
  const int nf = fine.basis.n_dofs();
  const int nc = coarse.basis.n_dofs();
  const int n_children = h_transfer_ ? 1 << dim : 1;
  std::vector<double> v(nc);
  for (int child = 0; child < n_children; ++child) {
    DenseMatrix e(nf, nc);
    for (int i = 0; i < nf; ++i) {
      Point eta = nodes[i];
      if (h_transfer_)
        for (int k = 0; k < dim; ++k)
          eta[k] = (((child >> k) & 1) + nodes[i][k]) / 2.0;
      coarse.basis.values(eta, v);
      for (int j = 0; j < nc; ++j)
        e(i, j) = v[j];
    }
    embed_.push_back(std::move(e));
  }
}

void Transfer::prolongate(const LevelOperator &coarse, const LevelOperator &fine,
                          std::span<const double> xc, std::span<double> xf,
                          Exec exec) const {
  const int nf = fine.layout.dofs_per_cell;
  const int nc = coarse.layout.dofs_per_cell;
  const std::int64_t n = fine.mesh.n_cells();
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t c = 0; c < n; ++c) {
    double *out = xf.data() + fine.layout.offset(c);
    const std::int64_t parent = h_transfer_ ? fine.mesh.parent_of(c) : c;
    if (!fine.classification.is_active(c) ||
        !coarse.classification.is_active(parent)) {
      std::fill(out, out + nf, 0.0);
      continue;
    }
    const DenseMatrix &e = embed_[h_transfer_ ? fine.mesh.child_position(c) : 0];
    const double *in = xc.data() + coarse.layout.offset(parent);
    for (int i = 0; i < nf; ++i) {
      double s = 0.0;
      for (int j = 0; j < nc; ++j)
        s += e(i, j) * in[j];
      out[i] = s;
    }
  }
}

void Transfer::restrict_to(const LevelOperator &coarse, const LevelOperator &fine,
                           std::span<const double> yf, std::span<double> yc,
                           Exec exec) const {
  const int dim = fine.mesh.dim();
  const int nf = fine.layout.dofs_per_cell;
  const int nc = coarse.layout.dofs_per_cell;
  const int n_children = h_transfer_ ? 1 << dim : 1;
  const std::int64_t n = coarse.mesh.n_cells();
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t p = 0; p < n; ++p) {
    double *out = yc.data() + coarse.layout.offset(p);
    std::fill(out, out + nc, 0.0);
    if (!coarse.classification.is_active(p))
      continue;
    const MultiIndex pi = coarse.mesh.multi_index(p);
    for (int child = 0; child < n_children; ++child) {
      std::int64_t c = p;
      if (h_transfer_) {
        MultiIndex ci{0, 0, 0};
        for (int k = 0; k < dim; ++k)
          ci[k] = 2 * pi[k] + ((child >> k) & 1);
        c = fine.mesh.linear_index(ci);
      }
      if (!fine.classification.is_active(c))
        continue;
      const DenseMatrix &e = embed_[child];
      const double *in = yf.data() + fine.layout.offset(c);
      for (int j = 0; j < nc; ++j) {
        double s = 0.0;
        for (int i = 0; i < nf; ++i)
          s += e(i, j) * in[i];
        out[j] += s;
      }
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

// r_K = f_K - (A x)_K for the row block of one cell.
void block_residual(const LevelOperator &op, std::span<const double> rhs,
                    std::span<const double> x, std::int64_t cell, double *r) {
  const int bs = op.layout.dofs_per_cell;
  const auto &ptr = op.matrix.row_ptr();
  const auto &col = op.matrix.col_index();
  const auto &val = op.matrix.values();
  for (int i = 0; i < bs; ++i) {
    const std::int64_t row = op.layout.offset(cell) + i;
    double s = 0.0;
    for (std::int64_t k = ptr[row]; k < ptr[row + 1]; ++k)
      s += val[k] * x[col[k]];
    r[i] = rhs[row] - s;
  }
}

void block_update(const LevelOperator &op, std::int64_t cell,
                  std::span<const double> rhs, std::span<double> x, double omega,
                  std::vector<double> &r) {
  block_residual(op, rhs, x, cell, r.data());
  op.block_lu[cell].solve_in_place(r);
  double *xc = x.data() + op.layout.offset(cell);
  for (int i = 0; i < op.layout.dofs_per_cell; ++i)
    xc[i] += omega * r[i];
}

} // namespace

void smooth_ssor(const LevelOperator &op, std::span<const double> rhs,
                 std::span<double> x, double omega, int sweeps) {
  std::vector<double> r(op.layout.dofs_per_cell);
  const std::int64_t n = op.mesh.n_cells();
  for (int s = 0; s < sweeps; ++s) {
    for (std::int64_t c = 0; c < n; ++c)
      if (op.classification.is_active(c))
        block_update(op, c, rhs, x, omega, r);
    for (std::int64_t c = n - 1; c >= 0; --c)
      if (op.classification.is_active(c))
        block_update(op, c, rhs, x, omega, r);
  }
}

void smooth_block_jacobi(const LevelOperator &op, std::span<const double> rhs,
                         std::span<double> x, double omega, int sweeps,
                         Exec exec) {
  const int bs = op.layout.dofs_per_cell;
  const std::int64_t n = op.mesh.n_cells();
  std::vector<double> corr(op.layout.size());
  for (int s = 0; s < sweeps; ++s) {
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::int64_t c = 0; c < n; ++c) {
      if (!op.classification.is_active(c))
        continue;
      double *r = corr.data() + op.layout.offset(c);
      block_residual(op, rhs, x, c, r);
      op.block_lu[c].solve_in_place(std::span<double>(r, bs));
    }
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::int64_t c = 0; c < n; ++c) {
      if (!op.classification.is_active(c))
        continue;
      for (int i = 0; i < bs; ++i)
        x[op.layout.offset(c) + i] += omega * corr[op.layout.offset(c) + i];
    }
  }
}

// ---------------------------------------------------------------------------

MgHierarchy::MgHierarchy(const MeshBox &box, int dim, int levels, int degree,
                         const LevelSetFunction &geometry, double lambda,
                         const SbmParameters &params,
                         const BoundaryValueProblem *problem,
                         const MgOptions &options)
    : options_(options) {
  if (levels < 0)
    throw std::invalid_argument("number of mesh levels must be >= 0");
  if (degree < 1 || degree > 3)
    throw std::invalid_argument("polynomial degree must be 1, 2 or 3");
  if (!(options.omega > 0.0 && options.omega < 2.0))
    throw std::invalid_argument("relaxation factor must lie in (0, 2)");
  if (options.pre_smoothing < 0 || options.post_smoothing < 0)
    throw std::invalid_argument("smoothing counts must be >= 0");
  if (geometry.dim() != dim)
    throw std::invalid_argument("geometry dimension does not match the mesh");
  const int depth =
      options.fraction_depth < 0 ? default_fraction_depth(dim) : options.fraction_depth;
  const Exec exec = options.exec;

  auto level_set_on = [&](const MeshLevel &mesh, int p) {
    if (options.level_set == LevelSetMode::analytic || geometry.exact_projection())
      return geometry;
    return LevelSetFunction::interpolate(geometry, mesh, level_set_degree(p));
  };
  auto check_active = [](const CellClassification &cls, const MeshLevel &mesh) {
    if (cls.n_active() == 0)
      throw std::invalid_argument("empty active set on mesh level " +
                                  std::to_string(mesh.level_index()));
  };

  const auto meshes = build_hierarchy(box, levels, dim);
  for (int l = 0; l < levels; ++l) {
    const LevelSetFunction phi = level_set_on(meshes[l], 1);
    CellClassification cls = classify(meshes[l], phi, lambda, depth, exec);
    check_active(cls, meshes[l]);
    levels_.push_back(assemble_level(meshes[l], 1, cls, phi, params, nullptr, exec));
  }

  finest_phi_ = level_set_on(meshes[levels], degree);
  const CellClassification finest_cls =
      classify(meshes[levels], finest_phi_, lambda, depth, exec);
  check_active(finest_cls, meshes[levels]);
  for (int p = 1; p <= degree; ++p)
    levels_.push_back(assemble_level(meshes[levels], p, finest_cls, finest_phi_,
                                     params, p == degree ? problem : nullptr, exec));

  for (int k = 1; k < n_levels(); ++k)
    transfers_.emplace_back(levels_[k - 1], levels_[k]);
  coarse_lu_ = DenseLU(DenseMatrix::from_sparse(levels_[0].matrix));

  residual_.resize(n_levels());
  coarse_rhs_.resize(n_levels());
  coarse_x_.resize(n_levels());
  fine_corr_.resize(n_levels());
  for (int k = 1; k < n_levels(); ++k) {
    residual_[k].resize(levels_[k].layout.size());
    fine_corr_[k].resize(levels_[k].layout.size());
    coarse_rhs_[k].resize(levels_[k - 1].layout.size());
    coarse_x_[k].resize(levels_[k - 1].layout.size());
  }
}

void MgHierarchy::smooth(int k, std::span<const double> rhs, std::span<double> x,
                         int sweeps) const {
  if (sweeps == 0)
    return;
  if (options_.smoother == SmootherKind::ssor)
    smooth_ssor(levels_[k], rhs, x, options_.omega, sweeps);
  else
    smooth_block_jacobi(levels_[k], rhs, x, options_.omega, sweeps, options_.exec);
}

void MgHierarchy::v_cycle(int k, std::span<const double> rhs,
                          std::span<double> x) const {
  if (k == 0) {
    coarse_lu_.solve(rhs, x);
    return;
  }
  const LevelOperator &op = levels_[k];
  const LevelOperator &coarse = levels_[k - 1];
  const Transfer &t = transfers_[k - 1];

  smooth(k, rhs, x, options_.pre_smoothing);
  residual(op.matrix, x, rhs, residual_[k], options_.exec);
  t.restrict_to(coarse, op, residual_[k], coarse_rhs_[k], options_.exec);
  std::fill(coarse_x_[k].begin(), coarse_x_[k].end(), 0.0);
  v_cycle(k - 1, coarse_rhs_[k], coarse_x_[k]);
  t.prolongate(coarse, op, coarse_x_[k], fine_corr_[k], options_.exec);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] += fine_corr_[k][i];
  smooth(k, rhs, x, options_.post_smoothing);
}

void MgHierarchy::precondition(std::span<const double> r, std::span<double> z) const {
  std::fill(z.begin(), z.end(), 0.0);
  const int top = n_levels() - 1;
  v_cycle(top, r, z);
  const LevelOperator &op = levels_[top];
  const int bs = op.layout.dofs_per_cell;
  for (std::int64_t c = 0; c < op.mesh.n_cells(); ++c)
    if (!op.classification.is_active(c))
      for (int i = 0; i < bs; ++i)
        z[op.layout.offset(c) + i] = r[op.layout.offset(c) + i];
}

LinearOperator MgHierarchy::as_preconditioner() const {
  return [this](std::span<const double> r, std::span<double> z) {
    precondition(r, z);
  };
}

} // namespace sbm
