#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sbm/basis.hpp"
#include "sbm/common.hpp"
#include "sbm/dense.hpp"
#include "sbm/geometry.hpp"
#include "sbm/mesh.hpp"
#include "sbm/sparse.hpp"

namespace sbm {

/// sigma = c p (p+1) / h, c p^2 / h, or the flat constant c.
enum class PenaltyScaling { pp1_over_h, p2_over_h, flat };

struct SbmParameters {
  double alpha = 1.0;   ///< +1 quasi-symmetric, -1 non-symmetric
  double c_gamma = 5.0; ///< boundary penalty prefactor
  double c_face = 1.0;  ///< interior-face penalty prefactor
  PenaltyScaling scaling = PenaltyScaling::pp1_over_h;

  double sigma_gamma(int degree, double h) const;
  double sigma_face(int degree, double h) const;
};

using ScalarFunction = std::function<double(const Point &)>;

/// Source term and Dirichlet data.
struct BoundaryValueProblem {
  ScalarFunction f;
  ScalarFunction g;
};

/// One contiguous block of (p+1)^d unknowns per cell, active or not.
struct DofLayout {
  int dofs_per_cell = 0;
  std::int64_t n_cells = 0;

  std::int64_t size() const { return dofs_per_cell * n_cells; }
  std::int64_t offset(std::int64_t cell) const { return cell * dofs_per_cell; }
};

/// Cell-level sparsity: row block `cell` couples to the cells
/// block_col[block_ptr[cell] .. block_ptr[cell+1]), sorted ascending.
struct BlockPattern {
  std::vector<std::int64_t> block_ptr;
  std::vector<std::int64_t> block_col;
};

/// Per-level system: matrix, right-hand side, diagonal-block factorizations
/// and the shift records of every surrogate-boundary quadrature point.
struct LevelOperator {
  MeshLevel mesh;
  int degree;
  TensorBasis basis;
  CellClassification classification;
  DofLayout layout;
  BlockPattern pattern;
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::vector<DenseLU> block_lu; ///< indexed by cell; empty for inactive cells
  std::vector<SurrogateFace> boundary_faces;
  std::vector<ShiftRecord> shifts; ///< face-major, quadrature-point minor

  LevelOperator(const MeshLevel &mesh, int degree, CellClassification cls);

  /// Index into matrix.values() of local entry (i, j) of block (cell, pos),
  /// where pos indexes the block column list of `cell`.
  std::int64_t entry(std::int64_t cell, int pos, int i, int j) const;
  int block_position(std::int64_t cell, std::int64_t col_cell) const;
  DenseMatrix diagonal_block(std::int64_t cell) const;
};

/// Reference-cell integrals shared by all cells of a uniform level.
struct LocalMatrices {
  int dofs = 0;
  DenseMatrix stiffness;
  /// [axis][side]: face terms coupling the cell to itself / to its neighbor
  /// across that face (rows = test functions of the cell).
  std::array<std::array<DenseMatrix, 2>, 3> face_self;
  std::array<std::array<DenseMatrix, 2>, 3> face_neighbor;
};

LocalMatrices local_matrices(const MeshLevel &mesh, const TensorBasis &basis,
                             double sigma_face);

/// Stiffness on active cells and SIP terms on faces between active cells.
void assemble_volume_and_faces(LevelOperator &op, const SbmParameters &params,
                               Exec exec = Exec::parallel);

/// Contribution of one surrogate-boundary face of `cell`. `records` holds
/// one shift per face quadrature point of `quad`. When `g` is set, `rhs`
/// (length dofs) receives the boundary data terms.
void sbm_face_contribution(const MeshLevel &mesh, const TensorBasis &basis,
                           std::int64_t cell, int axis, Side side,
                           const QuadratureRule &quad,
                           std::span<const ShiftRecord> records, double sigma,
                           double alpha, DenseMatrix &block,
                           const ScalarFunction *g, std::span<double> rhs);

/// Shifted Nitsche terms on every surrogate-boundary face; fills
/// op.boundary_faces and op.shifts. With `g` null only the matrix is touched.
void assemble_sbm_boundary(LevelOperator &op, const LevelSetFunction &phi,
                           const SbmParameters &params,
                           const ScalarFunction *g = nullptr,
                           Exec exec = Exec::parallel,
                           const ProjectionOptions &projection = {});

/// Adds the integral of f v over active cells to op.rhs.
void assemble_rhs_volume(LevelOperator &op, const ScalarFunction &f,
                         Exec exec = Exec::parallel);

/// Identity blocks on inactive cells and LU factorization of every active
/// diagonal block. Throws SingularBlock.
void finalize(LevelOperator &op, Exec exec = Exec::parallel);

/// Full pipeline. With `problem` null the right-hand side stays zero.
LevelOperator assemble_level(const MeshLevel &mesh, int degree,
                             const CellClassification &cls,
                             const LevelSetFunction &phi,
                             const SbmParameters &params,
                             const BoundaryValueProblem *problem = nullptr,
                             Exec exec = Exec::parallel);

/// Value of the discrete function at physical point x using the basis of
/// `cell` (x may lie outside the cell).
double evaluate_solution(const LevelOperator &op, std::span<const double> u,
                         std::int64_t cell, const Point &x);

/// L2 norm of (u_h - exact) over the active cells, quadrature with
/// `order` points per axis.
double l2_error(const LevelOperator &op, std::span<const double> u,
                const ScalarFunction &exact, int order);

/// Nodal interpolation of `fn` on active cells; zero on inactive cells.
std::vector<double> interpolate(const LevelOperator &op, const ScalarFunction &fn);

} // namespace sbm
