#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbm/common.hpp"
#include "sbm/mesh.hpp"

namespace sbm {

/// Gauss-Lobatto points on [0,1], endpoints included. n_points >= 2.
std::vector<double> gauss_lobatto_points(int n_points);

/// Gauss-Legendre points and weights on [0,1].
void gauss_legendre(int n_points, std::vector<double> &points,
                    std::vector<double> &weights);

/// Cardinal Lagrange polynomials on a set of 1D nodes. Evaluation is valid on
/// the whole real line, which is what the shifted boundary extension relies on.
class LagrangeBasis1D {
public:
  explicit LagrangeBasis1D(std::vector<double> nodes);

  /// Vertices for p = 1, Gauss-Lobatto nodes for p >= 2.
  static LagrangeBasis1D for_degree(int degree);

  int degree() const { return static_cast<int>(nodes_.size()) - 1; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double> &nodes() const { return nodes_; }

  /// Any of the output pointers may be null; each must hold size() entries.
  void evaluate(double x, double *values, double *first = nullptr,
                double *second = nullptr) const;

private:
  std::vector<double> nodes_;
  std::vector<double> inv_denominator_;
};

/// Tensor-product Lagrange basis of degree p on the reference cell [0,1]^d.
/// Local index i = i0 + (p+1) * (i1 + (p+1) * i2).
class TensorBasis {
public:
  TensorBasis(int degree, int dim);

  int degree() const { return basis_.degree(); }
  int dim() const { return dim_; }
  int n_dofs() const { return n_dofs_; }
  const LagrangeBasis1D &basis_1d() const { return basis_; }

  std::vector<Point> support_points() const;

  void values(const Point &xi, std::span<double> out) const;
  /// Gradients are with respect to reference coordinates.
  void values_and_gradients(const Point &xi, std::span<double> vals,
                            std::span<Point> grads) const;
  void hessians(const Point &xi, std::span<double> vals, std::span<Point> grads,
                std::span<Tensor2> hess) const;

private:
  LagrangeBasis1D basis_;
  int dim_;
  int n_dofs_;
};

struct BasisValues {
  std::vector<double> values;
  std::vector<Point> gradients;
};

BasisValues eval_basis(const TensorBasis &basis, const Point &xi,
                       bool need_gradient);

struct QuadratureRule {
  int dim = 0;
  std::vector<Point> points;
  std::vector<double> weights;
};

/// Tensor Gauss-Legendre rule with `order` points per axis on [0,1]^dim;
/// dim = 0 gives the single point rule used on the faces of 1D cells.
QuadratureRule quadrature(int order, int dim);

/// The (dim-1)-dimensional rule placed on one face of the reference cell,
/// expressed in reference-cell coordinates. Weights sum to one.
QuadratureRule face_quadrature(int order, int dim, int axis, Side side);

Point map_to_reference(const MeshLevel &mesh, std::int64_t cell,
                       const Point &x);
Point map_from_reference(const MeshLevel &mesh, std::int64_t cell,
                         const Point &xi);

} // namespace sbm
