#pragma once

// Dense reference assembly of the conforming SIP/Nitsche matrix, written
// face by face with jumps and averages. Independent of the per-cell kernels
// in the library; shares only the basis and the quadrature points.

#include <cmath>
#include <vector>

#include "sbm/basis.hpp"
#include "sbm/dense.hpp"
#include "sbm/mesh.hpp"

namespace sbm::oracle {

inline DenseMatrix conforming_nitsche(const MeshLevel &mesh, int degree,
                                      const std::vector<std::uint8_t> &active,
                                      double sigma_face, double sigma_boundary,
                                      double alpha) {
  const int dim = mesh.dim();
  const TensorBasis basis(degree, dim);
  const int nd = basis.n_dofs();
  const auto n = static_cast<int>(mesh.n_cells() * nd);
  DenseMatrix a(n, n);
  const double h = mesh.h();
  const double face_measure = std::pow(h, dim - 1);

  std::vector<double> gp, gw;
  gauss_legendre(degree + 1, gp, gw);

  const auto vol = quadrature(degree + 1, dim);
  for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
    if (!active[c]) {
      for (int i = 0; i < nd; ++i)
        a(c * nd + i, c * nd + i) = 1.0;
      continue;
    }
    for (std::size_t q = 0; q < vol.points.size(); ++q) {
      const auto bv = eval_basis(basis, vol.points[q], true);
      const double w = vol.weights[q] * mesh.cell_volume();
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j)
          a(c * nd + i, c * nd + j) += w * dot(bv.gradients[i], bv.gradients[j]) / (h * h);
    }
  }

  // tensor points on a face: every axis except `axis` runs over gp
  auto face_points = [&](int axis, double coordinate) {
    std::vector<std::pair<Point, double>> pts;
    const int m = static_cast<int>(gp.size());
    const int count = dim == 1 ? 1 : (dim == 2 ? m : m * m);
    for (int t = 0; t < count; ++t) {
      Point xi{0.0, 0.0, 0.0};
      double w = 1.0;
      int r = t;
      for (int k = 0; k < dim; ++k) {
        if (k == axis) {
          xi[k] = coordinate;
          continue;
        }
        xi[k] = gp[r % m];
        w *= gw[r % m];
        r /= m;
      }
      pts.push_back({xi, w});
    }
    return pts;
  };

  for (std::int64_t c = 0; c < mesh.n_cells(); ++c) {
    if (!active[c])
      continue;
    for (int axis = 0; axis < dim; ++axis)
      for (Side side : {Side::low, Side::high}) {
        const auto nb = mesh.neighbor_of(c, axis, side);
        const bool boundary = nb == outside_box || !active[nb];
        const double sign = side == Side::high ? 1.0 : -1.0;
        if (boundary) {
          for (const auto &[xi, wq] : face_points(axis, side == Side::high ? 1.0 : 0.0)) {
            const auto bv = eval_basis(basis, xi, true);
            const double w = wq * face_measure;
            for (int i = 0; i < nd; ++i)
              for (int j = 0; j < nd; ++j) {
                const double dni = sign * bv.gradients[i][axis] / h;
                const double dnj = sign * bv.gradients[j][axis] / h;
                a(c * nd + i, c * nd + j) +=
                    w * (-dnj * bv.values[i] - alpha * dni * bv.values[j] +
                         sigma_boundary * bv.values[i] * bv.values[j]);
              }
          }
          continue;
        }
        if (side == Side::low)
          continue;
        // interior face, minus = c, plus = nb, normal +e_axis
        const std::int64_t cells[2] = {c, nb};
        const double jump_sign[2] = {1.0, -1.0};
        for (const auto &[xi, wq] : face_points(axis, 1.0)) {
          Point xi_plus = xi;
          xi_plus[axis] = 0.0;
          const BasisValues side_values[2] = {eval_basis(basis, xi, true),
                                              eval_basis(basis, xi_plus, true)};
          const double w = wq * face_measure;
          for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t)
              for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j) {
                  const double v = jump_sign[s] * side_values[s].values[i];
                  const double u = jump_sign[t] * side_values[t].values[j];
                  const double avg_dv = 0.5 * side_values[s].gradients[i][axis] / h;
                  const double avg_du = 0.5 * side_values[t].gradients[j][axis] / h;
                  a(cells[s] * nd + i, cells[t] * nd + j) +=
                      w * (-avg_du * v - avg_dv * u + sigma_face * u * v);
                }
        }
      }
  }
  return a;
}

} // namespace sbm::oracle
