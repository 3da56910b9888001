#include "sbm/spectral1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "sbm/assembly.hpp"
#include "sbm/basis.hpp"
#include "sbm/mesh.hpp"

namespace sbm {

std::string to_string(Formulation1d f) {
  return f == Formulation1d::quasi_symmetric ? "quasi_symmetric" : "penalty_free";
}

DenseMatrix stiffness_1d(double xi, int degree, Formulation1d formulation) {
  if (!(xi > 0.0))
    throw std::invalid_argument("true domain size xi must be positive");
  if (degree < 1 || degree > 3)
    throw std::invalid_argument("degree must be 1, 2 or 3");

  MeshBox box;
  box.lower = {0.0, 0.0, 0.0};
  box.upper = {1.0, 0.0, 0.0};
  box.base_cells_per_axis = 1;
  const MeshLevel mesh(box, 0, 1);
  const TensorBasis basis(degree, 1);

  SbmParameters params;
  params.scaling = PenaltyScaling::p2_over_h;
  if (formulation == Formulation1d::penalty_free) {
    params.alpha = -1.0;
    params.c_gamma = 0.0;
  }
  DenseMatrix a = local_matrices(mesh, basis, 0.0).stiffness;

  const QuadratureRule rule = face_quadrature(degree + 2, 1, 0, Side::high);
  ShiftRecord rec;
  rec.surrogate_point = {1.0, 0.0, 0.0};
  rec.boundary_point = {xi, 0.0, 0.0};
  rec.shift = rec.boundary_point - rec.surrogate_point;
  rec.normal = axis_normal(0, Side::high);
  rec.signed_shift = xi - 1.0;
  const std::vector<ShiftRecord> records(rule.points.size(), rec);
  sbm_face_contribution(mesh, basis, 0, 0, Side::high, rule, records,
                        params.sigma_gamma(degree, mesh.h()), params.alpha, a,
                        nullptr, {});
  return a;
}

double max_imag_part(double xi, int degree, Formulation1d formulation) {
  double best = 0.0;
  for (const auto &e : small_eig(stiffness_1d(xi, degree, formulation)))
    best = std::max(best, std::abs(e.imag()));
  return best;
}

std::vector<Spectral1dRow> max_imag_sweep(const Spectral1dConfig &config) {
  if (!(config.xi_min > 0.0) || config.xi_max < config.xi_min || !(config.xi_step > 0.0))
    throw std::invalid_argument("invalid xi range");
  const int n = static_cast<int>(std::floor((config.xi_max - config.xi_min) /
                                                config.xi_step + 1e-9)) + 1;
  std::vector<Spectral1dRow> rows;
  for (int i = 0; i < n; ++i) {
    const double xi = config.xi_min + i * config.xi_step;
    for (int p : config.degrees)
      for (auto f : config.formulations)
        rows.push_back({xi, p, f, max_imag_part(xi, p, f)});
  }
  return rows;
}

void write_csv(std::ostream &out, const std::vector<Spectral1dRow> &rows) {
  out << "xi,p,formulation,max_imag\n";
  for (const auto &r : rows)
    out << fmt::format("{:.4f},{},{},{:.10e}\n", r.xi, r.degree,
                       to_string(r.formulation), r.max_imag);
}

} // namespace sbm
