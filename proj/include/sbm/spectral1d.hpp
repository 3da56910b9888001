#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sbm/dense.hpp"

namespace sbm {

enum class Formulation1d {
  quasi_symmetric, ///< alpha = +1, sigma = 5 p^2 (h = 1)
  penalty_free     ///< alpha = -1, sigma = 0
};

std::string to_string(Formulation1d f);

/// Stiffness matrix of one unit cell [0,1] whose true domain is [0, xi]: the
/// left end carries no boundary term, the right end the shifted Nitsche terms
/// with the trial functions extended to x = xi.
DenseMatrix stiffness_1d(double xi, int degree, Formulation1d formulation);

/// Largest |Im(lambda)| over the eigenvalues of stiffness_1d.
double max_imag_part(double xi, int degree, Formulation1d formulation);

struct Spectral1dConfig {
  double xi_min = 0.4;
  double xi_max = 2.0;
  double xi_step = 0.01;
  std::vector<int> degrees{1, 2, 3};
  std::vector<Formulation1d> formulations{Formulation1d::quasi_symmetric,
                                          Formulation1d::penalty_free};
};

struct Spectral1dRow {
  double xi;
  int degree;
  Formulation1d formulation;
  double max_imag;
};

/// Rows ordered by xi, then degree, then formulation.
std::vector<Spectral1dRow> max_imag_sweep(const Spectral1dConfig &config);

void write_csv(std::ostream &out, const std::vector<Spectral1dRow> &rows);

} // namespace sbm
