#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sbm {

class CsrMatrix;

/// y = Op(x). Used for both the system matrix and the preconditioner.
using LinearOperator =
    std::function<void(std::span<const double> x, std::span<double> y)>;

struct GmresOptions {
  double relative_tolerance = 1e-12;
  int max_iterations = 100;
};

struct GmresResult {
  std::vector<double> solution;
  int iterations = 0;
  bool converged = false;
  /// Arnoldi estimate of ||b - A x_k|| / ||b||, entry k after k iterations.
  std::vector<double> residual_history;
  /// ||b - A x|| / ||b|| recomputed for the returned solution.
  double final_residual = 0.0;
};

/// Full (unrestarted) right-preconditioned GMRES with modified Gram-Schmidt,
/// started from zero. Pass an empty preconditioner for plain GMRES.
/// Throws SolverBreakdown when the Krylov space stagnates before the
/// tolerance is met.
GmresResult gmres(const LinearOperator &a, std::span<const double> b,
                  const LinearOperator &preconditioner,
                  const GmresOptions &opts = {});

GmresResult gmres(const CsrMatrix &a, std::span<const double> b,
                  const LinearOperator &preconditioner,
                  const GmresOptions &opts = {});

} // namespace sbm
