#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sbm/assembly.hpp"
#include "sbm/gmres.hpp"
#include "sbm/multigrid.hpp"

namespace sbm {

/// Exact solution with matching source term and Dirichlet data.
struct ManufacturedSolution {
  std::string name;
  ScalarFunction u;
  ScalarFunction f;
  ScalarFunction g;
};

/// "trig": 2 cos(x1) sin(x2); "linear": x1 + x2; "quadratic":
/// x1^2 - x2^2 + x1 x2. Valid in 2D and 3D.
ManufacturedSolution manufactured_solution(const std::string &name);

/// u = phi + 1, f = -laplace(phi), g = 1 for an analytic level set.
ManufacturedSolution level_set_solution(const LevelSetFunction &phi);

struct ExperimentConfig {
  std::string geometry = "disk";
  int dim = 2;
  std::vector<int> degrees{1};
  int min_level = 1;
  int max_level = 5;
  std::vector<double> lambdas{1.0};
  std::optional<double> omega; ///< default 1.0, 0.8 for p = 3
  SbmParameters params;
  int sweeps = 1;
  SmootherKind smoother = SmootherKind::ssor;
  LevelSetMode level_set = LevelSetMode::interpolated;
  GmresOptions solver;
  std::string solution = "trig";
  std::string out_dir = ".";
  bool vtk = false;
  bool timing = false;
};

struct RunRecord {
  int level = 0;
  double lambda = 0.0;
  int degree = 0;
  std::int64_t dofs = 0;
  int iterations = 0;
  bool converged = false;
  double l2_error = 0.0;
  double shift_min = 0.0;
  double shift_max = 0.0;
  double seconds = 0.0;
  std::string failure; ///< empty unless the run raised an error
};

double default_omega(int degree);

/// Throws std::invalid_argument for out-of-range settings.
void validate(const ExperimentConfig &config);

/// Builds the hierarchy and solves one (degree, lambda, level) entry.
/// Solver and geometry failures are recorded in the returned row.
RunRecord run_single(const ExperimentConfig &config,
                     const ManufacturedSolution &solution, int degree,
                     double lambda, int level);

/// All (degree, lambda, level) entries, sorted in that order.
std::vector<RunRecord> run_convergence(const ExperimentConfig &config);
/// Deformed-domain study: geometry forced to "deformed", u = phi + 1.
std::vector<RunRecord> run_complex_domain(const ExperimentConfig &config);
/// Same sweep as run_convergence; kept separate because the iteration
/// study is usually run over several degrees.
std::vector<RunRecord> run_iterations(const ExperimentConfig &config);

void write_csv(std::ostream &out, const std::vector<RunRecord> &rows);

/// Observed order log2(e_coarse / e_fine) between consecutive levels.
double observed_order(double coarse_error, double fine_error);

struct ProjectionReport {
  int level = 0;
  double lambda = 0.0;
  std::int64_t points = 0;
  std::int64_t fallbacks = 0;
  double shift_min = 0.0;
  double shift_max = 0.0;
  double max_level_set_residual = 0.0; ///< max |phi(x)| with the exact phi
};

/// Surrogate-boundary projections for each (lambda, level) without solving.
std::vector<ProjectionReport> run_projection_check(const ExperimentConfig &config);

void write_csv(std::ostream &out, const std::vector<ProjectionReport> &rows);

} // namespace sbm
