#include "sbm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "sbm/vtk.hpp"

namespace sbm {

ManufacturedSolution manufactured_solution(const std::string &name) {
  if (name == "trig")
    return {name,
            [](const Point &x) { return 2.0 * std::cos(x[0]) * std::sin(x[1]); },
            [](const Point &x) { return 4.0 * std::cos(x[0]) * std::sin(x[1]); },
            [](const Point &x) { return 2.0 * std::cos(x[0]) * std::sin(x[1]); }};
  if (name == "linear")
    return {name, [](const Point &x) { return x[0] + x[1]; },
            [](const Point &) { return 0.0; },
            [](const Point &x) { return x[0] + x[1]; }};
  if (name == "quadratic") {
    auto u = [](const Point &x) { return x[0] * x[0] - x[1] * x[1] + x[0] * x[1]; };
    return {name, u, [](const Point &) { return 0.0; }, u};
  }
  if (name == "paraboloid") {
    auto u = [](const Point &x) { return x[0] * x[0] + x[1] * x[1]; };
    return {name, u, [](const Point &) { return -4.0; }, u};
  }
  throw std::invalid_argument("unknown manufactured solution '" + name + "'");
}

ManufacturedSolution level_set_solution(const LevelSetFunction &phi) {
  const int dim = phi.dim();
  return {"level_set",
          [phi](const Point &x) { return phi.value(x) + 1.0; },
          [phi, dim](const Point &x) {
            const LevelSetSample s = phi.evaluate(x);
            double lap = 0.0;
            for (int k = 0; k < dim; ++k)
              lap += s.hessian[k][k];
            return -lap;
          },
          [](const Point &) { return 1.0; }};
}

double default_omega(int degree) { return degree >= 3 ? 0.8 : 1.0; }

void validate(const ExperimentConfig &c) {
  if (c.dim != 2 && c.dim != 3)
    throw std::invalid_argument("dimension must be 2 or 3");
  if (c.degrees.empty() || c.lambdas.empty())
    throw std::invalid_argument("need at least one degree and one threshold");
  if (c.min_level < 0 || c.max_level < c.min_level)
    throw std::invalid_argument("invalid level range");
  for (int p : c.degrees) {
    if (p < 1 || p > 3)
      throw std::invalid_argument("degree must be 1, 2 or 3");
    const int cap = c.dim == 2 ? (p <= 2 ? 7 : 6) : (p <= 2 ? 4 : 2);
    if (c.max_level > cap)
      throw std::invalid_argument(fmt::format(
          "level {} exceeds the supported maximum {} for dim={}, p={}",
          c.max_level, cap, c.dim, p));
  }
  for (double l : c.lambdas)
    if (!(l > 0.0) || l > 1.0)
      throw std::invalid_argument("thresholds must lie in (0, 1]");
  if (c.omega && !(*c.omega > 0.0 && *c.omega < 2.0))
    throw std::invalid_argument("relaxation factor must lie in (0, 2)");
  if (c.sweeps < 0)
    throw std::invalid_argument("smoothing sweeps must be >= 0");
  if (!(c.solver.relative_tolerance > 0.0) || c.solver.max_iterations < 1)
    throw std::invalid_argument("invalid solver settings");
  if (c.geometry == "deformed" && c.dim != 2)
    throw std::invalid_argument("the deformed geometry is two-dimensional");
}

RunRecord run_single(const ExperimentConfig &config,
                     const ManufacturedSolution &solution, int degree,
                     double lambda, int level) {
  RunRecord rec;
  rec.level = level;
  rec.lambda = lambda;
  rec.degree = degree;
  const auto start = std::chrono::steady_clock::now();
  try {
    const LevelSetFunction geometry = make_geometry(config.geometry, config.dim);
    MgOptions opts;
    opts.omega = config.omega.value_or(default_omega(degree));
    opts.pre_smoothing = opts.post_smoothing = config.sweeps;
    opts.smoother = config.smoother;
    opts.level_set = config.level_set;
    const BoundaryValueProblem problem{solution.f, solution.g};
    const MgHierarchy mg(MeshBox{}, config.dim, level, degree, geometry, lambda,
                         config.params, &problem, opts);
    const LevelOperator &op = mg.finest();
    rec.dofs = op.classification.n_active() * op.layout.dofs_per_cell;
    if (!op.shifts.empty()) {
      const auto [lo, hi] = shift_statistics(op.shifts);
      rec.shift_min = lo;
      rec.shift_max = hi;
    }
    const GmresResult res =
        gmres(op.matrix, op.rhs, mg.as_preconditioner(), config.solver);
    rec.converged = res.converged;
    rec.iterations = res.converged ? res.iterations : config.solver.max_iterations;
    rec.l2_error = l2_error(op, res.solution, solution.u, degree + 2);
    if (config.vtk) {
      const auto path = std::filesystem::path(config.out_dir) /
                        fmt::format("solution_{}_d{}_p{}_lambda{:g}_level{}.vtk",
                                    config.geometry, config.dim, degree, lambda, level);
      emit_vtk(op, res.solution, path.string());
    }
  } catch (const std::runtime_error &e) {
    rec.converged = false;
    rec.iterations = config.solver.max_iterations;
    rec.l2_error = std::numeric_limits<double>::quiet_NaN();
    rec.failure = e.what();
  }
  if (config.timing)
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
  return rec;
}

namespace {

std::vector<RunRecord> sweep(const ExperimentConfig &config,
                             const ManufacturedSolution &solution) {
  validate(config);
  std::vector<RunRecord> rows;
  for (int p : config.degrees)
    for (double lambda : config.lambdas)
      for (int level = config.min_level; level <= config.max_level; ++level)
        rows.push_back(run_single(config, solution, p, lambda, level));
  std::stable_sort(rows.begin(), rows.end(), [](const RunRecord &a, const RunRecord &b) {
    if (a.degree != b.degree)
      return a.degree < b.degree;
    if (a.lambda != b.lambda)
      return a.lambda > b.lambda;
    return a.level < b.level;
  });
  return rows;
}

} // namespace

std::vector<RunRecord> run_convergence(const ExperimentConfig &config) {
  return sweep(config, manufactured_solution(config.solution));
}

std::vector<RunRecord> run_complex_domain(const ExperimentConfig &config) {
  ExperimentConfig c = config;
  c.geometry = "deformed";
  c.dim = 2;
  return sweep(c, level_set_solution(make_geometry("deformed", 2)));
}

std::vector<RunRecord> run_iterations(const ExperimentConfig &config) {
  return sweep(config, manufactured_solution(config.solution));
}

void write_csv(std::ostream &out, const std::vector<RunRecord> &rows) {
  out << "level,lambda,p,dofs,iterations,converged,l2_error,shift_min,shift_max,seconds\n";
  for (const auto &r : rows)
    out << fmt::format("{},{:g},{},{},{},{},{:.6e},{:.6f},{:.6f},{:.3f}\n", r.level,
                       r.lambda, r.degree, r.dofs, r.iterations,
                       r.converged ? "true" : "false", r.l2_error, r.shift_min,
                       r.shift_max, r.seconds);
}

double observed_order(double coarse_error, double fine_error) {
  return std::log2(coarse_error / fine_error);
}

std::vector<ProjectionReport> run_projection_check(const ExperimentConfig &config) {
  validate(config);
  const LevelSetFunction exact = make_geometry(config.geometry, config.dim);
  const int p = config.degrees.front();
  std::vector<ProjectionReport> rows;
  for (double lambda : config.lambdas)
    for (int level = config.min_level; level <= config.max_level; ++level) {
      const MeshLevel mesh(MeshBox{}, level, config.dim);
      const LevelSetFunction phi =
          config.level_set == LevelSetMode::analytic
              ? exact
              : LevelSetFunction::interpolate(exact, mesh, level_set_degree(p));
      const CellClassification cls =
          classify(mesh, phi, lambda, default_fraction_depth(config.dim));
      const auto faces = surrogate_boundary(mesh, cls);
      std::vector<ShiftRecord> records;
      for (const auto &face : faces) {
        const QuadratureRule rule = face_quadrature(p + 1, config.dim, face.axis, face.side);
        for (const auto &xi : rule.points)
          records.push_back(closest_point(map_from_reference(mesh, face.cell, xi), phi,
                                          face.normal, mesh.h()));
      }
      ProjectionReport rep;
      rep.level = level;
      rep.lambda = lambda;
      rep.points = static_cast<std::int64_t>(records.size());
      if (!records.empty()) {
        std::tie(rep.shift_min, rep.shift_max) = shift_statistics(records);
      }
      for (const auto &r : records) {
        rep.fallbacks += r.fallback;
        rep.max_level_set_residual =
            std::max(rep.max_level_set_residual, std::abs(exact.value(r.boundary_point)));
      }
      rows.push_back(rep);
    }
  return rows;
}

void write_csv(std::ostream &out, const std::vector<ProjectionReport> &rows) {
  out << "level,lambda,points,fallbacks,shift_min,shift_max,max_level_set_residual\n";
  for (const auto &r : rows)
    out << fmt::format("{},{:g},{},{},{:.6f},{:.6f},{:.3e}\n", r.level, r.lambda,
                       r.points, r.fallbacks, r.shift_min, r.shift_max,
                       r.max_level_set_residual);
}

} // namespace sbm
