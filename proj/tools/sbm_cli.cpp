// Command-line driver for the convergence, iteration, deformed-domain,
// spectral and projection studies.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sbm/experiments.hpp"
#include "sbm/spectral1d.hpp"

namespace {

struct CliOptions {
  sbm::ExperimentConfig config;
  double omega = 0.0;
  std::string scaling = "pp1_over_h";
  std::string smoother = "ssor";
  std::string level_set = "interpolated";
};

void add_common(CLI::App *cmd, CliOptions &o, bool multi_degree) {
  auto &c = o.config;
  cmd->add_option("--geometry", c.geometry, "disk or deformed")->capture_default_str();
  cmd->add_option("--dim", c.dim, "2 or 3")->capture_default_str();
  if (multi_degree)
    cmd->add_option("--p", c.degrees, "polynomial degree (repeatable)")->capture_default_str();
  else
    cmd->add_option("--p", c.degrees, "polynomial degree")->expected(1)->capture_default_str();
  cmd->add_option("--min-level", c.min_level, "first refinement level")->capture_default_str();
  cmd->add_option("--levels", c.max_level, "finest refinement level")->capture_default_str();
  cmd->add_option("--lambda", c.lambdas, "activity threshold (repeatable)")
      ->capture_default_str();
  cmd->add_option("--omega", o.omega, "SSOR relaxation (default 1.0, 0.8 for p=3)");
  cmd->add_option("--sigma-gamma", c.params.c_gamma, "boundary penalty prefactor")
      ->capture_default_str();
  cmd->add_option("--sigma-f", c.params.c_face, "interior penalty prefactor")
      ->capture_default_str();
  cmd->add_option("--penalty-scaling", o.scaling, "pp1_over_h, p2_over_h or flat")
      ->check(CLI::IsMember({"pp1_over_h", "p2_over_h", "flat"}))
      ->capture_default_str();
  cmd->add_option("--sweeps", c.sweeps, "pre- and post-smoothing sweeps")
      ->capture_default_str();
  cmd->add_option("--smoother", o.smoother, "ssor or block_jacobi")
      ->check(CLI::IsMember({"ssor", "block_jacobi"}))
      ->capture_default_str();
  cmd->add_option("--levelset", o.level_set, "interpolated or analytic")
      ->check(CLI::IsMember({"interpolated", "analytic"}))
      ->capture_default_str();
  cmd->add_option("--tol", c.solver.relative_tolerance, "GMRES relative tolerance")
      ->capture_default_str();
  cmd->add_option("--max-iter", c.solver.max_iterations, "GMRES iteration limit")
      ->capture_default_str();
  cmd->add_option("--solution", c.solution, "trig, linear or quadratic")
      ->capture_default_str();
  cmd->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  cmd->add_flag("--vtk", c.vtk, "write a VTK file per run");
  cmd->add_flag("--timing", c.timing, "fill the seconds column (breaks byte-identical output)");
}

void resolve(CliOptions &o) {
  if (o.omega != 0.0)
    o.config.omega = o.omega;
  o.config.params.scaling = o.scaling == "flat"        ? sbm::PenaltyScaling::flat
                            : o.scaling == "p2_over_h" ? sbm::PenaltyScaling::p2_over_h
                                                       : sbm::PenaltyScaling::pp1_over_h;
  o.config.smoother = o.smoother == "block_jacobi" ? sbm::SmootherKind::block_jacobi
                                                   : sbm::SmootherKind::ssor;
  o.config.level_set = o.level_set == "analytic" ? sbm::LevelSetMode::analytic
                                                 : sbm::LevelSetMode::interpolated;
  std::filesystem::create_directories(o.config.out_dir);
}

template <class Rows> void emit(const CliOptions &o, const std::string &name, const Rows &rows) {
  const auto path = std::filesystem::path(o.config.out_dir) / name;
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  sbm::write_csv(out, rows);
  sbm::write_csv(std::cout, rows);
}

void report_failures(const std::vector<sbm::RunRecord> &rows) {
  for (const auto &r : rows)
    if (!r.failure.empty())
      std::cerr << "p=" << r.degree << " lambda=" << r.lambda << " level=" << r.level
                << ": " << r.failure << '\n';
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Shifted boundary DG Poisson solver with hp-multigrid"};
  app.require_subcommand(1);

  CliOptions converge, iterations, complex, project;
  add_common(app.add_subcommand("converge", "L2 convergence study"), converge, false);
  add_common(app.add_subcommand("iterations", "GMRES iteration table"), iterations, true);
  add_common(app.add_subcommand("complex", "deformed-domain study"), complex, true);
  add_common(app.add_subcommand("project-check", "closest-point shift statistics"),
             project, false);

  sbm::Spectral1dConfig eig;
  std::string eig_out = ".";
  auto *eig_cmd = app.add_subcommand("eig1d", "1D single-cell eigenvalue sweep");
  eig_cmd->add_option("--xi-min", eig.xi_min)->capture_default_str();
  eig_cmd->add_option("--xi-max", eig.xi_max)->capture_default_str();
  eig_cmd->add_option("--xi-step", eig.xi_step)->capture_default_str();
  eig_cmd->add_option("--p", eig.degrees, "degrees (repeatable)")->capture_default_str();
  eig_cmd->add_option("--out", eig_out, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("converge")) {
      resolve(converge);
      const auto rows = sbm::run_convergence(converge.config);
      emit(converge, "convergence.csv", rows);
      report_failures(rows);
    } else if (app.got_subcommand("iterations")) {
      resolve(iterations);
      const auto rows = sbm::run_iterations(iterations.config);
      emit(iterations, "iterations.csv", rows);
      report_failures(rows);
    } else if (app.got_subcommand("complex")) {
      resolve(complex);
      const auto rows = sbm::run_complex_domain(complex.config);
      emit(complex, "complex.csv", rows);
      report_failures(rows);
    } else if (app.got_subcommand("project-check")) {
      resolve(project);
      emit(project, "projection.csv", sbm::run_projection_check(project.config));
    } else if (app.got_subcommand("eig1d")) {
      std::filesystem::create_directories(eig_out);
      const auto rows = sbm::max_imag_sweep(eig);
      const auto path = std::filesystem::path(eig_out) / "eig1d.csv";
      std::ofstream out(path);
      if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
      sbm::write_csv(out, rows);
      std::cout << "wrote " << rows.size() << " rows to " << path.string() << '\n';
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
