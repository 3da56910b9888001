// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Tolerances and budgets are fixed here on purpose.

#include <algorithm>
#include <chrono>
#include <complex>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "nitsche_oracle.hpp"
#include "sbm/experiments.hpp"
#include "sbm/spectral1d.hpp"

using namespace sbm;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, std::string what) {
    if (!ok) {
      pass = false;
      notes.push_back("violated: " + std::move(what));
    }
  }
  void note(std::string what) { notes.push_back(std::move(what)); }
};

RunRecord solve(int dim, int level, int p, double lambda,
                const std::string &solution = "trig",
                std::optional<double> omega = std::nullopt) {
  ExperimentConfig cfg;
  cfg.dim = dim;
  cfg.solution = solution;
  cfg.omega = omega;
  return run_single(cfg, manufactured_solution(solution), p, lambda, level);
}

std::vector<int> counts_through(int dim, int max_level, int p, double lambda,
                                std::optional<double> omega = std::nullopt) {
  std::vector<int> counts;
  for (int level = 1; level <= max_level; ++level) {
    const auto r = solve(dim, level, p, lambda, "trig", omega);
    counts.push_back(r.converged ? r.iterations : -1);
  }
  return counts;
}

std::string join(const std::vector<int> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

Outcome convergence_rates() {
  Outcome o;
  for (int p = 1; p <= 3; ++p)
    for (double lambda : {1.0, 0.75, 0.5}) {
      const auto coarse = solve(2, 4, p, lambda);
      const auto fine = solve(2, 5, p, lambda);
      const double order = observed_order(coarse.l2_error, fine.l2_error);
      const std::string tag = fmt::format("p={} lambda={:g} order={:.2f}", p, lambda, order);
      o.note(tag);
      o.require(coarse.converged && fine.converged, tag + " solver converged");
      o.require(std::abs(order - (p + 1)) <= 0.4, tag + " within 0.4 of " +
                                                       std::to_string(p + 1));
    }
  return o;
}

Outcome patch_test() {
  Outcome o;
  double worst = 0.0;
  for (double lambda : {0.25, 0.5, 0.75, 1.0})
    for (int p = 1; p <= 3; ++p)
      for (const char *name : {"linear", "quadratic"}) {
        if (std::string(name) == "quadratic" && p < 2)
          continue;
        const auto r = solve(2, 3, p, lambda, name);
        worst = std::max(worst, r.l2_error);
        o.require(r.converged && r.l2_error <= 1e-8,
                  fmt::format("{} p={} lambda={:g} error={:.3e}", name, p, lambda,
                              r.l2_error));
      }
  o.note(fmt::format("max L2 error {:.3e}", worst));
  return o;
}

Outcome zero_shift() {
  Outcome o;
  const auto box = box_domain({0.0, 0.0, 0.0}, {0.505, 0.505, 0.505}, 2);
  double worst_diff = 0.0, worst_asym = 0.0;
  for (int level : {1, 2})
    for (int p = 1; p <= 3; ++p) {
      if (level == 2 && p == 3)
        continue;
      const MeshLevel m(MeshBox{}, level, 2);
      const auto cls = classify(m, box, 0.5, default_fraction_depth(2));
      const SbmParameters params;
      const auto op = assemble_level(m, p, cls, box, params);
      const auto ref = oracle::conforming_nitsche(m, p, cls.active,
                                                  params.sigma_face(p, m.h()),
                                                  params.sigma_gamma(p, m.h()), 1.0);
      const auto a = DenseMatrix::from_sparse(op.matrix);
      for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
          worst_diff = std::max(worst_diff, std::abs(a(i, j) - ref(i, j)));
          worst_asym = std::max(worst_asym, std::abs(a(i, j) - a(j, i)));
        }
    }
  o.note(fmt::format("max |A_sbm - A_nitsche| {:.2e}, max asymmetry {:.2e}", worst_diff,
                     worst_asym));
  o.require(worst_diff <= 1e-12, "entrywise equality");
  o.require(worst_asym <= 1e-12, "symmetry");
  return o;
}

Outcome spectral_1d() {
  Outcome o;
  constexpr auto qs = Formulation1d::quasi_symmetric;
  constexpr auto pf = Formulation1d::penalty_free;
  double worst_qs = 0.0;
  for (int p = 1; p <= 3; ++p)
    for (int i = 0; i <= 100; ++i)
      worst_qs = std::max(worst_qs, max_imag_part(1.0 + 0.01 * i, p, qs));
  o.note(fmt::format("(a) quasi-symmetric xi in [1,2]: max imag {:.2e}", worst_qs));
  o.require(worst_qs <= 1e-10, "(a)");

  const double pf1 = max_imag_part(1.0, 1, pf);
  const double pf2 = max_imag_part(1.0, 2, pf);
  const double pf3 = max_imag_part(1.0, 3, pf);
  o.note(fmt::format("(b) penalty-free xi=1: {:.2e} {:.2e} {:.2e}", pf1, pf2, pf3));
  o.require(pf1 <= 1e-10 && pf2 > 1e-6 && pf3 > 1e-6, "(b)");

  for (int p = 1; p <= 3; ++p)
    for (auto f : {qs, pf}) {
      double best = 0.0;
      for (int i = 0; i < 60; ++i)
        best = std::max(best, max_imag_part(0.4 + 0.01 * i, p, f));
      o.note(fmt::format("(c) p={} {} max over xi<1: {:.3f}", p, to_string(f), best));
      o.require(best > 0.01, fmt::format("(c) p={} {}", p, to_string(f)));
    }
  return o;
}

Outcome iterations_p1() {
  Outcome o;
  const std::map<double, int> reference_level6{{1.0, 15}, {0.75, 12}, {0.5, 9}, {0.25, 8}};
  for (const auto &[lambda, reference] : reference_level6) {
    const auto c = counts_through(2, 6, 1, lambda);
    o.note(fmt::format("lambda={:g}: {}", lambda, join(c)));
    for (std::size_t k = 0; k < c.size(); ++k) {
      o.require(c[k] > 0, fmt::format("(a) lambda={:g} level {} converges", lambda, k + 1));
      if (k > 0 && c[k] > 0 && c[k - 1] > 0)
        o.require(c[k] - c[k - 1] <= 4,
                  fmt::format("(b) lambda={:g} growth at level {}", lambda, k + 1));
    }
    o.require(c.back() > 0 && c.back() <= 2 * reference,
              fmt::format("(c) lambda={:g} level 6 count {} <= {}", lambda, c.back(),
                          2 * reference));
  }
  return o;
}

Outcome iterations_p2() {
  Outcome o;
  for (double lambda : {1.0, 0.75, 0.5}) {
    const auto c = counts_through(2, 5, 2, lambda);
    o.note(fmt::format("lambda={:g}: {}", lambda, join(c)));
    for (std::size_t k = 0; k < c.size(); ++k)
      o.require(c[k] > 0, fmt::format("lambda={:g} level {} converges", lambda, k + 1));
    o.require(c.back() <= 25, fmt::format("lambda={:g} level 5 count <= 25", lambda));
  }
  return o;
}

Outcome iterations_3d() {
  Outcome o;
  for (double lambda : {1.0, 0.75, 0.5, 0.25}) {
    const auto c = counts_through(3, 3, 1, lambda);
    o.note(fmt::format("lambda={:g}: {}", lambda, join(c)));
    for (std::size_t k = 0; k < c.size(); ++k)
      o.require(c[k] > 0 && c[k] <= 20,
                fmt::format("lambda={:g} level {} converges within 20", lambda, k + 1));
  }
  return o;
}

Outcome shift_statistics_check() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.lambdas = {1.0, 0.25};
  cfg.min_level = 3;
  cfg.max_level = 6;
  for (const auto &r : run_projection_check(cfg)) {
    o.note(fmt::format("lambda={:g} level {}: [{:.4f}, {:.4f}]", r.lambda, r.level,
                       r.shift_min, r.shift_max));
    if (r.lambda == 1.0)
      o.require(r.shift_min >= -1e-12 && r.shift_max <= std::sqrt(2.0),
                fmt::format("lambda=1 level {} range", r.level));
    else
      o.require(r.shift_min < 0.0, fmt::format("lambda=0.25 level {} negative", r.level));
  }
  return o;
}

Outcome property_suites() {
  Outcome o;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_vector = [&](std::size_t n) {
    std::vector<double> v(n);
    for (auto &x : v)
      x = u(rng);
    return v;
  };

  // transfer transpose identity
  double transfer_defect = 0.0;
  {
    const auto disk = make_geometry("disk", 2);
    const MgHierarchy mg(MeshBox{}, 2, 3, 3, disk, 0.5, SbmParameters{}, nullptr);
    for (int k = 1; k < mg.n_levels(); ++k) {
      const auto &c = mg.level(k - 1);
      const auto &f = mg.level(k);
      const auto x = random_vector(c.layout.size());
      const auto y = random_vector(f.layout.size());
      std::vector<double> px(f.layout.size()), ry(c.layout.size());
      mg.transfer(k).prolongate(c, f, x, px);
      mg.transfer(k).restrict_to(c, f, y, ry);
      const double lhs = dot(px, y), rhs = dot(x, ry);
      transfer_defect =
          std::max(transfer_defect, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
  }
  o.note(fmt::format("transfer transpose defect {:.2e}", transfer_defect));
  o.require(transfer_defect <= 1e-12, "transfer transpose");

  // SSOR on one cell is a direct solve
  double ssor_defect = 0.0;
  {
    const auto interval = box_domain({0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, 1);
    const MeshLevel m(MeshBox{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 1}, 0, 1);
    CellClassification cls;
    cls.fraction = {1.0};
    cls.category = {CellCategory::interior};
    cls.active = {1};
    for (int p = 1; p <= 3; ++p) {
      const auto op = assemble_level(m, p, cls, interval, SbmParameters{});
      const auto b = random_vector(op.layout.size());
      std::vector<double> x(b.size(), 0.0), ax(b.size());
      smooth_ssor(op, b, x, 1.0, 1);
      spmv(op.matrix, x, ax);
      for (std::size_t i = 0; i < b.size(); ++i)
        ssor_defect = std::max(ssor_defect, std::abs(ax[i] - b[i]));
    }
  }
  o.note(fmt::format("single-cell SSOR residual {:.2e}", ssor_defect));
  o.require(ssor_defect <= 1e-12, "SSOR single cell");

  // partition of unity and gradients, inside and outside the reference cell
  double pou = 0.0, grad_sum = 0.0, fd = 0.0;
  for (int dim = 1; dim <= 3; ++dim)
    for (int p = 1; p <= 3; ++p) {
      const TensorBasis basis(p, dim);
      for (int t = 0; t < 50; ++t) {
        Point xi{0.0, 0.0, 0.0};
        for (int k = 0; k < dim; ++k)
          xi[k] = 0.5 + u(rng);
        const auto bv = eval_basis(basis, xi, true);
        double s = 0.0;
        Point g{0.0, 0.0, 0.0};
        for (int i = 0; i < basis.n_dofs(); ++i) {
          s += bv.values[i];
          g = g + bv.gradients[i];
        }
        pou = std::max(pou, std::abs(s - 1.0));
        grad_sum = std::max(grad_sum, norm(g));
        const double step = 1e-6;
        for (int k = 0; k < dim; ++k) {
          Point a = xi, b = xi;
          a[k] += step;
          b[k] -= step;
          const auto va = eval_basis(basis, a, false);
          const auto vb = eval_basis(basis, b, false);
          for (int i = 0; i < basis.n_dofs(); ++i)
            fd = std::max(fd, std::abs((va.values[i] - vb.values[i]) / (2 * step) -
                                       bv.gradients[i][k]));
        }
      }
    }
  o.note(fmt::format("partition of unity {:.2e}, gradient sum {:.2e}, FD gradient {:.2e}",
                     pou, grad_sum, fd));
  o.require(pou <= 1e-12, "partition of unity");
  o.require(grad_sum <= 1e-11, "gradient sum");
  o.require(fd <= 1e-6, "finite-difference gradients");

  // eigenvalue sum equals the trace
  double trace_defect = 0.0;
  for (int n : {3, 10, 27, 64}) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = u(rng);
    std::complex<double> sum = 0.0;
    for (const auto &l : small_eig(m))
      sum += l;
    trace_defect = std::max(trace_defect, std::abs(sum - m.trace()) / m.norm_inf());
  }
  o.note(fmt::format("eigenvalue trace defect {:.2e}", trace_defect));
  o.require(trace_defect <= 1e-9, "eigensolver trace");

  // closest points on the unit circle and sphere
  double projection = 0.0;
  for (int dim : {2, 3}) {
    const auto disk = make_geometry("disk", dim);
    for (int t = 0; t < 200; ++t) {
      Point x{0.0, 0.0, 0.0};
      for (int k = 0; k < dim; ++k)
        x[k] = 1.5 * u(rng);
      if (norm(x) < 0.1)
        continue;
      const auto r = closest_point(x, disk);
      projection = std::max(projection, norm(r.boundary_point - (1.0 / norm(x)) * x));
    }
  }
  o.note(fmt::format("projection error on the unit circle/sphere {:.2e}", projection));
  o.require(projection <= 1e-8, "projection optimality");
  return o;
}

Outcome p3_reporting() {
  Outcome o;
  const auto gated = counts_through(2, 4, 3, 0.75, 0.8);
  o.note(fmt::format("gated lambda=0.75 omega=0.8: {}", join(gated)));
  for (std::size_t k = 0; k < gated.size(); ++k)
    o.require(gated[k] > 0, fmt::format("lambda=0.75 level {} converges", k + 1));
  for (double lambda : {1.0, 0.5, 0.25}) {
    const auto c = counts_through(2, 4, 3, lambda, 0.8);
    o.note(fmt::format("reported only, lambda={:g}: {} (-1 = no convergence)", lambda,
                       join(c)));
  }
  return o;
}

struct Criterion {
  int id;
  const char *name;
  double budget_seconds;
  std::function<Outcome()> run;
};

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "convergence rates 2D disk", 600.0, convergence_rates},
      {2, "polynomial patch test", 60.0, patch_test},
      {3, "zero-shift equivalence", 10.0, zero_shift},
      {4, "1D spectral study", 30.0, spectral_1d},
      {5, "iteration counts 2D p=1", 300.0, iterations_p1},
      {6, "iteration counts 2D p=2", 600.0, iterations_p2},
      {7, "iteration counts 3D p=1", 600.0, iterations_3d},
      {8, "shift statistics", 60.0, shift_statistics_check},
      {9, "property suites", 120.0, property_suites},
      {10, "p=3 stability reporting", 1e300, p3_reporting},
  };
  bool all = true;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o = c.run();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      o.pass = false;
      o.notes.push_back(fmt::format("violated: runtime budget {:g} s", c.budget_seconds));
    }
    all = all && o.pass;
    for (const auto &n : o.notes)
      fmt::print("    {}\n", n);
    fmt::print("{} criterion {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
               seconds);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
