// Serial reference vs OpenMP kernels on one disk problem. Also checks that
// both paths produce identical bits.
#include <chrono>
#include <cstdlib>
#include <functional>
#include <vector>

#include <fmt/format.h>
#include <omp.h>

#include "sbm/assembly.hpp"
#include "sbm/geometry.hpp"
#include "sbm/multigrid.hpp"

using namespace sbm;

namespace {

double seconds(const std::function<void()> &fn, int repeat) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < repeat; ++i)
    fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
         repeat;
}

void row(const char *name, double serial, double parallel, bool same) {
  fmt::print("{:<22} {:>10.4f} {:>10.4f} {:>8.2f}  {}\n", name, serial, parallel,
             serial / parallel, same ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char **argv) {
  const int level = argc > 1 ? std::atoi(argv[1]) : 6;
  const int degree = argc > 2 ? std::atoi(argv[2]) : 2;
  fmt::print("disk 2D, level {}, p={}, {} OpenMP threads\n", level, degree,
             omp_get_max_threads());
  fmt::print("{:<22} {:>10} {:>10} {:>8}\n", "kernel", "serial[s]", "omp[s]", "speedup");

  const MeshLevel mesh(MeshBox{}, level, 2);
  const LevelSetFunction phi =
      LevelSetFunction::interpolate(make_geometry("disk", 2), mesh, level_set_degree(degree));
  const int depth = default_fraction_depth(2);

  CellClassification cs, cp;
  const double t_cls_s = seconds([&] { cs = classify(mesh, phi, 0.5, depth, Exec::serial); }, 1);
  const double t_cls_p = seconds([&] { cp = classify(mesh, phi, 0.5, depth, Exec::parallel); }, 1);
  row("classify", t_cls_s, t_cls_p, cs.fraction == cp.fraction);

  const SbmParameters params;
  auto build = [&](Exec exec) { return assemble_level(mesh, degree, cs, phi, params, nullptr, exec); };
  LevelOperator as = build(Exec::serial);
  LevelOperator ap = as;
  const double t_asm_s = seconds([&] { as = build(Exec::serial); }, 1);
  const double t_asm_p = seconds([&] { ap = build(Exec::parallel); }, 1);
  row("assemble", t_asm_s, t_asm_p, as.matrix.values() == ap.matrix.values());

  std::vector<double> x(as.layout.size()), ys(x.size()), yp(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::sin(0.1 * static_cast<double>(i));
  const double t_mv_s = seconds([&] { spmv(as.matrix, x, ys, Exec::serial); }, 20);
  const double t_mv_p = seconds([&] { spmv(as.matrix, x, yp, Exec::parallel); }, 20);
  row("spmv", t_mv_s, t_mv_p, ys == yp);

  std::vector<double> us(x.size(), 0.0), up(x.size(), 0.0);
  const double t_bj_s = seconds([&] { smooth_block_jacobi(as, x, us, 0.7, 1, Exec::serial); }, 5);
  const double t_bj_p = seconds([&] { smooth_block_jacobi(as, x, up, 0.7, 1, Exec::parallel); }, 5);
  row("block jacobi", t_bj_s, t_bj_p, us == up);
  return 0;
}
