#include "sbm/vtk.hpp"

#include <array>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace sbm {

namespace {

// Corner offsets of a linear sub-cell in VTK vertex order.
std::vector<std::array<int, 3>> vtk_corners(int dim) {
  switch (dim) {
  case 1:
    return {{0, 0, 0}, {1, 0, 0}};
  case 2:
    return {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  default:
    return {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
            {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  }
}

int vtk_cell_type(int dim) { return dim == 1 ? 3 : dim == 2 ? 9 : 12; }

} // namespace

void write_vtk(std::ostream &out, const LevelOperator &op,
               std::span<const double> solution) {
  if (static_cast<std::int64_t>(solution.size()) != op.layout.size())
    throw std::invalid_argument("solution does not match the dof layout");
  const MeshLevel &mesh = op.mesh;
  const int dim = mesh.dim();
  const int p = op.degree;
  const int m = p + 1;
  const int bs = op.layout.dofs_per_cell;
  const auto nodes = op.basis.support_points();

  std::vector<std::int64_t> active;
  for (std::int64_t c = 0; c < mesh.n_cells(); ++c)
    if (op.classification.is_active(c))
      active.push_back(c);
  int sub_cells = 1;
  for (int k = 0; k < dim; ++k)
    sub_cells *= p;
  const auto corners = vtk_corners(dim);
  const std::int64_t n_points = static_cast<std::int64_t>(active.size()) * bs;
  const std::int64_t n_cells = static_cast<std::int64_t>(active.size()) * sub_cells;

  out << "# vtk DataFile Version 3.0\n";
  out << fmt::format("level {} degree {}\n", mesh.level_index(), p);
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << fmt::format("POINTS {} double\n", n_points);
  for (auto c : active)
    for (const auto &xi : nodes) {
      const Point x = map_from_reference(mesh, c, xi);
      out << fmt::format("{:.12g} {:.12g} {:.12g}\n", x[0], x[1], x[2]);
    }

  out << fmt::format("CELLS {} {}\n", n_cells,
                     n_cells * (1 + static_cast<std::int64_t>(corners.size())));
  for (std::size_t a = 0; a < active.size(); ++a) {
    const std::int64_t base = static_cast<std::int64_t>(a) * bs;
    for (int s = 0; s < sub_cells; ++s) {
      std::array<int, 3> sub{0, 0, 0};
      int r = s;
      for (int k = 0; k < dim; ++k) {
        sub[k] = r % p;
        r /= p;
      }
      out << corners.size();
      for (const auto &off : corners) {
        int local = 0;
        for (int k = dim - 1; k >= 0; --k)
          local = local * m + sub[k] + off[k];
        out << ' ' << base + local;
      }
      out << '\n';
    }
  }
  out << fmt::format("CELL_TYPES {}\n", n_cells);
  for (std::int64_t c = 0; c < n_cells; ++c)
    out << vtk_cell_type(dim) << '\n';

  out << fmt::format("POINT_DATA {}\nSCALARS solution double 1\nLOOKUP_TABLE default\n",
                     n_points);
  for (auto c : active)
    for (int i = 0; i < bs; ++i)
      out << fmt::format("{:.12g}\n", solution[op.layout.offset(c) + i]);
}

void emit_vtk(const LevelOperator &op, std::span<const double> solution,
              const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open VTK file '" + path + "' for writing");
  write_vtk(out, op, solution);
  out.flush();
  if (!out)
    throw std::runtime_error("failed while writing VTK file '" + path + "'");
}

} // namespace sbm
