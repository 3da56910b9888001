#pragma once

#include <ostream>
#include <span>
#include <string>

#include "sbm/assembly.hpp"

namespace sbm {

/// Legacy ASCII VTK unstructured grid: every active cell contributes its
/// (p+1)^d nodes as points and p^d linear sub-cells; the solution is
/// written as point data.
void write_vtk(std::ostream &out, const LevelOperator &op,
               std::span<const double> solution);

/// Throws std::runtime_error naming `path` on I/O failure.
void emit_vtk(const LevelOperator &op, std::span<const double> solution,
              const std::string &path);

} // namespace sbm
