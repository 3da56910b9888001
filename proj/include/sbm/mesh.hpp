#pragma once

#include <cstdint>
#include <vector>

#include "sbm/common.hpp"

namespace sbm {

/// Axis-aligned box covered by the background mesh.
struct MeshBox {
  Point lower{-1.01, -1.01, -1.01};
  Point upper{1.01, 1.01, 1.01};
  int base_cells_per_axis = 4;
};

/// Marker returned by neighbor queries across the embedding-box boundary.
inline constexpr std::int64_t outside_box = -1;

/// A face of the mesh seen from its owner. Interior faces are listed once,
/// owned by the cell with the lower multi-index; box faces carry
/// `outside_box` as neighbor.
struct FaceRecord {
  std::int64_t owner;
  std::int64_t neighbor;
  int axis;
  Side side; ///< side of the owner the face lies on
};

/// One uniformly refined level of the Cartesian background mesh. Cells are
/// addressed by multi-index, linearized with the x index running fastest.
class MeshLevel {
public:
  MeshLevel(const MeshBox &box, int level, int dim);

  int level_index() const { return level_; }
  int dim() const { return dim_; }
  int cells_per_axis() const { return n_; }
  std::int64_t n_cells() const { return n_cells_; }
  const MeshBox &box() const { return box_; }

  double cell_size(int axis) const { return h_[axis]; }
  /// Edge length along the first axis; equal on all axes for cubic boxes.
  double h() const { return h_[0]; }
  double cell_volume() const;

  MultiIndex multi_index(std::int64_t cell) const;
  std::int64_t linear_index(const MultiIndex &idx) const;

  Point cell_lower(std::int64_t cell) const;
  Point cell_upper(std::int64_t cell) const;
  Point cell_center(std::int64_t cell) const;
  std::vector<Point> cell_vertices(std::int64_t cell) const;

  /// Axis-adjacent cell, or `outside_box` on the embedding-box boundary.
  std::int64_t neighbor_of(std::int64_t cell, int axis, Side side) const;

  /// Parent on the next coarser level: floor(multi-index / 2).
  std::int64_t parent_of(std::int64_t cell) const;
  /// Position of `cell` inside its parent, one bit per axis.
  int child_position(std::int64_t cell) const;

  /// Cell containing `x`; points outside the box map to the nearest cell.
  std::int64_t locate(const Point &x) const;

  std::vector<FaceRecord> faces() const;

private:
  MeshBox box_;
  int level_;
  int dim_;
  int n_;
  std::int64_t n_cells_;
  Point h_{1.0, 1.0, 1.0};
};

/// Levels 0..max_level of uniform refinement of `box`.
std::vector<MeshLevel> build_hierarchy(const MeshBox &box, int max_level,
                                       int dim);

} // namespace sbm
