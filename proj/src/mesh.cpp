#include "sbm/mesh.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace sbm {

MeshLevel::MeshLevel(const MeshBox &box, int level, int dim)
    : box_(box), level_(level), dim_(dim) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("mesh dimension must be 1, 2 or 3");
  if (level < 0)
    throw std::invalid_argument("mesh level must be nonnegative");
  if (box.base_cells_per_axis < 1)
    throw std::invalid_argument("base_cells_per_axis must be positive");
  for (int k = 0; k < dim; ++k)
    if (!(box.upper[k] > box.lower[k]))
      throw std::invalid_argument("degenerate mesh box along axis " +
                                  std::to_string(k));

  // Cells and (up to 64 per cell) dofs are addressed with 32-bit column
  // indices downstream, so keep the cell count well inside that range.
  constexpr std::int64_t max_cells = std::int64_t{1} << 31;
  if (level > 30)
    throw std::invalid_argument("refinement level too large");
  const std::int64_t n = std::int64_t{box.base_cells_per_axis} << level;
  std::int64_t total = 1;
  for (int k = 0; k < dim; ++k) {
    if (total > max_cells / n)
      throw std::invalid_argument("cell count overflows the index type at level " +
                                  std::to_string(level));
    total *= n;
  }
  n_ = static_cast<int>(n);
  n_cells_ = total;
  for (int k = 0; k < dim; ++k)
    h_[k] = (box.upper[k] - box.lower[k]) / static_cast<double>(n);
  if (dim < 3)
    for (int k = dim; k < 3; ++k) {
      box_.lower[k] = 0.0;
      box_.upper[k] = 0.0;
    }
}

double MeshLevel::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < dim_; ++k)
    v *= h_[k];
  return v;
}

MultiIndex MeshLevel::multi_index(std::int64_t cell) const {
  MultiIndex idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    idx[k] = static_cast<int>(cell % n_);
    cell /= n_;
  }
  return idx;
}

std::int64_t MeshLevel::linear_index(const MultiIndex &idx) const {
  std::int64_t cell = 0;
  for (int k = dim_ - 1; k >= 0; --k)
    cell = cell * n_ + idx[k];
  return cell;
}

Point MeshLevel::cell_lower(std::int64_t cell) const {
  const MultiIndex idx = multi_index(cell);
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k)
    p[k] = box_.lower[k] + idx[k] * h_[k];
  return p;
}

Point MeshLevel::cell_upper(std::int64_t cell) const {
  const MultiIndex idx = multi_index(cell);
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k)
    p[k] = box_.lower[k] + (idx[k] + 1) * h_[k];
  return p;
}

Point MeshLevel::cell_center(std::int64_t cell) const {
  const MultiIndex idx = multi_index(cell);
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k)
    p[k] = box_.lower[k] + (idx[k] + 0.5) * h_[k];
  return p;
}

std::vector<Point> MeshLevel::cell_vertices(std::int64_t cell) const {
  const Point lo = cell_lower(cell);
  const Point hi = cell_upper(cell);
  std::vector<Point> v(std::size_t{1} << dim_);
  for (std::size_t c = 0; c < v.size(); ++c)
    for (int k = 0; k < dim_; ++k)
      v[c][k] = (c >> k) & 1u ? hi[k] : lo[k];
  return v;
}

std::int64_t MeshLevel::neighbor_of(std::int64_t cell, int axis,
                                    Side side) const {
  MultiIndex idx = multi_index(cell);
  idx[axis] += side == Side::high ? 1 : -1;
  if (idx[axis] < 0 || idx[axis] >= n_)
    return outside_box;
  return linear_index(idx);
}

std::int64_t MeshLevel::parent_of(std::int64_t cell) const {
  if (level_ == 0)
    throw std::logic_error("level-0 cells have no parent");
  MultiIndex idx = multi_index(cell);
  const int nc = n_ / 2;
  std::int64_t parent = 0;
  for (int k = dim_ - 1; k >= 0; --k)
    parent = parent * nc + idx[k] / 2;
  return parent;
}

int MeshLevel::child_position(std::int64_t cell) const {
  const MultiIndex idx = multi_index(cell);
  int pos = 0;
  for (int k = 0; k < dim_; ++k)
    pos |= (idx[k] & 1) << k;
  return pos;
}

std::int64_t MeshLevel::locate(const Point &x) const {
  MultiIndex idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    const double t = std::floor((x[k] - box_.lower[k]) / h_[k]);
    idx[k] = static_cast<int>(std::clamp(t, 0.0, static_cast<double>(n_ - 1)));
  }
  return linear_index(idx);
}

std::vector<FaceRecord> MeshLevel::faces() const {
  std::vector<FaceRecord> result;
  for (std::int64_t c = 0; c < n_cells_; ++c) {
    for (int axis = 0; axis < dim_; ++axis) {
      if (neighbor_of(c, axis, Side::low) == outside_box)
        result.push_back({c, outside_box, axis, Side::low});
      const std::int64_t up = neighbor_of(c, axis, Side::high);
      result.push_back({c, up, axis, Side::high});
    }
  }
  return result;
}

std::vector<MeshLevel> build_hierarchy(const MeshBox &box, int max_level,
                                       int dim) {
  if (max_level < 0)
    throw std::invalid_argument("number of refinement levels must be >= 0");
  std::vector<MeshLevel> levels;
  levels.reserve(max_level + 1);
  for (int l = 0; l <= max_level; ++l)
    levels.emplace_back(box, l, dim);
  return levels;
}

} // namespace sbm
