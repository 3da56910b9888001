#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbm/common.hpp"

namespace sbm {

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  double value;
};

/// Compressed sparse row matrix. Columns are sorted within each row and
/// unique; explicit zeros are allowed and kept.
class CsrMatrix {
public:
  CsrMatrix() = default;
  CsrMatrix(std::int64_t rows, std::int64_t cols,
            std::vector<std::int64_t> row_ptr, std::vector<std::int32_t> col_index,
            std::vector<double> values);

  static CsrMatrix identity(std::int64_t n);
  /// Duplicate (row, col) pairs are summed in input order.
  static CsrMatrix from_triplets(std::int64_t rows, std::int64_t cols,
                                 std::vector<Triplet> triplets);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }

  const std::vector<std::int64_t> &row_ptr() const { return row_ptr_; }
  const std::vector<std::int32_t> &col_index() const { return col_index_; }
  const std::vector<double> &values() const { return values_; }
  std::vector<double> &values() { return values_; }

  /// Entry (r, c), zero when outside the pattern.
  double at(std::int64_t r, std::int64_t c) const;
  /// Position of (r, c) in values(), or -1.
  std::int64_t find(std::int64_t r, std::int64_t c) const;

  CsrMatrix transpose() const;

private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<std::int32_t> col_index_;
  std::vector<double> values_;
};

/// y = A x. Each row is summed in ascending column order, so the parallel and
/// serial paths give identical bits.
void spmv(const CsrMatrix &a, std::span<const double> x, std::span<double> y,
          Exec exec = Exec::parallel);

/// r = b - A x
void residual(const CsrMatrix &a, std::span<const double> x,
              std::span<const double> b, std::span<double> r,
              Exec exec = Exec::parallel);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

} // namespace sbm
