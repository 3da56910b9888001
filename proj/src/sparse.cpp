#include "sbm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbm {

CsrMatrix::CsrMatrix(std::int64_t rows, std::int64_t cols,
                     std::vector<std::int64_t> row_ptr,
                     std::vector<std::int32_t> col_index,
                     std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)),
      col_index_(std::move(col_index)), values_(std::move(values)) {
  if (rows < 0 || cols < 0 || cols > std::numeric_limits<std::int32_t>::max())
    throw std::invalid_argument("invalid sparse matrix dimensions");
  if (static_cast<std::int64_t>(row_ptr_.size()) != rows + 1 || row_ptr_[0] != 0)
    throw std::invalid_argument("row_ptr must have rows+1 entries starting at 0");
  if (col_index_.size() != values_.size() ||
      row_ptr_.back() != static_cast<std::int64_t>(values_.size()))
    throw std::invalid_argument("column/value arrays do not match row_ptr");
  for (std::int64_t r = 0; r < rows; ++r) {
    if (row_ptr_[r + 1] < row_ptr_[r])
      throw std::invalid_argument("row_ptr must be nondecreasing");
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_index_[k] < 0 || col_index_[k] >= cols)
        throw std::invalid_argument("column index out of range");
      if (k > row_ptr_[r] && col_index_[k] <= col_index_[k - 1])
        throw std::invalid_argument("columns must be sorted and unique");
    }
  }
}

CsrMatrix CsrMatrix::identity(std::int64_t n) {
  std::vector<std::int64_t> ptr(n + 1);
  std::vector<std::int32_t> col(n);
  for (std::int64_t i = 0; i < n; ++i) {
    ptr[i + 1] = i + 1;
    col[i] = static_cast<std::int32_t>(i);
  }
  return CsrMatrix(n, n, std::move(ptr), std::move(col),
                   std::vector<double>(n, 1.0));
}

CsrMatrix CsrMatrix::from_triplets(std::int64_t rows, std::int64_t cols,
                                   std::vector<Triplet> triplets) {
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet &a, const Triplet &b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  std::vector<std::int64_t> ptr(rows + 1, 0);
  std::vector<std::int32_t> col;
  std::vector<double> val;
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const Triplet &t = triplets[k];
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("triplet index out of range");
    if (k > 0 && t.row == triplets[k - 1].row && t.col == triplets[k - 1].col) {
      val.back() += t.value;
      continue;
    }
    col.push_back(static_cast<std::int32_t>(t.col));
    val.push_back(t.value);
    ++ptr[t.row + 1];
  }
  for (std::int64_t r = 0; r < rows; ++r)
    ptr[r + 1] += ptr[r];
  return CsrMatrix(rows, cols, std::move(ptr), std::move(col), std::move(val));
}

std::int64_t CsrMatrix::find(std::int64_t r, std::int64_t c) const {
  if (r < 0 || r >= rows_)
    return -1;
  const auto begin = col_index_.begin() + row_ptr_[r];
  const auto end = col_index_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c)
    return -1;
  return it - col_index_.begin();
}

double CsrMatrix::at(std::int64_t r, std::int64_t c) const {
  const std::int64_t k = find(r, c);
  return k < 0 ? 0.0 : values_[k];
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<std::int64_t> ptr(cols_ + 1, 0);
  for (auto c : col_index_)
    ++ptr[c + 1];
  for (std::int64_t c = 0; c < cols_; ++c)
    ptr[c + 1] += ptr[c];
  std::vector<std::int64_t> next(ptr.begin(), ptr.end() - 1);
  std::vector<std::int32_t> col(nnz());
  std::vector<double> val(nnz());
  for (std::int64_t r = 0; r < rows_; ++r)
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::int64_t dst = next[col_index_[k]]++;
      col[dst] = static_cast<std::int32_t>(r);
      val[dst] = values_[k];
    }
  return CsrMatrix(cols_, rows_, std::move(ptr), std::move(col), std::move(val));
}

void spmv(const CsrMatrix &a, std::span<const double> x, std::span<double> y,
          Exec exec) {
  if (static_cast<std::int64_t>(x.size()) != a.cols() ||
      static_cast<std::int64_t>(y.size()) != a.rows())
    throw std::invalid_argument("spmv: dimension mismatch");
  const auto *ptr = a.row_ptr().data();
  const auto *col = a.col_index().data();
  const auto *val = a.values().data();
  const std::int64_t n = a.rows();
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::int64_t k = ptr[r]; k < ptr[r + 1]; ++k)
      s += val[k] * x[col[k]];
    y[r] = s;
  }
}

void residual(const CsrMatrix &a, std::span<const double> x,
              std::span<const double> b, std::span<double> r, Exec exec) {
  if (static_cast<std::int64_t>(b.size()) != a.rows())
    throw std::invalid_argument("residual: dimension mismatch");
  spmv(a, x, r, exec);
  const std::int64_t n = a.rows();
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < n; ++i)
    r[i] = b[i] - r[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

} // namespace sbm
