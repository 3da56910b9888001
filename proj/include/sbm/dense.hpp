#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace sbm {

class CsrMatrix;

/// Row-major dense matrix.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static DenseMatrix identity(int n);
  static DenseMatrix from_sparse(const CsrMatrix &a);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double &operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double *data() { return data_.data(); }
  const double *data() const { return data_.data(); }

  void multiply(std::span<const double> x, std::span<double> y) const;
  DenseMatrix transpose() const;
  double trace() const;
  /// Maximum absolute row sum.
  double norm_inf() const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b);

/// LU factorization with partial pivoting. Throws SingularBlock when a pivot
/// falls below relative_pivot_tolerance * ||A||_inf.
class DenseLU {
public:
  DenseLU() = default;
  explicit DenseLU(const DenseMatrix &a, double relative_pivot_tolerance = 1e-14);

  int size() const { return n_; }
  void solve(std::span<const double> b, std::span<double> x) const;
  void solve_in_place(std::span<double> x) const;

private:
  int n_ = 0;
  std::vector<double> lu_;
  std::vector<int> perm_;
};

std::vector<double> direct_solve(const DenseMatrix &a, std::span<const double> b);

/// Dense LU of a sparse system, refusing systems larger than `max_size`.
std::vector<double> direct_solve(const CsrMatrix &a, std::span<const double> b,
                                 std::int64_t max_size = 20000);

/// All eigenvalues of a general real matrix (n <= 64): balancing, Hessenberg
/// reduction by stabilized elimination and Francis double-shift QR.
/// Throws NoConvergence after 100 n QR sweeps.
std::vector<std::complex<double>> small_eig(const DenseMatrix &m);

} // namespace sbm
