#include "sbm/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sbm/common.hpp"
#include "sbm/sparse.hpp"

namespace sbm {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_sparse(const CsrMatrix &a) {
  DenseMatrix m(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  for (std::int64_t r = 0; r < a.rows(); ++r)
    for (std::int64_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k)
      m(static_cast<int>(r), a.col_index()[k]) = a.values()[k];
  return m;
}

void DenseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
    throw std::invalid_argument("dense multiply: dimension mismatch");
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j)
      s += (*this)(i, j) * x[j];
    y[i] = s;
  }
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::trace() const {
  double s = 0.0;
  for (int i = 0; i < std::min(rows_, cols_); ++i)
    s += (*this)(i, i);
  return s;
}

double DenseMatrix::norm_inf() const {
  double best = 0.0;
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j)
      s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("dense product: dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < b.cols(); ++j)
        c(i, j) += aik * b(k, j);
    }
  return c;
}

DenseLU::DenseLU(const DenseMatrix &a, double relative_pivot_tolerance)
    : n_(a.rows()), lu_(a.data(), a.data() + static_cast<std::size_t>(a.rows()) * a.cols()),
      perm_(a.rows()) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("LU needs a square matrix");
  const int n = n_;
  const double scale = a.norm_inf();
  const double tiny = relative_pivot_tolerance * scale;
  for (int i = 0; i < n; ++i)
    perm_[i] = i;
  auto at = [&](int i, int j) -> double & { return lu_[static_cast<std::size_t>(i) * n + j]; };
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(at(i, k)) > std::abs(at(piv, k)))
        piv = i;
    if (!(std::abs(at(piv, k)) > tiny))
      throw SingularBlock("matrix is numerically singular (pivot " +
                          std::to_string(std::abs(at(piv, k))) + " at column " +
                          std::to_string(k) + ")");
    if (piv != k) {
      for (int j = 0; j < n; ++j)
        std::swap(at(k, j), at(piv, j));
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv = 1.0 / at(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double f = at(i, k) * inv;
      at(i, k) = f;
      if (f == 0.0)
        continue;
      for (int j = k + 1; j < n; ++j)
        at(i, j) -= f * at(k, j);
    }
  }
}

void DenseLU::solve(std::span<const double> b, std::span<double> x) const {
  if (static_cast<int>(b.size()) != n_ || static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("LU solve: dimension mismatch");
  std::vector<double> y(n_);
  for (int i = 0; i < n_; ++i)
    y[i] = b[perm_[i]];
  std::copy(y.begin(), y.end(), x.begin());
  for (int i = 0; i < n_; ++i) {
    double s = x[i];
    const double *row = &lu_[static_cast<std::size_t>(i) * n_];
    for (int j = 0; j < i; ++j)
      s -= row[j] * x[j];
    x[i] = s;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = x[i];
    const double *row = &lu_[static_cast<std::size_t>(i) * n_];
    for (int j = i + 1; j < n_; ++j)
      s -= row[j] * x[j];
    x[i] = s / row[i];
  }
}

void DenseLU::solve_in_place(std::span<double> x) const {
  std::vector<double> b(x.begin(), x.end());
  solve(b, x);
}

std::vector<double> direct_solve(const DenseMatrix &a, std::span<const double> b) {
  DenseLU lu(a);
  std::vector<double> x(b.size());
  lu.solve(b, x);
  return x;
}

std::vector<double> direct_solve(const CsrMatrix &a, std::span<const double> b,
                                 std::int64_t max_size) {
  if (a.rows() > max_size)
    throw std::invalid_argument("system of size " + std::to_string(a.rows()) +
                                " exceeds the direct-solver cap " +
                                std::to_string(max_size));
  return direct_solve(DenseMatrix::from_sparse(a), b);
}

namespace {

void balance(DenseMatrix &a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const int n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      if (c == 0.0 || r == 0.0)
        continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (int j = 0; j < n; ++j)
          a(i, j) *= g;
        for (int j = 0; j < n; ++j)
          a(j, i) *= f;
      }
    }
  }
}

void to_hessenberg(DenseMatrix &a) {
  const int n = a.rows();
  for (int m = 1; m < n - 1; ++m) {
    double x = 0.0;
    int i = m;
    for (int j = m; j < n; ++j)
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    if (i != m) {
      for (int j = m - 1; j < n; ++j)
        std::swap(a(i, j), a(m, j));
      for (int j = 0; j < n; ++j)
        std::swap(a(j, i), a(j, m));
    }
    if (x == 0.0)
      continue;
    for (i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0.0)
        continue;
      y /= x;
      a(i, m - 1) = 0.0;
      for (int j = m; j < n; ++j)
        a(i, j) -= y * a(m, j);
      for (int j = 0; j < n; ++j)
        a(j, m) += y * a(j, i);
    }
  }
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
std::vector<std::complex<double>> hessenberg_qr(DenseMatrix &a) {
  const int n = a.rows();
  std::vector<double> wr(n), wi(n);
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j)
      anorm += std::abs(a(i, j));

  const int max_sweeps = 100 * n;
  int sweeps = 0;
  int nn = n - 1;
  double t = 0.0;
  double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0)
          s = anorm;
        if (std::abs(a(l, l - 1)) + s == s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0)
              wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -z;
            wi[nn] = z;
          }
          nn -= 2;
        } else {
          if (++sweeps > max_sweeps)
            throw NoConvergence("QR eigenvalue iteration did not converge");
          if (its == 10 || its == 20) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i)
              a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l)
              break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                            std::abs(a(m + 1, m + 1)));
            if (u + v == v)
              break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2)
              a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1)
                r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m)
                  a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  std::vector<std::complex<double>> eig(n);
  for (int i = 0; i < n; ++i)
    eig[i] = {wr[i], wi[i]};
  return eig;
}

} // namespace

std::vector<std::complex<double>> small_eig(const DenseMatrix &m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("small_eig needs a nonempty square matrix");
  if (m.rows() > 64)
    throw std::invalid_argument("small_eig is limited to n <= 64");
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j)))
        throw std::invalid_argument("small_eig: matrix has non-finite entries");
  DenseMatrix a = m;
  balance(a);
  to_hessenberg(a);
  return hessenberg_qr(a);
}

} // namespace sbm
