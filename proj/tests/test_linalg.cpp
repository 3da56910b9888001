#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "sbm/dense.hpp"
#include "sbm/gmres.hpp"
#include "sbm/sparse.hpp"

using namespace sbm;

namespace {

CsrMatrix laplacian_1d(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i > 0)
      t.push_back({i, i - 1, -1.0});
    if (i + 1 < n)
      t.push_back({i, i + 1, -1.0});
  }
  return CsrMatrix::from_triplets(n, n, t);
}

DenseMatrix random_matrix(int n, std::mt19937 &rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = u(rng);
  return m;
}

// Characteristic polynomial by Faddeev-LeVerrier and its roots by
// Durand-Kerner; only used for tiny matrices.
std::vector<std::complex<double>> charpoly_roots(const DenseMatrix &a) {
  const int n = a.rows();
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  DenseMatrix mk(n, n);
  for (int k = 1; k <= n; ++k) {
    mk = a * mk;
    for (int i = 0; i < n; ++i)
      mk(i, i) += c[n - k + 1];
    c[n - k] = -(a * mk).trace() / k;
  }
  std::vector<std::complex<double>> z(n);
  for (int i = 0; i < n; ++i)
    z[i] = std::pow(std::complex<double>(0.4, 0.9), i);
  auto poly = [&](std::complex<double> x) {
    std::complex<double> s = 0.0;
    for (int k = n; k >= 0; --k)
      s = s * x + c[k];
    return s;
  };
  for (int it = 0; it < 2000; ++it)
    for (int i = 0; i < n; ++i) {
      std::complex<double> d = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i)
          d *= z[i] - z[j];
      z[i] -= poly(z[i]) / d;
    }
  return z;
}

} // namespace

TEST_CASE("csr construction and spmv") {
  const auto id = CsrMatrix::identity(5);
  std::vector<double> x{1, 2, 3, 4, 5}, y(5);
  spmv(id, x, y);
  CHECK(y == x);

  const auto l = laplacian_1d(4);
  std::vector<double> e2{0, 1, 0, 0}, out(4);
  spmv(l, e2, out);
  CHECK(out == std::vector<double>{-1, 2, -1, 0});

  const auto dup = CsrMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {0, 1, 2.5}, {1, 0, -1.0}});
  CHECK(dup.at(0, 1) == 3.5);
  CHECK(dup.at(0, 0) == 0.0);
  CHECK(dup.find(0, 0) == -1);
  CHECK(dup.transpose().at(1, 0) == 3.5);
  CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::invalid_argument);

  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> big(200), ys(200), yp(200);
  for (auto &v : big)
    v = u(rng);
  const auto l200 = laplacian_1d(200);
  spmv(l200, big, ys, Exec::serial);
  spmv(l200, big, yp, Exec::parallel);
  CHECK(ys == yp);
}

TEST_CASE("direct solves") {
  std::vector<double> b{3, 3};
  DenseMatrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 2;
  const auto x = direct_solve(a, b);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-15));

  const auto xi = direct_solve(DenseMatrix::identity(3), std::vector<double>{1, 2, 3});
  CHECK(xi == std::vector<double>{1, 2, 3});

  DenseMatrix singular(2, 2, 1.0);
  CHECK_THROWS_AS(DenseLU{singular}, SingularBlock);
  CHECK_THROWS_AS(direct_solve(CsrMatrix::identity(30), std::vector<double>(30), 10),
                  std::invalid_argument);
}

TEST_CASE("small eigenvalue solver") {
  DenseMatrix rot(2, 2);
  rot(0, 1) = -1;
  rot(1, 0) = 1;
  auto e = small_eig(rot);
  std::sort(e.begin(), e.end(), [](auto a, auto b) { return a.imag() < b.imag(); });
  CHECK(std::abs(e[0] - std::complex<double>(0, -1)) <= 1e-14);
  CHECK(std::abs(e[1] - std::complex<double>(0, 1)) <= 1e-14);

  DenseMatrix d(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  e = small_eig(d);
  std::vector<double> re;
  for (auto v : e)
    re.push_back(v.real());
  std::sort(re.begin(), re.end());
  CHECK(re == std::vector<double>{1, 2, 3});

  std::mt19937 rng(17);
  for (int n : {2, 3, 4, 5}) {
    for (int t = 0; t < 5; ++t) {
      const auto m = random_matrix(n, rng);
      const auto ev = small_eig(m);
      const auto oracle = charpoly_roots(m);
      for (const auto &z : oracle) {
        double best = 1e300;
        for (const auto &w : ev)
          best = std::min(best, std::abs(z - w));
        CHECK(best <= 1e-8);
      }
    }
  }

  for (int n : {1, 6, 17, 40, 64}) {
    const auto m = random_matrix(n, rng);
    std::complex<double> sum = 0.0;
    for (const auto &l : small_eig(m))
      sum += l;
    CHECK(std::abs(sum.real() - m.trace()) <= 1e-9 * m.norm_inf());
    CHECK(std::abs(sum.imag()) <= 1e-9 * m.norm_inf());
  }
  CHECK_THROWS_AS(small_eig(DenseMatrix(65, 65)), std::invalid_argument);
}

TEST_CASE("gmres basics") {
  const auto id = CsrMatrix::identity(6);
  std::vector<double> b{1, -2, 3, 0.5, 0, 7};
  auto r = gmres(id, b, {});
  CHECK(r.converged);
  CHECK(r.iterations == 1);

  std::vector<Triplet> t;
  for (int i = 0; i < 10; ++i)
    t.push_back({i, i, i + 1.0});
  const auto diag = CsrMatrix::from_triplets(10, 10, t);
  const std::vector<double> ones(10, 1.0);
  r = gmres(diag, ones, {});
  CHECK(r.converged);
  CHECK(r.iterations <= 10);
  for (int i = 0; i < 10; ++i)
    CHECK(std::abs(r.solution[i] - 1.0 / (i + 1)) <= 1e-12);

  const std::vector<double> zero(6, 0.0);
  r = gmres(id, zero, {});
  CHECK(r.converged);
  CHECK(r.iterations == 0);
}

TEST_CASE("gmres residual history and preconditioning") {
  const int n = 60;
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 4.0 + i * 0.1});
    for (int k = 1; k <= 3; ++k) {
      if (i + k < n)
        t.push_back({i, i + k, u(rng)});
      if (i - k >= 0)
        t.push_back({i, i - k, u(rng) - 0.5});
    }
  }
  const auto a = CsrMatrix::from_triplets(n, n, t);
  std::vector<double> b(n);
  for (auto &v : b)
    v = u(rng);

  const auto plain = gmres(a, b, {});
  REQUIRE(plain.converged);
  for (std::size_t k = 1; k < plain.residual_history.size(); ++k)
    CHECK(plain.residual_history[k] <= plain.residual_history[k - 1] * (1 + 1e-12));
  CHECK(plain.final_residual <= 1e-11);

  const LinearOperator jacobi = [&](std::span<const double> x, std::span<double> y) {
    for (int i = 0; i < n; ++i)
      y[i] = x[i] / a.at(i, i);
  };
  const auto pre = gmres(a, b, jacobi);
  REQUIRE(pre.converged);
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(pre.solution[i] - plain.solution[i]) <= 1e-9);

  GmresOptions few;
  few.max_iterations = 3;
  const auto capped = gmres(a, b, {}, few);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 3);
}
