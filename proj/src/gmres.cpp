#include "sbm/gmres.hpp"

#include <cmath>
#include <stdexcept>

#include "sbm/common.hpp"
#include "sbm/sparse.hpp"

namespace sbm {

namespace {

constexpr double breakdown_threshold = 1e-30;

void apply_givens(double c, double s, double &x, double &y) {
  const double t = c * x + s * y;
  y = -s * x + c * y;
  x = t;
}

} // namespace

GmresResult gmres(const LinearOperator &a, std::span<const double> b,
                  const LinearOperator &preconditioner,
                  const GmresOptions &opts) {
  if (!(opts.relative_tolerance > 0.0))
    throw std::invalid_argument("GMRES tolerance must be positive");
  if (opts.max_iterations < 1)
    throw std::invalid_argument("GMRES needs at least one iteration");

  const std::size_t n = b.size();
  const int m = opts.max_iterations;
  GmresResult result;
  result.solution.assign(n, 0.0);

  const double beta = norm2(b);
  result.residual_history.push_back(beta == 0.0 ? 0.0 : 1.0);
  if (beta == 0.0) {
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> v;
  v.reserve(m + 1);
  v.emplace_back(b.begin(), b.end());
  for (auto &e : v[0])
    e /= beta;

  // h is stored column by column: h[j] has j+2 entries.
  std::vector<std::vector<double>> h;
  std::vector<double> cs, sn, g{beta};
  std::vector<double> z(n), w(n);

  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    if (preconditioner)
      preconditioner(in, out);
    else
      std::copy(in.begin(), in.end(), out.begin());
  };

  int k = 0;
  bool lucky = false;
  while (k < m) {
    precondition(v[k], z);
    a(z, w);

    std::vector<double> col(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      const double hij = dot(std::span<const double>(w), v[i]);
      col[i] = hij;
      for (std::size_t r = 0; r < n; ++r)
        w[r] -= hij * v[i][r];
    }
    col[k + 1] = norm2(w);
    const double subdiag = col[k + 1];

    for (int i = 0; i < k; ++i)
      apply_givens(cs[i], sn[i], col[i], col[i + 1]);
    const double denom = std::hypot(col[k], col[k + 1]);
    const double c = denom == 0.0 ? 1.0 : col[k] / denom;
    const double s = denom == 0.0 ? 0.0 : col[k + 1] / denom;
    cs.push_back(c);
    sn.push_back(s);
    col[k] = denom;
    col[k + 1] = 0.0;
    g.push_back(-s * g[k]);
    g[k] *= c;
    h.push_back(std::move(col));
    ++k;

    const double estimate = std::abs(g[k]) / beta;
    result.residual_history.push_back(estimate);
    if (estimate <= opts.relative_tolerance)
      break;
    if (subdiag < breakdown_threshold) {
      lucky = true;
      break;
    }
    v.emplace_back(w);
    for (auto &e : v.back())
      e /= subdiag;
  }

  // Solve the triangular least-squares system and form x = M (V y).
  std::vector<double> y(k);
  for (int i = k - 1; i >= 0; --i) {
    double s = g[i];
    for (int j = i + 1; j < k; ++j)
      s -= h[j][i] * y[j];
    y[i] = s / h[i][i];
  }
  std::vector<double> vy(n, 0.0);
  for (int j = 0; j < k; ++j)
    for (std::size_t r = 0; r < n; ++r)
      vy[r] += y[j] * v[j][r];
  precondition(vy, result.solution);

  a(result.solution, w);
  for (std::size_t r = 0; r < n; ++r)
    w[r] = b[r] - w[r];
  result.final_residual = norm2(w) / beta;
  result.iterations = k;
  result.converged = result.residual_history.back() <= opts.relative_tolerance;
  if (lucky && !result.converged) {
    if (result.final_residual <= opts.relative_tolerance)
      result.converged = true;
    else
      throw SolverBreakdown("GMRES breakdown: Krylov space became invariant "
                            "before the residual target was reached");
  }
  return result;
}

GmresResult gmres(const CsrMatrix &a, std::span<const double> b,
                  const LinearOperator &preconditioner,
                  const GmresOptions &opts) {
  if (a.rows() != a.cols() || a.rows() != static_cast<std::int64_t>(b.size()))
    throw std::invalid_argument("GMRES: dimension mismatch");
  LinearOperator op = [&a](std::span<const double> x, std::span<double> y) {
    spmv(a, x, y);
  };
  return gmres(op, b, preconditioner, opts);
}

} // namespace sbm
