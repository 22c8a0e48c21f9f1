#include "mipool/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mipool {

namespace {

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(std::string(what) + ": expected a non-empty square matrix");
}

Matrix cross_product(const Matrix& x) {
  const std::size_t q = x.cols();
  Matrix xtx(q, q);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j <= i; ++j) xtx(i, j) += row[i] * row[j];
  }
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < i; ++j) xtx(j, i) = xtx(i, j);
  return xtx;
}

// Solves L L^T x = b in place.
void cholesky_solve(const Matrix& l, std::span<double> b) {
  const std::size_t k = l.rows();
  for (std::size_t i = 0; i < k; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * b[j];
    b[i] = s / l(i, i);
  }
  for (std::size_t i = k; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < k; ++j) s -= l(j, i) * b[j];
    b[i] = s / l(i, i);
  }
}

}  // namespace

Matrix cholesky(const Matrix& a) {
  require_square(a, "cholesky");
  const std::size_t k = a.rows();
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * scale)
        throw Error("cholesky: input is not symmetric");

  Matrix l(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    double d = a(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
    if (!(d > 0.0))
      throw NumericalError("cholesky: matrix is not positive definite (pivot " +
                           std::to_string(j) + ")");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < k; ++i) {
      double s = a(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Matrix spd_inverse(const Matrix& a) {
  const Matrix l = cholesky(a);
  const std::size_t k = a.rows();
  Matrix inv(k, k);
  std::vector<double> e(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    cholesky_solve(l, e);
    for (std::size_t r = 0; r < k; ++r) inv(r, c) = e[r];
  }
  // Symmetrize away round-off.
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = inv(j, i) = v;
    }
  return inv;
}

std::vector<double> mvn_sample(std::span<const double> mu, const Matrix& chol_sigma,
                               RngStream& rng) {
  const std::size_t k = mu.size();
  if (chol_sigma.rows() != k || chol_sigma.cols() != k)
    throw Error("mvn_sample: mean and covariance factor dimensions disagree");
  std::vector<double> z(k);
  for (auto& v : z) v = rng.normal();
  std::vector<double> out(mu.begin(), mu.end());
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j <= i; ++j) out[i] += chol_sigma(i, j) * z[j];
  return out;
}

LeastSquaresFit least_squares(const Matrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t q = x.cols();
  if (q == 0) throw Error("least_squares: design has no columns");
  if (y.size() != n) throw Error("least_squares: response length differs from design rows");
  if (n < q) throw Error("least_squares: fewer rows than columns");

  LeastSquaresFit fit;
  Matrix xtx = cross_product(x);
  double trace = 0.0;
  for (std::size_t i = 0; i < q; ++i) trace += xtx(i, i);
  fit.ridge = 1e-8 * trace / static_cast<double>(q);
  Matrix xtx_ridge = xtx;
  for (std::size_t i = 0; i < q; ++i) xtx_ridge(i, i) += fit.ridge;
  try {
    fit.xtx_inv = spd_inverse(xtx_ridge);
  } catch (const NumericalError&) {
    throw NumericalError("least_squares: design is singular beyond ridge repair");
  }

  // Householder QR on a working copy; qty accumulates Q^T y.
  Matrix r = x;
  std::vector<double> qty(y.begin(), y.end());
  std::vector<double> v(n);
  bool rank_deficient = false;
  double max_diag = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm += r(i, j) * r(i, j);
    norm = std::sqrt(norm);
    const double alpha = r(j, j) > 0.0 ? -norm : norm;
    for (std::size_t i = j; i < n; ++i) v[i] = r(i, j);
    v[j] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 > 0.0) {
      for (std::size_t c = j; c < q; ++c) {
        double s = 0.0;
        for (std::size_t i = j; i < n; ++i) s += v[i] * r(i, c);
        s = 2.0 * s / vnorm2;
        for (std::size_t i = j; i < n; ++i) r(i, c) -= s * v[i];
      }
      double s = 0.0;
      for (std::size_t i = j; i < n; ++i) s += v[i] * qty[i];
      s = 2.0 * s / vnorm2;
      for (std::size_t i = j; i < n; ++i) qty[i] -= s * v[i];
    }
    max_diag = std::max(max_diag, std::abs(r(j, j)));
  }
  for (std::size_t j = 0; j < q; ++j)
    if (std::abs(r(j, j)) <= 1e-12 * max_diag || max_diag == 0.0) rank_deficient = true;

  fit.beta_hat.assign(q, 0.0);
  if (!rank_deficient) {
    for (std::size_t j = q; j-- > 0;) {
      double s = qty[j];
      for (std::size_t c = j + 1; c < q; ++c) s -= r(j, c) * fit.beta_hat[c];
      fit.beta_hat[j] = s / r(j, j);
    }
  } else {
    std::vector<double> xty(q, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = x.row(i);
      for (std::size_t j = 0; j < q; ++j) xty[j] += row[j] * y[i];
    }
    fit.beta_hat = fit.xtx_inv * std::span<const double>(xty);
    fit.ridge_repaired = true;
  }

  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = x.row(i);
    double pred = 0.0;
    for (std::size_t j = 0; j < q; ++j) pred += row[j] * fit.beta_hat[j];
    const double e = y[i] - pred;
    rss += e * e;
  }
  fit.rss = rss;
  return fit;
}

}  // namespace mipool
