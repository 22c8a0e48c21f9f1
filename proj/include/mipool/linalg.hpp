#pragma once

#include <span>
#include <vector>

#include "mipool/matrix.hpp"
#include "mipool/rng.hpp"

namespace mipool {

// Lower-triangular L with L * L^T == a. Only the lower triangle of `a` is
// read after a symmetry check. Throws NumericalError naming the pivot index
// when a pivot is not strictly positive.
Matrix cholesky(const Matrix& a);

// Inverse of a symmetric positive-definite matrix via its Cholesky factor.
Matrix spd_inverse(const Matrix& a);

// mu + chol_sigma * z with z drawn i.i.d. standard normal from rng.
std::vector<double> mvn_sample(std::span<const double> mu, const Matrix& chol_sigma,
                               RngStream& rng);

struct LeastSquaresFit {
  std::vector<double> beta_hat;
  double rss = 0.0;
  // (X^T X + kappa I)^{-1}, kappa = 1e-8 * trace(X^T X) / q.
  Matrix xtx_inv;
  double ridge = 0.0;
  // True when X was rank deficient and beta_hat is the ridge solution.
  bool ridge_repaired = false;
};

// Ordinary least squares through Householder QR. The ridge-stabilized inverse
// of the cross-product matrix is returned alongside for posterior draws; the
// ridge also stands in for beta_hat when X is numerically rank deficient.
LeastSquaresFit least_squares(const Matrix& x, std::span<const double> y);

}  // namespace mipool
