#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "mipool/dataset.hpp"
#include "mipool/matrix.hpp"

namespace mipool {

enum class PoolingRule { conventional, simplified };

std::string_view to_string(PoolingRule rule) noexcept;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PooledResult {
  double q_bar = 0.0;
  double u_bar = 0.0;  // mean within-imputation variance
  double b = 0.0;      // between-imputation variance
  double t = 0.0;      // total variance
  double r = 0.0;      // relative increase in variance; +inf when u_bar == 0
  double nu = 0.0;     // degrees of freedom
  double fmi = 0.0;    // fraction of missing information
  double ci_low = 0.0;
  double ci_high = 0.0;
  PoolingRule rule = PoolingRule::conventional;
  double level = 0.95;
  std::size_t m = 0;
  // Set when t == 0 and the interval collapses to the point estimate.
  bool degenerate = false;

  double ci_width() const noexcept { return ci_high - ci_low; }
  bool covers(double value) const noexcept { return ci_low <= value && value <= ci_high; }
};

// Infinite-population rules: T = Ubar + (1 + 1/m) B, with Barnard-Rubin
// degrees of freedom. nu_com is the complete-data df (n - 1 for a mean).
PooledResult pool_conventional(const RepeatedEstimates& est, double nu_com, double level = 0.95);

// Finite-population rules: the sampling variance is zero, so
// T = (1 + 1/m) B, r = inf and nu = m - 1. The u_bars are ignored.
PooledResult pool_simplified(const RepeatedEstimates& est, double level = 0.95);

PooledResult pool(const RepeatedEstimates& est, PoolingRule rule, double nu_com, double level = 0.95);

// Barnard & Rubin (1999) small-sample degrees of freedom:
//   nu_old = (m - 1) (1 + 1/r)^2
//   nu_obs = nu_com (nu_com + 1) / (nu_com + 3) (1 - lambda)
//   nu     = 1 / (1/nu_old + 1/nu_obs)
// r == 0 gives nu_old = inf and returns nu_obs. lambda == 1 leaves no
// observed-data information (nu_obs = 0); nu_old is returned in that case.
double barnard_rubin_df(std::size_t m, double r, double lambda, double nu_com);

// (r + 2 / (nu + 3)) / (r + 1), with the r = inf limit equal to 1.
double fraction_missing_information(double r, double nu);

struct VectorPooledResult {
  std::vector<PooledResult> components;
  // Full k x k between-imputation covariance; only its diagonal enters the
  // componentwise intervals.
  Matrix b;
};

VectorPooledResult pool_vector(const RepeatedVectorEstimates& est, PoolingRule rule, double nu_com,
                               double level = 0.95);

}  // namespace mipool
