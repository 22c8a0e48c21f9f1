#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mipool/dataset.hpp"
#include "mipool/matrix.hpp"
#include "mipool/rng.hpp"

namespace mipool {

struct ImputerConfig {
  std::size_t m = 5;
  std::size_t iterations = 10;
  RngStream rng{0, 0};

  void validate() const;
};

// Bayesian linear regression draw (the `norm` method): fit y_obs on x_obs,
// draw sigma*^2 = rss / chi^2(n0 - q), beta* = beta_hat + sigma* L z with
// L L^T = (X^T X + kappa I)^{-1}, and return x_mis beta* + sigma* eps.
// Design matrices must already include the intercept column.
std::vector<double> norm_draw(std::span<const double> y_obs, const Matrix& x_obs,
                              const Matrix& x_mis, RngStream& rng);

// Multiple imputation by chained equations. Chain c uses cfg.rng.fork(c);
// each starts from random draws of its column's observed values, then visits
// the incomplete columns left to right `iterations` times, regressing each on
// all other columns plus an intercept.
ImputationStack mice(const IncompleteDataset& ds, const ImputerConfig& cfg);

}  // namespace mipool
