#include "mipool/imputer.hpp"

#include <cmath>
#include <string>

#include "mipool/distributions.hpp"
#include "mipool/linalg.hpp"

namespace mipool {

void ImputerConfig::validate() const {
  if (m < 2) throw Error("ImputerConfig: m must be at least 2");
  if (iterations < 1) throw Error("ImputerConfig: iterations must be at least 1");
}

std::vector<double> norm_draw(std::span<const double> y_obs, const Matrix& x_obs,
                              const Matrix& x_mis, RngStream& rng) {
  const std::size_t n0 = y_obs.size();
  const std::size_t q = x_obs.cols();
  if (x_obs.rows() != n0) throw Error("norm_draw: y_obs and x_obs row counts differ");
  if (x_mis.rows() > 0 && x_mis.cols() != q)
    throw Error("norm_draw: x_mis and x_obs column counts differ");
  if (n0 <= q)
    throw Error("norm_draw: " + std::to_string(n0) + " observed rows cannot support " +
                std::to_string(q) + " predictors");
  if (x_mis.rows() == 0) return {};

  const LeastSquaresFit fit = least_squares(x_obs, y_obs);
  const double chi2 = draw_chi_square(static_cast<double>(n0 - q), rng);
  const double sigma = std::sqrt(fit.rss / chi2);
  const Matrix chol_v = cholesky(fit.xtx_inv);
  std::vector<double> beta = fit.beta_hat;
  {
    std::vector<double> z(q);
    for (auto& v : z) v = rng.normal();
    for (std::size_t i = 0; i < q; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += chol_v(i, j) * z[j];
      beta[i] += sigma * s;
    }
  }
  std::vector<double> out = x_mis * std::span<const double>(beta);
  for (auto& v : out) v += sigma * rng.normal();
  return out;
}

namespace {

Matrix impute_chain(const IncompleteDataset& ds, const std::vector<std::size_t>& incomplete,
                    std::size_t iterations, RngStream rng) {
  const std::size_t n = ds.rows();
  const std::size_t k = ds.cols();
  Matrix data = ds.values();

  for (std::size_t col : incomplete) {
    const std::vector<double> pool = column_observed_values(ds, col);
    for (std::size_t r = 0; r < n; ++r)
      if (!ds.observed(r, col)) data(r, col) = pool[rng.uniform_index(pool.size())];
  }

  const std::size_t q = k;  // intercept + (k - 1) other columns
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t col : incomplete) {
      const std::size_t n_obs = ds.mask().observed_count(col);
      Matrix x_obs(n_obs, q);
      Matrix x_mis(n - n_obs, q);
      std::vector<double> y_obs;
      y_obs.reserve(n_obs);
      std::size_t io = 0;
      std::size_t im = 0;
      for (std::size_t r = 0; r < n; ++r) {
        const bool obs = ds.observed(r, col);
        auto row = obs ? x_obs.row(io++) : x_mis.row(im++);
        row[0] = 1.0;
        std::size_t p = 1;
        for (std::size_t c = 0; c < k; ++c)
          if (c != col) row[p++] = data(r, c);
        if (obs) y_obs.push_back(data(r, col));
      }
      const std::vector<double> draws = norm_draw(y_obs, x_obs, x_mis, rng);
      std::size_t d = 0;
      for (std::size_t r = 0; r < n; ++r)
        if (!ds.observed(r, col)) data(r, col) = draws[d++];
    }
  }
  return data;
}

}  // namespace

ImputationStack mice(const IncompleteDataset& ds, const ImputerConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> incomplete;
  for (std::size_t c = 0; c < ds.cols(); ++c) {
    const std::size_t n_obs = ds.mask().observed_count(c);
    if (n_obs == ds.rows()) continue;
    if (n_obs == 0)
      throw Error("mice: column '" + ds.column_names()[c] + "' has no observed values");
    if (n_obs < ds.cols() + 1)
      throw Error("mice: column '" + ds.column_names()[c] + "' has " + std::to_string(n_obs) +
                  " observed rows, fewer than predictors + 1");
    incomplete.push_back(c);
  }

  std::vector<Matrix> completions;
  completions.reserve(cfg.m);
  for (std::size_t chain = 0; chain < cfg.m; ++chain)
    completions.push_back(impute_chain(ds, incomplete, cfg.iterations, cfg.rng.fork(chain)));
  return ImputationStack(ds, std::move(completions));
}

}  // namespace mipool
