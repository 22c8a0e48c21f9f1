#include "mipool/pooling.hpp"

#include <cmath>
#include <string>

#include "mipool/distributions.hpp"

namespace mipool {

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw Error("pooling: interval level must lie in (0, 1), got " + std::to_string(level));
}

struct Moments {
  double q_bar;
  double b;
};

Moments between_moments(const std::vector<double>& q_hats) {
  const double m = static_cast<double>(q_hats.size());
  double sum = 0.0;
  for (double q : q_hats) sum += q;
  const double q_bar = sum / m;
  double ss = 0.0;
  for (double q : q_hats) ss += (q - q_bar) * (q - q_bar);
  return {q_bar, ss / (m - 1.0)};
}

void set_interval(PooledResult& res) {
  const double half = t_quantile(0.5 * (1.0 + res.level), res.nu) * std::sqrt(res.t);
  res.ci_low = res.q_bar - half;
  res.ci_high = res.q_bar + half;
  res.degenerate = res.t == 0.0;
  if (res.degenerate) res.ci_low = res.ci_high = res.q_bar;
}

}  // namespace

std::string_view to_string(PoolingRule rule) noexcept {
  return rule == PoolingRule::conventional ? "conventional" : "simplified";
}

double fraction_missing_information(double r, double nu) {
  if (std::isinf(r)) return 1.0;
  return (r + 2.0 / (nu + 3.0)) / (r + 1.0);
}

double barnard_rubin_df(std::size_t m, double r, double lambda, double nu_com) {
  if (m < 2) throw Error("barnard_rubin_df: need m >= 2");
  if (!(nu_com > 0.0)) throw Error("barnard_rubin_df: complete-data df must be positive");
  if (!(r >= 0.0)) throw Error("barnard_rubin_df: r must be non-negative");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("barnard_rubin_df: lambda must lie in [0, 1]");
  const double md = static_cast<double>(m);
  const double nu_old = r == 0.0 ? kInfinity : (md - 1.0) * (1.0 + 1.0 / r) * (1.0 + 1.0 / r);
  const double nu_obs = nu_com * (nu_com + 1.0) / (nu_com + 3.0) * (1.0 - lambda);
  if (std::isinf(nu_old)) return nu_obs;
  if (nu_obs == 0.0) return nu_old;
  return 1.0 / (1.0 / nu_old + 1.0 / nu_obs);
}

PooledResult pool_conventional(const RepeatedEstimates& est, double nu_com, double level) {
  est.validate();
  check_level(level);
  if (!(nu_com > 0.0)) throw Error("pool_conventional: complete-data df must be positive");
  const double m = static_cast<double>(est.m());
  PooledResult res;
  res.rule = PoolingRule::conventional;
  res.level = level;
  res.m = est.m();
  const auto [q_bar, b] = between_moments(est.q_hats);
  res.q_bar = q_bar;
  res.b = b;
  double usum = 0.0;
  for (double u : est.u_bars) usum += u;
  res.u_bar = usum / m;
  res.t = res.u_bar + b + b / m;
  const double inflated_b = (1.0 + 1.0 / m) * b;
  // With u_bar == 0 all variance is attributed to missingness.
  res.r = res.u_bar == 0.0 ? kInfinity : inflated_b / res.u_bar;
  const double lambda = res.u_bar == 0.0 ? 1.0 : inflated_b / res.t;
  res.nu = barnard_rubin_df(est.m(), res.r, lambda, nu_com);
  res.fmi = fraction_missing_information(res.r, res.nu);
  set_interval(res);
  return res;
}

PooledResult pool_simplified(const RepeatedEstimates& est, double level) {
  if (est.q_hats.size() < 2) throw Error("pool_simplified: need m >= 2 estimates");
  if (est.u_bars.size() != est.q_hats.size())
    throw Error("pool_simplified: q_hats and u_bars differ in length");
  check_level(level);
  const double m = static_cast<double>(est.m());
  PooledResult res;
  res.rule = PoolingRule::simplified;
  res.level = level;
  res.m = est.m();
  const auto [q_bar, b] = between_moments(est.q_hats);
  res.q_bar = q_bar;
  res.b = b;
  res.u_bar = 0.0;
  res.t = b + b / m;
  res.r = kInfinity;
  res.nu = m - 1.0;
  res.fmi = 1.0;
  set_interval(res);
  return res;
}

PooledResult pool(const RepeatedEstimates& est, PoolingRule rule, double nu_com, double level) {
  return rule == PoolingRule::conventional ? pool_conventional(est, nu_com, level)
                                           : pool_simplified(est, level);
}

VectorPooledResult pool_vector(const RepeatedVectorEstimates& est, PoolingRule rule, double nu_com,
                               double level) {
  est.validate();
  const std::size_t m = est.m();
  const std::size_t k = est.k();
  VectorPooledResult out;
  out.components.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    RepeatedEstimates scalar;
    for (std::size_t l = 0; l < m; ++l) {
      scalar.q_hats.push_back(est.q_hats[l][j]);
      scalar.u_bars.push_back(est.u_bars[l](j, j));
    }
    out.components.push_back(pool(scalar, rule, nu_com, level));
  }
  out.b = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < m; ++l)
        s += (est.q_hats[l][i] - out.components[i].q_bar) * (est.q_hats[l][j] - out.components[j].q_bar);
      out.b(i, j) = s / static_cast<double>(m - 1);
    }
  return out;
}

}  // namespace mipool
