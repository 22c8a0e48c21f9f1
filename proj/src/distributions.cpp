#include "mipool/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mipool/error.hpp"

namespace mipool {

namespace {

constexpr double kChiSquareSumLimit = 1e4;
constexpr double kLargeDf = 1e5;

// Continued fraction for I_x(a, b) (modified Lentz), valid for
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return h;
  }
  throw NumericalError("incomplete_beta: continued fraction did not converge");
}

// I_x(a, b) where y = 1 - x is supplied separately to avoid cancellation.
double incomplete_beta_xy(double x, double y, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  // log1p(-x) loses accuracy when x is close to 1; use log(y) there.
  const double log_front_y = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log1p(-y) + b * std::log(y);
  const double front = std::exp(x < 0.5 ? log_front : log_front_y);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(y, b, a) / b;
}

// P(T > t) for t >= 0.
double t_upper_tail(double t, double df) {
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  return 0.5 * incomplete_beta_xy(x, y, 0.5 * df, 0.5);
}

double cornish_fisher_t(double z, double df) {
  const double z2 = z * z;
  const double z3 = z2 * z;
  const double z5 = z3 * z2;
  const double z7 = z5 * z2;
  const double z9 = z7 * z2;
  const double g1 = (z3 + z) / 4.0;
  const double g2 = (5.0 * z5 + 16.0 * z3 + 3.0 * z) / 96.0;
  const double g3 = (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / 384.0;
  const double g4 =
      (79.0 * z9 + 776.0 * z7 + 1482.0 * z5 - 1920.0 * z3 - 945.0 * z) / 92160.0;
  return z + g1 / df + g2 / (df * df) + g3 / (df * df * df) + g4 / (df * df * df * df);
}

void check_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0))
    throw Error(std::string(what) + ": probability must lie in (0, 1), got " + std::to_string(p));
}

void check_df(double df, const char* what) {
  if (!(df > 0.0))
    throw Error(std::string(what) + ": degrees of freedom must be positive, got " +
                std::to_string(df));
}

}  // namespace

double draw_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0)) throw Error("draw_gamma: shape must be positive");
  if (shape < 1.0) {
    const double u = rng.uniform();
    return draw_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double draw_chi_square(double df, RngStream& rng) {
  check_df(df, "draw_chi_square");
  if (df == std::floor(df) && df <= kChiSquareSumLimit) {
    const auto k = static_cast<long>(df);
    double s = 0.0;
    for (long i = 0; i < k; ++i) {
      const double z = rng.normal();
      s += z * z;
    }
    return s;
  }
  return 2.0 * draw_gamma(0.5 * df, rng);
}

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw Error("incomplete_beta: shape parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw Error("incomplete_beta: x must lie in [0, 1]");
  return incomplete_beta_xy(x, 1.0 - x, a, b);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  check_probability(p, "normal_quantile");
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the lower or upper tail, whichever is smaller.
  for (int it = 0; it < 2; ++it) {
    const double e = x < 0.0 ? normal_cdf(x) - p : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double t_pdf(double t, double df) {
  check_df(df, "t_pdf");
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                          0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(t * t / df));
}

double t_cdf(double t, double df) {
  check_df(df, "t_cdf");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  if (t >= 0.0) return 1.0 - t_upper_tail(t, df);
  return t_upper_tail(-t, df);
}

double t_quantile(double p, double df) {
  check_probability(p, "t_quantile");
  check_df(df, "t_quantile");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -t_quantile(1.0 - p, df);

  const double alpha = 1.0 - p;  // exact for p >= 0.5
  if (df > kLargeDf) return cornish_fisher_t(normal_quantile(p), df);

  // Bracket the root of upper_tail(t) = alpha, then safeguarded Newton.
  double lo = 0.0;
  double hi = std::max(1.0, cornish_fisher_t(normal_quantile(p), std::max(df, 1.0)));
  while (t_upper_tail(hi, df) > alpha) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("t_quantile: failed to bracket root");
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const double f = t_upper_tail(t, df) - alpha;
    if (f > 0.0)
      lo = t;
    else if (f < 0.0)
      hi = t;
    else
      return t;
    const double dens = t_pdf(t, df);
    double next = dens > 0.0 ? t + f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-14 * std::max(1.0, std::abs(t)) || hi - lo <= 1e-15 * hi)
      return next;
    t = next;
  }
  return t;
}

}  // namespace mipool
