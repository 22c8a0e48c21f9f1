#pragma once

#include "mipool/rng.hpp"

namespace mipool {

// One chi-square variate. Integer df are realized as a sum of df squared
// normals; fractional df use 2 * Gamma(df/2).
double draw_chi_square(double df, RngStream& rng);

// Gamma(shape, 1) by Marsaglia-Tsang, with the U^(1/shape) boost for shape < 1.
double draw_gamma(double shape, RngStream& rng);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double x, double a, double b);

double normal_cdf(double z);
double normal_quantile(double p);

double t_pdf(double t, double df);
double t_cdf(double t, double df);
// Inverse CDF of Student's t; df may be fractional. For df above 1e7 a
// Cornish-Fisher expansion around the normal quantile is used.
double t_quantile(double p, double df);

}  // namespace mipool
