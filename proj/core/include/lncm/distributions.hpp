#pragma once

#include <span>

namespace lncm {

double normal_cdf(double x);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// Upper-tail probability P(X > x) for X ~ chi-square(df).
double chi_square_sf(double x, double df);
/// Upper quantile: the x with P(X > x) = alpha.
double chi_square_upper_quantile(double alpha, double df);

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). Reorders `values`; requires a non-empty span.
double quantile_type7(std::span<double> values, double prob);

}  // namespace lncm
