#include "lncm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "lncm/errors.hpp"

namespace lncm {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("normal quantile requires p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<>{}, p);
}

double chi_square_sf(double x, double df) {
  if (!(df > 0.0)) throw InvalidInput("chi-square df must be positive");
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<>{df}, x));
}

double chi_square_upper_quantile(double alpha, double df) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  if (!(df > 0.0)) throw InvalidInput("chi-square df must be positive");
  return boost::math::quantile(
      boost::math::complement(boost::math::chi_squared_distribution<>{df}, alpha));
}

double quantile_type7(std::span<double> values, double prob) {
  if (values.empty()) throw InvalidInput("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidInput("quantile probability outside [0, 1]");
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(lo);
  std::nth_element(values.begin(), nth, values.end());
  const double x_lo = *nth;
  if (frac == 0.0 || lo + 1 >= values.size()) return x_lo;
  const double x_hi = *std::min_element(nth + 1, values.end());
  return x_lo + frac * (x_hi - x_lo);
}

}  // namespace lncm
