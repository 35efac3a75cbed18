#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerical routines.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace lncm::oracle {

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 64) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Chi-square(1) density after the substitution x = u^2, which removes the
/// x^(-1/2) singularity: F(x) = integral_0^sqrt(x) of this integrand du.
inline double chi2_1_integrand(double u) {
  return 2.0 * std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

/// Golden-section maximization of a unimodal f on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-11) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - r * (hi - lo);
  double d = lo + r * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol * (1.0 + std::abs(lo) + std::abs(hi))) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - r * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + r * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

struct GroupStats {
  double n;
  double mean;
  double ss;  // sum of squared deviations about the mean
};

/// Log-likelihood of the lognormal common-mean model written from the raw
/// sufficient statistics t1 = sum y, t3 = sum y^2 of each group.
inline double loglik_raw(const std::vector<GroupStats>& groups, double mu,
                         const std::vector<double>& sigma2) {
  double ll = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double t1 = g.n * g.mean;
    const double t3 = g.ss + g.n * g.mean * g.mean;
    const double v = sigma2[i];
    const double m = mu - 0.5 * v;
    ll += -0.5 * g.n * std::log(2.0 * std::numbers::pi) - 0.5 * g.n * std::log(v) -
          (t3 - 2.0 * m * t1 + g.n * m * m) / (2.0 * v);
  }
  return ll;
}

/// Profile log-likelihood at mu with every sigma_i^2 found by golden section
/// over log(sigma^2).
inline double profile_loglik_numeric(const std::vector<GroupStats>& groups, double mu,
                                     std::vector<double>* sigma2_out = nullptr) {
  std::vector<double> sigma2(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::vector<GroupStats> one{groups[i]};
    const double log_v = golden_max(
        [&](double lv) { return loglik_raw(one, mu, {std::exp(lv)}); }, -20.0, 10.0, 1e-13);
    sigma2[i] = std::exp(log_v);
  }
  if (sigma2_out) *sigma2_out = sigma2;
  return loglik_raw(groups, mu, sigma2);
}

/// Two-sided one-sample t-test p-value for H0: mean = mu0.
inline double t_test_two_sided(double n, double mean, double var, double mu0) {
  boost::math::students_t t(n - 1.0);
  const double stat = (mean - mu0) / std::sqrt(var / n);
  return 2.0 * boost::math::cdf(boost::math::complement(t, std::abs(stat)));
}

inline double t_quantile(double df, double p) {
  return boost::math::quantile(boost::math::students_t(df), p);
}

inline double t_density(double df, double x) {
  return boost::math::pdf(boost::math::students_t(df), x);
}

}  // namespace lncm::oracle
