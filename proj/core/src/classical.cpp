#include "lncm/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lncm/distributions.hpp"
#include "lncm/errors.hpp"

namespace lncm {

namespace {

void require_lognormal(const Dataset& ds, const char* method) {
  if (!ds.model().is_lognormal()) {
    throw UnsupportedMethod(std::string(method) + " requires the lognormal model (a = 1, b = -1/2)");
  }
}

void require_two_groups(const Dataset& ds) {
  if (ds.k() != 2) {
    throw UnsupportedMethod("Gupta-Li variance is defined for exactly two groups, got " +
                            std::to_string(ds.k()));
  }
}

double z_two_sided(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("confidence level must lie in (0, 1)");
  return normal_quantile(1.0 - (1.0 - level) / 2.0);
}

double wald_p_value(double z, Alternative alt) {
  switch (alt) {
    case Alternative::Greater: return 1.0 - normal_cdf(z);
    case Alternative::Less: return normal_cdf(z);
    case Alternative::TwoSided: return std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
  }
  return 1.0;
}

void require_phi0(double phi0) {
  if (!(phi0 > 0.0) || !std::isfinite(phi0)) throw InvalidInput("phi0 must be positive and finite");
}

// sigma^2 maximizing -n/2 ln v - q/(2v) - n v/8, q = SS + n d^2: the positive
// root of n v^2 + 4 n v - 4 q = 0, written to avoid cancellation for small q/n.
double sigma2_root(double n, double q) {
  const double r = q / n;
  return 2.0 * r / (std::sqrt(1.0 + r) + 1.0);
}

// Adds the log-scale pair to a phi-scale interval; phi endpoints are
// re-derived from it so that phi = exp(log) holds exactly.
void add_log_scale(IntervalOutcome& out) {
  if (!(out.phi_scale && out.phi_scale->lower > 0.0)) return;
  out.log_scale = Interval{std::log(out.phi_scale->lower), std::log(out.phi_scale->upper)};
  out.phi_scale = Interval{std::exp(out.log_scale->lower), std::exp(out.log_scale->upper)};
}

}  // namespace

AhmedComponents ahmed_components(const Dataset& ds) {
  require_lognormal(ds, "Ahmed's estimator");
  AhmedComponents c;
  double precision = 0.0;
  double weighted = 0.0;
  for (const auto& g : ds.groups()) {
    const double n = static_cast<double>(g.n());
    const double s2 = (n - 1.0) / n * g.variance();
    const double theta = std::exp(g.mean() + 0.5 * s2);
    const double v = s2 * (1.0 + 0.5 * s2) * std::exp(2.0 * g.mean() + s2);
    c.mu_hat.push_back(g.mean());
    c.sigma2_hat.push_back(s2);
    c.theta_hat.push_back(theta);
    c.v_hat.push_back(v);
    precision += n / v;
    weighted += n / v * theta;
  }
  c.pooled = weighted / precision;
  c.std_error = 1.0 / std::sqrt(precision);
  return c;
}

IntervalOutcome ahmed_ci(const Dataset& ds, double level) {
  const double z = z_two_sided(level);
  const auto c = ahmed_components(ds);
  IntervalOutcome out;
  out.method = "ahmed";
  out.level = level;
  out.phi_estimate = c.pooled;
  out.phi_scale = Interval{c.pooled - z * c.std_error, c.pooled + z * c.std_error};
  add_log_scale(out);
  return out;
}

TestOutcome ahmed_test(const Dataset& ds, double phi0, Alternative alt) {
  require_phi0(phi0);
  const auto c = ahmed_components(ds);
  TestOutcome out;
  out.method = "ahmed";
  out.statistic = (c.pooled - phi0) / c.std_error;
  out.p_value = wald_p_value(out.statistic, alt);
  return out;
}

IntervalOutcome baklizi_ci(const Dataset& ds, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("confidence level must lie in (0, 1)");
  const auto c = ahmed_components(ds);
  const double crit = chi_square_upper_quantile(1.0 - level, static_cast<double>(ds.k()));
  double qa = 0.0;
  double qb = 0.0;
  double qc = -crit;
  for (std::size_t i = 0; i < ds.k(); ++i) {
    const double w = static_cast<double>(ds.group(i).n()) / c.v_hat[i];
    qa += w;
    qb -= 2.0 * w * c.theta_hat[i];
    qc += w * c.theta_hat[i] * c.theta_hat[i];
  }
  IntervalOutcome out;
  out.method = "baklizi-ebrahem";
  out.level = level;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) {
    out.ok = false;
    out.note = "acceptance set is empty (negative discriminant)";
    return out;
  }
  const double mid = -qb / (2.0 * qa);
  const double half = std::sqrt(disc) / (2.0 * qa);
  out.phi_estimate = mid;
  out.phi_scale = Interval{mid - half, mid + half};
  add_log_scale(out);
  return out;
}

double log_likelihood(const Dataset& ds, double mu, std::span<const double> sigma2) {
  if (sigma2.size() != ds.k()) throw InvalidInput("log-likelihood: one variance per group required");
  double ll = 0.0;
  for (std::size_t i = 0; i < ds.k(); ++i) {
    const auto& g = ds.group(i);
    const double n = static_cast<double>(g.n());
    const double v = sigma2[i];
    const double d = g.mean() - mu + 0.5 * v;
    ll += -0.5 * n * std::log(2.0 * std::numbers::pi * v) - (g.sum_of_squares() + n * d * d) / (2.0 * v);
  }
  return ll;
}

std::vector<double> log_likelihood_gradient(const Dataset& ds, double mu,
                                            std::span<const double> sigma2) {
  std::vector<double> grad(ds.k() + 1, 0.0);
  for (std::size_t i = 0; i < ds.k(); ++i) {
    const auto& g = ds.group(i);
    const double n = static_cast<double>(g.n());
    const double v = sigma2[i];
    const double d = g.mean() - mu;
    const double q = g.sum_of_squares() + n * d * d;
    grad[0] += n * (d + 0.5 * v) / v;
    grad[i + 1] = -0.5 * n / v + 0.5 * q / (v * v) - n / 8.0;
  }
  return grad;
}

std::vector<double> sigma2_given_mu(const Dataset& ds, double mu, double floor) {
  std::vector<double> out(ds.k());
  for (std::size_t i = 0; i < ds.k(); ++i) {
    const auto& g = ds.group(i);
    const double n = static_cast<double>(g.n());
    const double d = g.mean() - mu;
    out[i] = std::max(floor, sigma2_root(n, g.sum_of_squares() + n * d * d));
  }
  return out;
}

double mu_given_sigma2(const Dataset& ds, std::span<const double> sigma2) {
  double weighted = 0.0;
  double precision = 0.0;
  for (std::size_t i = 0; i < ds.k(); ++i) {
    const double w = static_cast<double>(ds.group(i).n()) / sigma2[i];
    weighted += w * ds.group(i).mean();
    precision += w;
  }
  return (weighted + 0.5 * static_cast<double>(ds.total_n())) / precision;
}

MleResult gupta_li_mle(const Dataset& ds, const MleOptions& opts) {
  require_lognormal(ds, "Gupta-Li likelihood");
  std::vector<double> start(ds.k());
  for (std::size_t i = 0; i < ds.k(); ++i) {
    const auto& g = ds.group(i);
    const double n = static_cast<double>(g.n());
    start[i] = std::max(opts.sigma2_floor, g.variance() * (n - 1.0) / n);
  }

  // One profile step: best variances for mu, then best mu for those variances.
  const auto step = [&](double mu) { return mu_given_sigma2(ds, sigma2_given_mu(ds, mu, opts.sigma2_floor)); };

  MleResult initial;
  initial.mu_hat = mu_given_sigma2(ds, start);
  initial.sigma2_hats = start;
  initial.log_likelihood = log_likelihood(ds, initial.mu_hat, start);

  MleResult cur = initial;
  bool steps_small = false;
  // step(mu) - mu has the sign of the profile score, so evaluated points
  // bracket the maximizer: residual > 0 below it, < 0 above it.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  const auto note = [&](double x, double residual) {
    if (residual > 0.0) lo = std::max(lo, x);
    if (residual < 0.0) hi = std::min(hi, x);
  };
  const auto inside = [&](double x) { return lo < x && x < hi; };
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    // The plain alternation converges linearly, often with a rate close to 1,
    // so an Aitken (Steffensen) extrapolation of the mu map is tried. It is kept
    // only if it stays inside the bracket and halves the fixed-point residual,
    // which stays accurate where likelihood differences drown in rounding.
    const double mu = cur.mu_hat;
    const double mu1 = step(mu);
    note(mu, mu1 - mu);
    const double mu2 = step(mu1);
    note(mu1, mu2 - mu1);
    double next = mu2;
    bool accepted = false;
    const double denom = mu2 - 2.0 * mu1 + mu;
    if (denom != 0.0) {
      const double extrapolated = mu - (mu1 - mu) * (mu1 - mu) / denom;
      if (std::isfinite(extrapolated) && inside(extrapolated)) {
        const double residual = step(extrapolated) - extrapolated;
        note(extrapolated, residual);
        if (std::abs(residual) <= 0.5 * std::abs(mu2 - mu1)) {
          next = extrapolated;
          accepted = true;
        }
      }
    }
    if (!accepted && !inside(mu2) && std::isfinite(lo) && std::isfinite(hi)) {
      next = 0.5 * (lo + hi);
    }
    const auto sigma2 = sigma2_given_mu(ds, next, opts.sigma2_floor);
    const double ll = log_likelihood(ds, next, sigma2);

    double change = std::abs(next - cur.mu_hat);
    for (std::size_t i = 0; i < ds.k(); ++i) {
      change = std::max(change, std::abs(sigma2[i] - cur.sigma2_hats[i]));
    }
    const double rel_change = std::abs(ll - cur.log_likelihood) / std::max(1.0, std::abs(ll));
    cur.mu_hat = next;
    cur.sigma2_hats = sigma2;
    cur.log_likelihood = ll;
    cur.iterations = it;
    if (rel_change < opts.rel_loglik_tol && change < opts.param_tol) {
      steps_small = true;
      break;
    }
  }
  // Never report a point worse than the initializer.
  MleResult best = cur;
  if (cur.log_likelihood < initial.log_likelihood) {
    best = initial;
    best.iterations = cur.iterations;
  }
  const auto grad = log_likelihood_gradient(ds, best.mu_hat, best.sigma2_hats);
  double norm2 = 0.0;
  for (double g : grad) norm2 += g * g;
  best.gradient_norm = std::sqrt(norm2);
  best.converged = steps_small && best.gradient_norm < opts.gradient_tol;
  return best;
}

double gupta_li_variance(std::size_t n1, std::size_t n2, double sigma2_1, double sigma2_2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  const double f1 = 2.0 * a / sigma2_1 + a;
  const double f2 = 2.0 * b / sigma2_2 + b;
  const double g1 = 2.0 * a * a / (sigma2_1 * sigma2_1);
  const double g2 = 2.0 * b * b / (sigma2_2 * sigma2_2);
  return f1 * f2 / (g1 * f2 + g2 * f1);
}

namespace {

struct GuptaLiFit {
  double mu_hat;
  double sd;
};

GuptaLiFit gupta_li_fit(const Dataset& ds, const MleOptions& opts) {
  require_lognormal(ds, "Gupta-Li method");
  require_two_groups(ds);
  const auto mle = gupta_li_mle(ds, opts);
  if (!mle.converged) {
    throw ConvergenceError("Gupta-Li MLE did not converge after " + std::to_string(mle.iterations) +
                           " iterations");
  }
  const double var = gupta_li_variance(ds.group(0).n(), ds.group(1).n(), mle.sigma2_hats[0],
                                       mle.sigma2_hats[1]);
  return {mle.mu_hat, std::sqrt(var)};
}

}  // namespace

IntervalOutcome gupta_li_ci(const Dataset& ds, double level, const MleOptions& opts) {
  const double z = z_two_sided(level);
  const auto fit = gupta_li_fit(ds, opts);
  IntervalOutcome out;
  out.method = "gupta-li";
  out.level = level;
  out.log_scale = Interval{fit.mu_hat - z * fit.sd, fit.mu_hat + z * fit.sd};
  out.phi_scale = Interval{std::exp(out.log_scale->lower), std::exp(out.log_scale->upper)};
  out.phi_estimate = std::exp(fit.mu_hat);
  return out;
}

TestOutcome gupta_li_test(const Dataset& ds, double phi0, Alternative alt, const MleOptions& opts) {
  require_phi0(phi0);
  const auto fit = gupta_li_fit(ds, opts);
  TestOutcome out;
  out.method = "gupta-li";
  out.statistic = (fit.mu_hat - std::log(phi0)) / fit.sd;
  out.p_value = wald_p_value(out.statistic, alt);
  return out;
}

LikelihoodRatio likelihood_ratio(const Dataset& ds, double phi0, const MleOptions& opts) {
  require_lognormal(ds, "Likelihood-ratio test");
  require_phi0(phi0);
  LikelihoodRatio lr;
  lr.unconstrained = gupta_li_mle(ds, opts);
  const double mu0 = std::log(phi0);
  lr.constrained_sigma2 = sigma2_given_mu(ds, mu0, opts.sigma2_floor);
  lr.constrained_log_likelihood = log_likelihood(ds, mu0, lr.constrained_sigma2);
  lr.statistic =
      std::max(0.0, 2.0 * (lr.unconstrained.log_likelihood - lr.constrained_log_likelihood));
  lr.p_value = chi_square_sf(lr.statistic, 1.0);
  return lr;
}

TestOutcome lr_test(const Dataset& ds, double phi0, const MleOptions& opts) {
  const auto lr = likelihood_ratio(ds, phi0, opts);
  if (!lr.unconstrained.converged) {
    throw ConvergenceError("likelihood-ratio test: MLE did not converge after " +
                           std::to_string(lr.unconstrained.iterations) + " iterations");
  }
  TestOutcome out;
  out.method = "likelihood-ratio";
  out.statistic = lr.statistic;
  out.p_value = lr.p_value;
  return out;
}

}  // namespace lncm
