#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lncm/generalized.hpp"
#include "lncm/model.hpp"

namespace lncm {

/// Per-group plug-in quantities shared by the Ahmed and Baklizi-Ebrahem methods.
/// sigma2_hat uses the divisor n_i (the normal-scale MLE).
struct AhmedComponents {
  std::vector<double> mu_hat;
  std::vector<double> sigma2_hat;
  std::vector<double> theta_hat;  // exp(mu_hat + sigma2_hat / 2)
  std::vector<double> v_hat;      // sigma2_hat (1 + sigma2_hat / 2) exp(2 mu_hat + sigma2_hat)
  double pooled = 0.0;            // precision-weighted mean of theta_hat, weights n_i / v_hat
  double std_error = 0.0;         // (sum n_i / v_hat)^(-1/2)
};

AhmedComponents ahmed_components(const Dataset& ds);

/// Wald interval pooled-theta +- z_{alpha/2} SE on the phi scale.
IntervalOutcome ahmed_ci(const Dataset& ds, double level);

/// Wald test of phi = phi0 from the same asymptotic normal approximation.
TestOutcome ahmed_test(const Dataset& ds, double phi0, Alternative alt = Alternative::TwoSided);

/// Roots of sum n_i (theta_hat_i - theta)^2 / v_hat_i = chi2_{upper alpha, k}.
/// A negative discriminant yields ok == false and no bounds.
IntervalOutcome baklizi_ci(const Dataset& ds, double level);

struct MleOptions {
  double rel_loglik_tol = 1e-12;
  double param_tol = 1e-10;
  std::size_t max_iterations = 500;
  double sigma2_floor = 1e-12;
  double gradient_tol = 1e-6;
};

struct MleResult {
  double mu_hat = 0.0;
  std::vector<double> sigma2_hats;
  double log_likelihood = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
};

/// Joint log-likelihood of (mu, sigma_1^2..sigma_k^2) under the lognormal
/// common-mean model, from the normal-scale summaries.
double log_likelihood(const Dataset& ds, double mu, std::span<const double> sigma2);

/// Gradient of log_likelihood: entry 0 is d/dmu, entry i+1 is d/dsigma_i^2.
std::vector<double> log_likelihood_gradient(const Dataset& ds, double mu,
                                            std::span<const double> sigma2);

/// Per-group maximizer of the log-likelihood over sigma_i^2 at fixed mu.
std::vector<double> sigma2_given_mu(const Dataset& ds, double mu, double floor = 1e-12);

/// mu maximizing the log-likelihood at fixed variances (known-variance UMVUE).
double mu_given_sigma2(const Dataset& ds, std::span<const double> sigma2);

/// Unconstrained MLE by profile iteration. Non-convergence is reported through
/// MleResult::converged together with the best iterate.
MleResult gupta_li_mle(const Dataset& ds, const MleOptions& opts = {});

/// Asymptotic variance of the two-group MLE of mu.
double gupta_li_variance(std::size_t n1, std::size_t n2, double sigma2_1, double sigma2_2);

/// exp(mu_hat +- z_{alpha/2} SD(mu_hat)). Two groups only.
IntervalOutcome gupta_li_ci(const Dataset& ds, double level, const MleOptions& opts = {});

/// Wald z test of mu = ln(phi0) on the log scale. Two groups only.
TestOutcome gupta_li_test(const Dataset& ds, double phi0, Alternative alt = Alternative::TwoSided,
                          const MleOptions& opts = {});

struct LikelihoodRatio {
  double statistic = 0.0;  // Lambda >= 0
  double p_value = 1.0;    // P(chi2_1 > Lambda)
  MleResult unconstrained;
  std::vector<double> constrained_sigma2;
  double constrained_log_likelihood = 0.0;
};

LikelihoodRatio likelihood_ratio(const Dataset& ds, double phi0, const MleOptions& opts = {});

/// Two-sided likelihood-ratio test of phi = phi0. Throws ConvergenceError
/// when the unconstrained fit does not converge.
TestOutcome lr_test(const Dataset& ds, double phi0, const MleOptions& opts = {});

}  // namespace lncm
