#include "lncm/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "lncm/errors.hpp"

namespace lncm {

ModelSpec::ModelSpec(double a, double b) : a_(a), b_(b) {
  if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidInput("model constant a must be finite and non-zero");
  }
}

SampleSummary::SampleSummary(std::size_t n, double mean, double variance)
    : n_(n), mean_(mean), variance_(variance) {
  if (n < 2) {
    throw InvalidInput("each group needs at least two observations");
  }
  if (!std::isfinite(mean)) {
    throw InvalidInput("group mean is not finite");
  }
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw InvalidInput("group variance must be positive and finite");
  }
}

Dataset::Dataset(std::vector<SampleSummary> groups, ModelSpec model)
    : groups_(std::move(groups)), model_(model), total_n_(0) {
  if (groups_.empty()) {
    throw InvalidInput("dataset needs at least one group");
  }
  for (const auto& g : groups_) total_n_ += g.n();
}

KnownVarianceSpec::KnownVarianceSpec(std::vector<double> variances)
    : variances_(std::move(variances)) {
  for (double v : variances_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidInput("known variances must be positive and finite");
    }
  }
}

SampleSummary summarize_group(std::span<const double> values, bool log_transform) {
  if (values.size() < 2) {
    throw InvalidInput("each group needs at least two observations");
  }
  std::vector<double> y(values.begin(), values.end());
  if (log_transform) {
    for (double& v : y) {
      if (!(v > 0.0)) {
        throw InvalidInput("log transform requires strictly positive values, got " +
                           std::to_string(v));
      }
      v = std::log(v);
    }
  }
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double variance = ss / (n - 1.0);
  if (!(variance > 0.0)) {
    throw InvalidInput("group has zero sample variance (all values equal)");
  }
  return {y.size(), mean, variance};
}

Dataset summarize(std::span<const std::vector<double>> raw_groups, bool log_transform,
                  ModelSpec model) {
  std::vector<SampleSummary> groups;
  groups.reserve(raw_groups.size());
  for (const auto& g : raw_groups) groups.push_back(summarize_group(g, log_transform));
  return {std::move(groups), model};
}

KnownVarianceEstimate umvue_known_variance(const Dataset& ds, const KnownVarianceSpec& kv) {
  const auto sigma2 = kv.variances();
  if (sigma2.size() != ds.k()) {
    throw InvalidInput("known variances: expected " + std::to_string(ds.k()) + " entries, got " +
                       std::to_string(sigma2.size()));
  }
  const double a = ds.model().a();
  const double b = ds.model().b();
  double weighted_sum = 0.0;
  double precision = 0.0;
  for (std::size_t i = 0; i < ds.k(); ++i) {
    const auto& g = ds.group(i);
    const double w = static_cast<double>(g.n()) / sigma2[i];
    weighted_sum += w * g.mean();
    precision += w;
  }
  const double n = static_cast<double>(ds.total_n());
  return {(weighted_sum - n * b) / (a * precision), 1.0 / (a * a * precision)};
}

LognormalMeanEstimate umvue_lognormal_mean(const Dataset& ds, const KnownVarianceSpec& kv) {
  if (!ds.model().is_lognormal()) {
    throw InvalidInput("lognormal-mean estimators require the model a = 1, b = -1/2");
  }
  const auto est = umvue_known_variance(ds, kv);
  // est.variance = 1 / sum(n_i / sigma_i^2), so 1 / sum(2 n_i / sigma_i^2) = variance / 2.
  return {std::exp(est.mu_hat - 0.5 * est.variance), std::exp(est.mu_hat)};
}

}  // namespace lncm
