#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lncm {

/// Mean structure a*mu + b*sigma^2 of the normal-scale observations.
class ModelSpec {
 public:
  ModelSpec(double a, double b);

  /// The lognormal common-mean model: Y = ln X ~ N(mu - sigma^2/2, sigma^2).
  static ModelSpec lognormal() { return {1.0, -0.5}; }

  double a() const { return a_; }
  double b() const { return b_; }
  bool is_lognormal() const { return a_ == 1.0 && b_ == -0.5; }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  double a_;
  double b_;
};

/// Sufficient statistics of one population on the normal scale.
/// `variance` is the unbiased sample variance (divisor n - 1).
class SampleSummary {
 public:
  SampleSummary(std::size_t n, double mean, double variance);

  std::size_t n() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  /// (n - 1) s^2, the within-group sum of squares.
  double sum_of_squares() const { return static_cast<double>(n_ - 1) * variance_; }

  friend bool operator==(const SampleSummary&, const SampleSummary&) = default;

 private:
  std::size_t n_;
  double mean_;
  double variance_;
};

class Dataset {
 public:
  Dataset(std::vector<SampleSummary> groups, ModelSpec model);

  std::span<const SampleSummary> groups() const { return groups_; }
  const SampleSummary& group(std::size_t i) const { return groups_.at(i); }
  std::size_t k() const { return groups_.size(); }
  std::size_t total_n() const { return total_n_; }
  const ModelSpec& model() const { return model_; }

  /// Same groups, different mean structure.
  Dataset with_model(ModelSpec model) const { return {groups_, model}; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<SampleSummary> groups_;
  ModelSpec model_;
  std::size_t total_n_;
};

/// Known per-group variances sigma_i^2, aligned with Dataset::groups().
class KnownVarianceSpec {
 public:
  explicit KnownVarianceSpec(std::vector<double> variances);
  std::span<const double> variances() const { return variances_; }

 private:
  std::vector<double> variances_;
};

/// Per-group mean and unbiased variance, optionally of ln(value).
/// Throws InvalidInput for groups with fewer than two values, non-positive
/// values under the log transform, or zero variance.
Dataset summarize(std::span<const std::vector<double>> raw_groups, bool log_transform,
                  ModelSpec model = ModelSpec::lognormal());

SampleSummary summarize_group(std::span<const double> values, bool log_transform);

struct KnownVarianceEstimate {
  double mu_hat;
  double variance;  // Var(mu_hat) = 1 / (a^2 sum n_i / sigma_i^2)
};

/// Closed-form UMVUE (and MLE) of mu when the group variances are known.
KnownVarianceEstimate umvue_known_variance(const Dataset& ds, const KnownVarianceSpec& kv);

struct LognormalMeanEstimate {
  double umvue;
  double mle;
};

/// UMVUE and MLE of exp(mu) under the lognormal model with known variances.
LognormalMeanEstimate umvue_lognormal_mean(const Dataset& ds, const KnownVarianceSpec& kv);

}  // namespace lncm
