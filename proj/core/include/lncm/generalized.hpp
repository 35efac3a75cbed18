#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lncm/model.hpp"
#include "lncm/random.hpp"

namespace lncm {

enum class Alternative { Greater, Less, TwoSided };

enum class GeneralizedMethod {
  WeightedCombination,  // weighted average of per-group pivots
  UmvueBased,           // pivot built on the known-variance UMVUE
};

/// Which chi-square variables enter the weights of the weighted-combination pivot.
enum class WeightSource {
  Independent,  // fresh V_i, independent of the U_i inside each group pivot
  Shared,       // reuse U_i
};

struct MCConfig {
  std::size_t reps = 100'000;
  std::uint64_t seed = 1;
  GeneralizedMethod method = GeneralizedMethod::WeightedCombination;
  WeightSource weights = WeightSource::Independent;
  unsigned workers = 0;  // 0 = hardware concurrency; never changes results

  static constexpr std::size_t kMinReps = 1000;
};

struct TestSpec {
  double mu0 = 0.0;  // log-scale null value; ln(phi0) for the lognormal model
  Alternative alternative = Alternative::TwoSided;
};

struct TestOutcome {
  std::string method;
  double p_value = 1.0;
  double mc_std_error = 0.0;
  std::size_t reps_used = 0;
  double statistic = 0.0;  // Wald z or LR statistic for the classical tests
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double x) const { return lower <= x && x <= upper; }
  double width() const { return upper - lower; }
};

/// A two-sided interval for mu (log scale) and/or for phi = exp(mu).
/// Generalized and Gupta-Li intervals are built on the log scale and
/// exponentiated; Ahmed and Baklizi-Ebrahem intervals are built for phi.
struct IntervalOutcome {
  std::string method;
  double level = 0.95;
  std::optional<Interval> log_scale;
  std::optional<Interval> phi_scale;
  std::optional<double> phi_estimate;  // point estimate of phi, when the method has one
  bool ok = true;
  std::string note;

  /// Whether the interval for phi covers `phi`. False for failed intervals.
  bool covers_phi(double phi) const;
};

struct WeightedGroupDraw {
  double z;  // N(0, 1)
  double u;  // chi-square(n_i - 1) inside the group pivot
  double v;  // chi-square(n_i - 1) inside the weight
};

/// One draw of the weighted-combination pivot sum_i W_i T_i*.
double pivot_draw_weighted(const Dataset& ds, std::span<const WeightedGroupDraw> draws);

/// The normalized weights W_i for given chi-square draws v_i.
std::vector<double> weighted_pivot_weights(const Dataset& ds, std::span<const double> v);

/// One draw of the UMVUE-based pivot from per-group chi-squares u_i and one N(0, 1) z.
double pivot_draw_umvue(const Dataset& ds, std::span<const double> u, double z);

/// Draws cfg.reps pivots; draw j consumes only RandomStream{cfg.seed, j}.
std::vector<double> draw_pivots(const Dataset& ds, const MCConfig& cfg);

/// Tail-count p-value from precomputed pivot draws.
TestOutcome p_value_from_draws(std::span<const double> draws, const TestSpec& spec);

/// Percentile interval (type-7 quantiles) from precomputed pivot draws.
/// The phi-scale pair is filled in for the lognormal model only.
IntervalOutcome interval_from_draws(std::span<const double> draws, double level,
                                    const ModelSpec& model);

/// Monte Carlo generalized p-value. Throws InvalidInput if cfg.reps < 1000.
TestOutcome gp_value(const Dataset& ds, const TestSpec& spec, const MCConfig& cfg);

/// Generalized p-value of the UMVUE-based pivot with the normal draw integrated
/// out analytically; only the chi-squares are simulated.
TestOutcome gp_value_rao_blackwell(const Dataset& ds, const TestSpec& spec, const MCConfig& cfg);

/// Generalized confidence interval. Throws InvalidInput when reps * alpha / 2 < 10.
IntervalOutcome gci(const Dataset& ds, double level, const MCConfig& cfg);

struct GeneralizedAnalysis {
  TestOutcome test;
  IntervalOutcome interval;
};

/// Test and interval from one shared set of pivot draws.
GeneralizedAnalysis generalized_analysis(const Dataset& ds, const TestSpec& spec, double level,
                                         const MCConfig& cfg);

std::string method_name(GeneralizedMethod method);
std::string alternative_name(Alternative alt);

}  // namespace lncm
