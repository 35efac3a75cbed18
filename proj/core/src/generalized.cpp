#include "lncm/generalized.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lncm/distributions.hpp"
#include "lncm/errors.hpp"
#include "lncm/parallel.hpp"

namespace lncm {

namespace {

void require_reps(const MCConfig& cfg) {
  if (cfg.reps < MCConfig::kMinReps) {
    throw InvalidInput("Monte Carlo reps must be at least " + std::to_string(MCConfig::kMinReps) +
                       ", got " + std::to_string(cfg.reps));
  }
}

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidInput("confidence level must lie in (0, 1)");
  }
}

double weight_factor(const SampleSummary& g, double chi2) {
  return static_cast<double>(g.n()) * chi2 / g.sum_of_squares();
}

double group_pivot(const SampleSummary& g, const ModelSpec& m, double z, double u) {
  const double ss = g.sum_of_squares();
  const double sigma2 = ss / u;
  return (g.mean() - m.b() * sigma2 - z * std::sqrt(sigma2 / static_cast<double>(g.n()))) / m.a();
}

// Sums A = sum n_i ybar_i U_i / SS_i - n b and B = sum n_i U_i / SS_i.
struct UmvueSums {
  double numerator = 0.0;
  double precision = 0.0;
};

double umvue_pivot_from_sums(const ModelSpec& m, const UmvueSums& s, double z) {
  return s.numerator / (m.a() * s.precision) - z / (std::abs(m.a()) * std::sqrt(s.precision));
}

double draw_one(const Dataset& ds, const MCConfig& cfg, RandomStream& rng) {
  const ModelSpec& m = ds.model();
  if (cfg.method == GeneralizedMethod::WeightedCombination) {
    double weighted = 0.0;
    double total = 0.0;
    for (const auto& g : ds.groups()) {
      const auto df = static_cast<std::uint64_t>(g.n() - 1);
      const double u = rng.chi_square(df);
      const double v = cfg.weights == WeightSource::Shared ? u : rng.chi_square(df);
      const double z = rng.std_normal();
      const double r = weight_factor(g, v);
      weighted += r * group_pivot(g, m, z, u);
      total += r;
    }
    return weighted / total;
  }
  UmvueSums sums;
  for (const auto& g : ds.groups()) {
    const double u = rng.chi_square(static_cast<std::uint64_t>(g.n() - 1));
    const double r = weight_factor(g, u);
    sums.numerator += r * g.mean();
    sums.precision += r;
  }
  sums.numerator -= static_cast<double>(ds.total_n()) * m.b();
  return umvue_pivot_from_sums(m, sums, rng.std_normal());
}

}  // namespace

bool IntervalOutcome::covers_phi(double phi) const {
  if (!ok) return false;
  if (phi_scale) return phi_scale->contains(phi);
  if (log_scale && phi > 0.0) return log_scale->contains(std::log(phi));
  return false;
}

double pivot_draw_weighted(const Dataset& ds, std::span<const WeightedGroupDraw> draws) {
  if (draws.size() != ds.k()) {
    throw InvalidInput("weighted pivot: one (z, u, v) triple per group required");
  }
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < ds.k(); ++i) {
    const auto& g = ds.group(i);
    const auto& d = draws[i];
    if (!(d.u > 0.0) || !(d.v > 0.0)) {
      throw InvalidInput("weighted pivot: chi-square draws must be positive");
    }
    const double r = weight_factor(g, d.v);
    weighted += r * group_pivot(g, ds.model(), d.z, d.u);
    total += r;
  }
  return weighted / total;
}

std::vector<double> weighted_pivot_weights(const Dataset& ds, std::span<const double> v) {
  if (v.size() != ds.k()) throw InvalidInput("weights: one chi-square draw per group required");
  std::vector<double> w(ds.k());
  double total = 0.0;
  for (std::size_t i = 0; i < ds.k(); ++i) {
    if (!(v[i] > 0.0)) throw InvalidInput("weights: chi-square draws must be positive");
    w[i] = weight_factor(ds.group(i), v[i]);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

double pivot_draw_umvue(const Dataset& ds, std::span<const double> u, double z) {
  if (u.size() != ds.k()) throw InvalidInput("UMVUE pivot: one chi-square draw per group required");
  UmvueSums sums;
  for (std::size_t i = 0; i < ds.k(); ++i) {
    if (!(u[i] > 0.0)) throw InvalidInput("UMVUE pivot: chi-square draws must be positive");
    const auto& g = ds.group(i);
    const double r = weight_factor(g, u[i]);
    sums.numerator += r * g.mean();
    sums.precision += r;
  }
  sums.numerator -= static_cast<double>(ds.total_n()) * ds.model().b();
  return umvue_pivot_from_sums(ds.model(), sums, z);
}

std::vector<double> draw_pivots(const Dataset& ds, const MCConfig& cfg) {
  std::vector<double> out(cfg.reps);
  parallel_for(cfg.reps, cfg.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      RandomStream rng({cfg.seed, j});
      out[j] = draw_one(ds, cfg, rng);
    }
  });
  return out;
}

TestOutcome p_value_from_draws(std::span<const double> draws, const TestSpec& spec) {
  if (draws.empty()) throw InvalidInput("no pivot draws");
  std::size_t at_or_below = 0;
  std::size_t at_or_above = 0;
  for (double t : draws) {
    at_or_below += t <= spec.mu0;
    at_or_above += t >= spec.mu0;
  }
  const double m = static_cast<double>(draws.size());
  const double below = static_cast<double>(at_or_below) / m;
  const double above = static_cast<double>(at_or_above) / m;
  double p = 0.0;
  switch (spec.alternative) {
    case Alternative::Greater: p = below; break;
    case Alternative::Less: p = above; break;
    case Alternative::TwoSided: p = std::min(1.0, 2.0 * std::min(below, above)); break;
  }
  TestOutcome out;
  out.p_value = p;
  out.mc_std_error = std::sqrt(p * (1.0 - p) / m);
  out.reps_used = draws.size();
  return out;
}

IntervalOutcome interval_from_draws(std::span<const double> draws, double level,
                                    const ModelSpec& model) {
  require_level(level);
  const double alpha = 1.0 - level;
  if (static_cast<double>(draws.size()) * alpha / 2.0 < 10.0) {
    throw InvalidInput("too few Monte Carlo reps for a " + std::to_string(level) +
                       " interval: need reps * alpha / 2 >= 10");
  }
  std::vector<double> scratch(draws.begin(), draws.end());
  IntervalOutcome out;
  out.level = level;
  out.log_scale = Interval{quantile_type7(scratch, alpha / 2.0),
                           quantile_type7(scratch, 1.0 - alpha / 2.0)};
  if (model.is_lognormal()) {
    out.phi_scale = Interval{std::exp(out.log_scale->lower), std::exp(out.log_scale->upper)};
  }
  return out;
}

TestOutcome gp_value(const Dataset& ds, const TestSpec& spec, const MCConfig& cfg) {
  require_reps(cfg);
  const auto draws = draw_pivots(ds, cfg);
  auto out = p_value_from_draws(draws, spec);
  out.method = method_name(cfg.method);
  return out;
}

TestOutcome gp_value_rao_blackwell(const Dataset& ds, const TestSpec& spec, const MCConfig& cfg) {
  require_reps(cfg);
  if (cfg.method != GeneralizedMethod::UmvueBased) {
    throw UnsupportedMethod("Rao-Blackwellized p-value is defined for the UMVUE-based pivot only");
  }
  const ModelSpec& m = ds.model();
  const double abs_a = std::abs(m.a());
  const double sign_a = m.a() > 0.0 ? 1.0 : -1.0;
  // terms[j] = P(T* <= mu0 | chi-squares of replication j).
  std::vector<double> terms(cfg.reps);
  parallel_for(cfg.reps, cfg.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      RandomStream rng({cfg.seed, j});
      UmvueSums s;
      for (const auto& g : ds.groups()) {
        const double r = weight_factor(g, rng.chi_square(static_cast<std::uint64_t>(g.n() - 1)));
        s.numerator += r * g.mean();
        s.precision += r;
      }
      s.numerator -= static_cast<double>(ds.total_n()) * m.b();
      const double root = std::sqrt(s.precision);
      terms[j] = 1.0 - normal_cdf(sign_a * s.numerator / root - abs_a * root * spec.mu0);
    }
  });

  const double n = static_cast<double>(cfg.reps);
  double mean = 0.0;
  for (double t : terms) mean += t;
  mean /= n;
  double var = 0.0;
  for (double t : terms) var += (t - mean) * (t - mean);
  var /= (n - 1.0);
  const double se_one_sided = std::sqrt(var / n);

  TestOutcome out;
  out.method = method_name(cfg.method) + "-rao-blackwell";
  out.reps_used = cfg.reps;
  switch (spec.alternative) {
    case Alternative::Greater:
      out.p_value = mean;
      out.mc_std_error = se_one_sided;
      break;
    case Alternative::Less:
      out.p_value = 1.0 - mean;
      out.mc_std_error = se_one_sided;
      break;
    case Alternative::TwoSided:
      out.p_value = std::min(1.0, 2.0 * std::min(mean, 1.0 - mean));
      out.mc_std_error = 2.0 * se_one_sided;
      break;
  }
  return out;
}

IntervalOutcome gci(const Dataset& ds, double level, const MCConfig& cfg) {
  require_level(level);
  if (static_cast<double>(cfg.reps) * (1.0 - level) / 2.0 < 10.0) {
    throw InvalidInput("too few Monte Carlo reps for a " + std::to_string(level) +
                       " interval: need reps * alpha / 2 >= 10");
  }
  const auto draws = draw_pivots(ds, cfg);
  auto out = interval_from_draws(draws, level, ds.model());
  out.method = method_name(cfg.method);
  return out;
}

GeneralizedAnalysis generalized_analysis(const Dataset& ds, const TestSpec& spec, double level,
                                         const MCConfig& cfg) {
  require_reps(cfg);
  const auto draws = draw_pivots(ds, cfg);
  GeneralizedAnalysis out{p_value_from_draws(draws, spec),
                          interval_from_draws(draws, level, ds.model())};
  out.test.method = out.interval.method = method_name(cfg.method);
  return out;
}

std::string method_name(GeneralizedMethod method) {
  return method == GeneralizedMethod::WeightedCombination ? "generalized-weighted"
                                                          : "generalized-umvue";
}

std::string alternative_name(Alternative alt) {
  switch (alt) {
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
    case Alternative::TwoSided: return "two-sided";
  }
  return "two-sided";
}

}  // namespace lncm
