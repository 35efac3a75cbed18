#include "lncm/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "lncm/classical.hpp"
#include "lncm/errors.hpp"
#include "lncm/model.hpp"
#include "lncm/parallel.hpp"
#include "lncm/random.hpp"

namespace lncm {

namespace {

enum class Outcome : unsigned char { Miss, Hit, Failure };

struct Slot {
  SimMethod method;
  Metric metric;
};

struct ReplicateOutcome {
  std::vector<Outcome> outcomes;       // one per slot
  std::vector<unsigned char> mismatch;  // one per slot, generalized methods only
};

bool is_generalized(SimMethod m) {
  return m == SimMethod::GeneralizedWeighted || m == SimMethod::GeneralizedUmvue;
}

Outcome as_outcome(bool hit) { return hit ? Outcome::Hit : Outcome::Miss; }

Dataset simulate_dataset(const SimulationCell& cell, RandomStream& rng, std::vector<double>& buf) {
  std::vector<SampleSummary> groups;
  groups.reserve(cell.ns.size());
  for (std::size_t i = 0; i < cell.ns.size(); ++i) {
    const double var = cell.sigma2s[i];
    const double mean = cell.mu - 0.5 * var;
    const double sd = std::sqrt(var);
    buf.resize(cell.ns[i]);
    for (double& y : buf) y = mean + sd * rng.std_normal();
    groups.push_back(summarize_group(buf, false));
  }
  return {std::move(groups), ModelSpec::lognormal()};
}

}  // namespace

std::string sim_method_name(SimMethod m) {
  switch (m) {
    case SimMethod::LikelihoodRatio: return "likelihood-ratio";
    case SimMethod::Ahmed: return "ahmed";
    case SimMethod::GuptaLi: return "gupta-li";
    case SimMethod::BakliziEbrahem: return "baklizi-ebrahem";
    case SimMethod::GeneralizedWeighted: return "generalized-weighted";
    case SimMethod::GeneralizedUmvue: return "generalized-umvue";
  }
  return "unknown";
}

std::optional<SimMethod> parse_sim_method(std::string_view name) {
  struct Alias {
    std::string_view name;
    SimMethod method;
  };
  static constexpr std::array<Alias, 20> kAliases{{
      {"1", SimMethod::LikelihoodRatio},      {"lrt", SimMethod::LikelihoodRatio},
      {"likelihood-ratio", SimMethod::LikelihoodRatio},
      {"2", SimMethod::Ahmed},                {"ahmed", SimMethod::Ahmed},
      {"3", SimMethod::GuptaLi},              {"gupta-li", SimMethod::GuptaLi},
      {"4", SimMethod::BakliziEbrahem},       {"baklizi", SimMethod::BakliziEbrahem},
      {"baklizi-ebrahem", SimMethod::BakliziEbrahem},
      {"5", SimMethod::GeneralizedWeighted},  {"gv1", SimMethod::GeneralizedWeighted},
      {"weighted", SimMethod::GeneralizedWeighted},
      {"generalized-weighted", SimMethod::GeneralizedWeighted},
      {"6", SimMethod::GeneralizedUmvue},     {"gv2", SimMethod::GeneralizedUmvue},
      {"umvue", SimMethod::GeneralizedUmvue}, {"generalized-umvue", SimMethod::GeneralizedUmvue},
      {"gl", SimMethod::GuptaLi},             {"be", SimMethod::BakliziEbrahem},
  }};
  for (const auto& a : kAliases) {
    if (a.name == name) return a.method;
  }
  return std::nullopt;
}

std::string metric_name(Metric m) { return m == Metric::Rejection ? "rejection" : "coverage"; }

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "rejection" || name == "size" || name == "power") return Metric::Rejection;
  if (name == "coverage") return Metric::Coverage;
  return std::nullopt;
}

bool supports(SimMethod method, Metric metric) {
  if (metric == Metric::Rejection) return method != SimMethod::BakliziEbrahem;
  return method != SimMethod::LikelihoodRatio;
}

void SimulationCell::validate() const {
  if (sigma2s.size() != ns.size()) {
    throw InvalidInput("simulation cell: sigma2s and ns must have the same length");
  }
  if (ns.empty()) throw InvalidInput("simulation cell: at least one group required");
  for (auto n : ns) {
    if (n < 2) throw InvalidInput("simulation cell: group sizes must be at least 2");
  }
  for (double v : sigma2s) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidInput("simulation cell: variances must be positive and finite");
    }
  }
  if (!std::isfinite(mu)) throw InvalidInput("simulation cell: mu must be finite");
  if (!(phi0 > 0.0)) throw InvalidInput("simulation cell: phi0 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("simulation cell: alpha must lie in (0, 1)");
  if (outer_reps < 100) throw InvalidInput("simulation cell: outer_reps must be at least 100");
  const bool any_generalized = std::any_of(methods.begin(), methods.end(), is_generalized);
  if (any_generalized && inner_reps < MCConfig::kMinReps) {
    throw InvalidInput("simulation cell: inner_reps must be at least " +
                       std::to_string(MCConfig::kMinReps));
  }
}

const MethodRate* SimulationResult::find(SimMethod method, Metric metric) const {
  for (const auto& r : rates) {
    if (r.method == method && r.metric == metric) return &r;
  }
  return nullptr;
}

double binomial_std_error(double p, std::size_t reps) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

SimulationResult run_cell(const SimulationCell& cell) {
  cell.validate();

  std::vector<Slot> slots;
  for (auto method : cell.methods) {
    for (auto metric : cell.metrics) {
      if (supports(method, metric)) slots.push_back({method, metric});
    }
  }

  const double level = 1.0 - cell.alpha;
  const double phi_true = std::exp(cell.mu);
  const double mu0 = std::log(cell.phi0);
  std::vector<ReplicateOutcome> reps(cell.outer_reps);

  parallel_for(cell.outer_reps, cell.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> buf;
    for (std::size_t r = begin; r < end; ++r) {
      const std::uint64_t global = cell.cell_index * cell.outer_reps + r;
      RandomStream rng({cell.seed, global});
      const Dataset ds = simulate_dataset(cell, rng, buf);

      auto& out = reps[r];
      out.outcomes.assign(slots.size(), Outcome::Miss);
      out.mismatch.assign(slots.size(), 0);

      for (std::size_t s = 0; s < slots.size(); ++s) {
        const auto [method, metric] = slots[s];
        try {
          switch (method) {
            case SimMethod::LikelihoodRatio:
              out.outcomes[s] = as_outcome(lr_test(ds, cell.phi0).p_value < cell.alpha);
              break;
            case SimMethod::Ahmed:
              out.outcomes[s] = metric == Metric::Rejection
                                    ? as_outcome(ahmed_test(ds, cell.phi0).p_value < cell.alpha)
                                    : as_outcome(ahmed_ci(ds, level).covers_phi(phi_true));
              break;
            case SimMethod::GuptaLi:
              out.outcomes[s] = metric == Metric::Rejection
                                    ? as_outcome(gupta_li_test(ds, cell.phi0).p_value < cell.alpha)
                                    : as_outcome(gupta_li_ci(ds, level).covers_phi(phi_true));
              break;
            case SimMethod::BakliziEbrahem: {
              const auto ci = baklizi_ci(ds, level);
              out.outcomes[s] = ci.ok ? as_outcome(ci.covers_phi(phi_true)) : Outcome::Failure;
              break;
            }
            case SimMethod::GeneralizedWeighted:
            case SimMethod::GeneralizedUmvue:
              break;  // handled below with shared draws
          }
        } catch (const ConvergenceError&) {
          out.outcomes[s] = Outcome::Failure;
        }
      }

      for (auto gm : {SimMethod::GeneralizedWeighted, SimMethod::GeneralizedUmvue}) {
        bool wanted = false;
        for (const auto& sl : slots) wanted |= sl.method == gm;
        if (!wanted) continue;
        MCConfig cfg;
        cfg.reps = cell.inner_reps;
        cfg.seed = derive_seed(cell.seed, global);
        cfg.method = gm == SimMethod::GeneralizedWeighted ? GeneralizedMethod::WeightedCombination
                                                          : GeneralizedMethod::UmvueBased;
        cfg.weights = cell.weights;
        cfg.workers = 1;
        const auto draws = draw_pivots(ds, cfg);
        const auto interval = interval_from_draws(draws, level, ds.model());
        const bool covered = interval.log_scale->contains(cell.mu);
        const bool true_rejected =
            p_value_from_draws(draws, {cell.mu, Alternative::TwoSided}).p_value < cell.alpha;
        const bool rejected =
            p_value_from_draws(draws, {mu0, Alternative::TwoSided}).p_value < cell.alpha;
        for (std::size_t s = 0; s < slots.size(); ++s) {
          if (slots[s].method != gm) continue;
          out.outcomes[s] = as_outcome(slots[s].metric == Metric::Rejection ? rejected : covered);
          out.mismatch[s] = true_rejected == covered;
        }
      }
    }
  });

  SimulationResult result{cell, {}};
  for (std::size_t s = 0; s < slots.size(); ++s) {
    MethodRate rate{slots[s].method, slots[s].metric, 0, 0, 0.0, 0.0, std::nullopt};
    std::size_t mismatches = 0;
    for (const auto& rep : reps) {
      rate.hits += rep.outcomes[s] == Outcome::Hit;
      rate.failures += rep.outcomes[s] == Outcome::Failure;
      mismatches += rep.mismatch[s];
    }
    rate.estimate = static_cast<double>(rate.hits) / static_cast<double>(cell.outer_reps);
    rate.std_error = binomial_std_error(rate.estimate, cell.outer_reps);
    if (is_generalized(rate.method)) rate.duality_mismatches = mismatches;
    result.rates.push_back(rate);
  }
  return result;
}

std::vector<SimulationCell> GridConfig::cells() const {
  std::vector<SimulationCell> out;
  for (double m : mu) {
    for (double s2 : sigma2_2) {
      for (const auto& [n1, n2] : n_pairs) {
        SimulationCell c;
        c.mu = m;
        c.sigma2s = {sigma2_1, s2};
        c.ns = {n1, n2};
        c.phi0 = phi0;
        c.alpha = alpha;
        c.outer_reps = outer_reps;
        c.inner_reps = inner_reps;
        c.methods = methods;
        c.metrics = metrics;
        c.seed = seed;
        c.cell_index = out.size();
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

std::vector<SimulationResult> run_grid(const GridConfig& config, unsigned workers) {
  std::vector<SimulationResult> results;
  for (auto cell : config.cells()) {
    cell.workers = workers;
    results.push_back(run_cell(cell));
  }
  return results;
}

void write_csv_header(std::ostream& out) {
  out << "mu,sigma2_1,sigma2_2,n1,n2,method,metric,estimate,std_error,failures\n";
}

void write_csv_rows(std::ostream& out, const SimulationResult& result) {
  const auto& c = result.cell;
  const double s2_2 = c.sigma2s.size() > 1 ? c.sigma2s[1] : c.sigma2s[0];
  const std::size_t n2 = c.ns.size() > 1 ? c.ns[1] : c.ns[0];
  char buf[256];
  for (const auto& r : result.rates) {
    std::snprintf(buf, sizeof buf, "%g,%g,%g,%zu,%zu,%s,%s,%.6f,%.6f,%zu\n", c.mu, c.sigma2s[0],
                  s2_2, c.ns[0], n2, sim_method_name(r.method).c_str(),
                  metric_name(r.metric).c_str(), r.estimate, r.std_error, r.failures);
    out << buf;
  }
}

void write_csv(std::ostream& out, const std::vector<SimulationResult>& results) {
  write_csv_header(out);
  for (const auto& r : results) write_csv_rows(out, r);
}

}  // namespace lncm
