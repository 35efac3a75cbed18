#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lncm/generalized.hpp"

namespace lncm {

/// The six methods compared in the simulation study, numbered as in the
/// published tables.
enum class SimMethod {
  LikelihoodRatio = 1,
  Ahmed = 2,
  GuptaLi = 3,
  BakliziEbrahem = 4,
  GeneralizedWeighted = 5,
  GeneralizedUmvue = 6,
};

enum class Metric {
  Rejection,  // two-sided test of phi = phi0 rejected at alpha (size or power)
  Coverage,   // (1 - alpha) interval contains the true phi = exp(mu)
};

std::string sim_method_name(SimMethod m);
/// Accepts the names produced by sim_method_name, short aliases and "1".."6".
std::optional<SimMethod> parse_sim_method(std::string_view name);
std::string metric_name(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

bool supports(SimMethod method, Metric metric);

struct SimulationCell {
  double mu = 0.0;
  std::vector<double> sigma2s{1.0, 1.0};
  std::vector<std::size_t> ns{50, 50};
  double phi0 = 1.0;
  double alpha = 0.05;
  std::size_t outer_reps = 2000;
  std::size_t inner_reps = 5000;
  std::vector<SimMethod> methods{SimMethod::GeneralizedWeighted, SimMethod::GeneralizedUmvue};
  std::vector<Metric> metrics{Metric::Rejection, Metric::Coverage};
  std::uint64_t seed = 1;
  std::size_t cell_index = 0;  // position in its grid; selects the replicate streams
  WeightSource weights = WeightSource::Independent;
  unsigned workers = 0;

  /// Throws InvalidInput describing the first violated constraint.
  void validate() const;
};

struct MethodRate {
  SimMethod method;
  Metric metric;
  std::size_t hits = 0;  // rejections or coverages
  std::size_t failures = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  /// Generalized methods only: replicates where "exp(mu) rejected at alpha"
  /// and "exp(mu) outside the interval" disagree (shared pivot draws).
  std::optional<std::size_t> duality_mismatches;
};

struct SimulationResult {
  SimulationCell cell;
  std::vector<MethodRate> rates;

  const MethodRate* find(SimMethod method, Metric metric) const;
};

/// Binomial standard error sqrt(p (1 - p) / reps).
double binomial_std_error(double p, std::size_t reps);

/// Simulates `cell.outer_reps` two-or-more-group lognormal datasets and
/// applies every requested method. Replicate r uses the data stream
/// {seed, cell_index * outer_reps + r}; all methods see the same dataset.
SimulationResult run_cell(const SimulationCell& cell);

struct GridConfig {
  std::vector<double> mu;
  double sigma2_1 = 1.0;
  std::vector<double> sigma2_2;
  std::vector<std::pair<std::size_t, std::size_t>> n_pairs;
  double alpha = 0.05;
  double phi0 = 1.0;
  std::size_t outer_reps = 2000;
  std::size_t inner_reps = 5000;
  std::uint64_t seed = 1;
  std::vector<SimMethod> methods;
  std::vector<Metric> metrics{Metric::Rejection, Metric::Coverage};

  /// Cells in table order: mu, then sigma2_2, then n pair.
  std::vector<SimulationCell> cells() const;
};

/// Malformed grid configuration.
class GridConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a TOML or JSON grid. Format is chosen by `format_hint` ("toml" or
/// "json"); an empty hint sniffs the text.
GridConfig parse_grid_config(std::string_view text, std::string_view format_hint = {});
GridConfig load_grid_config(const std::string& path);

std::vector<SimulationResult> run_grid(const GridConfig& config, unsigned workers = 0);

void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const SimulationResult& result);
void write_csv(std::ostream& out, const std::vector<SimulationResult>& results);

}  // namespace lncm
