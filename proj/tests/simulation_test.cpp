#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "lncm/errors.hpp"
#include "lncm/simulation.hpp"

using namespace lncm;

namespace {

const char* kSmallToml = R"(
mu = [0.0]
sigma2_1 = 1.0
sigma2_2 = [0.5, 2.5]
n_pairs = [[5, 10], [20, 20]]
alpha = 0.05
outer_reps = 200
inner_reps = 1000
seed = 3
methods = [1, 2, "gupta-li", "be", 5, "umvue"]
)";

SimulationCell small_cell() {
  SimulationCell c;
  c.sigma2s = {1.0, 0.5};
  c.ns = {10, 12};
  c.outer_reps = 200;
  c.inner_reps = 1000;
  c.methods = {SimMethod::LikelihoodRatio, SimMethod::Ahmed, SimMethod::GuptaLi,
               SimMethod::BakliziEbrahem, SimMethod::GeneralizedWeighted,
               SimMethod::GeneralizedUmvue};
  c.seed = 9;
  return c;
}

}  // namespace

TEST(MethodNames, RoundTripAndAliases) {
  for (int i = 1; i <= 6; ++i) {
    const auto m = static_cast<SimMethod>(i);
    EXPECT_EQ(parse_sim_method(sim_method_name(m)), m);
    EXPECT_EQ(parse_sim_method(std::to_string(i)), m);
  }
  EXPECT_EQ(parse_sim_method("lrt"), SimMethod::LikelihoodRatio);
  EXPECT_EQ(parse_sim_method("weighted"), SimMethod::GeneralizedWeighted);
  EXPECT_FALSE(parse_sim_method("7").has_value());
  EXPECT_FALSE(parse_sim_method("bogus").has_value());
  EXPECT_EQ(parse_metric("coverage"), Metric::Coverage);
  EXPECT_FALSE(supports(SimMethod::BakliziEbrahem, Metric::Rejection));
  EXPECT_FALSE(supports(SimMethod::LikelihoodRatio, Metric::Coverage));
}

TEST(GridConfig, ParsesTomlAndJsonAlike) {
  const auto toml = parse_grid_config(kSmallToml);
  const auto json = parse_grid_config(R"({"mu": [0.0], "sigma2_1": 1.0, "sigma2_2": [0.5, 2.5],
      "n_pairs": [[5, 10], [20, 20]], "outer_reps": 200, "inner_reps": 1000, "seed": 3,
      "methods": [1, 2, "gupta-li", "be", 5, "umvue"]})");
  for (const auto* cfg : {&toml, &json}) {
    EXPECT_EQ(cfg->methods.size(), 6u);
    EXPECT_EQ(cfg->outer_reps, 200u);
    EXPECT_EQ(cfg->seed, 3u);
    const auto cells = cfg->cells();
    ASSERT_EQ(cells.size(), 4u);
    EXPECT_EQ(cells[1].ns, (std::vector<std::size_t>{20, 20}));
    EXPECT_EQ(cells[2].sigma2s, (std::vector<double>{1.0, 2.5}));
    EXPECT_EQ(cells[3].cell_index, 3u);
  }
}

TEST(GridConfig, Errors) {
  EXPECT_THROW(parse_grid_config("mu = [0.0]\n"), GridConfigError);
  EXPECT_THROW(parse_grid_config("mu = [0.0"), GridConfigError);
  EXPECT_THROW(parse_grid_config("{\"mu\": "), GridConfigError);
  std::string s = kSmallToml;
  EXPECT_THROW(parse_grid_config(s + "colour = 1\n"), GridConfigError);
  EXPECT_THROW(parse_grid_config(std::string(kSmallToml) + "metrics = [\"speed\"]\n"),
               GridConfigError);
  std::string bad_method = s;
  bad_method.replace(bad_method.find("\"umvue\""), 7, "\"magic\"");
  EXPECT_THROW(parse_grid_config(bad_method), GridConfigError);
  std::string tiny = s;
  tiny.replace(tiny.find("outer_reps = 200"), 16, "outer_reps = 50");
  EXPECT_THROW(parse_grid_config(tiny), GridConfigError);
  std::string bad_pair = s;
  bad_pair.replace(bad_pair.find("[5, 10]"), 7, "[1, 10]");
  EXPECT_THROW(parse_grid_config(bad_pair), GridConfigError);
  EXPECT_THROW(load_grid_config("/nonexistent/grid.toml"), GridConfigError);
}

TEST(GridConfig, EmptyGridGivesEmptyTable) {
  const auto cfg = parse_grid_config(
      "mu = []\nsigma2_1 = 1.0\nsigma2_2 = [1.0]\nn_pairs = [[5, 5]]\nmethods = [5]\n");
  EXPECT_TRUE(cfg.cells().empty());
  const auto results = run_grid(cfg);
  EXPECT_TRUE(results.empty());
  std::ostringstream out;
  write_csv(out, results);
  EXPECT_EQ(out.str(), "mu,sigma2_1,sigma2_2,n1,n2,method,metric,estimate,std_error,failures\n");
}

TEST(SimulationCell, Validation) {
  auto c = small_cell();
  c.ns = {10};
  EXPECT_THROW(c.validate(), InvalidInput);
  c = small_cell();
  c.outer_reps = 99;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = small_cell();
  c.sigma2s = {1.0, 0.0};
  EXPECT_THROW(run_cell(c), InvalidInput);
  c = small_cell();
  c.alpha = 1.0;
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(RunCell, RatesAndStandardErrors) {
  const auto res = run_cell(small_cell());
  // LRT and BE each support one metric; the others two.
  EXPECT_EQ(res.rates.size(), 10u);
  for (const auto& r : res.rates) {
    EXPECT_GE(r.estimate, 0.0);
    EXPECT_LE(r.estimate, 1.0);
    EXPECT_EQ(r.estimate, static_cast<double>(r.hits) / 200.0);
    EXPECT_DOUBLE_EQ(r.std_error, std::sqrt(r.estimate * (1 - r.estimate) / 200.0));
    EXPECT_LE(r.hits + r.failures, 200u);
    const bool generalized = r.method == SimMethod::GeneralizedWeighted ||
                             r.method == SimMethod::GeneralizedUmvue;
    EXPECT_EQ(r.duality_mismatches.has_value(), generalized);
    if (generalized) {
      EXPECT_EQ(*r.duality_mismatches, 0u);  // < 0.5% of 200
    }
  }
}

TEST(RunCell, BinomialStandardErrorScaling) {
  for (double p : {0.05, 0.3, 0.5, 0.95}) {
    EXPECT_NEAR(binomial_std_error(p, 2000) / binomial_std_error(p, 4000), std::sqrt(2.0), 1e-14);
  }
  EXPECT_EQ(binomial_std_error(0.0, 100), 0.0);
}

TEST(RunCell, DeterministicAndWorkerIndependent) {
  auto c = small_cell();
  c.workers = 1;
  const auto a = run_cell(c);
  c.workers = 3;
  const auto b = run_cell(c);
  ASSERT_EQ(a.rates.size(), b.rates.size());
  for (std::size_t i = 0; i < a.rates.size(); ++i) {
    EXPECT_EQ(a.rates[i].hits, b.rates[i].hits);
    EXPECT_EQ(a.rates[i].failures, b.rates[i].failures);
  }
  c.seed = 10;
  const auto other = run_cell(c);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.rates.size(); ++i) any_diff |= a.rates[i].hits != other.rates[i].hits;
  EXPECT_TRUE(any_diff);
}

TEST(RunGrid, SameConfigSameBytes) {
  const auto cfg = parse_grid_config(kSmallToml);
  std::ostringstream a, b;
  write_csv(a, run_grid(cfg, 1));
  write_csv(b, run_grid(cfg, 2));
  const std::string csv = a.str();
  EXPECT_EQ(csv, b.str());
  // header + 4 cells x 10 method/metric rows
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 41);
  EXPECT_NE(csv.find("\n0,1,0.5,5,10,ahmed,rejection,"), std::string::npos);
}

TEST(RunCell, ClearAlternativeHasFullPower) {
  auto c = small_cell();
  c.mu = 1.0;
  c.sigma2s = {1.0, 0.1};
  c.ns = {25, 25};
  c.metrics = {Metric::Rejection};
  c.outer_reps = 200;
  const auto res = run_cell(c);
  for (const auto& r : res.rates) EXPECT_GE(r.estimate, 0.99) << sim_method_name(r.method);
}
