#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lncm/cli/input.hpp"
#include "lncm/cli/report.hpp"
#include "lncm/generalized.hpp"

namespace lncm::cli {

enum class InputKind { Raw, Summary, Example };

enum class AnalysisMethod { LikelihoodRatio, Ahmed, GuptaLi, BakliziEbrahem, Weighted, Umvue, UmvueRaoBlackwell };

std::string analysis_method_name(AnalysisMethod m);

/// Expands a list of method names (comma-separated entries allowed, "all"
/// expands to the default set for the operation). Throws InvalidInput on
/// unknown names.
std::vector<AnalysisMethod> parse_methods(const std::vector<std::string>& names, bool for_test);

struct AnalysisRequest {
  InputKind input = InputKind::Example;
  std::string location = "rmrs";  // file path or example name
  std::optional<double> model_a;
  std::optional<double> model_b;
  std::optional<double> mu0;
  std::optional<double> phi0;
  Alternative alternative = Alternative::TwoSided;
  double level = 0.95;
  MCConfig mc;
  std::vector<std::string> methods{"all"};

  bool explicit_model() const { return model_a.has_value() || model_b.has_value(); }
  ModelSpec model() const;
};

/// Loads the dataset named by the request.
LabelledDataset load_input(const AnalysisRequest& req);

Report cmd_test(const AnalysisRequest& req);
Report cmd_ci(const AnalysisRequest& req);
/// Both tables for the built-in RMRS data: p-values at phi0 = 20000 and 95% intervals.
Report cmd_example(std::uint64_t seed, std::size_t reps, unsigned workers = 0);

/// Seed default: $LNCM_SEED when set and valid, otherwise 1.
std::uint64_t default_seed();

/// Full command-line entry point; returns the process exit code
/// (0 success, 1 runtime failure, 2 usage, input or config error).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lncm::cli
