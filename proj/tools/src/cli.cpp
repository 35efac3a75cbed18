#include "lncm/cli/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lncm/classical.hpp"
#include "lncm/errors.hpp"
#include "lncm/simulation.hpp"

namespace lncm::cli {

namespace {

constexpr double kRmrsPhi0 = 20000.0;

bool is_generalized(AnalysisMethod m) {
  return m == AnalysisMethod::Weighted || m == AnalysisMethod::Umvue ||
         m == AnalysisMethod::UmvueRaoBlackwell;
}

MCConfig config_for(const MCConfig& base, AnalysisMethod m) {
  MCConfig cfg = base;
  cfg.method = m == AnalysisMethod::Weighted ? GeneralizedMethod::WeightedCombination
                                             : GeneralizedMethod::UmvueBased;
  return cfg;
}

Report base_report(const std::string& command, const AnalysisRequest& req,
                   const LabelledDataset& input) {
  Report r;
  r.command = command;
  r.source = req.input == InputKind::Example ? "example:" + req.location : req.location;
  r.model_a = input.data.model().a();
  r.model_b = input.data.model().b();
  for (std::size_t i = 0; i < input.data.k(); ++i) {
    const auto& g = input.data.group(i);
    r.groups.push_back({input.labels[i], g.n(), g.mean(), g.variance()});
  }
  return r;
}

// Explicitly requested methods must apply; under "all" inapplicable ones are dropped.
std::vector<AnalysisMethod> applicable(const std::vector<AnalysisMethod>& methods,
                                       const AnalysisRequest& req, const Dataset& ds,
                                       bool for_test) {
  const bool expanded = std::find(req.methods.begin(), req.methods.end(), "all") != req.methods.end();
  std::vector<AnalysisMethod> out;
  for (auto m : methods) {
    std::string why;
    if (!is_generalized(m) && !ds.model().is_lognormal()) {
      why = analysis_method_name(m) + " requires the lognormal model";
    } else if (m == AnalysisMethod::GuptaLi && ds.k() != 2) {
      why = "gupta-li requires exactly two groups, got " + std::to_string(ds.k());
    } else if (m == AnalysisMethod::LikelihoodRatio && for_test &&
               req.alternative != Alternative::TwoSided) {
      why = "likelihood-ratio supports only the two-sided alternative";
    } else if (m == AnalysisMethod::UmvueRaoBlackwell && !for_test) {
      why = "umvue-rb produces p-values only";
    } else if (m == AnalysisMethod::BakliziEbrahem && for_test) {
      why = "baklizi-ebrahem produces intervals only";
    }
    if (why.empty()) {
      out.push_back(m);
    } else if (!expanded) {
      throw UnsupportedMethod(why);
    }
  }
  return out;
}

double resolve_mu0(const AnalysisRequest& req, const Dataset& ds) {
  if (req.mu0.has_value() == req.phi0.has_value()) {
    throw InvalidInput("give the null value on exactly one scale: --mu0 or --phi0");
  }
  if (req.phi0) {
    if (!ds.model().is_lognormal()) throw InvalidInput("--phi0 applies to the lognormal model only");
    if (!(*req.phi0 > 0.0)) throw InvalidInput("--phi0 must be positive");
    return std::log(*req.phi0);
  }
  return *req.mu0;
}

TestRow run_test(AnalysisMethod m, const Dataset& ds, double mu0, const AnalysisRequest& req) {
  const double phi0 = std::exp(mu0);
  try {
    switch (m) {
      case AnalysisMethod::LikelihoodRatio: return to_row(lr_test(ds, phi0));
      case AnalysisMethod::Ahmed: return to_row(ahmed_test(ds, phi0, req.alternative));
      case AnalysisMethod::GuptaLi: return to_row(gupta_li_test(ds, phi0, req.alternative));
      case AnalysisMethod::Weighted:
      case AnalysisMethod::Umvue:
        return to_row(gp_value(ds, {mu0, req.alternative}, config_for(req.mc, m)));
      case AnalysisMethod::UmvueRaoBlackwell:
        return to_row(gp_value_rao_blackwell(ds, {mu0, req.alternative}, config_for(req.mc, m)));
      case AnalysisMethod::BakliziEbrahem: break;
    }
  } catch (const ConvergenceError& e) {
    TestRow row;
    row.method = analysis_method_name(m);
    row.error = e.what();
    return row;
  }
  throw UnsupportedMethod(analysis_method_name(m) + " has no test");
}

IntervalRow run_interval(AnalysisMethod m, const Dataset& ds, const AnalysisRequest& req) {
  try {
    switch (m) {
      case AnalysisMethod::Ahmed: return to_row(ahmed_ci(ds, req.level));
      case AnalysisMethod::GuptaLi: return to_row(gupta_li_ci(ds, req.level));
      case AnalysisMethod::BakliziEbrahem: return to_row(baklizi_ci(ds, req.level));
      case AnalysisMethod::Weighted:
      case AnalysisMethod::Umvue: {
        auto row = to_row(gci(ds, req.level, config_for(req.mc, m)));
        row.reps = req.mc.reps;
        return row;
      }
      case AnalysisMethod::LikelihoodRatio:
      case AnalysisMethod::UmvueRaoBlackwell: break;
    }
  } catch (const ConvergenceError& e) {
    IntervalRow row;
    row.method = analysis_method_name(m);
    row.error = e.what();
    return row;
  }
  throw UnsupportedMethod(analysis_method_name(m) + " has no interval");
}

bool any_generalized(const std::vector<AnalysisMethod>& methods) {
  return std::any_of(methods.begin(), methods.end(), is_generalized);
}

Alternative parse_alternative(const std::string& s) {
  if (s == "greater") return Alternative::Greater;
  if (s == "less") return Alternative::Less;
  if (s == "two-sided") return Alternative::TwoSided;
  throw InvalidInput("unknown alternative '" + s + "'");
}

}  // namespace

std::string analysis_method_name(AnalysisMethod m) {
  switch (m) {
    case AnalysisMethod::LikelihoodRatio: return "likelihood-ratio";
    case AnalysisMethod::Ahmed: return "ahmed";
    case AnalysisMethod::GuptaLi: return "gupta-li";
    case AnalysisMethod::BakliziEbrahem: return "baklizi-ebrahem";
    case AnalysisMethod::Weighted: return "generalized-weighted";
    case AnalysisMethod::Umvue: return "generalized-umvue";
    case AnalysisMethod::UmvueRaoBlackwell: return "generalized-umvue-rao-blackwell";
  }
  return "unknown";
}

std::vector<AnalysisMethod> parse_methods(const std::vector<std::string>& names, bool for_test) {
  std::vector<AnalysisMethod> out;
  auto add = [&](AnalysisMethod m) {
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  };
  for (const auto& entry : names) {
    std::stringstream ss(entry);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name == "all") {
        if (for_test) {
          for (auto m : {AnalysisMethod::LikelihoodRatio, AnalysisMethod::Ahmed,
                         AnalysisMethod::GuptaLi, AnalysisMethod::Weighted, AnalysisMethod::Umvue}) {
            add(m);
          }
        } else {
          for (auto m : {AnalysisMethod::Ahmed, AnalysisMethod::GuptaLi,
                         AnalysisMethod::BakliziEbrahem, AnalysisMethod::Weighted,
                         AnalysisMethod::Umvue}) {
            add(m);
          }
        }
      } else if (name == "lrt" || name == "likelihood-ratio") {
        add(AnalysisMethod::LikelihoodRatio);
      } else if (name == "ahmed") {
        add(AnalysisMethod::Ahmed);
      } else if (name == "gupta-li") {
        add(AnalysisMethod::GuptaLi);
      } else if (name == "baklizi" || name == "baklizi-ebrahem") {
        add(AnalysisMethod::BakliziEbrahem);
      } else if (name == "weighted" || name == "gv1" || name == "generalized-weighted") {
        add(AnalysisMethod::Weighted);
      } else if (name == "umvue" || name == "gv2" || name == "generalized-umvue") {
        add(AnalysisMethod::Umvue);
      } else if (name == "umvue-rb" || name == "rao-blackwell") {
        add(AnalysisMethod::UmvueRaoBlackwell);
      } else {
        throw InvalidInput("unknown method '" + name + "'");
      }
    }
  }
  if (out.empty()) throw InvalidInput("no methods selected");
  return out;
}

ModelSpec AnalysisRequest::model() const {
  if (!explicit_model()) return ModelSpec::lognormal();
  return {model_a.value_or(1.0), model_b.value_or(-0.5)};
}

LabelledDataset load_input(const AnalysisRequest& req) {
  switch (req.input) {
    case InputKind::Example:
      if (req.location != "rmrs") throw InvalidInput("unknown example '" + req.location + "'");
      if (req.explicit_model()) throw InvalidInput("the rmrs example uses the lognormal model");
      return rmrs_example();
    case InputKind::Summary:
      return read_summary_csv(req.location, req.model());
    case InputKind::Raw:
      // Raw values are on the original (lognormal) scale unless a model is given explicitly.
      return read_raw_csv(req.location, !req.explicit_model(), req.model());
  }
  throw InvalidInput("no input source");
}

Report cmd_test(const AnalysisRequest& req) {
  const auto input = load_input(req);
  const auto& ds = input.data;
  const double mu0 = resolve_mu0(req, ds);
  const auto methods = applicable(parse_methods(req.methods, true), req, ds, true);
  if (any_generalized(methods) && req.mc.reps < MCConfig::kMinReps) {
    throw InvalidInput("--reps must be at least " + std::to_string(MCConfig::kMinReps));
  }
  Report r = base_report("test", req, input);
  if (req.phi0) r.phi0 = req.phi0;
  r.mu0 = mu0;
  r.alternative = alternative_name(req.alternative);
  if (any_generalized(methods)) {
    r.seed = req.mc.seed;
    r.reps = req.mc.reps;
  }
  for (auto m : methods) r.tests.push_back(run_test(m, ds, mu0, req));
  return r;
}

Report cmd_ci(const AnalysisRequest& req) {
  const auto input = load_input(req);
  const auto& ds = input.data;
  const auto methods = applicable(parse_methods(req.methods, false), req, ds, false);
  Report r = base_report("ci", req, input);
  r.level = req.level;
  if (any_generalized(methods)) {
    r.seed = req.mc.seed;
    r.reps = req.mc.reps;
  }
  for (auto m : methods) r.intervals.push_back(run_interval(m, ds, req));
  return r;
}

Report cmd_example(std::uint64_t seed, std::size_t reps, unsigned workers) {
  AnalysisRequest req;
  req.input = InputKind::Example;
  req.location = "rmrs";
  req.phi0 = kRmrsPhi0;
  req.mc.seed = seed;
  req.mc.reps = reps;
  req.mc.workers = workers;
  const auto input = load_input(req);
  const auto& ds = input.data;

  Report r = base_report("example", req, input);
  r.phi0 = kRmrsPhi0;
  r.mu0 = std::log(kRmrsPhi0);
  r.alternative = alternative_name(Alternative::TwoSided);
  r.level = req.level;
  r.seed = seed;
  r.reps = reps;
  for (auto m : {AnalysisMethod::LikelihoodRatio, AnalysisMethod::Ahmed, AnalysisMethod::GuptaLi}) {
    r.tests.push_back(run_test(m, ds, *r.mu0, req));
  }
  for (auto m : {AnalysisMethod::Ahmed, AnalysisMethod::GuptaLi, AnalysisMethod::BakliziEbrahem}) {
    r.intervals.push_back(run_interval(m, ds, req));
  }
  // Test and interval of each generalized method share one set of draws.
  for (auto m : {AnalysisMethod::Weighted, AnalysisMethod::Umvue}) {
    const auto both = generalized_analysis(ds, {*r.mu0, Alternative::TwoSided}, req.level,
                                           config_for(req.mc, m));
    r.tests.push_back(to_row(both.test));
    auto row = to_row(both.interval);
    row.reps = reps;
    r.intervals.push_back(std::move(row));
  }
  return r;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LNCM_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 10);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

namespace {

struct SimulateOptions {
  std::string config;
  std::string output;
  bool dry_run = false;
  bool full_scale = false;
  std::optional<std::size_t> outer_reps;
  std::optional<std::size_t> inner_reps;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateOptions& opts, unsigned workers, std::ostream& out,
                 std::ostream& err) {
  GridConfig grid;
  try {
    grid = load_grid_config(opts.config);
    if (opts.full_scale) grid.outer_reps = 10'000;
    if (opts.outer_reps) grid.outer_reps = *opts.outer_reps;
    if (opts.inner_reps) grid.inner_reps = *opts.inner_reps;
    if (opts.seed) grid.seed = *opts.seed;
    for (const auto& cell : grid.cells()) cell.validate();
  } catch (const std::exception& e) {
    err << "lncm simulate: config error: " << e.what() << "\n";
    return 2;
  }
  const auto cells = grid.cells();
  if (opts.dry_run) {
    const auto generalized =
        std::count_if(grid.methods.begin(), grid.methods.end(), [](SimMethod m) {
          return m == SimMethod::GeneralizedWeighted || m == SimMethod::GeneralizedUmvue;
        });
    out << "cells: " << cells.size() << "\n"
        << "replicates: " << cells.size() * grid.outer_reps << "\n"
        << "inner pivot draws: "
        << cells.size() * grid.outer_reps * grid.inner_reps * static_cast<std::size_t>(generalized)
        << "\n";
    return 0;
  }
  std::ofstream file;
  std::ostream* sink = &out;
  if (!opts.output.empty()) {
    file.open(opts.output);
    if (!file) {
      err << "lncm simulate: cannot write '" << opts.output << "'\n";
      return 2;
    }
    sink = &file;
  }
  write_csv_header(*sink);
  for (auto cell : cells) {
    cell.workers = workers;
    write_csv_rows(*sink, run_cell(cell));
    sink->flush();
  }
  return 0;
}

void add_input_options(CLI::App& sub, AnalysisRequest& req, std::string& raw, std::string& summary,
                       std::string& example) {
  auto* in = sub.add_option("--input", raw, "raw CSV with header group,value");
  auto* su = sub.add_option("--summary", summary, "summary CSV with header group,n,mean_log,var_log");
  auto* ex = sub.add_option("--example", example, "built-in dataset (rmrs)");
  in->excludes(su)->excludes(ex);
  su->excludes(ex);
  sub.add_option("--model-a", req.model_a, "mean-structure constant a (default: lognormal model)");
  sub.add_option("--model-b", req.model_b, "mean-structure constant b (default: lognormal model)");
  sub.add_option("--method", req.methods, "methods, comma-separated or repeated (default: all)")
      ->delimiter(',');
  sub.add_option("--reps", req.mc.reps, "Monte Carlo replications for generalized methods")
      ->capture_default_str();
  sub.add_option("--seed", req.mc.seed, "random seed (default: $LNCM_SEED or 1)");
  sub.add_flag("--shared-weights", "reuse the pivot chi-squares in the weighted method's weights");
}

void finish_input(AnalysisRequest& req, const std::string& raw, const std::string& summary,
                  const std::string& example, const CLI::App& sub) {
  if (!raw.empty()) {
    req.input = InputKind::Raw;
    req.location = raw;
  } else if (!summary.empty()) {
    req.input = InputKind::Summary;
    req.location = summary;
  } else if (!example.empty()) {
    req.input = InputKind::Example;
    req.location = example;
  } else {
    throw InvalidInput("one of --input, --summary or --example is required");
  }
  if (sub.count("--shared-weights") > 0) req.mc.weights = WeightSource::Shared;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized-pivot and classical inference for a common lognormal mean", "lncm"};
  app.require_subcommand(1);
  std::string format = "table";
  unsigned workers = 0;
  app.add_option("--workers", workers, "worker threads (0 = all cores); never changes results");

  AnalysisRequest test_req, ci_req;
  test_req.mc.seed = ci_req.mc.seed = default_seed();
  std::string t_raw, t_summary, t_example, c_raw, c_summary, c_example, alt = "two-sided";

  auto* test = app.add_subcommand("test", "hypothesis test for the common mean");
  add_input_options(*test, test_req, t_raw, t_summary, t_example);
  test->add_option("--phi0", test_req.phi0, "null value on the original (lognormal) scale");
  test->add_option("--mu0", test_req.mu0, "null value on the log scale");
  test->add_option("--alt", alt, "alternative: less, greater or two-sided")
      ->check(CLI::IsMember({"less", "greater", "two-sided"}));
  test->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

  auto* ci = app.add_subcommand("ci", "confidence intervals for the common mean");
  add_input_options(*ci, ci_req, c_raw, c_summary, c_example);
  ci->add_option("--level", ci_req.level, "confidence level")->check(CLI::Range(0.0, 1.0));
  ci->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

  std::uint64_t ex_seed = default_seed();
  std::size_t ex_reps = 100'000;
  auto* example = app.add_subcommand("example", "the RMRS medical-charges analysis");
  example->add_option("--seed", ex_seed, "random seed (default: $LNCM_SEED or 1)");
  example->add_option("--reps", ex_reps, "Monte Carlo replications")->capture_default_str();
  example->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "size, power and coverage study over a grid");
  simulate->add_option("--config", sim.config, "grid config (.toml or .json)")->required();
  simulate->add_option("--output", sim.output, "CSV file (default: stdout)");
  simulate->add_flag("--dry-run", sim.dry_run, "print cell and replicate counts only");
  simulate->add_flag("--full-scale", sim.full_scale, "10000 outer replicates per cell");
  simulate->add_option("--outer-reps", sim.outer_reps, "override outer_reps");
  simulate->add_option("--inner-reps", sim.inner_reps, "override inner_reps");
  simulate->add_option("--seed", sim.seed, "override seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 2;
  }

  try {
    Report report;
    if (test->parsed()) {
      finish_input(test_req, t_raw, t_summary, t_example, *test);
      test_req.alternative = parse_alternative(alt);
      test_req.mc.workers = workers;
      report = cmd_test(test_req);
    } else if (ci->parsed()) {
      finish_input(ci_req, c_raw, c_summary, c_example, *ci);
      ci_req.mc.workers = workers;
      report = cmd_ci(ci_req);
    } else if (example->parsed()) {
      report = cmd_example(ex_seed, ex_reps, workers);
    } else {
      return cmd_simulate(sim, workers, out, err);
    }
    out << (format == "json" ? render_json(report) : render_table(report));
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "lncm: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    err << "lncm: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "lncm: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace lncm::cli
