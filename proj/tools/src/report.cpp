#include "lncm/cli/report.hpp"

#include <fmt/format.h>

#include "json.hpp"

namespace lncm::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename T>
void put(ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get(const ordered_json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j[key].is_null()) v = j[key].get<T>();
}

std::string fmt_opt(const std::optional<double>& v, const char* spec) {
  return v ? fmt::format(fmt::runtime(spec), *v) : std::string("-");
}

}  // namespace

TestRow to_row(const TestOutcome& t) {
  TestRow row;
  row.method = t.method;
  row.p_value = t.p_value;
  if (t.reps_used > 0) {
    row.mc_std_error = t.mc_std_error;
    row.reps = t.reps_used;
  } else {
    row.statistic = t.statistic;
  }
  return row;
}

IntervalRow to_row(const IntervalOutcome& ci) {
  IntervalRow row;
  row.method = ci.method;
  if (!ci.ok) {
    row.error = ci.note;
    return row;
  }
  if (ci.log_scale) {
    row.log_lower = ci.log_scale->lower;
    row.log_upper = ci.log_scale->upper;
  }
  if (ci.phi_scale) {
    row.phi_lower = ci.phi_scale->lower;
    row.phi_upper = ci.phi_scale->upper;
  }
  row.phi_estimate = ci.phi_estimate;
  return row;
}

std::string render_json(const Report& r) {
  ordered_json j;
  j["command"] = r.command;
  j["source"] = r.source;
  j["model"] = {{"a", r.model_a}, {"b", r.model_b}};
  j["groups"] = ordered_json::array();
  for (const auto& g : r.groups) {
    j["groups"].push_back(
        {{"label", g.label}, {"n", g.n}, {"mean", g.mean}, {"variance", g.variance}});
  }
  put(j, "mu0", r.mu0);
  put(j, "phi0", r.phi0);
  put(j, "alternative", r.alternative);
  put(j, "level", r.level);
  j["seed"] = r.seed;
  j["reps"] = r.reps;
  j["tests"] = ordered_json::array();
  for (const auto& t : r.tests) {
    ordered_json row;
    row["method"] = t.method;
    put(row, "p_value", t.p_value);
    put(row, "statistic", t.statistic);
    put(row, "mc_std_error", t.mc_std_error);
    put(row, "reps", t.reps);
    put(row, "error", t.error);
    j["tests"].push_back(std::move(row));
  }
  j["intervals"] = ordered_json::array();
  for (const auto& ci : r.intervals) {
    ordered_json row;
    row["method"] = ci.method;
    put(row, "log_lower", ci.log_lower);
    put(row, "log_upper", ci.log_upper);
    put(row, "phi_lower", ci.phi_lower);
    put(row, "phi_upper", ci.phi_upper);
    put(row, "phi_estimate", ci.phi_estimate);
    put(row, "reps", ci.reps);
    put(row, "error", ci.error);
    j["intervals"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

Report parse_report_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  Report r;
  r.command = j.at("command").get<std::string>();
  r.source = j.at("source").get<std::string>();
  r.model_a = j.at("model").at("a").get<double>();
  r.model_b = j.at("model").at("b").get<double>();
  for (const auto& g : j.at("groups")) {
    r.groups.push_back({g.at("label").get<std::string>(), g.at("n").get<std::size_t>(),
                        g.at("mean").get<double>(), g.at("variance").get<double>()});
  }
  get(j, "mu0", r.mu0);
  get(j, "phi0", r.phi0);
  get(j, "alternative", r.alternative);
  get(j, "level", r.level);
  r.seed = j.at("seed").get<std::uint64_t>();
  r.reps = j.at("reps").get<std::size_t>();
  for (const auto& t : j.at("tests")) {
    TestRow row;
    row.method = t.at("method").get<std::string>();
    get(t, "p_value", row.p_value);
    get(t, "statistic", row.statistic);
    get(t, "mc_std_error", row.mc_std_error);
    get(t, "reps", row.reps);
    get(t, "error", row.error);
    r.tests.push_back(std::move(row));
  }
  for (const auto& ci : j.at("intervals")) {
    IntervalRow row;
    row.method = ci.at("method").get<std::string>();
    get(ci, "log_lower", row.log_lower);
    get(ci, "log_upper", row.log_upper);
    get(ci, "phi_lower", row.phi_lower);
    get(ci, "phi_upper", row.phi_upper);
    get(ci, "phi_estimate", row.phi_estimate);
    get(ci, "reps", row.reps);
    get(ci, "error", row.error);
    r.intervals.push_back(std::move(row));
  }
  return r;
}

std::string render_table(const Report& r) {
  std::string out;
  out += fmt::format("source: {}   model: a = {:g}, b = {:g}\n", r.source, r.model_a, r.model_b);
  out += fmt::format("\n{:<20} {:>6} {:>12} {:>12}\n", "group", "n", "mean", "variance");
  for (const auto& g : r.groups) {
    out += fmt::format("{:<20} {:>6} {:>12.6f} {:>12.6f}\n", g.label, g.n, g.mean, g.variance);
  }

  if (!r.tests.empty()) {
    out += "\nhypothesis test";
    if (r.phi0) out += fmt::format("   phi0 = {:g}", *r.phi0);
    if (r.mu0) out += fmt::format("   mu0 = {:.6g}", *r.mu0);
    if (r.alternative) out += fmt::format("   alternative = {}", *r.alternative);
    out += fmt::format("\n{:<34} {:>10} {:>12} {:>10}\n", "method", "p-value", "MC s.e.", "stat");
    for (const auto& t : r.tests) {
      if (t.error) {
        out += fmt::format("{:<34} {}\n", t.method, *t.error);
        continue;
      }
      out += fmt::format("{:<34} {:>10} {:>12} {:>10}\n", t.method, fmt_opt(t.p_value, "{:.4f}"),
                         fmt_opt(t.mc_std_error, "{:.5f}"), fmt_opt(t.statistic, "{:.4f}"));
    }
  }

  if (!r.intervals.empty()) {
    out += fmt::format("\n{:g}% confidence intervals\n", 100.0 * r.level.value_or(0.95));
    out += fmt::format("{:<26} {:>24} {:>12} {:>26}\n", "method", "phi scale", "width",
                       "log scale");
    for (const auto& ci : r.intervals) {
      if (ci.error) {
        out += fmt::format("{:<26} {}\n", ci.method, *ci.error);
        continue;
      }
      const std::string phi =
          ci.phi_lower ? fmt::format("({:.2f}, {:.2f})", *ci.phi_lower, *ci.phi_upper) : "-";
      const std::string width =
          ci.phi_lower ? fmt::format("{:.2f}", *ci.phi_upper - *ci.phi_lower) : "-";
      const std::string log =
          ci.log_lower ? fmt::format("({:.6f}, {:.6f})", *ci.log_lower, *ci.log_upper) : "-";
      out += fmt::format("{:<26} {:>24} {:>12} {:>26}\n", ci.method, phi, width, log);
    }
  }
  if (r.reps > 0) {
    out += fmt::format("\nMonte Carlo: reps = {}, seed = {}\n", r.reps, r.seed);
  }
  return out;
}

}  // namespace lncm::cli
