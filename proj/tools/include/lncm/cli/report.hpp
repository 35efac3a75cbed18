#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lncm/generalized.hpp"

namespace lncm::cli {

struct GroupRow {
  std::string label;
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;

  friend bool operator==(const GroupRow&, const GroupRow&) = default;
};

struct TestRow {
  std::string method;
  std::optional<double> p_value;
  std::optional<double> statistic;
  std::optional<double> mc_std_error;
  std::optional<std::size_t> reps;
  std::optional<std::string> error;

  friend bool operator==(const TestRow&, const TestRow&) = default;
};

struct IntervalRow {
  std::string method;
  std::optional<double> log_lower, log_upper;
  std::optional<double> phi_lower, phi_upper;
  std::optional<double> phi_estimate;
  std::optional<std::size_t> reps;
  std::optional<std::string> error;

  friend bool operator==(const IntervalRow&, const IntervalRow&) = default;
};

/// Everything a test/ci/example run prints, in a form that renders to either
/// a human table or JSON.
struct Report {
  std::string command;
  std::string source;
  double model_a = 1.0;
  double model_b = -0.5;
  std::vector<GroupRow> groups;
  std::optional<double> mu0;
  std::optional<double> phi0;
  std::optional<std::string> alternative;
  std::optional<double> level;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::vector<TestRow> tests;
  std::vector<IntervalRow> intervals;

  friend bool operator==(const Report&, const Report&) = default;
};

TestRow to_row(const TestOutcome& t);
IntervalRow to_row(const IntervalOutcome& ci);

std::string render_json(const Report& report);
Report parse_report_json(const std::string& text);
std::string render_table(const Report& report);

}  // namespace lncm::cli
