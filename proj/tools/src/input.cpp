#include "lncm/cli/input.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "lncm/errors.hpp"

namespace lncm::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidInput("line " + std::to_string(line_no) + ": '" + std::string(field) +
                       "' is not a number");
  }
  return value;
}

// Calls row(fields, line_no) for every non-empty data line after checking the header.
template <typename RowFn>
void for_each_row(const std::string& text, const std::vector<std::string_view>& header,
                  RowFn&& row) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto fields = split_row(line);
    if (!seen_header) {
      if (fields != header) {
        std::string expected;
        for (auto h : header) expected += (expected.empty() ? "" : ",") + std::string(h);
        throw InvalidInput("line " + std::to_string(line_no) + ": expected header '" + expected + "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw InvalidInput("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(header.size()) + " fields");
    }
    row(fields, line_no);
  }
  if (!seen_header) throw InvalidInput("input is empty");
}

}  // namespace

LabelledDataset parse_raw_csv(const std::string& text, bool log_transform, ModelSpec model) {
  std::vector<std::string> labels;
  std::map<std::string, std::size_t, std::less<>> index;
  std::vector<std::vector<double>> values;
  for_each_row(text, {"group", "value"}, [&](const auto& f, std::size_t line_no) {
    auto it = index.find(f[0]);
    if (it == index.end()) {
      it = index.emplace(std::string(f[0]), labels.size()).first;
      labels.emplace_back(f[0]);
      values.emplace_back();
    }
    values[it->second].push_back(parse_number(f[1], line_no));
  });
  std::vector<SampleSummary> groups;
  for (std::size_t i = 0; i < values.size(); ++i) {
    try {
      groups.push_back(summarize_group(values[i], log_transform));
    } catch (const InvalidInput& e) {
      throw InvalidInput("group '" + labels[i] + "': " + e.what());
    }
  }
  return {std::move(labels), Dataset(std::move(groups), model)};
}

LabelledDataset read_raw_csv(const std::string& path, bool log_transform, ModelSpec model) {
  return parse_raw_csv(read_file(path), log_transform, model);
}

LabelledDataset parse_summary_csv(const std::string& text, ModelSpec model) {
  std::vector<std::string> labels;
  std::vector<SampleSummary> groups;
  for_each_row(text, {"group", "n", "mean_log", "var_log"}, [&](const auto& f, std::size_t line_no) {
    const double n = parse_number(f[1], line_no);
    if (n < 0 || n != static_cast<double>(static_cast<std::size_t>(n))) {
      throw InvalidInput("line " + std::to_string(line_no) + ": n must be a whole number");
    }
    try {
      groups.emplace_back(static_cast<std::size_t>(n), parse_number(f[2], line_no),
                          parse_number(f[3], line_no));
    } catch (const InvalidInput& e) {
      throw InvalidInput("line " + std::to_string(line_no) + ": " + e.what());
    }
    labels.emplace_back(f[0]);
  });
  return {std::move(labels), Dataset(std::move(groups), model)};
}

LabelledDataset read_summary_csv(const std::string& path, ModelSpec model) {
  return parse_summary_csv(read_file(path), model);
}

LabelledDataset rmrs_example() {
  std::vector<std::string> labels;
  std::vector<SampleSummary> groups;
  for (const auto& g : kRmrsGroups) {
    const double n = static_cast<double>(g.n);
    labels.emplace_back(g.label);
    groups.emplace_back(g.n, g.log_mean, g.log_variance * n / (n - 1.0));
  }
  return {std::move(labels), Dataset(std::move(groups), ModelSpec::lognormal())};
}

}  // namespace lncm::cli
