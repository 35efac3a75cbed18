#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "lncm/simulation.hpp"

namespace lncm {

namespace {

using nlohmann::json;

// Both parsers are funnelled through JSON: a TOML table maps onto the same
// object shape, so schema checks live in one place.
json toml_to_json(const toml::node& node) {
  if (const auto* tbl = node.as_table()) {
    json obj = json::object();
    for (const auto& [key, value] : *tbl) obj[std::string(key.str())] = toml_to_json(value);
    return obj;
  }
  if (const auto* arr = node.as_array()) {
    json out = json::array();
    for (const auto& v : *arr) out.push_back(toml_to_json(v));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw GridConfigError("unsupported TOML value type");
}

double number(const json& j, const char* key) {
  if (!j.is_number()) throw GridConfigError(std::string("'") + key + "' must be a number");
  return j.get<double>();
}

std::size_t count(const json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw GridConfigError(std::string("'") + key + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::vector<double> number_array(const json& obj, const char* key) {
  if (!obj.contains(key)) throw GridConfigError(std::string("missing required array '") + key + "'");
  const auto& arr = obj.at(key);
  if (!arr.is_array()) throw GridConfigError(std::string("'") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(number(v, key));
  return out;
}

SimMethod method_from(const json& j) {
  std::string name = j.is_number_integer() ? std::to_string(j.get<long long>())
                     : j.is_string()       ? j.get<std::string>()
                                           : std::string{};
  if (auto m = parse_sim_method(name)) return *m;
  throw GridConfigError("unknown method '" + (name.empty() ? j.dump() : name) + "'");
}

GridConfig from_json(const json& obj) {
  if (!obj.is_object()) throw GridConfigError("grid config must be a table/object");
  static const char* kKnown[] = {"mu",         "sigma2_1",   "sigma2_2", "n_pairs",
                                 "alpha",      "outer_reps", "inner_reps", "seed",
                                 "methods",    "phi0",       "metrics"};
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : kKnown) known |= key == k;
    if (!known) throw GridConfigError("unknown config key '" + key + "'");
  }

  GridConfig cfg;
  cfg.mu = number_array(obj, "mu");
  cfg.sigma2_2 = number_array(obj, "sigma2_2");
  if (!obj.contains("n_pairs") || !obj["n_pairs"].is_array()) {
    throw GridConfigError("missing required array 'n_pairs'");
  }
  for (const auto& pair : obj["n_pairs"]) {
    if (!pair.is_array() || pair.size() != 2) {
      throw GridConfigError("each entry of 'n_pairs' must be a two-element array");
    }
    cfg.n_pairs.emplace_back(count(pair[0], "n_pairs"), count(pair[1], "n_pairs"));
  }
  if (!obj.contains("sigma2_1")) throw GridConfigError("missing required scalar 'sigma2_1'");
  cfg.sigma2_1 = number(obj["sigma2_1"], "sigma2_1");
  if (obj.contains("alpha")) cfg.alpha = number(obj["alpha"], "alpha");
  if (obj.contains("phi0")) cfg.phi0 = number(obj["phi0"], "phi0");
  if (obj.contains("outer_reps")) cfg.outer_reps = count(obj["outer_reps"], "outer_reps");
  if (obj.contains("inner_reps")) cfg.inner_reps = count(obj["inner_reps"], "inner_reps");
  if (obj.contains("seed")) cfg.seed = count(obj["seed"], "seed");

  if (!obj.contains("methods") || !obj["methods"].is_array() || obj["methods"].empty()) {
    throw GridConfigError("missing required non-empty array 'methods'");
  }
  for (const auto& m : obj["methods"]) cfg.methods.push_back(method_from(m));

  if (obj.contains("metrics")) {
    cfg.metrics.clear();
    for (const auto& m : obj["metrics"]) {
      auto metric = m.is_string() ? parse_metric(m.get<std::string>()) : std::nullopt;
      if (!metric) throw GridConfigError("unknown metric " + m.dump());
      cfg.metrics.push_back(*metric);
    }
  }

  // Validate ranges up front so a bad grid fails before any cell runs.
  for (const auto& cell : cfg.cells()) {
    try {
      cell.validate();
    } catch (const std::invalid_argument& e) {
      throw GridConfigError(e.what());
    }
  }
  return cfg;
}

bool looks_like_json(std::string_view text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{';
  }
  return false;
}

}  // namespace

GridConfig parse_grid_config(std::string_view text, std::string_view format_hint) {
  const bool use_json = format_hint.empty() ? looks_like_json(text) : format_hint == "json";
  if (use_json) {
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw GridConfigError(std::string("invalid JSON: ") + e.what());
    }
    return from_json(obj);
  }
  try {
    const auto tbl = toml::parse(text);
    return from_json(toml_to_json(tbl));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "invalid TOML at line " << e.source().begin.line << ": " << e.description();
    throw GridConfigError(msg.str());
  }
}

GridConfig load_grid_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GridConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string hint;
  if (path.ends_with(".json")) hint = "json";
  if (path.ends_with(".toml")) hint = "toml";
  return parse_grid_config(ss.str(), hint);
}

}  // namespace lncm
