#pragma once

// Experiment configuration: plain `key = value` text, one pair per line, `#`
// starts a comment. Lists are comma separated. The canonical form (sorted keys,
// no spaces) is what gets hashed and embedded in CSV headers.

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "../grid_io.hpp"

namespace blab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "experiment",      "dim",          "seed",        "budget",           "k_list",
      "lambda_lo",       "lambda_hi",    "lambda_count", "symbol",          "symbols",
      "eps",             "centers",      "theta0",      "depth",            "systems",
      "grid",            "calibration",  "tents",       "tail_budget",      "koranyi_inflation",
      "inflation_offset", "containment_samples", "holder_trials", "shells", "radius", "center_count", "quadrature",
  };
  return keys;
}

class ExperimentConfig {
 public:
  static ExperimentConfig parse(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    for (int no = 1; std::getline(in, line); ++no) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(no) + ": expected key = value");
      cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
  }

  static ExperimentConfig parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse(in);
  }

  void set(const std::string& key, const std::string& value) {
    if (!known_config_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    if (value.empty()) throw ConfigError("config key '" + key + "' has an empty value");
    values_[key] = value;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double number(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : to_double(key, it->second);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(it->second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != it->second.size()) throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
    return v;
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    const auto v = integer(key, static_cast<std::int64_t>(fallback));
    if (v <= 0) throw ConfigError("config key '" + key + "' must be positive");
    return static_cast<std::uint64_t>(v);
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : split(it->second)) out.push_back(to_double(key, item));
    return out;
  }

  std::vector<std::string> words(const std::string& key, std::vector<std::string> fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : split(it->second);
  }

  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
  }

  std::uint64_t hash() const { return fnv1a(canonical()); }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  static double to_double(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw ConfigError("config key '" + key + "' is not a number: " + s);
    return v;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace blab
