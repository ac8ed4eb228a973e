#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "../grid_io.hpp"
#include "config.hpp"
#include "output.hpp"

namespace blab {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::string command;
  CsvTable table;
  std::vector<Check> checks;
  std::optional<Plot> plot;
  std::string grid_hash = "none";

  void check(std::string name, bool ok, std::string detail = "") {
    checks.push_back({std::move(name), ok, std::move(detail)});
  }

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

// Header comments: command, config hash, seed, grid hash, then the canonical config.
inline void stamp(ExperimentResult& r, const ExperimentConfig& cfg) {
  r.table.comment("blab " + r.command);
  r.table.comment("config_hash=" + format_hex(cfg.hash()));
  r.table.comment("seed=" + cfg.text("seed", "1"));
  r.table.comment("grid_hash=" + r.grid_hash);
  for (const auto& [k, v] : cfg.values()) r.table.comment("config " + k + "=" + v);
}

inline std::uint64_t config_seed(const ExperimentConfig& cfg) { return static_cast<std::uint64_t>(cfg.integer("seed", 1)); }

inline int config_dim(const ExperimentConfig& cfg, int fallback = 1) {
  const auto n = cfg.integer("dim", fallback);
  if (n < 1 || n > 8) throw ConfigError("dim must lie in 1..8");
  return static_cast<int>(n);
}

// Log-spaced thresholds from lambda_lo to lambda_hi.
inline std::vector<double> lambda_grid(const ExperimentConfig& cfg, double lo = 1e-2, double hi = 1e3, int count = 12) {
  lo = cfg.number("lambda_lo", lo);
  hi = cfg.number("lambda_hi", hi);
  count = static_cast<int>(cfg.integer("lambda_count", count));
  if (!(lo > 0.0 && hi > lo) || count < 2) throw ConfigError("lambda grid needs 0 < lambda_lo < lambda_hi, count >= 2");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, i / static_cast<double>(count - 1)));
  return out;
}

inline DyadicGrid config_grid(const ExperimentConfig& cfg, int n, double theta0, int depth) {
  if (cfg.has("grid")) {
    DyadicGrid g = load_grid(cfg.text("grid", ""));
    if (g.dim() != n) throw ConfigError("grid file dimension does not match dim");
    return g;
  }
  GridConfig gc;
  gc.dim = n;
  gc.theta0 = cfg.number("theta0", theta0);
  gc.depth = static_cast<int>(cfg.integer("depth", depth));
  gc.systems = static_cast<int>(cfg.integer("systems", 0));
  gc.seed = config_seed(cfg);
  try {
    return build_grid(gc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

// Estimate with a conservative 3-sigma interval.
struct Interval {
  double value, lo, hi;
};

inline Interval three_sigma(double value, double std_err, double extra_hi = 0.0) {
  return {value, value - 3.0 * std_err, value + 3.0 * std_err + extra_hi};
}

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  std::size_t points = 0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  f.points = x.size();
  if (x.size() < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size(), my /= y.size();
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

}  // namespace blab
