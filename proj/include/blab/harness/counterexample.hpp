#pragma once

// b = Log(1 - z_1), f = normalized indicator of B((s,0,...,0), 1-s), s = 1 - 2^{-k}.
// lambda is calibrated on U_m so U_m lies in the superlevel set, and the product
// lambda * |{|[conj b, P] f| > lambda}| grows like m = k/2.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "../operators.hpp"
#include "common.hpp"

namespace blab {

// sup |[conj b, P] f| on {|1 - z_1| >= rho}: |arg(1 - z_1)| < pi/2, |1 - z_1| <= 2 and
// |1 - z_1 s| >= |1 - z_1| - (1 - s).
inline double counterexample_exterior_bound(int n, double s, double rho) {
  const double gap = rho - (1.0 - s);
  if (gap <= 0.0) return std::numeric_limits<double>::infinity();
  return bergman_constant(n) * (std::log(2.0 / (1.0 - s)) + 0.5 * std::numbers::pi) / std::pow(gap, n + 1);
}

// Volume of {|1 - z_1| < rho} in the ball: z_1 in a disk of radius rho and |z'|^2 < 2 rho.
inline double counterexample_core_bound(int n, double rho) {
  return std::numbers::pi * rho * rho * euclidean_ball_volume(n - 1, std::sqrt(2.0 * rho));
}

struct CounterexampleRow {
  int k = 0, m = 0, annuli = 0;
  double s = 0, lambda = 0, rho_out = 0, core_bound = 0;
  double measure = 0, measure_se = 0;
  Interval product{};
  double um_volume = 0, um_se = 0, um_law = 0;
};

inline CounterexampleRow counterexample_row(int n, int k, std::uint64_t seed, std::uint64_t budget,
                                            std::uint64_t calibration) {
  CounterexampleRow row;
  row.k = k;
  row.m = k / 2;
  row.s = 1.0 - std::ldexp(1.0, -k);
  const Sampler root(seed, 0x63657800ull + static_cast<std::uint64_t>(k));
  auto g = [&](std::span<const cplx> z) { return std::abs(commutator_log_indicator(n, row.s, z)); };

  const Annulus um{n, k, row.m};
  const Proposal up = region_proposal(um);
  double lmin = std::numeric_limits<double>::infinity();
  {
    Sampler s = root.substream(0);
    for (std::uint64_t i = 0; i < calibration;) {
      CVec w = up.draw(s);
      if (!region_contains(um, w)) continue;
      lmin = std::min(lmin, g(w));
      ++i;
    }
  }
  if (!(lmin > 0.0)) throw std::runtime_error("counterexample: calibration minimum is not positive");
  row.lambda = 0.99 * lmin;

  // smallest dyadic radius 2^{j-k} outside which |[conj b, P] f| <= lambda
  int j_out = 1;
  while (j_out <= k + 1 && counterexample_exterior_bound(n, row.s, std::ldexp(1.0, j_out - k)) > row.lambda) ++j_out;
  j_out = std::min(j_out, k + 1);
  row.rho_out = std::ldexp(1.0, j_out - k);
  row.annuli = j_out;
  row.core_bound = counterexample_core_bound(n, std::ldexp(1.0, -k));

  const std::uint64_t per = std::max<std::uint64_t>(1, budget / static_cast<std::uint64_t>(j_out));
  double var = 0.0;
  for (int j = 1; j <= j_out; ++j) {
    const auto e = superlevel_measure(g, row.lambda, root.substream(static_cast<std::uint64_t>(j)), per, Annulus{n, k, j});
    row.measure += e.value;
    var += e.std_err * e.std_err;
  }
  row.measure_se = std::sqrt(var);
  const auto iv = three_sigma(row.measure, row.measure_se, row.core_bound);
  row.product = {row.lambda * iv.value, row.lambda * std::max(0.0, iv.lo), row.lambda * iv.hi};

  const auto vol = region_volume(um);
  row.um_volume = vol.value;
  row.um_se = vol.std_err;
  row.um_law = std::ldexp(1.0, (n + 1) * (row.m - k));
  return row;
}

inline ExperimentResult cmd_counterexample(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.command = "counterexample";
  const int n = config_dim(cfg, 1);
  if (n > 2) throw ConfigError("counterexample: dim must be 1 or 2");
  const auto ks_raw = cfg.numbers("k_list", {8, 12, 16, 20});
  const std::uint64_t budget = cfg.count("budget", 1000000);
  const std::uint64_t calibration = cfg.count("calibration", 10000);
  const std::uint64_t seed = config_seed(cfg);
  std::vector<int> ks;
  for (double k : ks_raw) {
    if (k != std::floor(k) || k < 4 || k > 40 || static_cast<int>(k) % 2) throw ConfigError("k_list entries must be even integers in [4, 40]");
    ks.push_back(static_cast<int>(k));
  }
  std::sort(ks.begin(), ks.end());

  r.table = CsvTable({"k", "m", "s", "lambda", "rho_out", "annuli", "measure", "measure_stderr", "core_bound", "product",
                      "product_lo", "product_hi", "product_over_m", "um_volume", "um_volume_stderr", "um_law",
                      "um_ratio"});
  std::vector<CounterexampleRow> rows;
  Series prod{"lambda * measure", {}, {}}, law{"m * product(k0)/m(k0)", {}, {}};
  for (int k : ks) {
    const auto row = counterexample_row(n, k, seed, budget, calibration);
    rows.push_back(row);
    CsvTable::Row out;
    out << row.k << row.m << row.s << row.lambda << row.rho_out << row.annuli << row.measure << row.measure_se
        << row.core_bound << row.product.value << row.product.lo << row.product.hi << row.product.value / row.m
        << row.um_volume << row.um_se << row.um_law << row.um_volume / row.um_law;
    r.table.add(out);
    prod.x.push_back(k);
    prod.y.push_back(row.product.value);
  }
  for (const auto& row : rows) {
    law.x.push_back(row.k);
    law.y.push_back(rows.front().product.value * row.m / rows.front().m);
  }

  bool increasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) increasing = increasing && rows[i - 1].product.hi < rows[i].product.lo;
  r.check("product strictly increasing in k (3 sigma ends)", increasing);
  if (rows.size() >= 2) {
    const double growth = rows.back().product.lo / rows.front().product.hi;
    r.check("product(k_max) / product(k_min) >= 2", growth >= 2.0, "conservative ratio " + format_number(growth));
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& row : rows) lo = std::min(lo, row.product.value / row.m), hi = std::max(hi, row.product.value / row.m);
    r.check("product / m within one order of magnitude", hi / lo <= 10.0, "spread " + format_number(hi / lo));
  }
  bool law_ok = true;
  for (const auto& row : rows) {
    const double q = row.um_volume / row.um_law;
    law_ok = law_ok && q >= 0.25 && q <= 4.0;
  }
  r.check("|U_m| within factor 4 of 2^{(n+1)(m-k)}", law_ok);
  r.plot = Plot{"Counterexample growth", "k", "lambda * |superlevel|", false, false, {prod, law}};
  stamp(r, cfg);
  return r;
}

}  // namespace blab
