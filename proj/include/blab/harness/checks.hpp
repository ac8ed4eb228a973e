#pragma once

// geometry-check: every sampled property suite, one row per property with counts.
// Suites are also exposed one by one so the acceptance runner can call them directly.

#include <algorithm>
#include <cmath>

#include "../containment.hpp"
#include "../layers.hpp"
#include "common.hpp"

namespace blab {

struct PropertyRow {
  std::string property;
  int dim = 1;
  std::uint64_t samples = 0, violations = 0;
  double observed_min = 0.0, observed_max = 0.0;
  bool passed = false;
  std::string detail;
};

inline PropertyRow property_from(const ContainmentReport& rep, int n) {
  return {rep.name, n, rep.samples, rep.violations, rep.observed_min, rep.observed_max, rep.ok(), ""};
}

// ---------------------------------------------------------------------------
// Closed forms against quadrature
// ---------------------------------------------------------------------------

// Random configurations cycling through the ball/polydisk projections and both
// commutator closed forms; a configuration passes when the closed form lies within 3 sigma.
inline PropertyRow oracle_equivalence(int configs, std::uint64_t budget, std::uint64_t seed) {
  PropertyRow row{"closed_form_vs_quadrature", 0, static_cast<std::uint64_t>(configs), 0, 0.0, 0.0, false, ""};
  Sampler s(seed, 0x6f72636cull);
  auto point = [&](int n, double r) {
    CVec v = sample_unit_ball(s, n);
    for (auto& c : v) c *= r;
    return v;
  };
  auto within = [](const ComplexEstimate& e, cplx exact) { return std::abs(e.value - exact) <= 3.0 * e.std_err + 1e-12; };
  double worst = 0.0;
  for (int i = 0; i < configs; ++i) {
    const int n = 1 + i % 2;
    const CVec z = point(n, 0.9);
    const Sampler q = s.substream(static_cast<std::uint64_t>(i));
    ComplexEstimate e;
    cplx exact;
    switch (i % 4) {
      case 0: {
        const double sv = s.uniform(0.1, 0.9);
        e = projection_quadrature(TestFunction::normalized_indicator(counterexample_ball(n, sv)), z, q, budget);
        exact = project_indicator_ball(n, sv, z);
        break;
      }
      case 1: {
        const BallPoint z0(point(n, 0.5));
        e = projection_quadrature(TestFunction::indicator(Polydisk{z0, 0.1}), z, q, budget);
        exact = project_indicator_polydisk(z0, 0.1, z);
        break;
      }
      case 2: {
        const double sv = s.uniform(0.1, 0.9);
        const auto f = TestFunction::normalized_indicator(counterexample_ball(n, sv));
        e = commutator_quadrature(Symbol::log_branch(), f, z, q, budget);
        exact = commutator_log_indicator(n, sv, z);
        break;
      }
      default: {
        const BallPoint zk = BallPoint::on_axis(n, 1.0 - std::ldexp(1.0, -(2 + i % 5)));
        const auto b = Symbol::bounded_smooth("inverse_shift");
        e = commutator_quadrature(b, TestFunction::normalized_indicator(shrinking_ball(zk)), z, q, budget);
        exact = commutator_shrinking_family(b, zk, z);
        break;
      }
    }
    if (!within(e, exact)) ++row.violations;
    if (e.std_err > 0.0) worst = std::max(worst, std::abs(e.value - exact) / e.std_err);
  }
  row.observed_max = worst;  // largest deviation in standard errors
  row.passed = row.samples - row.violations >= (95 * row.samples + 99) / 100;
  row.detail = std::to_string(row.samples - row.violations) + " of " + std::to_string(row.samples) + " within 3 sigma";
  return row;
}

// ---------------------------------------------------------------------------
// Orlicz inequalities
// ---------------------------------------------------------------------------

inline PropertyRow submultiplicativity(double eps, std::uint64_t samples, std::uint64_t seed) {
  PropertyRow row{"psi_submultiplicative_eps=" + format_number(eps), 0, samples, 0, 0.0, 0.0, false, ""};
  const auto psi = YoungFunction::psi(eps);
  Sampler s(seed, 0x7375626dull);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double x = s.uniform(0.0, 1e3), y = s.uniform(0.0, 1e3);
    const double lhs = psi(x * y), rhs = 2.0 * psi(x) * psi(y);
    if (lhs > rhs * (1.0 + 1e-12)) ++row.violations;
    if (rhs > 0.0) row.observed_max = std::max(row.observed_max, lhs / rhs);
  }
  row.passed = row.violations == 0;
  return row;
}

// x (1 + log+ x) <= 2 x log(e + x)
inline PropertyRow young_comparability(std::uint64_t samples, std::uint64_t seed) {
  PropertyRow row{"young_comparability", 0, samples, 0, 0.0, 0.0, false, ""};
  const auto psi = YoungFunction::psi(1.0), plain = YoungFunction::llogl();
  Sampler s(seed, 0x636d7072ull);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double x = std::exp(s.uniform(-10.0, 10.0));
    const double q = plain(x) / (2.0 * psi(x));
    if (q > 1.0 + 1e-12) ++row.violations;
    row.observed_max = std::max(row.observed_max, q);
  }
  row.passed = row.violations == 0;
  return row;
}

// <|fg|> <= C ||f||_{Psi_eps} ||g||_{Phi_eps} on balls, step f and g = |Log - shift|.
// C is fitted on the first half of the trials and must hold on the second half.
inline PropertyRow generalized_holder(double eps, int trials, std::uint64_t seed) {
  PropertyRow row{"generalized_holder_eps=" + format_number(eps), 1, static_cast<std::uint64_t>(trials), 0, 0.0, 0.0,
                  false, ""};
  Sampler pick(seed, 0x686c6472ull);
  const auto log_b = Symbol::log_branch();
  std::vector<double> ratios;
  for (int trial = 0; trial < trials; ++trial) {
    const double rad = pick.uniform(0.05, 0.3);
    const double cx = pick.uniform(-0.6, 1.0 - rad - 1e-3);
    const Region region = EuclideanBall{BallPoint{cx, 0.0}, rad};
    const CVec inner_c{cplx{cx + pick.uniform(-rad, rad), 0.0}, cplx{pick.uniform(-rad, rad), 0.0}};
    const double ir = pick.uniform(0.02, rad);
    const double lo = pick.uniform(0.0, 1.0), hi = pick.uniform(1.0, 50.0);
    auto f = [&](std::span<const cplx> w) { return distance(w, inner_c) < ir ? hi : lo; };
    const cplx shift = log_b(BallPoint{cx, 0.0});
    auto g = [&](std::span<const cplx> w) { return std::abs(log_b(w) - shift); };
    ratios.push_back(holder_ratio(f, g, region, eps, Sampler(seed, 0x686c0000ull + static_cast<std::uint64_t>(trial)), 2048));
  }
  const auto half = ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2);
  const double fitted = *std::max_element(ratios.begin(), half);
  for (auto it = half; it != ratios.end(); ++it)
    if (*it > 1.5 * fitted) ++row.violations;
  row.observed_min = *std::min_element(ratios.begin(), ratios.end());
  row.observed_max = *std::max_element(ratios.begin(), ratios.end());
  row.passed = fitted > 0.0 && std::isfinite(fitted) && row.violations == 0;
  row.detail = "fitted C = " + format_number(fitted) + ", held-out max " + format_number(*std::max_element(half, ratios.end()));
  return row;
}

inline DyadicGrid disk_grid(std::uint64_t seed, double theta0 = 0.8, int depth = 4) {
  return build_grid(GridConfig{.dim = 1, .theta0 = theta0, .depth = depth, .systems = 0, .seed = seed});
}

// |{M_Psi f > Lambda}| <= N int Psi(|f| / Lambda) for indicators, at the 3 sigma end.
inline PropertyRow young_maximal_bound(const DyadicGrid& g, std::uint64_t budget, std::uint64_t seed) {
  PropertyRow row{"young_maximal_distributional", g.dim(), 0, 0, std::numeric_limits<double>::infinity(), 0.0, false, ""};
  TentVolumeCache vols(g, 8192);
  const auto psi = YoungFunction::psi(1.0);
  const double N = g.systems();
  const std::vector<Region> sets = {EuclideanBall{BallPoint{0.7}, 0.2}, Polydisk{BallPoint{cplx{0.0, 0.9}}, 0.05},
                                    EuclideanBall{BallPoint{-0.3}, 0.5}};
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto f = TestFunction::indicator(sets[i]);
    TentStats stats(g, vols, f, 2048);
    TentLuxembourg lux(stats, psi);
    for (double Lambda : {0.05, 0.2, 0.8}) {
      const auto m = young_maximal_superlevel(lux, Lambda, Sampler(seed, 0x6d707369ull + i), budget);
      const auto vol = f.terms()[0].volume;
      const double bound = N * vol.value * psi(1.0 / Lambda);
      const double slack = 3.0 * (m.std_err + N * vol.std_err * psi(1.0 / Lambda));
      ++row.samples;
      if (m.value > bound + slack) ++row.violations;
      row.observed_min = std::min(row.observed_min, m.value / bound);
      row.observed_max = std::max(row.observed_max, m.value / bound);
    }
  }
  row.passed = row.violations == 0;
  return row;
}

// ---------------------------------------------------------------------------
// John–Nirenberg and the harmonic oscillation bound
// ---------------------------------------------------------------------------

// Tents whose boundary cube sits near the singular direction e_1 of Log(1 - z_1).
inline std::vector<KubeId> tents_near_e1(const DyadicGrid& g, int count, std::uint64_t seed) {
  Sampler s(seed, 0x6e656172ull);
  std::vector<KubeId> out;
  while (static_cast<int>(out.size()) < count) {
    const int sys = static_cast<int>(s.uniform() * g.systems()) % g.systems();
    const int level = 1 + static_cast<int>(s.uniform() * g.depth()) % g.depth();
    const double r = std::tanh((level + 0.5) * g.theta0());
    const double phi = s.uniform(-1.0, 1.0) * 2.0 * (1.0 - shell_radius(level, g.theta0()));
    CVec z(static_cast<std::size_t>(g.dim()), cplx{0.0, 0.0});
    z[0] = std::polar(r, phi);
    out.push_back(g.locate(sys, z, level));
  }
  return out;
}

struct TailFit {
  LinearFit fit;
  std::vector<double> lambdas, envelope;
};

// Envelope over tents of the tail fraction |{|b - <b>| > lambda}| / |K^|, fitted as
// log(envelope) = a - c2 lambda / ||b||; lambda in [1, 6] ||b||, points with >= 30 hits.
inline TailFit john_nirenberg_fit(const DyadicGrid& g, const Symbol& b, double bloch, int tents, std::uint64_t budget,
                                  std::uint64_t seed) {
  TailFit out;
  for (int i = 0; i <= 10; ++i) out.lambdas.push_back((1.0 + 0.5 * i) * bloch);
  out.envelope.assign(out.lambdas.size(), 0.0);
  for (const auto& k : tents_near_e1(g, tents, seed)) {
    const auto tail = oscillation_tail(g, b, k, out.lambdas, budget);
    for (std::size_t i = 0; i < tail.size(); ++i) out.envelope[i] = std::max(out.envelope[i], tail[i]);
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < out.lambdas.size(); ++i) {
    if (out.envelope[i] * static_cast<double>(budget) < 30.0) continue;
    x.push_back(out.lambdas[i] / bloch);
    y.push_back(std::log(out.envelope[i]));
  }
  out.fit = least_squares(x, y);
  return out;
}

// |b(z) - <b>_K^| <= C sum over J^ in the chain from z up to K^ of <|b - <b>_J^|>_{J^_E}, harmonic b.
struct HarmonicBound {
  double fitted = 0.0, held_out = 0.0;
  std::uint64_t points = 0;
};

inline HarmonicBound harmonic_oscillation_bound(const DyadicGrid& g, const Symbol& b, int tents, std::uint64_t budget,
                                                std::uint64_t seed) {
  const double eta = g.theta0();
  std::map<std::pair<int, int>, std::pair<cplx, double>> cache;  // (system, node) -> (tent mean, expansion osc)
  auto stats = [&](KubeId j) {
    const auto key = std::make_pair(j.system, j.node);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    cplx mean{0.0, 0.0};
    const auto pts = tent_points(g, j, budget, 0x6c35ull);
    for (const auto& w : pts) mean += b(w);
    mean /= static_cast<double>(pts.size());
    double osc = 0.0;
    const auto ext = TentExpansion(g, j, eta).points(budget, 0x6c36ull);
    for (const auto& w : ext) osc += std::abs(b(w) - mean);
    osc /= static_cast<double>(ext.size());
    return cache[key] = {mean, osc};
  };
  HarmonicBound out;
  Sampler s(seed, 0x6c656d35ull);
  for (int t = 0; t < tents; ++t) {
    const int sys = static_cast<int>(s.uniform() * g.systems()) % g.systems();
    const int level = static_cast<int>(s.uniform() * (g.depth() - 1)) % (g.depth() - 1);
    const auto& lv = g.level(level);
    const KubeId k{sys, lv[static_cast<std::size_t>(s.uniform() * lv.size()) % lv.size()]};
    const cplx mk = stats(k).first;
    double worst = 0.0;
    for (const auto& z : tent_points(g, k, 256, 0x6c37ull + static_cast<std::uint64_t>(t))) {
      if (g.beyond_horizon(z)) continue;
      double rhs = 0.0;
      for (int node = g.locate(sys, z).node;; node = g.node(node).parent) {
        rhs += stats({sys, node}).second;
        if (node == k.node) break;
      }
      ++out.points;
      if (rhs > 0.0) worst = std::max(worst, std::abs(b(z) - mk) / rhs);
    }
    (t < tents / 2 ? out.fitted : out.held_out) = std::max(t < tents / 2 ? out.fitted : out.held_out, worst);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Layer decomposition
// ---------------------------------------------------------------------------

// Constant function whose tent Luxembourg averages all sit in band k.
inline TestFunction band_constant(int n, int k) {
  return TestFunction::indicator(WholeBall{n}, 0.5 * std::ldexp(1.0, -2 * k) * YoungFunction::psi(1.0).inverse(1.0));
}

inline PropertyRow layer_overlap(const DyadicGrid& g, std::uint64_t samples, std::uint64_t seed, int offset = 4) {
  PropertyRow row{"layer_overlap_E_tilde<=4", g.dim(), 0, 0, 0.0, 0.0, false, ""};
  if (offset != 4) row.property += "_offset=" + std::to_string(offset);
  TentVolumeCache vols(g, 4096);
  std::vector<TestFunction> fs;
  fs.push_back(band_constant(g.dim(), 1));
  TestFunction generic(1);
  generic.add(1.0, EuclideanBall{BallPoint{0.8}, 0.19});
  generic.add(0.3, EuclideanBall{BallPoint{cplx{0.0, -0.9}}, 0.09});
  generic.add(5.0, Polydisk{BallPoint{cplx{-0.6, 0.6}}, 0.1});
  fs.push_back(generic);
  int max_e = 0, max_et = 0;
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    TentStats stats(g, vols, fs[fi], 1024);
    TentLuxembourg lux(stats, YoungFunction::psi(1.0));
    for (int k = 0; k <= 4; ++k) {
      const auto layers = layer_decomposition(lux, k, LayerOptions{.system = 0, .inflation_offset = offset});
      if (layers.empty()) continue;
      Sampler s(seed, 0x6c617900ull + fi * 16 + static_cast<std::uint64_t>(k));
      for (std::uint64_t i = 0; i < samples; ++i) {
        const CVec z = sample_unit_ball(s, g.dim());
        const int e = layers.count_E(z), et = layers.count_E_tilde(z);
        max_e = std::max(max_e, e);
        max_et = std::max(max_et, et);
        ++row.samples;
        if (e > 1 || et > 4) ++row.violations;
      }
    }
  }
  row.observed_min = max_e;
  row.observed_max = max_et;
  row.passed = row.samples > 0 && row.violations == 0;
  row.detail = "max E count " + std::to_string(max_e) + ", max E~ count " + std::to_string(max_et);
  return row;
}

inline PropertyRow layer_decay(const DyadicGrid& g, int k, std::uint64_t budget) {
  PropertyRow row{"deep_layer_decay_k=" + std::to_string(k), g.dim(), 0, 0, std::numeric_limits<double>::infinity(), 0.0,
                  false, ""};
  TentVolumeCache vols(g, 4096);
  const auto f = band_constant(g.dim(), k);
  TentStats stats(g, vols, f, 512);
  TentLuxembourg lux(stats, YoungFunction::psi(1.0));
  const auto layers = layer_decomposition(lux, k);
  const double bound = std::ldexp(1.0, -(1 << k));
  if (layers.empty()) {
    row.detail = "empty layer";
    return row;
  }
  for (int node : {0, g.level(1).front(), g.level(2).front()}) {
    const auto frac = deep_layer_fraction(layers, g, node, budget);
    row.samples += budget;
    if (frac.value > bound + 3.0 * frac.std_err) ++row.violations;
    row.observed_min = std::min(row.observed_min, frac.value);
    row.observed_max = std::max(row.observed_max, frac.value);
  }
  row.passed = row.violations == 0;
  row.detail = "bound " + format_number(bound);
  return row;
}

// ---------------------------------------------------------------------------

inline ExperimentResult cmd_geometry_check(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.command = "geometry-check";
  const std::uint64_t seed = config_seed(cfg);
  const std::uint64_t samples = cfg.count("containment_samples", 100000);
  const std::uint64_t budget = cfg.count("budget", 1u << 18);
  const int trials = static_cast<int>(cfg.count("holder_trials", 1000));
  const int tents = static_cast<int>(cfg.count("tents", 20));
  const double inflation = cfg.number("koranyi_inflation", kKoranyiTentInflation);
  const std::uint64_t quad = cfg.count("quadrature", 40000);
  const std::uint64_t expansion = cfg.count("tail_budget", 2048);
  const int offset = static_cast<int>(cfg.integer("inflation_offset", 4));
  if (offset < 1) throw ConfigError("inflation_offset must be positive");
  std::vector<int> dims;
  if (cfg.has("dim"))
    dims.push_back(config_dim(cfg));
  else
    dims = {1, 2};

  std::vector<PropertyRow> rows;
  for (int n : dims) {
    rows.push_back(property_from(check_polydisk_chain(n, samples, seed), n));
    rows.push_back(property_from(check_koranyi_chain(n, samples, seed), n));
    rows.push_back(property_from(check_mobius_invariance(n, samples, seed), n));
    const double radii[] = {0.5, 0.75, 0.9, 0.97, 0.99};
    rows.push_back(property_from(check_koranyi_carleson(n, radii, samples / 5, seed, inflation), n));
  }
  rows.push_back(oracle_equivalence(100, quad, seed));
  for (double eps : {0.25, 0.5, 1.0}) rows.push_back(submultiplicativity(eps, samples, seed));
  rows.push_back(young_comparability(samples, seed));
  for (double eps : {0.5, 1.0}) rows.push_back(generalized_holder(eps, trials, seed));

  const DyadicGrid g = config_grid(cfg, 1, 0.8, 4);
  if (g.dim() != 1) throw ConfigError("geometry-check: the grid suites run on the disk (dim 1)");
  r.grid_hash = format_hex(grid_hash(g));
  rows.push_back(young_maximal_bound(g, std::max<std::uint64_t>(1000, samples / 5), seed));

  const Symbol lg = Symbol::log_branch();
  const double bloch = bloch_norm(lg, 1).value;
  const auto jn = john_nirenberg_fit(g, lg, bloch, tents, budget, seed);
  PropertyRow jr{"john_nirenberg_decay", 1, jn.fit.points, 0, -jn.fit.slope, jn.fit.r2, false, ""};
  jr.passed = jn.fit.points >= 3 && -jn.fit.slope > 0.0 && jn.fit.r2 >= 0.9;
  jr.violations = jr.passed ? 0 : 1;
  jr.detail = "c2 = " + format_number(-jn.fit.slope) + ", R^2 = " + format_number(jn.fit.r2) + " on " +
              std::to_string(jn.fit.points) + " lambda points over " + std::to_string(tents) + " tents";
  rows.push_back(jr);

  const auto hb = harmonic_oscillation_bound(g, Symbol::harmonic("re_z1"), 10, expansion, seed);
  PropertyRow hr{"harmonic_oscillation_bound", 1, hb.points, 0, hb.fitted, hb.held_out, false, ""};
  hr.passed = std::isfinite(hb.fitted) && hb.fitted > 0.0 && hb.held_out <= 2.0 * hb.fitted;
  hr.violations = hr.passed ? 0 : 1;
  hr.detail = "fitted C = " + format_number(hb.fitted) + " on 5 tents, held-out max " + format_number(hb.held_out);
  rows.push_back(hr);

  rows.push_back(layer_overlap(g, std::max<std::uint64_t>(1000, samples / 10), seed, offset));
  for (int k : {1, 2, 3}) rows.push_back(layer_decay(g, k, std::max<std::uint64_t>(1024, samples / 12)));

  r.table = CsvTable({"property", "dim", "samples", "violations", "observed_min", "observed_max", "passed"});
  for (const auto& p : rows) {
    CsvTable::Row row;
    row << p.property << p.dim << p.samples << p.violations << p.observed_min << p.observed_max << p.passed;
    r.table.add(row);
    r.check(p.property + (p.dim > 0 ? " (n=" + std::to_string(p.dim) + ")" : ""), p.passed,
            p.detail.empty() ? std::to_string(p.violations) + " violations in " + std::to_string(p.samples) : p.detail);
  }
  stamp(r, cfg);
  return r;
}

}  // namespace blab
