#pragma once

// f_k = normalized indicator of B(z_k, (1 - |z_k|)/2), z_k = (1 - 2^{-k}, 0, ...).
// Unbounded probe Log(1 - z_1): B(0, 1/2) lies in {|[conj b, P] f_k| > lambda_k}, so
// lambda_k |B(0, 1/2)| grows with k. Bounded probe z_1: lambda * measure stays bounded.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "../operators.hpp"
#include "common.hpp"

namespace blab {

struct HalfBallScan {
  double inf_osc = 0.0;  // sampled inf over B(0,1/2) of |b - b(z_k)|
  std::uint64_t samples = 0, misses = 0;
};

// Half the samples on the sphere |z| = 1/2, where the inf of |b - c| sits for holomorphic b.
inline HalfBallScan half_ball_scan(const Symbol& b, const BallPoint& zk, double lambda, const Sampler& sampler,
                                   std::uint64_t count) {
  const int n = zk.dim();
  const cplx bk = b(zk);
  HalfBallScan out;
  out.inf_osc = std::numeric_limits<double>::infinity();
  Sampler s = sampler;
  for (std::uint64_t i = 0; i < count; ++i) {
    CVec z = (i % 2 == 0) ? sample_sphere(s, n) : sample_unit_ball(s, n);
    for (auto& c : z) c *= 0.5;
    out.inf_osc = std::min(out.inf_osc, std::abs(b(z) - bk));
    if (lambda > 0.0) {
      ++out.samples;
      if (!(std::abs(commutator_shrinking_family(b, zk, z)) > lambda)) ++out.misses;
    }
  }
  return out;
}

inline double hinfty_lambda(int n, double inf_osc) { return bergman_constant(n) / std::ldexp(1.0, n + 2) * inf_osc; }

inline ExperimentResult cmd_hinfty(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.command = "hinfty";
  const int n = config_dim(cfg, 1);
  const std::uint64_t seed = config_seed(cfg);
  const std::uint64_t budget = cfg.count("budget", 1u << 18);
  const std::uint64_t scan = cfg.count("calibration", 10000);
  const int shells = static_cast<int>(cfg.integer("shells", 14));
  const auto lambdas = lambda_grid(cfg);
  std::vector<int> ks;
  for (double k : cfg.numbers("k_list", {6, 7, 8, 9, 10, 11, 12})) {
    if (k != std::floor(k) || k < 2 || k > 30) throw ConfigError("k_list entries must be integers in [2, 30]");
    ks.push_back(static_cast<int>(k));
  }
  std::sort(ks.begin(), ks.end());
  const double half_vol = euclidean_ball_volume(n, 0.5);

  r.table = CsvTable({"probe", "k", "lambda", "inf_osc", "measure", "measure_stderr", "product", "product_lo",
                      "product_hi", "half_ball_product", "contained_samples", "contained_misses"});
  Series unb{"log: lambda_k |B(0,1/2)|", {}, {}}, bnd{"z1: max_lambda product", {}, {}};

  // unbounded probe
  const Symbol lg = Symbol::log_branch();
  std::vector<double> half_products;
  std::uint64_t misses = 0;
  bool offsets_ok = true, measure_ok = true;
  for (int k : ks) {
    const BallPoint zk = BallPoint::on_axis(n, 1.0 - std::ldexp(1.0, -k));
    const Sampler root(seed, 0x68696e00ull + static_cast<std::uint64_t>(k));
    const double lam = hinfty_lambda(n, half_ball_scan(lg, zk, 0.0, root.substream(0), scan).inf_osc);
    const auto hb = half_ball_scan(lg, zk, lam, root.substream(1), scan);
    misses += hb.misses;
    const double inf_osc = lam / hinfty_lambda(n, 1.0);
    offsets_ok = offsets_ok && std::abs(inf_osc - k * std::numbers::ln2) <= std::numbers::ln2 + std::numbers::pi;
    auto g = [&](std::span<const cplx> z) { return std::abs(commutator_shrinking_family(lg, zk, z)); };
    const double l1[1] = {lam};
    const auto m = superlevel_profile_shells(g, l1, n, shells, root.substream(2), budget).front();
    measure_ok = measure_ok && m.value + 3.0 * m.std_err >= half_vol;
    const auto iv = three_sigma(m.value, m.std_err);
    half_products.push_back(lam * half_vol);
    CsvTable::Row row;
    row << "log" << k << lam << inf_osc << m.value << m.std_err << lam * m.value << lam * std::max(0.0, iv.lo)
        << lam * iv.hi << lam * half_vol << hb.samples << hb.misses;
    r.table.add(row);
    unb.x.push_back(k);
    unb.y.push_back(lam * half_vol);
  }
  r.check("log: B(0,1/2) inside the superlevel set (zero misses)", misses == 0, std::to_string(misses) + " misses");
  r.check("log: inf |b - b(z_k)| within ln2 + pi of k ln2", offsets_ok);
  r.check("log: measure consistent with |B(0,1/2)| lower bound", measure_ok);
  const auto at = [&](int k) -> std::optional<double> {
    const auto it = std::find(ks.begin(), ks.end(), k);
    if (it == ks.end()) return std::nullopt;
    return half_products[static_cast<std::size_t>(it - ks.begin())];
  };
  if (at(6) && at(12))
    r.check("log: lambda_k |B(0,1/2)| doubles from k=6 to k=12", *at(12) >= 2.0 * *at(6),
            "ratio " + format_number(*at(12) / *at(6)));
  else
    r.check("log: lambda_k |B(0,1/2)| grows across k", half_products.back() > half_products.front());

  // bounded probe
  const Symbol z1 = Symbol::monomial([&] {
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    a[0] = 1;
    return a;
  }());
  std::vector<double> row_max;
  double fitted = 0.0;
  for (int k : ks) {
    const BallPoint zk = BallPoint::on_axis(n, 1.0 - std::ldexp(1.0, -k));
    const Sampler root(seed, 0x68696f00ull + static_cast<std::uint64_t>(k));
    auto g = [&](std::span<const cplx> z) { return std::abs(commutator_shrinking_family(z1, zk, z)); };
    const auto ms = superlevel_profile_shells(g, lambdas, n, shells, root, budget);
    double mx = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const auto iv = three_sigma(ms[i].value, ms[i].std_err);
      mx = std::max(mx, lambdas[i] * iv.hi);
      CsvTable::Row row;
      row << "z1" << k << lambdas[i] << "" << ms[i].value << ms[i].std_err << lambdas[i] * ms[i].value
          << lambdas[i] * std::max(0.0, iv.lo) << lambdas[i] * iv.hi << "" << "" << "";
      r.table.add(row);
    }
    row_max.push_back(mx);
    fitted = std::max(fitted, mx);
    bnd.x.push_back(k);
    bnd.y.push_back(mx);
  }
  r.check("z1: weak-type product bounded by one constant", std::isfinite(fitted) && fitted > 0.0,
          "C = " + format_number(fitted));
  r.check("z1: product does not grow with k", row_max.back() <= 2.0 * row_max.front(),
          "max at k_max / max at k_min = " + format_number(row_max.back() / row_max.front()));
  r.plot = Plot{"H-infinity dichotomy", "k", "product", false, true, {unb, bnd}};
  stamp(r, cfg);
  return r;
}

}  // namespace blab
