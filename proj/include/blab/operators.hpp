#pragma once

#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>

#include "symbol.hpp"
#include "testfn.hpp"

namespace blab {

// ---------------------------------------------------------------------------
// Kernel and closed forms
// ---------------------------------------------------------------------------

inline constexpr double kKernelSingularity = 1e-14;

inline cplx bergman_kernel(std::span<const cplx> z, std::span<const cplx> w) {
  const cplx d = 1.0 - inner(z, w);
  if (std::abs(d) < kKernelSingularity) throw std::domain_error("bergman_kernel: near-singular pair");
  const int n = static_cast<int>(z.size());
  return bergman_constant(n) / std::pow(d, n + 1);
}

// P applied to the normalized indicator of B((s,0,...,0), 1-s).
inline cplx project_indicator_ball(int n, double s, std::span<const cplx> z) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("project_indicator_ball: need 0 < s < 1");
  return bergman_constant(n) / std::pow(1.0 - z[0] * s, n + 1);
}

// P applied to the (unnormalized) indicator of E(z0, rhat).
inline cplx project_indicator_polydisk(const BallPoint& z0, double rhat, std::span<const cplx> w) {
  if (!polydisk_inside_ball(z0, rhat)) throw std::domain_error("project_indicator_polydisk: polydisk escapes the ball");
  const int n = z0.dim();
  return bergman_constant(n) * polydisk_volume(n, rhat) / std::pow(1.0 - inner(w, z0.coords()), n + 1);
}

// [conj b, P] of the normalized indicator of a ball or polydisk centred at z0, for
// holomorphic b: by the mean-value property only the centre survives.
inline cplx commutator_centered(const Symbol& b, std::span<const cplx> z0, std::span<const cplx> z) {
  if (!b.holomorphic()) throw std::invalid_argument("closed-form commutator needs a holomorphic symbol");
  const int n = static_cast<int>(z.size());
  return bergman_constant(n) * std::conj(b(z) - b(z0)) / std::pow(1.0 - inner(z, z0), n + 1);
}

// b = Log(1 - z_1), f the normalized indicator of B((s,0,...,0), 1-s).
inline cplx commutator_log_indicator(int n, double s, std::span<const cplx> z) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("commutator_log_indicator: need 0 < s < 1");
  return bergman_constant(n) * std::conj(std::log((1.0 - z[0]) / (1.0 - s))) / std::pow(1.0 - z[0] * s, n + 1);
}

// f_k the normalized indicator of B(z_k, (1 - |z_k|)/2).
inline cplx commutator_shrinking_family(const Symbol& b, const BallPoint& zk, std::span<const cplx> z) {
  return commutator_centered(b, zk.coords(), z);
}

inline EuclideanBall shrinking_ball(const BallPoint& zk) { return EuclideanBall{zk, 0.5 * (1.0 - zk.norm())}; }

inline EuclideanBall counterexample_ball(int n, double s) { return EuclideanBall{BallPoint::on_axis(n, s), 1.0 - s}; }

// ---------------------------------------------------------------------------
// Quadrature: per-term stratified MC, uniform inside each region
// ---------------------------------------------------------------------------

template <typename G>
ComplexEstimate term_quadrature(const TestFunction& f, std::span<const cplx> z, G&& g, const Sampler& sampler,
                                std::uint64_t budget) {
  if (budget == 0) throw std::invalid_argument("quadrature budget must be positive");
  ComplexEstimate out{{0.0, 0.0}, 0.0, 0, sampler.seed()};
  double var = 0.0;
  const auto& terms = f.terms();
  const std::uint64_t per = std::max<std::uint64_t>(1, budget / std::max<std::size_t>(1, terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Term& t = terms[i];
    const std::uint64_t b = region_contains(t.region, z) ? 2 * per : per;
    auto h = [&](std::span<const cplx> w) { return t.coeff * g(w); };
    const auto e = integral_mc<cplx>(h, t.region, sampler.substream(i), b);
    out.value += e.value;
    var += e.std_err * e.std_err;
    out.samples += b;
  }
  out.std_err = std::sqrt(var);
  return out;
}

inline ComplexEstimate projection_quadrature(const TestFunction& f, std::span<const cplx> z, const Sampler& sampler,
                                             std::uint64_t budget) {
  auto k = [&](std::span<const cplx> w) { return bergman_kernel(z, w); };
  return term_quadrature(f, z, k, sampler, budget);
}

inline ComplexEstimate positive_projection_quadrature(const TestFunction& f, std::span<const cplx> z,
                                                      const Sampler& sampler, std::uint64_t budget) {
  const int n = f.dim();
  auto k = [&](std::span<const cplx> w) -> cplx {
    return bergman_constant(n) / std::pow(std::abs(1.0 - inner(z, w)), n + 1);
  };
  return term_quadrature(f, z, k, sampler, budget);
}

inline ComplexEstimate commutator_quadrature(const Symbol& b, const TestFunction& f, std::span<const cplx> z,
                                             const Sampler& sampler, std::uint64_t budget) {
  const cplx bz = std::conj(b(z));
  auto k = [&](std::span<const cplx> w) { return (bz - std::conj(b(w))) * bergman_kernel(z, w); };
  return term_quadrature(f, z, k, sampler, budget);
}

// ---------------------------------------------------------------------------
// Dyadic operators. Tents containing z form finite chains once z is inside the
// horizon, so the sums below have no truncated tail for such z.
// ---------------------------------------------------------------------------

// Tent statistics of one test function (and optionally one symbol), computed once per tent.
class TentStats {
 public:
  TentStats(const DyadicGrid& grid, TentVolumeCache& volumes, const TestFunction& f,
            std::uint64_t budget = kTentAverageBudget)
      : grid_(&grid), volumes_(&volumes), f_(&f), budget_(budget) {}

  const DyadicGrid& grid() const { return *grid_; }
  const TestFunction& function() const { return *f_; }
  double volume(KubeId k) { return (*volumes_)(k).value; }

  const Profile& profile(KubeId k) {
    auto it = profiles_.find(key(k));
    if (it == profiles_.end()) it = profiles_.emplace(key(k), tent_profile(*grid_, k, volume(k), *f_, budget_)).first;
    return it->second;
  }

  double mean_abs(KubeId k) { return profile(k).mean_abs(); }

 private:
  static std::pair<int, int> key(KubeId k) { return {k.system, k.node}; }
  const DyadicGrid* grid_;
  TentVolumeCache* volumes_;
  const TestFunction* f_;
  std::uint64_t budget_;
  std::map<std::pair<int, int>, Profile> profiles_;
};

// Tent means of a symbol, 4096 uniform tent points per tent.
class SymbolTentMeans {
 public:
  SymbolTentMeans(const DyadicGrid& grid, const Symbol& b, std::uint64_t budget = kTentAverageBudget)
      : grid_(&grid), b_(&b), budget_(budget) {}

  cplx mean(KubeId k) {
    auto it = means_.find({k.system, k.node});
    if (it != means_.end()) return it->second;
    cplx s{0.0, 0.0};
    const auto pts = tent_points(*grid_, k, budget_);
    for (const auto& w : pts) s += (*b_)(w);
    s /= static_cast<double>(pts.size());
    means_.emplace(std::make_pair(k.system, k.node), s);
    return s;
  }

  const Symbol& symbol() const { return *b_; }

 private:
  const DyadicGrid* grid_;
  const Symbol* b_;
  std::uint64_t budget_;
  std::map<std::pair<int, int>, cplx> means_;
};

// sum over tents K containing z of <|f|>_K
inline double dyadic_majorant(TentStats& stats, std::span<const cplx> z) {
  const auto& g = stats.grid();
  if (g.beyond_horizon(z)) throw HorizonError("dyadic_majorant: point beyond the depth horizon");
  if (stats.function().is_zero()) return 0.0;
  double s = 0.0;
  for (const KubeId k : g.tents_containing(z)) s += stats.mean_abs(k);
  return s;
}

// T_b f(z) = sum_K |b(z) - <b>_K| <|f|>_K 1_K(z)
inline double model_T_b(TentStats& stats, SymbolTentMeans& means, std::span<const cplx> z) {
  const auto& g = stats.grid();
  if (g.beyond_horizon(z)) throw HorizonError("model_T_b: point beyond the depth horizon");
  if (stats.function().is_zero() || means.symbol().kind() == SymbolKind::Constant) return 0.0;
  const cplx bz = means.symbol()(z);
  double s = 0.0;
  for (const KubeId k : g.tents_containing(z)) {
    const double a = stats.mean_abs(k);
    if (a > 0.0) s += std::abs(bz - means.mean(k)) * a;
  }
  return s;
}

// T_b^* f(z) = sum_K <|b - <b>_K| |f|>_K 1_K(z)
inline double model_T_b_star(TentStats& stats, SymbolTentMeans& means, std::span<const cplx> z) {
  const auto& g = stats.grid();
  if (g.beyond_horizon(z)) throw HorizonError("model_T_b_star: point beyond the depth horizon");
  if (stats.function().is_zero() || means.symbol().kind() == SymbolKind::Constant) return 0.0;
  const Symbol& b = means.symbol();
  double s = 0.0;
  for (const KubeId k : g.tents_containing(z)) {
    const Profile& p = stats.profile(k);
    if (p.entries.empty()) continue;
    const cplx mb = means.mean(k);
    double acc = 0.0;
    for (const auto& e : p.entries) acc += e.weight * e.value * std::abs(b(e.point) - mb);
    s += acc / p.volume;
  }
  return s;
}

}  // namespace blab
