#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "operators.hpp"

namespace blab {

// ---------------------------------------------------------------------------
// Young functions
// ---------------------------------------------------------------------------

enum class YoungKind { PsiEps, PhiEps, PlainLlogL };

inline double log_plus(double t) { return t > 1.0 ? std::log(t) : 0.0; }

struct YoungFunction {
  YoungKind kind = YoungKind::PsiEps;
  double eps = 1.0;

  static YoungFunction psi(double eps) { return {YoungKind::PsiEps, check(eps)}; }
  static YoungFunction phi(double eps) { return {YoungKind::PhiEps, check(eps)}; }
  static YoungFunction llogl() { return {YoungKind::PlainLlogL, 1.0}; }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind) {
      case YoungKind::PsiEps:
        return t * std::pow(std::log(std::exp(1.0) + t), eps);
      case YoungKind::PhiEps:
        return std::expm1(std::pow(t, 1.0 / eps));
      case YoungKind::PlainLlogL:
        return t * (1.0 + log_plus(t));
    }
    return 0.0;
  }

  // Solve Y(t) = y by bisection (Y is increasing).
  double inverse(double y) const {
    if (y <= 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while ((*this)(hi) < y) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      ((*this)(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  std::string name() const {
    switch (kind) {
      case YoungKind::PsiEps:
        return "psi_" + std::to_string(eps);
      case YoungKind::PhiEps:
        return "phi_" + std::to_string(eps);
      case YoungKind::PlainLlogL:
        return "llogl";
    }
    return "";
  }

 private:
  static double check(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("Young function: eps must lie in (0, 1]");
    return eps;
  }
};

// ---------------------------------------------------------------------------
// Luxembourg averages
// ---------------------------------------------------------------------------

inline constexpr double kLuxembourgTol = 1e-4;

// inf{c > 0 : F(c) <= 1} for F decreasing, searched in log space within [lo, hi].
// Returns +inf when F(hi) > 1.
template <typename F>
double infimal_constant(F&& value, double lo, double hi, double rel_tol) {
  if (value(hi) > 1.0) return std::numeric_limits<double>::infinity();
  if (value(lo) <= 1.0) return lo;
  while (hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    (value(mid) > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

// Luxembourg constant of a weighted profile: (1/|S|) sum_i w_i Y(a_i / c) <= 1.
inline double luxembourg(const Profile& p, const YoungFunction& y, double rel_tol = kLuxembourgTol) {
  if (p.entries.empty() || p.volume <= 0.0) return 0.0;
  double amax = 0.0;
  for (const auto& e : p.entries) {
    if (!std::isfinite(e.value)) throw std::domain_error("luxembourg: function is not finite on the region");
    amax = std::max(amax, e.value);
  }
  if (amax == 0.0) return 0.0;
  auto F = [&](double c) { return p.integral([&](double a) { return y(a / c); }) / p.volume; };
  double lo = amax, hi = amax;
  while (F(hi) > 1.0) hi *= 2.0;
  while (F(lo) <= 1.0 && lo > 1e-300) lo *= 0.5;
  return infimal_constant(F, lo, hi, rel_tol);
}

// Profile of h over a region by uniform sampling.
template <typename H>
Profile region_profile(H&& h, const Region& region, const Sampler& sampler, std::uint64_t budget) {
  const Proposal prop = region_proposal(region);
  Profile p;
  std::uint64_t hits = 0;
  std::vector<Profile::Entry> entries;
  detail::for_each_sample(sampler, budget, [&](Sampler& s) {
    CVec w = prop.draw(s);
    if (!region_contains(region, w)) return;
    ++hits;
    const double a = std::abs(h(std::span<const cplx>(w)));
    if (a != 0.0) entries.push_back({std::move(w), a, 1.0});
  });
  const auto exact = region_exact_volume(region);
  p.volume = exact ? *exact : prop.volume() * static_cast<double>(hits) / static_cast<double>(budget);
  // each accepted point stands for |S| / hits
  const double w = hits ? p.volume / static_cast<double>(hits) : 0.0;
  for (auto& e : entries) e.weight = w;
  p.entries = std::move(entries);
  return p;
}

template <typename H>
double luxembourg_average(H&& h, const Region& region, const YoungFunction& y, const Sampler& sampler,
                          std::uint64_t budget) {
  return luxembourg(region_profile(std::forward<H>(h), region, sampler, budget), y);
}

// Luxembourg averages of one test function over grid tents, cached per Young function.
class TentLuxembourg {
 public:
  TentLuxembourg(TentStats& stats, YoungFunction y) : stats_(&stats), y_(y) {}

  double operator()(KubeId k) {
    auto it = cache_.find({k.system, k.node});
    if (it != cache_.end()) return it->second;
    const double v = luxembourg(stats_->profile(k), y_);
    cache_.emplace(std::make_pair(k.system, k.node), v);
    return v;
  }

  TentStats& stats() { return *stats_; }
  const YoungFunction& young() const { return y_; }

 private:
  TentStats* stats_;
  YoungFunction y_;
  std::map<std::pair<int, int>, double> cache_;
};

// M_Psi f(z) = max over tents containing z of the Luxembourg average.
inline double young_maximal(TentLuxembourg& lux, std::span<const cplx> z) {
  const auto& g = lux.stats().grid();
  if (g.beyond_horizon(z)) throw HorizonError("young_maximal: point beyond the depth horizon");
  double m = 0.0;
  for (const KubeId k : g.tents_containing(z)) m = std::max(m, lux(k));
  return m;
}

// |{M_Psi f > Lambda}| by uniform ball sampling. The superlevel set is the union of
// tents with average > Lambda, so points past the horizon are judged by the deepest tents.
inline RealEstimate young_maximal_superlevel(TentLuxembourg& lux, double Lambda, const Sampler& sampler,
                                             std::uint64_t budget) {
  const auto& g = lux.stats().grid();
  const int n = g.dim();
  double hits = 0.0;
  detail::for_each_sample(sampler, budget, [&](Sampler& s) {
    const CVec w = sample_unit_ball(s, n);
    bool hit = false;
    for (const KubeId k : g.tents_containing(w))
      if (lux(k) > Lambda) {
        hit = true;
        break;
      }
    hits += hit ? 1.0 : 0.0;
  });
  const double p = hits / static_cast<double>(budget);
  const double vol = unit_ball_volume(n);
  return {vol * p, vol * std::sqrt(p * (1.0 - p) / static_cast<double>(budget)), budget, sampler.seed()};
}

// <|f g|>_S / (<f>_{Psi_eps,S} <g>_{Phi_eps,S}) on one shared sample of S.
template <typename F, typename G>
double holder_ratio(F&& f, G&& g, const Region& region, double eps, const Sampler& sampler, std::uint64_t budget) {
  const Proposal prop = region_proposal(region);
  Profile pf, pg;
  double prod = 0.0;
  std::uint64_t hits = 0;
  detail::for_each_sample(sampler, budget, [&](Sampler& s) {
    CVec w = prop.draw(s);
    if (!region_contains(region, w)) return;
    ++hits;
    const double a = std::abs(f(std::span<const cplx>(w))), b = std::abs(g(std::span<const cplx>(w)));
    prod += a * b;
    pf.entries.push_back({w, a, 1.0});
    pg.entries.push_back({std::move(w), b, 1.0});
  });
  if (hits == 0) return 0.0;
  pf.volume = pg.volume = static_cast<double>(hits);
  const double den = luxembourg(pf, YoungFunction::psi(eps)) * luxembourg(pg, YoungFunction::phi(eps));
  return den > 0.0 ? (prod / static_cast<double>(hits)) / den : 0.0;
}

inline double dyadic_maximal(TentStats& stats, std::span<const cplx> z) {
  const auto& g = stats.grid();
  if (g.beyond_horizon(z)) throw HorizonError("dyadic_maximal: point beyond the depth horizon");
  double m = 0.0;
  for (const KubeId k : g.tents_containing(z)) m = std::max(m, stats.mean_abs(k));
  return m;
}

inline double averaging_A_psi(TentLuxembourg& lux, std::span<const cplx> z) {
  const auto& g = lux.stats().grid();
  if (g.beyond_horizon(z)) throw HorizonError("averaging_A_psi: point beyond the depth horizon");
  double s = 0.0;
  for (const KubeId k : g.tents_containing(z)) s += lux(k);
  return s;
}

// ---------------------------------------------------------------------------
// Symbol norms
// ---------------------------------------------------------------------------

struct NormReport {
  double value = 0.0;
  bool infinite = false;
  std::string method;
  std::uint64_t budget = 0;
  std::optional<KubeId> witness_tent;
  CVec witness_point;
  CVec witness_partner;
};

// Sample centers: the origin, then for each shell 1-|z| = 2^{-j} the +-e_k axis
// points and `random_per_shell` random directions.
inline std::vector<CVec> stratified_centers(int n, int depth, int random_per_shell, std::uint64_t seed) {
  std::vector<CVec> out;
  out.push_back(CVec(static_cast<std::size_t>(n), cplx{0.0, 0.0}));
  Sampler s(seed, 0x63656e74ull);
  for (int j = 1; j <= depth; ++j) {
    const double r = 1.0 - std::ldexp(1.0, -j);
    for (int k = 0; k < n; ++k) {
      out.push_back(scaled(unit_vector(n, k), r));
      out.push_back(scaled(unit_vector(n, k), -r));
    }
    for (int i = 0; i < random_per_shell; ++i) out.push_back(scaled(sample_sphere(s, n), r));
  }
  return out;
}

// Centers on one shell 1-|z| = h: the +e_1 point plus random directions.
inline std::vector<CVec> shell_centers(int n, double h, int count, std::uint64_t seed) {
  std::vector<CVec> out{scaled(unit_vector(n), 1.0 - h)};
  Sampler s(seed, 0x7368656cull);
  for (int i = 1; i < count; ++i) out.push_back(scaled(sample_sphere(s, n), 1.0 - h));
  return out;
}

// sup |grad b(z)| (1 - |z|), sampled then refined by a shrinking local search.
inline NormReport bloch_norm(const Symbol& b, int n, int depth = 14, int random_per_shell = 64, std::uint64_t seed = 1) {
  if (!b.holomorphic()) throw std::invalid_argument("bloch_norm: symbol is not holomorphic");
  auto g = [&](std::span<const cplx> z) { return norm(*b.gradient(z)) * (1.0 - norm(z)); };
  NormReport rep;
  rep.method = "bloch_sampled_sup";
  double best = -1.0;
  for (const auto& z : stratified_centers(n, depth, random_per_shell, seed)) {
    const double v = g(z);
    if (v > best) {
      best = v;
      rep.witness_point = z;
    }
    ++rep.budget;
  }
  Sampler s(seed, 0x6c6f63ull);
  double step = 0.25 * std::max(1e-6, 1.0 - norm(rep.witness_point));
  for (int it = 0, fails = 0; it < 2000 && step > 1e-12; ++it) {
    CVec cand = rep.witness_point;
    for (auto& c : cand) c += step * s.complex_normal();
    ++rep.budget;
    if (!BallPoint::admissible(cand)) continue;
    const double v = g(cand);
    if (v > best) {
      best = v;
      rep.witness_point = std::move(cand);
      fails = 0;
      step = std::min(step * 1.5, 0.5 * (1.0 - norm(rep.witness_point)));
    } else if (++fails >= 20) {
      step *= 0.5;
      fails = 0;
    }
  }
  rep.value = best;
  return rep;
}

// Mean oscillation of b over uniform tent points.
inline double tent_oscillation(const DyadicGrid& grid, const Symbol& b, KubeId k, std::uint64_t budget = kTentAverageBudget) {
  const auto pts = tent_points(grid, k, budget);
  std::vector<cplx> v;
  v.reserve(pts.size());
  cplx mean{0.0, 0.0};
  for (const auto& w : pts) {
    v.push_back(b(w));
    mean += v.back();
  }
  mean /= static_cast<double>(v.size());
  double osc = 0.0;
  for (const auto& x : v) osc += std::abs(x - mean);
  return osc / static_cast<double>(v.size());
}

// All tents of the grid up to max_level (default: the whole horizon).
inline std::vector<KubeId> grid_tents(const DyadicGrid& grid, int max_level = -1) {
  if (max_level < 0 || max_level > grid.depth()) max_level = grid.depth();
  std::vector<KubeId> out;
  for (int s = 0; s < grid.systems(); ++s)
    for (int k = 0; k <= max_level; ++k)
      for (int id : grid.level(k)) out.push_back({s, id});
  return out;
}

inline NormReport bmo_norm_dyadic(const Symbol& b, const DyadicGrid& grid, int max_level = -1,
                                  std::uint64_t budget = kTentAverageBudget) {
  NormReport rep;
  rep.method = "bmo_dyadic_tents";
  for (const KubeId k : grid_tents(grid, max_level)) {
    const double v = tent_oscillation(grid, b, k, budget);
    rep.budget += budget;
    if (v > rep.value || !rep.witness_tent) {
      rep.value = v;
      rep.witness_tent = k;
    }
  }
  if (b.kind() == SymbolKind::Constant) rep.value = 0.0;
  return rep;
}

// Mean oscillation over D(z, r) (the ellipsoid sampler is exact for D(z, r)).
inline double ball_oscillation(const Symbol& b, const CVec& z, double r, const Sampler& sampler, std::uint64_t budget) {
  const Proposal prop = Proposal::ellipsoid(BallPoint(z), r);
  std::vector<cplx> v;
  v.reserve(budget);
  cplx mean{0.0, 0.0};
  detail::for_each_sample(sampler, budget, [&](Sampler& s) {
    CVec w = prop.draw(s);
    if (!BallPoint::admissible(w)) return;
    v.push_back(b(w));
    mean += v.back();
  });
  if (v.empty()) return 0.0;
  mean /= static_cast<double>(v.size());
  double osc = 0.0;
  for (const auto& x : v) osc += std::abs(x - mean);
  return osc / static_cast<double>(v.size());
}

inline NormReport bmo_r_norm(const Symbol& b, double r, const std::vector<CVec>& centers,
                             std::uint64_t budget = kTentAverageBudget, std::uint64_t seed = 1) {
  if (!(r > 0.0)) throw std::invalid_argument("bmo_r_norm: r must be positive");
  NormReport rep;
  rep.method = "bmo_r_sampled_centers";
  if (b.kind() == SymbolKind::Constant) return rep;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double v = ball_oscillation(b, centers[i], r, Sampler(seed, 0x626d6f72ull).substream(i), budget);
    rep.budget += budget;
    if (v > rep.value || rep.witness_point.empty()) {
      rep.value = v;
      rep.witness_point = centers[i];
    }
  }
  return rep;
}

// sup |b(z) - b(w)| over pairs w = phi_z(u), |u| <= tanh r, so d(z, w) <= r.
inline NormReport bo_norm(const Symbol& b, double r, const std::vector<CVec>& centers, int cloud = 256,
                          std::uint64_t seed = 1) {
  if (!(r > 0.0)) throw std::invalid_argument("bo_norm: r must be positive");
  if (centers.empty()) throw std::invalid_argument("bo_norm: no centers");
  const int n = static_cast<int>(centers.front().size());
  const double R = std::tanh(r) * (1.0 - 1e-12);
  Sampler s(seed, 0x626f6e6dull);
  std::vector<CVec> us;
  for (int i = 0; i < cloud; ++i) {
    CVec u = (i % 2 == 0) ? sample_sphere(s, n) : sample_unit_ball(s, n);
    for (auto& c : u) c *= R;
    us.push_back(std::move(u));
  }
  NormReport rep;
  rep.method = "bo_mobius_pairs";
  for (const auto& z : centers) {
    const cplx bz = b(z);
    for (const auto& u : us) {
      CVec w = mobius_involution(z, u);
      ++rep.budget;
      if (!BallPoint::admissible(w)) continue;
      const double v = std::abs(bz - b(w));
      if (v > rep.value || rep.witness_point.empty()) {
        rep.value = v;
        rep.witness_point = z;
        rep.witness_partner = std::move(w);
      }
    }
  }
  return rep;
}

inline constexpr double kExpOscLo = 1e-6;
inline constexpr double kExpOscHi = 1e6;
inline constexpr double kExpOscTol = 1e-3;

// Phi_eps Luxembourg constant of |b - <b>_K| on one tent.
inline double tent_exp_osc(const DyadicGrid& grid, const Symbol& b, KubeId k, double eps, std::uint64_t budget) {
  const auto pts = tent_points(grid, k, budget, 0x65786full);
  std::vector<double> dev;
  cplx mean{0.0, 0.0};
  std::vector<cplx> v;
  for (const auto& w : pts) {
    v.push_back(b(w));
    mean += v.back();
  }
  mean /= static_cast<double>(v.size());
  for (const auto& x : v) dev.push_back(std::abs(x - mean));
  const YoungFunction phi = YoungFunction::phi(eps);
  auto F = [&](double c) {
    double s = 0.0;
    for (double d : dev) s += phi(d / c);
    return s / static_cast<double>(dev.size());
  };
  return infimal_constant(F, kExpOscLo, kExpOscHi, kExpOscTol);
}

// Infimal c with sup_K <Phi_eps(|b - <b>_K| / c)>_K <= 1. The witness tent is re-run
// at four times the budget; growth beyond 2x marks the integral as divergent.
inline NormReport exp_osc_norm(const Symbol& b, double eps, const DyadicGrid& grid, int max_level = -1,
                               std::uint64_t budget = kTentAverageBudget) {
  NormReport rep;
  rep.method = "exp_osc_phi_luxembourg";
  if (b.kind() == SymbolKind::Constant) {
    rep.value = 0.0;
    return rep;
  }
  for (const KubeId k : grid_tents(grid, max_level)) {
    const double c = tent_exp_osc(grid, b, k, eps, budget);
    rep.budget += budget;
    if (c > rep.value || !rep.witness_tent) {
      rep.value = c;
      rep.witness_tent = k;
    }
  }
  if (std::isinf(rep.value)) {
    rep.infinite = true;
    return rep;
  }
  const double check = tent_exp_osc(grid, b, *rep.witness_tent, eps, 4 * budget);
  if (std::isinf(check) || check > 2.0 * rep.value) rep.infinite = true;
  if (rep.infinite) rep.value = std::numeric_limits<double>::infinity();
  return rep;
}

// Fraction of the tent where |b - <b>_K| > lambda, for each lambda.
inline std::vector<double> oscillation_tail(const DyadicGrid& grid, const Symbol& b, KubeId k,
                                            std::span<const double> lambdas, std::uint64_t budget) {
  const auto pts = tent_points(grid, k, budget, 0x6a6eull);
  std::vector<cplx> v;
  cplx mean{0.0, 0.0};
  for (const auto& w : pts) {
    v.push_back(b(w));
    mean += v.back();
  }
  mean /= static_cast<double>(v.size());
  std::vector<double> out(lambdas.size(), 0.0);
  for (const auto& x : v) {
    const double d = std::abs(x - mean);
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      if (d > lambdas[i]) out[i] += 1.0;
  }
  for (auto& o : out) o /= static_cast<double>(v.size());
  return out;
}

// ---------------------------------------------------------------------------
// L log L functional
// ---------------------------------------------------------------------------

struct LloglValue {
  double value = 0.0;
  double std_err = 0.0;
  bool exact = true;  // false when overlapping regions forced the MC fallback
};

inline double llogl_integrand(double x, double eps) { return x * std::pow(1.0 + log_plus(x), eps); }

// Overlap between two regions, detected by sampling the first and testing the second.
inline bool regions_overlap(const Region& a, const Region& b, std::uint64_t samples = 4096) {
  const Proposal pa = region_proposal(a);
  Sampler s(0x6f766cull, a.index() * 131 + b.index());
  for (std::uint64_t i = 0; i < samples; ++i) {
    CVec w = pa.draw(s);
    if (region_contains(a, w) && region_contains(b, w)) return true;
  }
  return false;
}

// integral of (|f|/lambda)(1 + log+(|f|/lambda))^eps
inline LloglValue llogl_functional(const TestFunction& f, double lambda, double eps, std::uint64_t budget = 1u << 16) {
  if (!(lambda > 0.0)) throw std::invalid_argument("llogl_functional: lambda must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("llogl_functional: eps must lie in (0, 1]");
  const auto& terms = f.terms();
  bool disjoint = true;
  for (std::size_t i = 0; i < terms.size() && disjoint; ++i)
    for (std::size_t j = i + 1; j < terms.size() && disjoint; ++j)
      if (regions_overlap(terms[i].region, terms[j].region) || regions_overlap(terms[j].region, terms[i].region))
        disjoint = false;
  LloglValue out;
  if (disjoint) {
    double var = 0.0;
    for (const auto& t : terms) {
      const double g = llogl_integrand(std::abs(t.coeff) / lambda, eps);
      out.value += t.volume.value * g;
      var += std::pow(t.volume.std_err * g, 2);
    }
    out.std_err = std::sqrt(var);
    out.exact = out.std_err == 0.0;
    return out;
  }
  out.exact = false;
  double var = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    auto h = [&](std::span<const cplx> w) -> double {
      return llogl_integrand(std::abs(f(w)) / lambda, eps) / f.multiplicity(w);
    };
    const auto e = integral_mc<double>(h, terms[i].region, Sampler(0x6c6c6full, i), budget);
    out.value += e.value;
    var += e.std_err * e.std_err;
  }
  out.std_err = std::sqrt(var);
  return out;
}

}  // namespace blab
