#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "region.hpp"

namespace blab {

// Samples are drawn in blocks; block b uses substream b of the caller's sampler,
// so results depend only on (seed, stream, budget).
inline constexpr std::uint64_t kBlockSize = 4096;

namespace detail {

template <typename F>
void for_each_sample(const Sampler& sampler, std::uint64_t budget, F&& body) {
  if (budget == 0) throw std::invalid_argument("Monte Carlo budget must be positive");
  for (std::uint64_t start = 0, block = 0; start < budget; start += kBlockSize, ++block) {
    Sampler s = sampler.substream(block);
    const std::uint64_t end = std::min(budget, start + kBlockSize);
    for (std::uint64_t i = start; i < end; ++i) body(s);
  }
}

struct Moments {
  // Sums are kept around the first value, so constant data give exactly zero variance.
  cplx shift{0.0, 0.0};
  double sum_re = 0.0, sum_im = 0.0, sq_re = 0.0, sq_im = 0.0;
  std::uint64_t count = 0;

  void add(cplx v) {
    if (count == 0) shift = v;
    const cplx d = v - shift;
    sum_re += d.real();
    sum_im += d.imag();
    sq_re += d.real() * d.real();
    sq_im += d.imag() * d.imag();
    ++count;
  }
  cplx mean() const { return shift + cplx{sum_re / count, sum_im / count}; }
  // Standard error of the mean; for complex values the two components are combined.
  double mean_stderr() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double vr = std::max(0.0, (sq_re - sum_re * sum_re / n) / (n - 1.0));
    const double vi = std::max(0.0, (sq_im - sum_im * sum_im / n) / (n - 1.0));
    return std::sqrt((vr + vi) / n);
  }
};

}  // namespace detail

// Uniform draw in the ball of C^n from the spherical shell r_lo <= |z| < r_hi.
inline CVec sample_ball_shell(Sampler& s, int n, double r_lo, double r_hi) {
  CVec dir = sample_sphere(s, n);
  const double a = std::pow(r_lo, 2 * n), b = std::pow(r_hi, 2 * n);
  const double r = std::pow(s.uniform(a, b), 1.0 / (2.0 * n));
  for (auto& c : dir) c *= r;
  return dir;
}

inline BallPoint sample_ball(Sampler& s, int n) {
  CVec v = sample_unit_ball(s, n);
  if (!BallPoint::admissible(v)) {
    for (auto& c : v) c *= 0.5;
  }
  return BallPoint(std::move(v));
}

// vol(region) * mean(h) from uniform proposals, rejecting points outside the region.
template <typename T, typename H>
MCEstimate<T> integral_mc(H&& h, const Region& region, const Sampler& sampler, std::uint64_t budget) {
  const Proposal prop = region_proposal(region);
  detail::Moments m;
  detail::for_each_sample(sampler, budget, [&](Sampler& s) {
    CVec w = prop.draw(s);
    m.add(region_contains(region, w) ? cplx(h(std::span<const cplx>(w))) : cplx{0.0, 0.0});
  });
  MCEstimate<T> out;
  const cplx mean = m.mean();
  if constexpr (std::is_same_v<T, double>) {
    out.value = prop.volume() * mean.real();
  } else {
    out.value = prop.volume() * mean;
  }
  out.std_err = prop.volume() * m.mean_stderr();
  out.samples = budget;
  out.seed = sampler.seed();
  return out;
}

// |{w in superset : g(w) > lambda}| for several thresholds from one set of samples.
template <typename G>
std::vector<MeasureEstimate> superlevel_profile(G&& g, std::span<const double> lambdas, const Region& superset,
                                                const Sampler& sampler, std::uint64_t budget) {
  const Proposal prop = region_proposal(superset);
  std::vector<std::uint64_t> hits(lambdas.size(), 0);
  detail::for_each_sample(sampler, budget, [&](Sampler& s) {
    CVec w = prop.draw(s);
    if (!region_contains(superset, w)) return;
    const double v = g(std::span<const cplx>(w));
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      if (v > lambdas[i]) ++hits[i];
  });
  std::vector<MeasureEstimate> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double p = static_cast<double>(hits[i]) / static_cast<double>(budget);
    out[i].value = prop.volume() * p;
    out[i].std_err = prop.volume() * std::sqrt(p * (1.0 - p) / static_cast<double>(budget));
    out[i].hits = hits[i];
    out[i].total = budget;
    out[i].tag = region_name(superset);
  }
  return out;
}

template <typename G>
MeasureEstimate superlevel_measure(G&& g, double lambda, const Sampler& sampler, std::uint64_t budget,
                                   const Region& superset) {
  const double l[1] = {lambda};
  return superlevel_profile(std::forward<G>(g), l, superset, sampler, budget).front();
}

// Dyadic shells 1-|z| in [2^{-j-1}, 2^{-j}) for j < depth, plus the core |z| < 1/2
// folded into j = 0 and the rim 1-|z| < 2^{-depth} as the last stratum.
struct Shell {
  double r_lo, r_hi;
};

inline std::vector<Shell> dyadic_shells(int depth) {
  std::vector<Shell> shells;
  shells.push_back({0.0, 0.5});
  for (int j = 1; j < depth; ++j) shells.push_back({1.0 - std::ldexp(1.0, -j), 1.0 - std::ldexp(1.0, -j - 1)});
  shells.push_back({1.0 - std::ldexp(1.0, -depth), 1.0});
  return shells;
}

// Stratified version over the whole ball, equal budget per shell.
template <typename G>
std::vector<MeasureEstimate> superlevel_profile_shells(G&& g, std::span<const double> lambdas, int n, int depth,
                                                       const Sampler& sampler, std::uint64_t budget) {
  const auto shells = dyadic_shells(depth);
  const std::uint64_t per = std::max<std::uint64_t>(1, budget / shells.size());
  std::vector<double> value(lambdas.size(), 0.0), var(lambdas.size(), 0.0);
  std::vector<std::uint64_t> hits_total(lambdas.size(), 0);
  for (std::size_t si = 0; si < shells.size(); ++si) {
    const auto sh = shells[si];
    const double vol = unit_ball_volume(n) * (std::pow(sh.r_hi, 2 * n) - std::pow(sh.r_lo, 2 * n));
    std::vector<std::uint64_t> hits(lambdas.size(), 0);
    detail::for_each_sample(sampler.substream(1000003 + si), per, [&](Sampler& s) {
      CVec w = sample_ball_shell(s, n, sh.r_lo, sh.r_hi);
      if (!BallPoint::admissible(w)) return;
      const double v = g(std::span<const cplx>(w));
      for (std::size_t i = 0; i < lambdas.size(); ++i)
        if (v > lambdas[i]) ++hits[i];
    });
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const double p = static_cast<double>(hits[i]) / static_cast<double>(per);
      value[i] += vol * p;
      var[i] += vol * vol * p * (1.0 - p) / static_cast<double>(per);
      hits_total[i] += hits[i];
    }
  }
  std::vector<MeasureEstimate> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    out[i] = {value[i], std::sqrt(var[i]), hits_total[i], per * shells.size(), "ball_shells"};
  }
  return out;
}

// Split estimator: a focus region sampled on its own, plus the rest of the ball
// sampled with the focus rejected. Both halves get half of the budget.
template <typename G>
std::vector<MeasureEstimate> superlevel_profile_focused(G&& g, std::span<const double> lambdas, int n,
                                                        const Region& focus, const Sampler& sampler,
                                                        std::uint64_t budget) {
  const std::uint64_t half = std::max<std::uint64_t>(1, budget / 2);
  auto inner = superlevel_profile(g, lambdas, focus, sampler.substream(11), half);
  auto outer_g = [&](std::span<const cplx> w) -> double {
    if (region_contains(focus, w)) return -1.0;
    return g(w);
  };
  auto outer = superlevel_profile_shells(outer_g, lambdas, n, 12, sampler.substream(12), half);
  std::vector<MeasureEstimate> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    out[i].value = inner[i].value + outer[i].value;
    out[i].std_err = std::hypot(inner[i].std_err, outer[i].std_err);
    out[i].hits = inner[i].hits + outer[i].hits;
    out[i].total = inner[i].total + outer[i].total;
    out[i].tag = "focused:" + region_name(focus);
  }
  return out;
}

}  // namespace blab
