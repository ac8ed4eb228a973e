#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dyadic.hpp"

namespace blab {

// Volume of a region: closed form when available, otherwise a fixed-seed MC estimate.
inline RealEstimate region_volume(const Region& region, std::uint64_t budget = 1u << 18) {
  if (auto v = region_exact_volume(region)) return {*v, 0.0, 0, 0};
  auto one = [](std::span<const cplx>) { return 1.0; };
  return integral_mc<double>(one, region, Sampler(0x766f6cull, region.index()), budget);
}

struct Term {
  cplx coeff;
  Region region;
  RealEstimate volume;
};

// f = sum of coeff * 1_region.
class TestFunction {
 public:
  explicit TestFunction(int dim) : dim_(dim) {}

  static TestFunction zero(int dim) { return TestFunction(dim); }

  static TestFunction indicator(const Region& region, cplx coeff = 1.0) {
    TestFunction f(region_dim(region));
    f.add(coeff, region);
    return f;
  }

  // |region|^{-1} 1_region, so that the integral of |f| is one.
  static TestFunction normalized_indicator(const Region& region) {
    TestFunction f(region_dim(region));
    const auto v = region_volume(region);
    if (!(v.value > 0.0)) throw std::domain_error("normalized_indicator: empty region");
    f.terms_.push_back({1.0 / v.value, region, v});
    return f;
  }

  TestFunction& add(cplx coeff, const Region& region) {
    if (region_dim(region) != dim_) throw std::invalid_argument("TestFunction: dimension mismatch");
    if (coeff != cplx{0.0, 0.0}) terms_.push_back({coeff, region, region_volume(region)});
    return *this;
  }

  TestFunction scaled(double a) const {
    TestFunction g = *this;
    for (auto& t : g.terms_) t.coeff *= a;
    return g;
  }

  int dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  cplx operator()(std::span<const cplx> w) const {
    cplx v{0.0, 0.0};
    for (const auto& t : terms_)
      if (region_contains(t.region, w)) v += t.coeff;
    return v;
  }

  int multiplicity(std::span<const cplx> w) const {
    int m = 0;
    for (const auto& t : terms_) m += region_contains(t.region, w) ? 1 : 0;
    return m;
  }

  bool in_support(std::span<const cplx> w) const { return multiplicity(w) > 0; }

  // Upper bound for sup |f|.
  double sup_bound() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.coeff);
    return s;
  }

  // Integral of |f|; exact for a single term with a closed-form volume.
  std::optional<double> exact_mass() const {
    if (terms_.empty()) return 0.0;
    if (terms_.size() == 1 && terms_[0].volume.std_err == 0.0) return std::abs(terms_[0].coeff) * terms_[0].volume.value;
    return std::nullopt;
  }

 private:
  int dim_;
  std::vector<Term> terms_;
};

// Weighted sample of f over a set S: sum_i weight_i * phi(value_i) estimates
// the integral of phi(|f|) over S for any phi with phi(0) = 0. Points where f
// vanishes are dropped.
struct Profile {
  struct Entry {
    CVec point;
    double value;
    double weight;
  };
  std::vector<Entry> entries;
  double volume = 0.0;  // |S|

  template <typename Phi>
  double integral(Phi&& phi) const {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight * phi(e.value);
    return s;
  }

  double mean_abs() const {
    if (volume <= 0.0) return 0.0;
    return integral([](double a) { return a; }) / volume;
  }
};

// Profile of |f| over the tent of `kube`. Each term is sampled where it is cheaper:
// inside its own region when that is smaller than the tent, otherwise inside the tent.
// Overlaps are shared out by 1/multiplicity.
inline Profile tent_profile(const DyadicGrid& grid, KubeId kube, double tent_vol, const TestFunction& f,
                            std::uint64_t budget = kTentAverageBudget) {
  Profile p;
  p.volume = tent_vol;
  if (f.is_zero()) return p;
  const Sampler base(grid.config().seed ^ 0x70726f66ull, kube_stream(kube));
  const auto& terms = f.terms();
  std::optional<std::vector<CVec>> tent_pts;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Term& t = terms[i];
    auto take = [&](const CVec& w, double weight) {
      if (!region_contains(t.region, w)) return;
      const double a = std::abs(f(w));
      if (a == 0.0) return;
      p.entries.push_back({w, a, weight / f.multiplicity(w)});
    };
    if (t.volume.value < tent_vol) {
      const Proposal prop = region_proposal(t.region);
      const double weight = prop.volume() / static_cast<double>(budget);
      detail::for_each_sample(base.substream(i), budget, [&](Sampler& s) {
        CVec w = prop.draw(s);
        if (grid.tent_contains(kube, w)) take(w, weight);
      });
    } else {
      if (!tent_pts) tent_pts = tent_points(grid, kube, budget, 0x7066ull);
      const double weight = tent_vol / static_cast<double>(tent_pts->size());
      for (const auto& w : *tent_pts) take(w, weight);
    }
  }
  return p;
}

}  // namespace blab
