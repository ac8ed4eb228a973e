#pragma once

// Sampled checks of the containment chains between polydisks, Bergman balls,
// Koranyi balls and Carleson tents. Test points are drawn from a slightly
// inflated copy of each set, so both sides of every boundary are exercised.

#include <algorithm>
#include <cmath>
#include <string>

#include "montecarlo.hpp"

namespace blab {

struct ContainmentReport {
  std::string name;
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double observed_min = 0.0;  // property-specific observed range
  double observed_max = 0.0;
  bool ok() const { return violations == 0; }
};

inline constexpr double kKoranyiLowerConstantScale = 1.0 / 8.0;  // c = 1/(8n)
// Tent points satisfy d_K(z, w) < 2 (1 - |z|); a larger inflation pushes the volume
// ratio past 64 once n >= 2 (it grows like C^{n+1}).
inline constexpr double kKoranyiTentInflation = 2.0;

namespace detail {

inline BallPoint random_nonzero_point(Sampler& s, int n, double r_lo, double r_hi) {
  CVec d = sample_sphere(s, n);
  const double r = s.uniform(r_lo, r_hi);
  for (auto& c : d) c *= r;
  return BallPoint(std::move(d));
}

}  // namespace detail

// E(z, R^2 sigma / (3n)) in D(z, r) in E(z, 2 R sigma), tanh r <= 1/2.
inline ContainmentReport check_polydisk_chain(int n, std::uint64_t samples, std::uint64_t seed) {
  ContainmentReport rep{"polydisk_ellipsoid_chain"};
  Sampler s(seed, 0x706463ull);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const BallPoint z = detail::random_nonzero_point(s, n, 1e-3, 0.999);
    const double R = s.uniform(0.01, 0.5);
    const double r = std::atanh(R);
    const auto p = ellipsoid_params(z, r);
    const double inner_r = R * R * p.sigma / (3.0 * n);
    const double outer_r = p.rhat;
    const double probe = (i % 2 == 0) ? 1.2 * inner_r : 1.2 * outer_r;
    CVec w = Proposal::polydisk(z, probe).draw(s);
    if (norm2(w) >= 1.0) continue;
    ++rep.samples;
    const bool in_small = in_polydisk(z, inner_r, w);
    const bool in_ball = bergman_distance(z.coords(), w) < r;
    const bool in_big = in_polydisk(z, outer_r, w);
    if ((in_small && !in_ball) || (in_ball && !in_big)) ++rep.violations;
  }
  return rep;
}

// E(z, c r) in B_K(z, r) in E(z, 2r) for r in (0,1), |z| >= 1/2, c = 1/(8n).
inline ContainmentReport check_koranyi_chain(int n, std::uint64_t samples, std::uint64_t seed) {
  ContainmentReport rep{"koranyi_polydisk_chain"};
  const double c = kKoranyiLowerConstantScale / n;
  Sampler s(seed, 0x6b6f72ull);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const BallPoint z = detail::random_nonzero_point(s, n, 0.5, 0.999);
    const double r = s.uniform(1e-3, 1.0);
    const double probe = (i % 2 == 0) ? 1.2 * c * r : 2.4 * r;
    CVec w = Proposal::polydisk(z, probe).draw(s);
    if (norm2(w) >= 1.0) continue;
    ++rep.samples;
    const bool in_small = in_polydisk(z, c * r, w);
    const bool in_k = koranyi_distance(z.coords(), w) < r;
    const bool in_big = in_polydisk(z, 2.0 * r, w);
    if ((in_small && !in_k) || (in_k && !in_big)) ++rep.violations;
  }
  return rep;
}

// Points with d(0, .) <= 3. Images then keep 1 - |phi_a z|^2 above ~1e-5; closer to the
// sphere one ulp in the stored coordinates already moves d by more than 1e-9.
inline constexpr double kMobiusSampleRadius = 0.99505475368673046;  // tanh 3

// |d(phi_a z, phi_a w) - d(z, w)| < tol, with a, z, w uniform in the ball of radius max_radius
inline ContainmentReport check_mobius_invariance(int n, std::uint64_t samples, std::uint64_t seed, double tol = 1e-9,
                                                 double max_radius = kMobiusSampleRadius) {
  ContainmentReport rep{"mobius_invariance"};
  Sampler s(seed, 0x6d6f62ull);
  auto draw = [&] {
    CVec v = sample_unit_ball(s, n);
    for (auto& c : v) c *= max_radius;
    return BallPoint(std::move(v));
  };
  for (std::uint64_t i = 0; i < samples; ++i) {
    const BallPoint a = draw(), z = draw(), w = draw();
    ++rep.samples;
    const double err =
        std::abs(bergman_distance(mobius_involution(a, z), mobius_involution(a, w)) - bergman_distance(z, w));
    rep.observed_max = std::max(rep.observed_max, err);
    if (!(err < tol)) ++rep.violations;
  }
  return rep;
}

// T_z in B_K(z, C (1 - |z|)) with sampled-volume ratio |B_K| / |T_z| in [1, 64].
inline ContainmentReport check_koranyi_carleson(int n, std::span<const double> radii, std::uint64_t per_radius,
                                                std::uint64_t seed, double inflation = kKoranyiTentInflation) {
  ContainmentReport rep{"koranyi_carleson"};
  rep.observed_min = std::numeric_limits<double>::infinity();
  Sampler s(seed, 0x6b6361ull);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CVec d = sample_sphere(s, n);
    for (auto& c : d) c *= radii[i];
    const BallPoint z(std::move(d));
    const Region tz = CarlesonTent{z};
    const Region bk = KoranyiBall{z, inflation * (1.0 - z.norm())};
    const Proposal prop = region_proposal(tz);
    Sampler ps = s.substream(i);
    for (std::uint64_t j = 0; j < per_radius; ++j) {
      CVec w = prop.draw(ps);
      if (!region_contains(tz, w)) continue;
      ++rep.samples;
      if (!region_contains(bk, w)) ++rep.violations;
    }
    auto one = [](std::span<const cplx>) { return 1.0; };
    const double vt = integral_mc<double>(one, tz, s.substream(1000 + i), per_radius).value;
    const double vk = integral_mc<double>(one, bk, s.substream(2000 + i), per_radius).value;
    const double ratio = vk / vt;
    rep.observed_min = std::min(rep.observed_min, ratio);
    rep.observed_max = std::max(rep.observed_max, ratio);
    if (!(ratio >= 1.0 && ratio <= 64.0)) ++rep.violations;
  }
  return rep;
}

}  // namespace blab
