#include <gtest/gtest.h>

#include <blab/geometry.hpp>
#include <blab/montecarlo.hpp>
#include <blab/region.hpp>
#include <blab/containment.hpp>

using namespace blab;

namespace {

BallPoint random_point(Sampler& s, int n, double max_radius = 0.99) {
  CVec v = sample_unit_ball(s, n);
  for (auto& c : v) c *= max_radius;
  return BallPoint(std::move(v));
}

double vec_dist(const CVec& a, const CVec& b) { return norm(subtracted(a, b)); }

}  // namespace

TEST(HermInner, Examples) {
  EXPECT_EQ(herm_inner(BallPoint{0.5, 0.0}, BallPoint{0.5, 0.0}), cplx(0.25, 0.0));
  EXPECT_EQ(inner(CVec{1.0, 0.0}, CVec{1.0, 0.0}), cplx(1.0, 0.0));
  EXPECT_EQ(herm_inner(BallPoint{0.5, 0.0}, BallPoint{0.0, 0.5}), cplx(0.0, 0.0));
  const cplx v = herm_inner(BallPoint{cplx(0.3, 0.4)}, BallPoint{0.5});
  EXPECT_NEAR(v.real(), 0.15, 1e-15);
  EXPECT_NEAR(v.imag(), 0.2, 1e-15);
}

TEST(HermInner, DimensionMismatchThrows) {
  EXPECT_THROW(herm_inner(BallPoint{0.1}, BallPoint{0.1, 0.1}), std::invalid_argument);
}

TEST(HermInner, ConjugateSymmetric) {
  Sampler s(3);
  for (int i = 0; i < 100; ++i) {
    auto z = random_point(s, 3), w = random_point(s, 3);
    EXPECT_LT(std::abs(herm_inner(z, w) - std::conj(herm_inner(w, z))), 1e-15);
  }
}

TEST(BallPoint, RejectsNearBoundary) {
  EXPECT_THROW(BallPoint({1.0}), std::domain_error);
  EXPECT_THROW(BallPoint({1.0 - 1e-13}), std::domain_error);
  EXPECT_NO_THROW(BallPoint({1.0 - 1e-9}));
  EXPECT_THROW(BallPoint(CVec{}), std::invalid_argument);
}

TEST(Mobius, DefiningProperties) {
  Sampler s(5);
  for (int n : {1, 2, 3}) {
    for (int i = 0; i < 200; ++i) {
      auto a = random_point(s, n), w = random_point(s, n);
      EXPECT_LT(vec_dist(mobius_involution(a.coords(), BallPoint::origin(n).coords()), a.coords()), 1e-12);
      EXPECT_LT(norm(mobius_involution(a.coords(), a.coords())), 1e-12);
      const CVec back = mobius_involution(a.coords(), mobius_involution(a.coords(), w.coords()));
      EXPECT_LT(vec_dist(back, w.coords()), 1e-10);
    }
  }
}

TEST(BergmanDistance, Examples) {
  const auto z = BallPoint{cplx(0.3, -0.2), 0.1};
  EXPECT_EQ(bergman_distance(z, z), 0.0);
  // 0.5 * ln 3
  EXPECT_NEAR(bergman_distance(BallPoint{0.0}, BallPoint{0.5}), 0.54930614433405489, 1e-14);
}

TEST(BergmanDistance, SymmetricAndMobiusInvariant) {
  Sampler s(7);
  for (int n : {1, 2}) {
    for (int i = 0; i < 1000; ++i) {
      auto a = random_point(s, n), z = random_point(s, n), w = random_point(s, n);
      const double d = bergman_distance(z, w);
      EXPECT_NEAR(d, bergman_distance(w, z), 1e-12);
      const double moved = bergman_distance(mobius_involution(a, z), mobius_involution(a, w));
      EXPECT_LT(std::abs(moved - d), 1e-9);
    }
  }
}

TEST(BergmanDistance, MatchesHyperbolicClosedFormOnAxis) {
  for (double x : {0.1, 0.5, 0.9, 0.999}) {
    EXPECT_NEAR(bergman_distance(BallPoint{0.0}, BallPoint{x}), std::atanh(x), 1e-12);
  }
}

TEST(KoranyiDistance, Examples) {
  EXPECT_NEAR(koranyi_distance(BallPoint{0.0, 0.0}, BallPoint{0.3, cplx(0.0, 0.4)}), 0.5, 1e-15);
  const auto z = BallPoint{cplx(0.2, 0.1), 0.3};
  EXPECT_NEAR(koranyi_distance(z, z), 0.0, 1e-15);
  EXPECT_NEAR(koranyi_distance(BallPoint{0.5}, BallPoint{0.25}), 0.25, 1e-15);
}

TEST(KoranyiDistance, QuasiTriangleConstantIsFinite) {
  Sampler s(11);
  double worst = 0.0;
  for (int i = 0; i < 20000; ++i) {
    auto a = random_point(s, 2), b = random_point(s, 2), c = random_point(s, 2);
    const double lhs = koranyi_distance(a, c);
    const double rhs = koranyi_distance(a, b) + koranyi_distance(b, c);
    if (rhs > 0) worst = std::max(worst, lhs / rhs);
  }
  EXPECT_TRUE(std::isfinite(worst));
  EXPECT_LT(worst, 4.0);
}

TEST(RadialSplit, Examples) {
  const CVec z{0.3, cplx(0.1, 0.2)};
  auto [p, q] = radial_split(z, z);
  EXPECT_LT(vec_dist(p, z), 1e-15);
  EXPECT_LT(norm(q), 1e-15);
  const CVec w{-std::conj(z[1]), std::conj(z[0])};
  ASSERT_LT(std::abs(inner(w, z)), 1e-15);
  auto [p2, q2] = radial_split(z, w);
  EXPECT_LT(norm(p2), 1e-15);
  EXPECT_LT(vec_dist(q2, w), 1e-15);
  EXPECT_THROW(radial_split(CVec{0.0, 0.0}, w), std::invalid_argument);
}

TEST(RadialSplit, ReconstructsAndIsOrthogonal) {
  Sampler s(13);
  for (int i = 0; i < 500; ++i) {
    auto z = random_point(s, 3), w = random_point(s, 3);
    auto [p, q] = radial_split(z.coords(), w.coords());
    EXPECT_LT(vec_dist(added(p, q), w.coords()), 1e-14);
    EXPECT_LT(std::abs(inner(p, q)), 1e-12);
  }
}

TEST(Frame, OrthonormalAndDeterministic) {
  Sampler s(17);
  for (int n : {1, 2, 4}) {
    for (int i = 0; i < 100; ++i) {
      auto z = random_point(s, n);
      Frame f(z.coords()), g(z.coords());
      for (int a = 0; a < n; ++a) {
        EXPECT_EQ(f[a], g[a]);
        for (int b = 0; b < n; ++b) {
          const cplx ip = inner(f[a], f[b]);
          EXPECT_LT(std::abs(ip - (a == b ? 1.0 : 0.0)), 1e-12);
        }
      }
      EXPECT_LT(vec_dist(f[0], scaled(z.coords(), 1.0 / z.norm())), 1e-15);
    }
  }
}

TEST(Ellipsoid, Example) {
  const auto p = ellipsoid_params(BallPoint{0.5, 0.0}, std::atanh(0.5));
  EXPECT_NEAR(p.R, 0.5, 1e-15);
  EXPECT_NEAR(p.sigma, 0.8, 1e-15);
  EXPECT_NEAR(p.center[0].real(), 0.4, 1e-15);
  EXPECT_NEAR(std::abs(p.center[1]), 0.0, 1e-15);
  EXPECT_NEAR(p.rhat, 0.8, 1e-15);
  EXPECT_NEAR(p.rhat, 2 * p.R * p.sigma, 0.0);
}

TEST(Ellipsoid, SmallZLimit) {
  const double R = 0.3;
  const auto p = ellipsoid_params(BallPoint{1e-9, 0.0}, std::atanh(R));
  EXPECT_NEAR(p.sigma, 1.0, 1e-15);
  EXPECT_NEAR(p.center[0].real(), (1 - R * R) * 1e-9, 1e-20);
}

TEST(Regions, Examples) {
  Sampler s(19);
  const CarlesonTent t0{BallPoint::origin(2)};
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(region_contains(t0, random_point(s, 2).coords()));
  const auto z = BallPoint{0.5, 0.0};
  EXPECT_TRUE(region_contains(Polydisk{z, 0.8}, z.coords()));
}

TEST(Regions, BergmanEllipsoidAgreesWithMetric) {
  Sampler s(23);
  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    const int n = 1 + i % 3;
    auto z = random_point(s, n, 0.95);
    const double r = s.uniform(0.05, 2.0);
    auto w = random_point(s, n);
    const auto p = ellipsoid_params(z, r);
    const bool metric = bergman_distance(z, w) < r;
    const bool ellipse = in_bergman_ellipsoid(z, p, w.coords());
    if (metric != ellipse) ++disagreements;
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(Regions, AnnulusBoundsAreClosed) {
  const auto u = make_annulus(1, 8, 4);
  EXPECT_TRUE(region_contains(u, CVec{1.0 - std::ldexp(1.0, -4)}));
  EXPECT_TRUE(region_contains(u, CVec{1.0 - std::ldexp(1.0, -5)}));
  EXPECT_FALSE(region_contains(u, CVec{1.0 - std::ldexp(1.0, -6)}));
  EXPECT_THROW(make_annulus(1, 4, 4), std::invalid_argument);
}

TEST(Regions, ProposalsCoverTheirRegions) {
  // Points of the region sampled by rejection from the whole ball must fall in the proposal support,
  // which we check through the volume estimate agreeing with an independent whole-ball estimate.
  Sampler s(29);
  const std::vector<Region> regions = {
      CarlesonTent{BallPoint{0.6, 0.0}}, KoranyiBall{BallPoint{0.7, cplx(0.0, 0.1)}, 0.3},
      make_annulus(2, 3, 1), Polydisk{BallPoint{0.3, 0.2}, 0.2}, BergmanBall{BallPoint{0.5, 0.1}, 0.7}};
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto& r = regions[i];
    auto one = [](std::span<const cplx>) { return 1.0; };
    const auto direct = integral_mc<double>(one, r, s.substream(i), 200000);
    auto ind = [&](std::span<const cplx> w) { return region_contains(r, w) ? 1.0 : 0.0; };
    const auto global = integral_mc<double>(ind, WholeBall{2}, s.substream(100 + i), 400000);
    EXPECT_NEAR(direct.value, global.value, 4.0 * std::hypot(direct.std_err, global.std_err)) << region_name(r);
  }
}

TEST(Regions, ExactVolumes) {
  EXPECT_NEAR(*region_exact_volume(WholeBall{1}), kPi, 1e-15);
  EXPECT_NEAR(*region_exact_volume(WholeBall{2}), kPi * kPi / 2, 1e-15);
  EXPECT_NEAR(*region_exact_volume(Polydisk{BallPoint{0.5}, 0.3}), kPi * 0.09, 1e-15);
  EXPECT_FALSE(region_exact_volume(Polydisk{BallPoint{0.9}, 0.3}).has_value());
  // n = 1: D(0, r) is the disk of radius tanh r
  EXPECT_NEAR(*region_exact_volume(BergmanBall{BallPoint{0.0}, 0.5}), kPi * std::pow(std::tanh(0.5), 2), 1e-15);
}

TEST(Containment, PolydiskEllipsoidChain) {
  for (int n : {1, 2, 3}) {
    const auto rep = check_polydisk_chain(n, 30000, 1);
    EXPECT_GT(rep.samples, 25000u);
    EXPECT_EQ(rep.violations, 0u) << n;
  }
}

TEST(Containment, KoranyiChain) {
  for (int n : {1, 2, 3}) {
    const auto rep = check_koranyi_chain(n, 30000, 2);
    EXPECT_GT(rep.samples, 10000u);
    EXPECT_EQ(rep.violations, 0u) << n;
  }
}

TEST(Containment, MobiusInvariance) {
  const auto rep = check_mobius_invariance(2, 20000, 3);
  EXPECT_EQ(rep.violations, 0u) << rep.observed_max;
}

TEST(Containment, KoranyiBallCoversCarlesonTent) {
  const double radii[] = {0.5, 0.7, 0.9, 0.99, 0.999};
  for (int n : {1, 2, 3}) {
    const auto rep = check_koranyi_carleson(n, radii, 20000, 4);
    EXPECT_EQ(rep.violations, 0u) << n << " ratio range " << rep.observed_min << " " << rep.observed_max;
  }
}
