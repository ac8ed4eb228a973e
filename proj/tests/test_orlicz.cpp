#include <gtest/gtest.h>

#include <blab/layers.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace blab;

namespace {

const DyadicGrid& disk_grid() {
  static const DyadicGrid g = build_grid(GridConfig{.dim = 1, .theta0 = 0.8, .depth = 4, .systems = 0, .seed = 5});
  return g;
}

std::vector<YoungFunction> young_family() {
  return {YoungFunction::psi(0.5), YoungFunction::psi(1.0), YoungFunction::phi(0.5), YoungFunction::phi(1.0),
          YoungFunction::llogl()};
}

double euclid(std::span<const cplx> a, std::span<const cplx> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

// t solving t log(e + t) = 1, by Newton iteration
double psi1_unit_root() {
  double t = 1.0;
  for (int i = 0; i < 50; ++i) {
    const double l = std::log(std::numbers::e + t);
    t -= (t * l - 1.0) / (l + t / (std::numbers::e + t));
  }
  return t;
}

}  // namespace

TEST(Young, ConvexIncreasingZeroAtZero) {
  for (const auto& y : young_family()) {
    EXPECT_EQ(y(0.0), 0.0) << y.name();
    double prev = 0.0;
    for (int i = -60; i <= 60; ++i) {
      const double t = std::pow(10.0, i / 20.0), h = 1e-3 * t;
      if (!std::isfinite(y(t + h))) break;  // Phi overflows double range
      EXPECT_GE(y(t), prev) << y.name();
      prev = y(t);
      if (y.kind == YoungKind::PlainLlogL && std::abs(t - 1.0) < 2 * h) continue;  // kink at 1
      EXPECT_GE(y(t + h) + y(t - h) - 2.0 * y(t), -1e-12 * y(t)) << y.name() << " t=" << t;
    }
  }
}

TEST(Young, InverseAndDomain) {
  for (const auto& y : young_family())
    for (double v : {1e-3, 0.5, 1.0, 7.0}) EXPECT_NEAR(y(y.inverse(v)), v, 1e-9 * v) << y.name();
  EXPECT_THROW(YoungFunction::psi(0.0), std::invalid_argument);
  EXPECT_THROW(YoungFunction::phi(1.5), std::invalid_argument);
}

TEST(Young, Submultiplicative) {
  Sampler s(11, 0);
  for (double eps : {0.25, 0.5, 1.0}) {
    const auto psi = YoungFunction::psi(eps);
    int bad = 0;
    for (int i = 0; i < 100000; ++i) {
      const double x = s.uniform(0.0, 1e3), y = s.uniform(0.0, 1e3);
      if (psi(x * y) > 2.0 * psi(x) * psi(y) * (1.0 + 1e-12)) ++bad;
    }
    EXPECT_EQ(bad, 0) << eps;
  }
}

TEST(Young, PlainLlogLDominatedByPsi1) {
  Sampler s(12, 0);
  const auto psi = YoungFunction::psi(1.0), plain = YoungFunction::llogl();
  for (int i = 0; i < 100000; ++i) {
    const double x = std::exp(s.uniform(-10.0, 10.0));
    ASSERT_LE(plain(x), 2.0 * psi(x) * (1.0 + 1e-12)) << x;
  }
}

TEST(Luxembourg, TrivialAndUnitFunction) {
  const Region r = EuclideanBall{BallPoint{0.1, -0.2}, 0.4};
  const Sampler s(3, 0);
  const auto psi = YoungFunction::psi(1.0);
  EXPECT_EQ(luxembourg_average([](std::span<const cplx>) { return 0.0; }, r, psi, s, 4096), 0.0);
  const double one = luxembourg_average([](std::span<const cplx>) { return 1.0; }, r, psi, s, 4096);
  EXPECT_NEAR(one, 1.0 / psi1_unit_root(), 2e-4 * one);
  EXPECT_NEAR(one, 1.257, 1e-3);
}

TEST(Luxembourg, HomogeneousAndMonotone) {
  Sampler pick(4, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const BallPoint c{pick.uniform(-0.3, 0.3), pick.uniform(-0.3, 0.3)};
    const Region r = EuclideanBall{c, pick.uniform(0.1, 0.5)};
    const auto b = Symbol::log_branch();
    auto f = [&](std::span<const cplx> w) { return std::abs(b(w)) + 0.1; };
    const double a = pick.uniform(0.1, 10.0);
    for (const auto& y : young_family()) {
      const Sampler s(5, static_cast<std::uint64_t>(trial));
      const double base = luxembourg_average(f, r, y, s, 4096);
      const double scaled = luxembourg_average([&](std::span<const cplx> w) { return a * f(w); }, r, y, s, 4096);
      const double bigger = luxembourg_average([&](std::span<const cplx> w) { return f(w) + 0.5; }, r, y, s, 4096);
      EXPECT_NEAR(scaled, a * base, 3e-4 * a * base) << y.name();
      EXPECT_GE(bigger, base * (1.0 - 1e-4)) << y.name();
    }
  }
}

TEST(Luxembourg, RejectsNonFiniteValues) {
  Profile p;
  p.volume = 1.0;
  p.entries.push_back({CVec{cplx{0.0, 0.0}}, std::numeric_limits<double>::infinity(), 1.0});
  EXPECT_THROW(luxembourg(p, YoungFunction::psi(1.0)), std::domain_error);
}

TEST(Luxembourg, GeneralizedHolderOneConstant) {
  Sampler pick(6, 0);
  const auto log_b = Symbol::log_branch();
  for (double eps : {0.5, 1.0}) {
    std::vector<double> ratios;
    for (int trial = 0; trial < 1000; ++trial) {
      const double rad = pick.uniform(0.05, 0.3);
      const double cx = pick.uniform(-0.6, 1.0 - rad - 1e-3);
      const Region r = EuclideanBall{BallPoint{cx, 0.0}, rad};
      const BallPoint inner{cx + pick.uniform(-rad, rad), pick.uniform(-rad, rad)};
      const double ir = pick.uniform(0.02, rad);
      const double lo = pick.uniform(0.0, 1.0), hi = pick.uniform(1.0, 50.0);
      auto f = [&](std::span<const cplx> w) {
        return euclid(w, inner.coords()) < ir ? hi : lo;
      };
      const cplx shift = log_b(BallPoint{cx, 0.0});
      auto g = [&](std::span<const cplx> w) { return std::abs(log_b(w) - shift); };
      ratios.push_back(holder_ratio(f, g, r, eps, Sampler(7, static_cast<std::uint64_t>(trial)), 2048));
    }
    const double fitted = *std::max_element(ratios.begin(), ratios.begin() + 500);
    const double held_out = *std::max_element(ratios.begin() + 500, ratios.end());
    EXPECT_GT(fitted, 0.0);
    EXPECT_LE(held_out, 1.5 * fitted) << eps;
    EXPECT_LE(fitted, 4.0) << eps;
  }
}

TEST(Norms, Bloch) {
  EXPECT_EQ(bloch_norm(Symbol::constant(2.0), 2).value, 0.0);
  EXPECT_NEAR(bloch_norm(Symbol::monomial({1, 0}), 2).value, 1.0, 1e-9);
  for (int n : {1, 2}) {
    const double v = bloch_norm(Symbol::log_branch(), n).value;
    EXPECT_GE(v, 0.99);
    EXPECT_LE(v, 2.0);
  }
  EXPECT_THROW(bloch_norm(Symbol::harmonic("re_z1"), 2), std::invalid_argument);
}

TEST(Norms, WitnessReproducesBloch) {
  const auto b = Symbol::log_branch();
  const auto rep = bloch_norm(b, 2);
  EXPECT_DOUBLE_EQ(norm(*b.gradient(rep.witness_point)) * (1.0 - norm(rep.witness_point)), rep.value);
}

TEST(Norms, DyadicBmo) {
  const auto& g = disk_grid();
  EXPECT_EQ(bmo_norm_dyadic(Symbol::constant(1.0), g, 3).value, 0.0);
  const auto re = bmo_norm_dyadic(Symbol::harmonic("re_z1"), g, 3);
  EXPECT_LE(re.value, 2.0);
  EXPECT_GT(re.value, 0.0);
  const auto lb = bmo_norm_dyadic(Symbol::log_branch(), g, 3);
  const double bl = bloch_norm(Symbol::log_branch(), 1).value;
  ASSERT_TRUE(lb.witness_tent.has_value());
  EXPECT_DOUBLE_EQ(tent_oscillation(g, Symbol::log_branch(), *lb.witness_tent), lb.value);
  EXPECT_GT(lb.value / bl, 1.0 / 8.0);
  EXPECT_LT(lb.value / bl, 8.0);
}

TEST(Norms, HyperbolicBallBmoComparableToDyadic) {
  const auto& g = disk_grid();
  const auto centers = stratified_centers(1, 6, 4, 9);
  EXPECT_EQ(bmo_r_norm(Symbol::constant(3.0), 1.0, centers).value, 0.0);
  for (const auto& b : {Symbol::log_branch(), Symbol::monomial({1}), Symbol::bounded_smooth("inverse_shift")}) {
    const double dy = bmo_norm_dyadic(b, g, 3).value;
    for (double r : {0.5, 1.0, 2.0}) {
      const double v = bmo_r_norm(b, r, centers, 2048).value;
      EXPECT_GT(v / dy, 1.0 / 16.0) << b.name() << " r=" << r;
      EXPECT_LT(v / dy, 16.0) << b.name() << " r=" << r;
    }
  }
}

TEST(Norms, LogBmoStableTowardBoundary) {
  const auto b = Symbol::log_branch();
  const double near = bmo_r_norm(b, 1.0, shell_centers(2, std::ldexp(1.0, -4), 16, 1), 2048).value;
  const double far = bmo_r_norm(b, 1.0, shell_centers(2, std::ldexp(1.0, -10), 16, 1), 2048).value;
  EXPECT_GT(near, 0.0);
  EXPECT_LT(far / near, 1.5);
  EXPECT_GT(far / near, 1.0 / 1.5);
}

TEST(Norms, BoundedOscillation) {
  EXPECT_EQ(bo_norm(Symbol::constant(1.0), 1.0, shell_centers(2, 0.1, 4, 1)).value, 0.0);
  const auto lb = Symbol::log_branch();
  const double l4 = bo_norm(lb, 1.0, shell_centers(2, std::ldexp(1.0, -4), 8, 1)).value;
  const double l10 = bo_norm(lb, 1.0, shell_centers(2, std::ldexp(1.0, -10), 8, 1)).value;
  EXPECT_LT(l10 / l4, 1.5);
  EXPECT_GT(l10 / l4, 1.0 / 1.5);
  const auto pole = Symbol::pole();
  const double p4 = bo_norm(pole, 1.0, shell_centers(2, std::ldexp(1.0, -4), 8, 1)).value;
  const double p10 = bo_norm(pole, 1.0, shell_centers(2, std::ldexp(1.0, -10), 8, 1)).value;
  EXPECT_GE(p10 / p4, 10.0);
}

TEST(Norms, BoundedOscillationWitnessPairIsWithinRadius) {
  const auto rep = bo_norm(Symbol::log_branch(), 1.0, shell_centers(2, 1e-3, 8, 2));
  EXPECT_LE(bergman_distance(rep.witness_point, rep.witness_partner), 1.0 + 1e-9);
  const auto b = Symbol::log_branch();
  EXPECT_DOUBLE_EQ(std::abs(b(rep.witness_point) - b(rep.witness_partner)), rep.value);
}

TEST(Norms, ExponentialOscillation) {
  const auto& g = disk_grid();
  EXPECT_LT(exp_osc_norm(Symbol::constant(4.0), 1.0, g, 3).value, 1e-6);
  const auto re = Symbol::harmonic("re_z1");
  for (double eps : {0.5, 1.0}) {
    const auto rep = exp_osc_norm(re, eps, g, 3);
    EXPECT_FALSE(rep.infinite);
    EXPECT_LE(rep.value, 2.0 * *re.sup_abs() / std::log(2.0)) << eps;
  }
  const auto lg = exp_osc_norm(Symbol::log_branch(), 1.0, g, 3);
  EXPECT_FALSE(lg.infinite);
  EXPECT_TRUE(std::isfinite(lg.value));
  EXPECT_GT(lg.value, 0.0);
}

TEST(Norms, InfimalConstantReportsInfinity) {
  auto never = [](double) { return 2.0; };
  EXPECT_TRUE(std::isinf(infimal_constant(never, 1e-6, 1e6, 1e-3)));
}

TEST(Maximal, TrivialInputs) {
  const auto& g = disk_grid();
  TentVolumeCache vols(g, 4096);
  const auto zero = TestFunction::zero(1);
  const auto one = TestFunction::indicator(WholeBall{1});
  TentStats s0(g, vols, zero, 1024), s1(g, vols, one, 1024);
  TentLuxembourg l0(s0, YoungFunction::psi(1.0)), l1(s1, YoungFunction::psi(1.0));
  Sampler s(8, 0);
  for (int i = 0; i < 50; ++i) {
    CVec z = sample_unit_ball(s, 1);
    if (g.beyond_horizon(z)) continue;
    EXPECT_EQ(young_maximal(l0, z), 0.0);
    EXPECT_EQ(dyadic_maximal(s0, z), 0.0);
    EXPECT_EQ(averaging_A_psi(l0, z), 0.0);
    EXPECT_NEAR(dyadic_maximal(s1, z), 1.0, 1e-12);
    EXPECT_GE(averaging_A_psi(l1, z), young_maximal(l1, z));
  }
  EXPECT_THROW(young_maximal(l1, CVec{cplx{0.99999, 0.0}}), HorizonError);
}

TEST(Maximal, YoungDistributionalBound) {
  const auto& g = disk_grid();
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
      const auto m = young_maximal_superlevel(lux, Lambda, Sampler(9, i), 20000);
      const auto vol = f.terms()[0].volume;
      const double bound = N * vol.value * psi(1.0 / Lambda);
      EXPECT_LE(m.value, bound + 3.0 * (m.std_err + N * vol.std_err * psi(1.0 / Lambda))) << i << " " << Lambda;
    }
  }
}

TEST(Llogl, IndicatorExamples) {
  const Region a = EuclideanBall{BallPoint{0.2, 0.1}, 0.3};
  const double vol = *region_exact_volume(a);
  const auto f = TestFunction::indicator(a);
  for (double lam : {1.0, 2.0, 10.0}) {
    const auto v = llogl_functional(f, lam, 1.0);
    EXPECT_TRUE(v.exact);
    EXPECT_NEAR(v.value, vol / lam, 1e-12);
  }
  EXPECT_NEAR(llogl_functional(f, 1.0 / std::numbers::e, 1.0).value, 2.0 * std::numbers::e * vol, 1e-12);
  EXPECT_THROW(llogl_functional(f, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(llogl_functional(f, 1.0, 1.5), std::invalid_argument);
}

TEST(Llogl, ComparableToPsiIntegral) {
  const auto psi = YoungFunction::psi(1.0);
  Sampler s(10, 0);
  for (int trial = 0; trial < 50; ++trial) {
    TestFunction f(2);
    f.add(s.uniform(0.1, 20.0), EuclideanBall{BallPoint{-0.5, 0.0}, 0.3});
    f.add(s.uniform(0.1, 20.0), EuclideanBall{BallPoint{0.5, 0.0}, 0.3});
    const double lam = std::exp(s.uniform(-3.0, 3.0));
    const auto v = llogl_functional(f, lam, 1.0);
    ASSERT_TRUE(v.exact);
    double integral = 0.0;
    for (const auto& t : f.terms()) integral += t.volume.value * psi(std::abs(t.coeff) / lam);
    EXPECT_GE(v.value / integral, 0.5);
    EXPECT_LE(v.value / integral, 2.0);
  }
}

TEST(Llogl, OverlapUsesSampledFallback) {
  TestFunction f(2);
  f.add(2.0, EuclideanBall{BallPoint{0.0, 0.0}, 0.4});
  f.add(3.0, EuclideanBall{BallPoint{0.2, 0.0}, 0.4});
  const auto v = llogl_functional(f, 1.0, 1.0, 1u << 16);
  EXPECT_FALSE(v.exact);
  EXPECT_GT(v.value, 0.0);
  // oracle: the same integral by plain uniform sampling of the ball
  Sampler s(13, 0);
  double acc = 0.0;
  const int m = 400000;
  for (int i = 0; i < m; ++i) acc += llogl_integrand(std::abs(f(sample_unit_ball(s, 2))), 1.0);
  const double oracle = unit_ball_volume(2) * acc / m;
  EXPECT_NEAR(v.value, oracle, 4.0 * v.std_err + 0.02 * oracle);
}

// ---------------------------------------------------------------------------
// Layer decomposition
// ---------------------------------------------------------------------------

namespace {

// Constant function whose every tent average sits in band k.
TestFunction band_constant(int n, int k) {
  return TestFunction::indicator(WholeBall{n}, 0.5 * std::ldexp(1.0, -2 * k) * psi1_unit_root());
}

}  // namespace

TEST(Layers, EmptyFamilies) {
  const auto& g = disk_grid();
  TentVolumeCache vols(g, 4096);
  const auto zero = TestFunction::zero(1);
  TentStats s0(g, vols, zero, 512);
  TentLuxembourg l0(s0, YoungFunction::psi(1.0));
  for (int k = 0; k < 4; ++k) EXPECT_TRUE(layer_decomposition(l0, k).empty());
  const auto one = TestFunction::indicator(WholeBall{1});
  TentStats s1(g, vols, one, 512);
  TentLuxembourg l1(s1, YoungFunction::psi(1.0));
  // every tent average of 1 is 1/t* > 1, above all bands
  for (int k = 0; k < 8; ++k) EXPECT_TRUE(layer_decomposition(l1, k).empty());
  const auto half = band_constant(1, 0);
  TentStats sh(g, vols, half, 512);
  TentLuxembourg lh(sh, YoungFunction::psi(1.0));
  EXPECT_FALSE(layer_decomposition(lh, 0).empty());
  EXPECT_TRUE(layer_decomposition(lh, 3).empty());
}

TEST(Layers, ConstantFunctionGenerationsAreLevels) {
  const auto& g = disk_grid();
  TentVolumeCache vols(g, 4096);
  for (int k : {1, 2}) {
    const auto f = band_constant(1, k);
    TentStats stats(g, vols, f, 512);
    TentLuxembourg lux(stats, YoungFunction::psi(1.0));
    const auto layers = layer_decomposition(lux, k);
    EXPECT_EQ(layers.size(), g.nodes().size()) << k;
    for (int node : layers.members()) EXPECT_EQ(layers.generation(node), g.node(node).level);
  }
}

TEST(Layers, OverlapAndDisjointness) {
  const auto& g = disk_grid();
  TentVolumeCache vols(g, 4096);
  std::vector<TestFunction> fs;
  fs.push_back(band_constant(1, 1));
  TestFunction generic(1);
  generic.add(1.0, EuclideanBall{BallPoint{0.8}, 0.19});
  generic.add(0.3, EuclideanBall{BallPoint{cplx{0.0, -0.9}}, 0.09});
  generic.add(5.0, Polydisk{BallPoint{cplx{-0.6, 0.6}}, 0.1});
  fs.push_back(generic);
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    TentStats stats(g, vols, fs[fi], 1024);
    TentLuxembourg lux(stats, YoungFunction::psi(1.0));
    int nonempty = 0;
    for (int k = 0; k <= 4; ++k) {
      const auto layers = layer_decomposition(lux, k);
      if (layers.empty()) continue;
      ++nonempty;
      Sampler s(14, fi * 16 + static_cast<std::uint64_t>(k));
      for (int i = 0; i < 10000; ++i) {
        const CVec z = sample_unit_ball(s, 1);
        ASSERT_LE(layers.count_E(z), 1) << fi << " k=" << k;
        ASSERT_LE(layers.count_E_tilde(z), 4) << fi << " k=" << k;
      }
    }
    EXPECT_GT(nonempty, 0) << fi;
  }
}

TEST(Layers, OffsetFiveReachesFive) {
  const auto& g = disk_grid();
  TentVolumeCache vols(g, 4096);
  const auto f = band_constant(1, 1);
  TentStats stats(g, vols, f, 512);
  TentLuxembourg lux(stats, YoungFunction::psi(1.0));
  const auto layers = layer_decomposition(lux, 1, LayerOptions{.system = 0, .inflation_offset = 5});
  Sampler s(15, 0);
  int best = 0;
  for (int i = 0; i < 20000; ++i) {
    CVec z = sample_sphere(s, 1);
    for (auto& c : z) c *= 1.0 - 1e-4 * s.uniform();
    best = std::max(best, layers.count_E_tilde(z));
  }
  EXPECT_EQ(best, 5);
}

TEST(Layers, DeepLayerDecay) {
  const auto& g = disk_grid();
  TentVolumeCache vols(g, 4096);
  for (int k : {1, 2, 3}) {
    const auto f = band_constant(1, k);
    TentStats stats(g, vols, f, 512);
    TentLuxembourg lux(stats, YoungFunction::psi(1.0));
    const auto layers = layer_decomposition(lux, k);
    ASSERT_FALSE(layers.empty());
    const double bound = std::ldexp(1.0, -(1 << k));
    for (int node : {0, g.level(1).front(), g.level(2).front()}) {
      const auto frac = deep_layer_fraction(layers, g, node, 8192);
      EXPECT_LE(frac.value, bound + 3.0 * frac.std_err) << "k=" << k << " node=" << node;
    }
  }
}
