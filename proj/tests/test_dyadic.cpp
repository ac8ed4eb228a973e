#include <gtest/gtest.h>

#include <cstdio>
#include <map>

#include <blab/dyadic.hpp>
#include <blab/grid_io.hpp>

using namespace blab;

namespace {

const DyadicGrid& small_grid() {
  static const DyadicGrid g = build_grid(GridConfig{.dim = 1, .theta0 = 0.8, .depth = 4, .systems = 0, .seed = 3});
  return g;
}

const DyadicGrid& grid_2d() {
  static const DyadicGrid g = build_grid(GridConfig{.dim = 2, .theta0 = 0.5, .depth = 3, .systems = 0, .seed = 5});
  return g;
}

// Uniform point of the ball restricted to the horizon.
CVec inside_horizon(Sampler& s, const DyadicGrid& g) {
  for (;;) {
    CVec w = sample_unit_ball(s, g.dim());
    if (!g.beyond_horizon(w)) return w;
  }
}

}  // namespace

TEST(GridConfig, Validation) {
  EXPECT_THROW(build_grid(GridConfig{.dim = 1, .theta0 = 0.4}), std::invalid_argument);
  EXPECT_THROW(build_grid(GridConfig{.dim = 1, .theta0 = 1.0, .depth = -1}), std::invalid_argument);
  EXPECT_THROW(build_grid(GridConfig{.dim = 2, .theta0 = 2.0, .depth = 6}), ResourceError);
  EXPECT_EQ(GridConfig{.dim = 3}.system_count(), 6);
  EXPECT_EQ(GridConfig{.dim = 1}.system_count(), 2);
}

TEST(Grid, RootLevelPointsLocateToRoot) {
  const auto g = build_grid(GridConfig{.dim = 1, .theta0 = 1.0, .depth = 6, .systems = 0, .seed = 7});
  Sampler s(1);
  for (int i = 0; i < 2000; ++i) {
    CVec w = sample_unit_ball(s, 1);
    w[0] *= std::tanh(1.0) * 0.999999;
    for (int sys = 0; sys < g.systems(); ++sys) EXPECT_EQ(g.locate(sys, w).node, 0);
  }
}

TEST(Grid, LevelCountsFollowVolumeCounting) {
  for (const DyadicGrid* g : {&small_grid(), &grid_2d()}) {
    for (int k = 0; k <= g->depth(); ++k) {
      const double expect = std::exp(2.0 * g->dim() * g->theta0() * k);
      const double ratio = static_cast<double>(g->level(k).size()) / expect;
      EXPECT_GE(ratio, 1.0 / 8) << "level " << k;
      EXPECT_LE(ratio, 8.0) << "level " << k;
    }
  }
}

TEST(Grid, ChildCountBounded) {
  for (const DyadicGrid* g : {&small_grid(), &grid_2d()}) {
    for (const auto& nd : g->nodes()) EXPECT_LE(static_cast<int>(nd.children.size()), g->config().child_cap());
  }
}

TEST(Grid, DeterministicBuild) {
  const GridConfig c{.dim = 1, .theta0 = 0.8, .depth = 3, .systems = 0, .seed = 11};
  EXPECT_EQ(grid_to_json(build_grid(c)).dump(), grid_to_json(build_grid(c)).dump());
  auto c2 = c;
  c2.seed = 12;
  EXPECT_NE(grid_hash(build_grid(c)), grid_hash(build_grid(c2)));
}

TEST(Grid, ParentContainsProjectedChildCenter) {
  for (const DyadicGrid* g : {&small_grid(), &grid_2d()}) {
    for (int sys = 0; sys < g->systems(); ++sys) {
      for (std::size_t i = 1; i < g->nodes().size(); ++i) {
        const KubeId kube{sys, static_cast<int>(i)};
        const CVec c = g->kube_center(kube);
        ASSERT_TRUE(g->kube_contains(kube, c));
        const int parent = g->node(kube).parent;
        EXPECT_EQ(g->locate(sys, c, g->node(kube).level - 1).node, parent);
      }
    }
  }
}

TEST(Locate, PartitionAndChains) {
  for (const DyadicGrid* g : {&small_grid(), &grid_2d()}) {
    Sampler s(21);
    int misses = 0;
    for (int i = 0; i < 100000; ++i) {
      const CVec w = inside_horizon(s, *g);
      const int sys = i % g->systems();
      const KubeId own = g->locate(sys, w);
      if (!g->kube_contains(own, w)) ++misses;
      // ancestor-path oracle
      int cur = own.node;
      for (int k = g->node(own).level; k >= 0; --k) {
        ASSERT_EQ(g->locate(sys, w, k).node, cur);
        ASSERT_TRUE(g->tent_contains({sys, cur}, w));
        cur = g->node(cur).parent;
      }
      // exactly one kube of the level contains w
      if (i % 50 == 0) {
        int owners = 0;
        for (int id : g->level(g->node(own).level)) owners += g->kube_contains({sys, id}, w) ? 1 : 0;
        ASSERT_EQ(owners, 1);
      }
    }
    EXPECT_EQ(misses, 0);
  }
}

TEST(Locate, OriginAndErrors) {
  const auto& g = small_grid();
  EXPECT_EQ(g.locate(0, CVec{0.0}).node, 0);
  EXPECT_THROW(g.locate(0, CVec{0.9999}), HorizonError);
  EXPECT_THROW(g.locate(0, CVec{0.1}, 2), std::domain_error);
  EXPECT_THROW(g.locate(7, CVec{0.1}), std::out_of_range);
}

TEST(Tents, NestedOrDisjoint) {
  const auto& g = small_grid();
  Sampler s(31);
  std::vector<CVec> pts;
  for (int i = 0; i < 10000; ++i) pts.push_back(sample_unit_ball(s, 1));
  for (int pair = 0; pair < 1000; ++pair) {
    const int sys = static_cast<int>(s.next_u64() % 2);
    const int a = static_cast<int>(s.next_u64() % g.kube_count());
    const int b = static_cast<int>(s.next_u64() % g.kube_count());
    bool ab = true, ba = true, disjoint = true;
    for (const auto& w : pts) {
      const bool in_a = g.tent_contains({sys, a}, w), in_b = g.tent_contains({sys, b}, w);
      if (in_a && !in_b) ab = false;
      if (in_b && !in_a) ba = false;
      if (in_a && in_b) disjoint = false;
    }
    EXPECT_TRUE(ab || ba || disjoint) << a << " " << b;
  }
}

TEST(TentVolume, RootIsWholeBall) {
  const auto& g = small_grid();
  EXPECT_NEAR(tent_volume(g, {0, 0}).value, kPi, 1e-15);
  // the root estimate through the cone sampler agrees with pi
  auto one = [](std::span<const cplx>) { return 1.0; };
  const auto e = tent_integral<double>(g, {1, 0}, one, Sampler(4), 50000);
  EXPECT_NEAR(e.value, kPi, 3 * e.std_err + 1e-12);
}

TEST(TentVolume, AgreesWithPlainBallSampling) {
  for (const DyadicGrid* g : {&small_grid(), &grid_2d()}) {
    Sampler s(41);
    for (int t = 0; t < 6; ++t) {
      const int level = 1 + t % std::min(2, g->depth());
      const auto& ids = g->level(level);
      const KubeId kube{t % g->systems(), ids[s.next_u64() % ids.size()]};
      const auto v = tent_volume(*g, kube);
      EXPECT_LE(v.std_err, 0.02 * v.value);
      auto ind = [&](std::span<const cplx> w) { return g->tent_contains(kube, w) ? 1.0 : 0.0; };
      const auto plain = integral_mc<double>(ind, WholeBall{g->dim()}, s.substream(t), 400000);
      EXPECT_NEAR(v.value, plain.value, 4 * std::hypot(v.std_err, plain.std_err)) << "level " << level;
    }
  }
}

TEST(TentVolume, TwoSidedScaleBound) {
  const auto& g = small_grid();
  TentVolumeCache cache(g);
  double lo = 1e300, hi = 0.0;
  std::map<int, std::pair<double, double>> sibling_range;
  for (int k = 1; k <= g.depth(); ++k) {
    const auto& ids = g.level(k);
    for (std::size_t i = 0; i < ids.size(); i += std::max<std::size_t>(1, ids.size() / 12)) {
      const auto v = cache({0, ids[i]}).value;
      const double ratio = v / std::exp(-2.0 * (g.dim() + 1) * g.theta0() * k);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      auto& [a, b] = sibling_range.try_emplace(g.node(ids[i]).parent, 1e300, 0.0).first->second;
      a = std::min(a, v);
      b = std::max(b, v);
    }
  }
  EXPECT_LT(hi / lo, 64.0);
  for (const auto& [parent, r] : sibling_range) EXPECT_LE(r.second / r.first, 16.0) << parent;
}

TEST(TentPoints, UniformAndInside) {
  const auto& g = grid_2d();
  const KubeId kube{1, g.level(2)[3]};
  const auto pts = tent_points(g, kube, 2000);
  for (const auto& p : pts) ASSERT_TRUE(g.tent_contains(kube, p));
  // mean of |z|^2 over a radial cone starting at t: (2n/(2n+2)) (1 - t^{2n+2}) / (1 - t^{2n})
  const double t = shell_radius(2, g.theta0());
  const double exact = (4.0 / 6.0) * (1 - std::pow(t, 6)) / (1 - std::pow(t, 4));
  double mean = 0, sq = 0;
  for (const auto& p : pts) {
    mean += norm2(p);
    sq += norm2(p) * norm2(p);
  }
  mean /= pts.size();
  const double se = std::sqrt((sq / pts.size() - mean * mean) / pts.size());
  EXPECT_NEAR(mean, exact, 4 * se);
  EXPECT_EQ(pts.front(), tent_points(g, kube, 1).front());
}

TEST(CoverTent, ContainsCarlesonTent) {
  const auto& g = small_grid();
  EXPECT_EQ(cover_tent(g, BallPoint{0.0}).kube.node, 0);
  const BallPoint z{0.9};
  const auto cov = cover_tent(g, z);
  const Region tz = CarlesonTent{z};
  const Proposal prop = region_proposal(tz);
  Sampler s(51);
  int checked = 0;
  while (checked < 10000) {
    const CVec w = prop.draw(s);
    if (!region_contains(tz, w)) continue;
    ++checked;
    ASSERT_TRUE(g.tent_contains(cov.kube, w));
  }
  EXPECT_THROW(cover_tent(g, BallPoint{0.99999}), HorizonError);
}

TEST(CoverTent, VolumeRatioBounded) {
  const auto& g = small_grid();
  for (double r : {0.5, 0.9, 0.99}) {
    const BallPoint z{r};
    const auto cov = cover_tent(g, z);
    auto one = [](std::span<const cplx>) { return 1.0; };
    const double tz = integral_mc<double>(one, CarlesonTent{z}, Sampler(3), 100000).value;
    const double ratio = tent_volume(g, cov.kube).value / tz;
    EXPECT_TRUE(std::isfinite(ratio));
    EXPECT_LE(ratio, 1e3) << r;
  }
}

TEST(TentExpansion, ContainsTentAndIsComparable) {
  const auto& g = small_grid();
  std::vector<double> ratios;
  for (int k = 1; k <= 3; ++k) {
    const KubeId kube{0, g.level(k)[g.level(k).size() / 2]};
    const TentExpansion ex(g, kube, 0.5);
    for (const auto& p : tent_points(g, kube, 500)) ASSERT_TRUE(ex.contains(p));
    const double ratio = ex.volume().value / tent_volume(g, kube).value;
    EXPECT_GE(ratio, 0.97);
    ratios.push_back(ratio);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LT(*hi / *lo, 4.0);
  EXPECT_LT(*hi, 20.0);
}

TEST(GridIO, RoundTrip) {
  const auto& g = grid_2d();
  const std::string path = ::testing::TempDir() + "blab_grid_roundtrip.json";
  save_grid(g, path);
  const auto back = load_grid(path);
  std::remove(path.c_str());
  EXPECT_EQ(grid_hash(back), grid_hash(g));
  Sampler s(61);
  for (int i = 0; i < 2000; ++i) {
    const CVec w = inside_horizon(s, g);
    EXPECT_EQ(back.locate(i % 4, w), g.locate(i % 4, w));
  }
  auto bad = grid_to_json(g);
  bad["version"] = 99;
  EXPECT_THROW(grid_from_json(bad), std::runtime_error);
}
