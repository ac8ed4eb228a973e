#pragma once

// Test-function battery shared by the L log L experiments: normalized indicators of
// polydisks E(z0, (1-|z0|)/4) and Euclidean balls B(z0, (1-|z0|)/2), z0 = |z0| e_1.

#include <algorithm>
#include <cmath>

#include "../orlicz.hpp"
#include "common.hpp"

namespace blab {

struct BatteryItem {
  std::string family;  // "polydisk" or "ball"
  double center_radius = 0.0;
  BallPoint center;
  Region region;
  double volume = 0.0;
};

inline std::vector<BatteryItem> llogl_battery(int n, const std::vector<double>& radii) {
  std::vector<BatteryItem> out;
  for (double t : radii) {
    if (!(t >= 0.0 && t < 1.0)) throw ConfigError("centers must lie in [0, 1)");
    const BallPoint z0 = t > 0.0 ? BallPoint::on_axis(n, t) : BallPoint::origin(n);
    double rhat = 0.25 * (1.0 - t);
    while (!polydisk_inside_ball(z0, rhat)) rhat *= 0.5;
    const Region pd = Polydisk{z0, rhat};
    out.push_back({"polydisk", t, z0, pd, region_volume(pd).value});
    const Region eb = EuclideanBall{z0, 0.5 * (1.0 - t)};
    out.push_back({"ball", t, z0, eb, *region_exact_volume(eb)});
  }
  return out;
}

// Superlevel measures of |[conj b, P] (1_A / |A|)| for holomorphic b, from the closed
// form. Half of the budget goes to a ball around the centre, half to dyadic shells.
inline std::vector<MeasureEstimate> battery_superlevel(const Symbol& b, const BatteryItem& item,
                                                       std::span<const double> thresholds, const Sampler& sampler,
                                                       std::uint64_t budget) {
  const int n = item.center.dim();
  if (b.kind() == SymbolKind::Constant) {
    std::vector<MeasureEstimate> zero(thresholds.size());
    return zero;
  }
  auto g = [&](std::span<const cplx> z) { return std::abs(commutator_centered(b, item.center.coords(), z)); };
  const Region focus = EuclideanBall{item.center, std::max(1e-3, 1.0 - item.center_radius)};
  return superlevel_profile_focused(g, thresholds, n, focus, sampler, budget);
}

// Luxembourg norm of 1_A / |A| in L log+ L over the ball: |A| Y(1/(|A| c)) <= 1.
inline double llogl_norm_normalized_indicator(double volume) {
  const YoungFunction y = YoungFunction::llogl();
  auto F = [&](double c) { return volume * y(1.0 / (volume * c)); };
  return infimal_constant(F, 1e-12, 1e12, kLuxembourgTol);
}

inline Symbol config_symbol(const std::string& name) {
  try {
    return Symbol::parse(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace blab
