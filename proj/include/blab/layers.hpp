#pragma once

#include <cmath>
#include <span>
#include <unordered_map>
#include <vector>

#include "orlicz.hpp"

namespace blab {

struct LayerOptions {
  int system = 0;
  // E~_K removes the descendants this many generations below K. A point lying in a
  // chain of F_k tents ending at generation G belongs to E~_K exactly for the
  // K with generation in (G - offset, G], so the overlap equals the offset.
  int inflation_offset = 4;
  int max_level = -1;
};

// Tents of one system with Luxembourg average in (4^{-k-1}, 4^{-k}], with the
// generation of each tent (number of strict ancestors in the family).
class LayerDecomposition {
 public:
  LayerDecomposition(const DyadicGrid& grid, int k, LayerOptions opt) : grid_(&grid), k_(k), opt_(opt) {}

  int k() const { return k_; }
  int system() const { return opt_.system; }
  int inflation_offset() const { return opt_.inflation_offset; }
  bool empty() const { return generation_.empty(); }
  std::size_t size() const { return generation_.size(); }
  const std::vector<int>& members() const { return members_; }

  bool contains_tent(int node) const { return generation_.count(node) > 0; }
  int generation(int node) const { return generation_.at(node); }

  // Family tents containing z, ordered by generation 0, 1, ...
  std::vector<int> chain(std::span<const cplx> z) const {
    std::vector<int> out;
    if (norm2(z) >= 1.0) return out;
    for (const KubeId t : grid_->tents_containing(z)) {
      if (t.system != opt_.system) continue;
      if (contains_tent(t.node)) out.push_back(t.node);
    }
    return out;
  }

  // z in E_K: z in K and in no family tent one generation below K.
  bool in_E(int node, std::span<const cplx> z) const { return in_layer(node, z, 1, false); }
  bool in_E_tilde(int node, std::span<const cplx> z) const { return in_layer(node, z, opt_.inflation_offset, false); }
  // z in S_k(K): the union of family descendants 2^k generations below K.
  bool in_S(int node, std::span<const cplx> z) const { return in_layer(node, z, 1 << k_, true); }

  int count_E(std::span<const cplx> z) const { return count(z, 1); }
  int count_E_tilde(std::span<const cplx> z) const { return count(z, opt_.inflation_offset); }

  void add(int node, int generation) {
    members_.push_back(node);
    generation_[node] = generation;
  }

 private:
  bool in_layer(int node, std::span<const cplx> z, int offset, bool inside) const {
    const auto c = chain(z);
    const auto it = generation_.find(node);
    if (it == generation_.end()) return false;
    const int g = it->second;
    if (static_cast<int>(c.size()) <= g || c[static_cast<std::size_t>(g)] != node) return false;
    const bool deeper = static_cast<int>(c.size()) > g + offset;
    return inside ? deeper : !deeper;
  }

  // Direct count over the family tents containing z (only those can contain z).
  int count(std::span<const cplx> z, int offset) const {
    int m = 0;
    for (int node : chain(z)) m += in_layer(node, z, offset, false) ? 1 : 0;
    return m;
  }

  const DyadicGrid* grid_;
  int k_;
  LayerOptions opt_;
  std::vector<int> members_;
  std::unordered_map<int, int> generation_;
};

inline bool in_layer_band(double average, int k) {
  return average > std::ldexp(1.0, -2 * k - 2) && average <= std::ldexp(1.0, -2 * k);
}

inline LayerDecomposition layer_decomposition(TentLuxembourg& lux, int k, LayerOptions opt = {}) {
  const DyadicGrid& grid = lux.stats().grid();
  if (opt.system < 0 || opt.system >= grid.systems()) throw std::out_of_range("layer_decomposition: system");
  if (opt.inflation_offset < 1) throw std::invalid_argument("layer_decomposition: offset must be >= 1");
  LayerDecomposition out(grid, k, opt);
  if (lux.stats().function().is_zero()) return out;
  const int top = (opt.max_level < 0 || opt.max_level > grid.depth()) ? grid.depth() : opt.max_level;
  // BFS order visits parents first, so generations are known for all ancestors.
  std::unordered_map<int, int> nearest;  // node -> generation of nearest family ancestor-or-self, -1 if none
  for (int node : grid.subtree(0)) {
    const GridNode& nd = grid.node(node);
    if (nd.level > top) continue;
    const int above = nd.parent < 0 ? -1 : nearest.at(nd.parent);
    if (in_layer_band(lux({opt.system, node}), k)) {
      out.add(node, above + 1);
      nearest[node] = above + 1;
    } else {
      nearest[node] = above;
    }
  }
  return out;
}

// |S_k(K)| / |K| by uniform tent points.
inline RealEstimate deep_layer_fraction(const LayerDecomposition& layers, const DyadicGrid& grid, int node,
                                        std::uint64_t budget = kTentAverageBudget) {
  const auto pts = tent_points(grid, {layers.system(), node}, budget, 0x736bull);
  double hits = 0.0;
  for (const auto& w : pts) hits += layers.in_S(node, w) ? 1.0 : 0.0;
  const double p = hits / static_cast<double>(pts.size());
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(pts.size())), budget, grid.config().seed};
}

}  // namespace blab
