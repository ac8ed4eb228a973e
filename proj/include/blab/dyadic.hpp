#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "montecarlo.hpp"

namespace blab {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct GridConfig {
  int dim = 1;
  double theta0 = 0.8;
  int depth = 6;
  int systems = 0;  // 0 selects max(2, 2n)
  std::uint64_t seed = 1;
  std::uint64_t atoms = 0;  // 0 selects a size proportional to the finest level
  std::uint64_t max_kubes = 10'000'000;

  double delta() const { return std::exp(-2.0 * theta0); }
  int system_count() const { return systems > 0 ? systems : std::max(2, 2 * dim); }
  int child_cap() const { return static_cast<int>(std::ceil(std::exp(2.0 * dim * theta0) - 1e-12)); }

  void validate() const {
    if (dim < 1) throw std::invalid_argument("GridConfig: dim must be >= 1");
    if (!((dim + 1) * theta0 > 1.0)) throw std::invalid_argument("GridConfig: need (n+1) theta0 > 1");
    if (depth < 0) throw std::invalid_argument("GridConfig: depth must be >= 0");
    if (systems < 0) throw std::invalid_argument("GridConfig: systems must be >= 0");
  }

  // Expected kube count per system: sum_k delta^{-nk}.
  double expected_kubes() const {
    double total = 0.0;
    for (int k = 0; k <= depth; ++k) total += std::exp(2.0 * dim * theta0 * k);
    return total;
  }

  std::uint64_t atom_count() const {
    if (atoms > 0) return atoms;
    const double finest = std::exp(2.0 * dim * theta0 * std::max(0, depth - 1));
    const double want = 4.0 * child_cap() * finest;
    return static_cast<std::uint64_t>(std::clamp(want, 4096.0, 4194304.0));
  }
};

// Kube K in system `system`; `node` indexes the shared tree.
struct KubeId {
  int system = 0;
  int node = 0;
  friend bool operator==(const KubeId&, const KubeId&) = default;
};

// Node of the boundary tree. The boundary cube of a node is the set of sphere
// points that descend to it, where each step picks the nearest child
// representative in rho(a, b) = |1 - <a, b>| (lowest index on ties).
struct GridNode {
  int level = 0;
  int parent = -1;
  std::vector<int> children;
  CVec rep;                   // representative on the sphere (base coordinates)
  double cap_radius = 2.0;    // the cube lies in {rho(., rep) < cap_radius}
  double atom_fraction = 1.0; // share of construction atoms; coarse measure estimate
};

inline double rho(std::span<const cplx> a, std::span<const cplx> b) { return std::abs(1.0 - inner(a, b)); }

// Level of the hyperbolic shell k theta0 <= d(z, 0) < (k+1) theta0.
inline int shell_level(double radius, double theta0) {
  if (radius <= 0.0) return 0;
  const double d = std::atanh(std::min(radius, 1.0 - 1e-16));
  return static_cast<int>(std::floor(d / theta0));
}

// |z| at the inner edge of shell k
inline double shell_radius(int k, double theta0) { return std::tanh(k * theta0); }

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

class DyadicGrid {
 public:
  DyadicGrid(GridConfig config, std::vector<GridNode> nodes, std::vector<std::vector<CVec>> rotations)
      : config_(config), nodes_(std::move(nodes)), rotations_(std::move(rotations)) {
    levels_.assign(static_cast<std::size_t>(config_.depth + 1), {});
    for (std::size_t i = 0; i < nodes_.size(); ++i) levels_[static_cast<std::size_t>(nodes_[i].level)].push_back(static_cast<int>(i));
  }

  const GridConfig& config() const { return config_; }
  int dim() const { return config_.dim; }
  int systems() const { return static_cast<int>(rotations_.size()); }
  int depth() const { return config_.depth; }
  double theta0() const { return config_.theta0; }
  const std::vector<GridNode>& nodes() const { return nodes_; }
  const GridNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const GridNode& node(KubeId k) const { return node(k.node); }
  const std::vector<int>& level(int k) const { return levels_[static_cast<std::size_t>(k)]; }
  const std::vector<std::vector<CVec>>& rotations() const { return rotations_; }
  std::size_t kube_count() const { return nodes_.size(); }

  // Sphere point in the base coordinates of `system`: U^* zeta.
  CVec to_base(int system, std::span<const cplx> zeta) const {
    const auto& cols = rotations_[static_cast<std::size_t>(system)];
    CVec out(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) out[j] = inner(zeta, cols[j]);
    return out;
  }

  CVec to_world(int system, std::span<const cplx> base) const {
    const auto& cols = rotations_[static_cast<std::size_t>(system)];
    CVec out(cols.size(), cplx{0.0, 0.0});
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < cols.size(); ++i) out[i] += base[j] * cols[j][i];
    return out;
  }

  // Descend to `level` along nearest child representatives, from the root or from `start`.
  int descend(std::span<const cplx> base_point, int level, int start = 0) const {
    int cur = start;
    for (int k = nodes_[static_cast<std::size_t>(start)].level; k < level; ++k) {
      const auto& ch = nodes_[static_cast<std::size_t>(cur)].children;
      int best = ch.front();
      double best_d = std::numeric_limits<double>::infinity();
      for (int c : ch) {
        const double d = rho(base_point, nodes_[static_cast<std::size_t>(c)].rep);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      cur = best;
    }
    return cur;
  }

  // Shell level of z, ignoring the horizon.
  int point_level(std::span<const cplx> z) const { return shell_level(norm(z), config_.theta0); }

  bool beyond_horizon(std::span<const cplx> z) const { return point_level(z) > config_.depth; }

  // Level-k kube of `system` whose tent contains z.
  KubeId locate(int system, std::span<const cplx> z, int k) const {
    check_system(system);
    const int lz = point_level(z);
    if (lz > config_.depth) throw HorizonError("locate: point beyond the depth horizon");
    if (k < 0 || k > config_.depth) throw std::out_of_range("locate: level outside [0, depth]");
    if (lz < k) throw std::domain_error("locate: point lies above the requested level");
    if (k == 0) return {system, 0};
    const double r = norm(z);
    CVec zeta(z.begin(), z.end());
    for (auto& c : zeta) c /= r;
    return {system, descend(to_base(system, zeta), k)};
  }

  // Kube containing z (its own shell level).
  KubeId locate(int system, std::span<const cplx> z) const { return locate(system, z, point_level(z)); }

  bool kube_contains(KubeId kube, std::span<const cplx> z) const {
    const int lz = point_level(z);
    const GridNode& nd = node(kube);
    if (lz != nd.level || norm2(z) >= 1.0) return false;
    return tent_contains(kube, z);
  }

  // Tents are radial cones over their boundary cube starting at the shell radius.
  // Points past the horizon belong to every tent above them.
  bool tent_contains(KubeId kube, std::span<const cplx> z) const {
    const GridNode& nd = node(kube);
    const double r = norm(z);
    if (r >= 1.0) return false;
    if (nd.level == 0) return true;
    if (r < shell_radius(nd.level, config_.theta0)) return false;
    CVec zeta(z.begin(), z.end());
    for (auto& c : zeta) c /= r;
    return descend(to_base(kube.system, zeta), nd.level) == kube.node;
  }

  // Tents of all systems containing z, levels 0..min(level(z), depth).
  std::vector<KubeId> tents_containing(std::span<const cplx> z) const {
    std::vector<KubeId> out;
    const int top = std::min(point_level(z), config_.depth);
    const double r = norm(z);
    for (int s = 0; s < systems(); ++s) {
      out.push_back({s, 0});
      if (top == 0) continue;
      CVec zeta(z.begin(), z.end());
      for (auto& c : zeta) c /= r;
      const CVec base = to_base(s, zeta);
      int cur = 0;
      for (int k = 1; k <= top; ++k) {
        cur = descend_one(base, cur);
        out.push_back({s, cur});
      }
    }
    return out;
  }

  // Kube center: the representative lifted to the middle of its shell.
  CVec kube_center(KubeId kube) const {
    const GridNode& nd = node(kube);
    if (nd.level == 0) return CVec(static_cast<std::size_t>(dim()), cplx{0.0, 0.0});
    const double r = std::tanh((nd.level + 0.5) * config_.theta0);
    return scaled(to_world(kube.system, nd.rep), r);
  }

  bool is_descendant(int node_id, int ancestor) const {
    for (int cur = node_id; cur >= 0; cur = nodes_[static_cast<std::size_t>(cur)].parent)
      if (cur == ancestor) return true;
    return false;
  }

  int ancestor_at(int node_id, int level) const {
    int cur = node_id;
    while (nodes_[static_cast<std::size_t>(cur)].level > level) cur = nodes_[static_cast<std::size_t>(cur)].parent;
    return cur;
  }

  // All descendants of a node within the horizon, including the node itself, in BFS order.
  std::vector<int> subtree(int node_id) const {
    std::vector<int> out{node_id};
    for (std::size_t i = 0; i < out.size(); ++i)
      for (int c : nodes_[static_cast<std::size_t>(out[i])].children) out.push_back(c);
    return out;
  }

 private:
  int descend_one(std::span<const cplx> base, int cur) const {
    const auto& ch = nodes_[static_cast<std::size_t>(cur)].children;
    int best = ch.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (int c : ch) {
      const double d = rho(base, nodes_[static_cast<std::size_t>(c)].rep);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    return best;
  }

  void check_system(int system) const {
    if (system < 0 || system >= systems()) throw std::out_of_range("system index out of range");
  }

  GridConfig config_;
  std::vector<GridNode> nodes_;
  std::vector<std::vector<int>> levels_;
  std::vector<std::vector<CVec>> rotations_;
};

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace detail {

// Haar-ish unitary from Gram-Schmidt on complex Gaussian columns.
inline std::vector<CVec> random_unitary(Sampler& s, int n) {
  std::vector<CVec> cols;
  while (static_cast<int>(cols.size()) < n) {
    CVec v(static_cast<std::size_t>(n));
    for (auto& c : v) c = s.complex_normal();
    for (const auto& q : cols) {
      const cplx p = inner(v, q);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * q[i];
    }
    const double r = norm(v);
    if (r < 1e-8) continue;
    for (auto& c : v) c /= r;
    cols.push_back(std::move(v));
  }
  return cols;
}

struct AtomSet {
  int n;
  std::vector<cplx> data;
  std::span<const cplx> at(std::size_t i) const { return {data.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)}; }
};

// Split the atoms of one cube into `count` children: farthest-point seeds, a few
// Lloyd steps with representatives snapped to atoms, and a final nearest-seed assignment.
inline std::vector<std::vector<std::uint32_t>> split_cube(const AtomSet& atoms, const std::vector<std::uint32_t>& members,
                                                          int count, std::vector<std::uint32_t>& seeds) {
  const std::size_t m = members.size();
  seeds.clear();
  seeds.push_back(members.front());
  std::vector<double> nearest(m, std::numeric_limits<double>::infinity());
  while (static_cast<int>(seeds.size()) < count) {
    const auto last = atoms.at(seeds.back());
    std::size_t arg = 0;
    double far = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      nearest[i] = std::min(nearest[i], rho(atoms.at(members[i]), last));
      if (nearest[i] > far) {
        far = nearest[i];
        arg = i;
      }
    }
    if (far <= 0.0) break;
    seeds.push_back(members[arg]);
  }
  const int c = static_cast<int>(seeds.size());
  std::vector<int> label(m, 0);
  auto assign = [&]() {
    for (std::size_t i = 0; i < m; ++i) {
      const auto a = atoms.at(members[i]);
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < c; ++j) {
        const double d = rho(a, atoms.at(seeds[static_cast<std::size_t>(j)]));
        if (d < best) {
          best = d;
          label[i] = j;
        }
      }
    }
  };
  for (int iter = 0; iter < 4; ++iter) {
    assign();
    std::vector<CVec> mean(static_cast<std::size_t>(c), CVec(static_cast<std::size_t>(atoms.n), cplx{0.0, 0.0}));
    for (std::size_t i = 0; i < m; ++i) {
      const auto a = atoms.at(members[i]);
      auto& acc = mean[static_cast<std::size_t>(label[i])];
      for (int d = 0; d < atoms.n; ++d) acc[static_cast<std::size_t>(d)] += a[static_cast<std::size_t>(d)];
    }
    std::vector<double> best(static_cast<std::size_t>(c), std::numeric_limits<double>::infinity());
    std::vector<std::uint32_t> snapped = seeds;
    for (std::size_t i = 0; i < m; ++i) {
      const auto j = static_cast<std::size_t>(label[i]);
      const double r = norm(mean[j]);
      if (r == 0.0) continue;
      // rho to the normalized centroid
      const double d = std::abs(1.0 - inner(atoms.at(members[i]), mean[j]) / r);
      if (d < best[j]) {
        best[j] = d;
        snapped[j] = members[i];
      }
    }
    seeds = snapped;
  }
  assign();
  std::vector<std::vector<std::uint32_t>> groups(static_cast<std::size_t>(c));
  for (std::size_t i = 0; i < m; ++i) groups[static_cast<std::size_t>(label[i])].push_back(members[i]);
  return groups;
}

}  // namespace detail

// Bounding caps are the probed cube extent inflated by this factor.
inline constexpr double kCapSafety = 1.25;

inline DyadicGrid build_grid(const GridConfig& config) {
  config.validate();
  if (config.expected_kubes() > static_cast<double>(config.max_kubes))
    throw ResourceError("build_grid: kube count would exceed the configured cap");
  const int n = config.dim;
  const std::uint64_t total_atoms = config.atom_count();
  Sampler root(config.seed, 0x6772696400000000ull);

  detail::AtomSet atoms{n, {}};
  atoms.data.reserve(total_atoms * static_cast<std::uint64_t>(n));
  {
    Sampler s = root.substream(1);
    for (std::uint64_t i = 0; i < total_atoms; ++i) {
      CVec p = sample_sphere(s, n);
      atoms.data.insert(atoms.data.end(), p.begin(), p.end());
    }
  }
  const double spacing = 0.25 * std::pow(static_cast<double>(total_atoms), -1.0 / n);
  const double delta_n = std::pow(config.delta(), n);
  const int cap = config.child_cap();

  std::vector<GridNode> nodes;
  std::vector<std::vector<std::uint32_t>> members;
  {
    GridNode r;
    r.level = 0;
    r.rep = unit_vector(n);
    r.cap_radius = 2.0;
    r.atom_fraction = 1.0;
    nodes.push_back(std::move(r));
    std::vector<std::uint32_t> all(total_atoms);
    for (std::uint32_t i = 0; i < total_atoms; ++i) all[i] = i;
    members.push_back(std::move(all));
  }
  std::vector<std::uint32_t> seeds;
  for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
    if (nodes[idx].level >= config.depth) continue;
    const int k = nodes[idx].level;
    const auto& mem = members[idx];
    const double target = static_cast<double>(total_atoms) * std::pow(delta_n, k + 1);
    int count = static_cast<int>(std::lround(static_cast<double>(mem.size()) / target));
    count = std::clamp(count, 1, cap);
    count = std::min<int>(count, static_cast<int>(mem.size()));
    auto groups = detail::split_cube(atoms, mem, count, seeds);
    for (std::size_t j = 0; j < groups.size(); ++j) {
      GridNode child;
      child.level = k + 1;
      child.parent = static_cast<int>(idx);
      const auto rep = atoms.at(seeds[j]);
      child.rep.assign(rep.begin(), rep.end());
      double far = 0.0;
      for (auto a : groups[j]) far = std::max(far, rho(atoms.at(a), rep));
      child.cap_radius = far;
      child.atom_fraction = static_cast<double>(groups[j].size()) / static_cast<double>(total_atoms);
      nodes[idx].children.push_back(static_cast<int>(nodes.size()));
      nodes.push_back(std::move(child));
      members.push_back(std::move(groups[j]));
    }
    members[idx].clear();
    members[idx].shrink_to_fit();
  }

  // Cube extents from an independent probe set; the atoms alone undersample the cube boundaries.
  {
    Sampler ps = root.substream(2);
    const std::uint64_t probes = std::min<std::uint64_t>(2 * total_atoms, 2097152);
    const DyadicGrid shape(config, nodes, {});
    for (std::uint64_t i = 0; i < probes; ++i) {
      const CVec p = sample_sphere(ps, n);
      int cur = 0;
      for (int k = 0; k < config.depth; ++k) {
        cur = shape.descend(p, k + 1, cur);
        auto& nd = nodes[static_cast<std::size_t>(cur)];
        nd.cap_radius = std::max(nd.cap_radius, rho(p, nd.rep));
      }
    }
    for (std::size_t i = 1; i < nodes.size(); ++i)
      nodes[i].cap_radius = std::min(2.0, kCapSafety * nodes[i].cap_radius + spacing);
  }

  std::vector<std::vector<CVec>> rotations;
  for (int s = 0; s < config.system_count(); ++s) {
    Sampler rs = root.substream(1000 + static_cast<std::uint64_t>(s));
    rotations.push_back(detail::random_unitary(rs, n));
  }
  return DyadicGrid(config, std::move(nodes), std::move(rotations));
}

// ---------------------------------------------------------------------------
// Cone sampling: uniform points of {r z : z in cap(rep, t), r_lo <= r < 1}
// ---------------------------------------------------------------------------

// Samples u = <zeta, rep> from a box around the cap in the u-plane and carries the
// density (n-1)/pi (1-|u|^2)^{n-2} of u as an importance weight; for n = 1 the cap
// is an arc and the weight is one.
class ConeSampler {
 public:
  ConeSampler(const DyadicGrid& grid, int system, std::span<const cplx> rep_base, double cap, double r_lo)
      : grid_(&grid), system_(system), n_(grid.dim()), frame_(rep_base), cap_(std::min(cap, 2.0)), r_lo_(r_lo) {
    if (n_ == 1) {
      phi_ = 2.0 * std::asin(std::min(cap_ / 2.0, 1.0));
      sphere_mass_ = phi_ / kPi;
    } else {
      x_lo_ = std::max(-1.0, 1.0 - cap_);
      y_hi_ = std::min(cap_, 1.0);
      sphere_mass_ = (1.0 - x_lo_) * 2.0 * y_hi_ * (n_ - 1) / kPi;
    }
    shell_volume_ = unit_ball_volume(n_) * (1.0 - std::pow(r_lo_, 2 * n_));
  }

  // Volume of the proposal cone times the expected weight normalizer.
  double scale() const { return sphere_mass_ * shell_volume_; }

  struct Draw {
    CVec point;
    double weight;
  };

  Draw draw(Sampler& s) const {
    CVec base(static_cast<std::size_t>(n_), cplx{0.0, 0.0});
    double weight = 1.0;
    if (n_ == 1) {
      base[0] = std::polar(1.0, s.uniform(-phi_, phi_)) * frame_[0][0];
    } else {
      const cplx u{s.uniform(x_lo_, 1.0), s.uniform(-y_hi_, y_hi_)};
      const double uu = std::norm(u);
      if (uu >= 1.0 || std::abs(1.0 - u) >= cap_) return {{}, 0.0};
      weight = std::pow(1.0 - uu, n_ - 2);
      CVec xi(static_cast<std::size_t>(n_));
      xi[0] = std::conj(u);
      CVec t(static_cast<std::size_t>(n_ - 1));
      for (auto& c : t) c = s.complex_normal();
      const double tn = norm(t);
      const double tr = std::sqrt(1.0 - uu) / tn;
      for (std::size_t j = 1; j < xi.size(); ++j) xi[j] = t[j - 1] * tr;
      base = frame_.point(xi);
    }
    const double a = std::pow(r_lo_, 2 * n_);
    double r = std::pow(s.uniform(a, 1.0), 1.0 / (2.0 * n_));
    r = std::min(r, 1.0 - 4.0 * kBoundaryClamp);
    CVec world = grid_->to_world(system_, base);
    for (auto& c : world) c *= r;
    return {std::move(world), weight};
  }

  // Like draw() but rejection-samples the weight, so accepted points are uniform on the cone.
  std::optional<CVec> draw_uniform(Sampler& s) const {
    auto d = draw(s);
    if (d.weight <= 0.0) return std::nullopt;
    if (n_ > 2 && s.uniform() > d.weight) return std::nullopt;
    return std::move(d.point);
  }

 private:
  const DyadicGrid* grid_;
  int system_;
  int n_;
  Frame frame_;
  double cap_;
  double r_lo_;
  double phi_ = 0.0, x_lo_ = 0.0, y_hi_ = 0.0;
  double sphere_mass_ = 1.0;
  double shell_volume_ = 0.0;
};

inline ConeSampler tent_cone(const DyadicGrid& grid, KubeId kube) {
  const GridNode& nd = grid.node(kube);
  return ConeSampler(grid, kube.system, nd.rep, nd.level == 0 ? 2.0 : nd.cap_radius,
                     shell_radius(nd.level, grid.theta0()));
}

inline std::uint64_t kube_stream(KubeId kube) {
  return mix64((static_cast<std::uint64_t>(kube.system) << 40) ^ static_cast<std::uint64_t>(kube.node));
}

// Integral of h over the tent of `kube` by cone sampling.
template <typename T, typename H>
MCEstimate<T> tent_integral(const DyadicGrid& grid, KubeId kube, H&& h, const Sampler& sampler, std::uint64_t budget) {
  const ConeSampler cone = tent_cone(grid, kube);
  detail::Moments m;
  detail::for_each_sample(sampler, budget, [&](Sampler& s) {
    auto d = cone.draw(s);
    if (d.weight > 0.0 && grid.tent_contains(kube, d.point)) {
      m.add(d.weight * cplx(h(std::span<const cplx>(d.point))));
    } else {
      m.add(cplx{0.0, 0.0});
    }
  });
  MCEstimate<T> out;
  if constexpr (std::is_same_v<T, double>) {
    out.value = cone.scale() * m.mean().real();
  } else {
    out.value = cone.scale() * m.mean();
  }
  out.std_err = cone.scale() * m.mean_stderr();
  out.samples = budget;
  out.seed = sampler.seed();
  return out;
}

inline constexpr std::uint64_t kTentVolumeBudget = 32768;
inline constexpr std::uint64_t kTentAverageBudget = 4096;

inline RealEstimate tent_volume(const DyadicGrid& grid, KubeId kube, std::uint64_t budget = kTentVolumeBudget) {
  if (grid.node(kube).level == 0) {
    return {unit_ball_volume(grid.dim()), 0.0, budget, grid.config().seed};
  }
  auto one = [](std::span<const cplx>) { return 1.0; };
  return tent_integral<double>(grid, kube, one, Sampler(grid.config().seed, kube_stream(kube)), budget);
}

// `count` uniform points of the tent, deterministic in (grid seed, kube, stream).
inline std::vector<CVec> tent_points(const DyadicGrid& grid, KubeId kube, std::size_t count, std::uint64_t stream = 0) {
  const ConeSampler cone = tent_cone(grid, kube);
  Sampler s = Sampler(grid.config().seed, kube_stream(kube)).substream(0x70740000ull + stream);
  std::vector<CVec> out;
  out.reserve(count);
  std::size_t guard = 0;
  while (out.size() < count) {
    if (++guard > 1000 * count + 100000) throw std::runtime_error("tent_points: acceptance rate collapsed");
    auto p = cone.draw_uniform(s);
    if (p && grid.tent_contains(kube, *p)) out.push_back(std::move(*p));
  }
  return out;
}

// Tent volumes computed once per grid and reused.
class TentVolumeCache {
 public:
  explicit TentVolumeCache(const DyadicGrid& grid, std::uint64_t budget = kTentVolumeBudget)
      : grid_(&grid), budget_(budget), values_(grid.kube_count() * static_cast<std::size_t>(grid.systems())) {}

  const RealEstimate& operator()(KubeId kube) {
    auto& slot = values_[static_cast<std::size_t>(kube.system) * grid_->kube_count() + static_cast<std::size_t>(kube.node)];
    if (!slot) slot = tent_volume(*grid_, kube, budget_);
    return *slot;
  }

  const DyadicGrid& grid() const { return *grid_; }

 private:
  const DyadicGrid* grid_;
  std::uint64_t budget_;
  std::vector<std::optional<RealEstimate>> values_;
};

// ---------------------------------------------------------------------------
// Tent cover and hyperbolic expansion
// ---------------------------------------------------------------------------

struct TentCover {
  KubeId kube;
  int level = 0;
};

// Smallest grid tent (deepest level, then lowest system) containing every one of
// `samples` sampled points of T_z.
inline TentCover cover_tent(const DyadicGrid& grid, const BallPoint& z, std::uint64_t samples = 2048) {
  if (z.is_origin()) return {{0, 0}, 0};
  if (grid.beyond_horizon(z.coords())) throw HorizonError("cover_tent: apex beyond the depth horizon");
  const Region tz = CarlesonTent{z};
  const Proposal prop = region_proposal(tz);
  std::vector<CVec> pts;
  Sampler s(grid.config().seed, 0xC0FE000000000000ull);
  for (std::uint64_t i = 0; i < 100 * samples && pts.size() < samples; ++i) {
    CVec w = prop.draw(s);
    if (region_contains(tz, w)) pts.push_back(std::move(w));
  }
  const int top = grid.point_level(z.coords());
  for (int k = top; k >= 1; --k) {
    for (int sys = 0; sys < grid.systems(); ++sys) {
      const KubeId cand = grid.locate(sys, z.coords(), k);
      bool all = true;
      for (const auto& w : pts) {
        if (!grid.tent_contains(cand, w)) {
          all = false;
          break;
        }
      }
      if (all) return {cand, k};
    }
  }
  return {{0, 0}, 0};
}

// {z : d(z, tent) < eta}. Membership is tested on z and on a fixed cloud of probe
// points filling D(z, eta), so it is exact up to the probe resolution.
class TentExpansion {
 public:
  TentExpansion(const DyadicGrid& grid, KubeId base, double eta, int probes = 48)
      : grid_(&grid), base_(base), eta_(eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("TentExpansion: eta must be positive");
    Sampler s(0xE7A5ull, static_cast<std::uint64_t>(grid.dim()));
    const int n = grid.dim();
    for (int i = 0; i < probes; ++i) {
      CVec u = (i % 2 == 0) ? sample_sphere(s, n) : sample_unit_ball(s, n);
      for (auto& c : u) c *= 0.999;
      probes_.push_back(std::move(u));
    }
  }

  KubeId base() const { return base_; }
  double eta() const { return eta_; }

  bool contains(std::span<const cplx> z) const {
    if (norm2(z) >= 1.0) return false;
    if (grid_->tent_contains(base_, z)) return true;
    if (!BallPoint::admissible(z)) return false;
    const BallPoint zp(CVec(z.begin(), z.end()));
    const auto p = ellipsoid_params(zp, eta_);
    const Frame frame(z);
    const double a = p.R * p.sigma, b = p.R * std::sqrt(p.sigma);
    for (const auto& u : probes_) {
      CVec v = u;
      v[0] *= a;
      for (std::size_t j = 1; j < v.size(); ++j) v[j] *= b;
      CVec w = frame.point(v);
      for (std::size_t j = 0; j < w.size(); ++j) w[j] += p.center[j];
      if (grid_->tent_contains(base_, w)) return true;
    }
    return false;
  }

  // A cone around the base tent that contains the expansion.
  ConeSampler cone() const {
    const GridNode& nd = grid_->node(base_);
    const double d_lo = std::max(0.0, nd.level * grid_->theta0() - eta_);
    const double r_lo = std::tanh(d_lo);
    if (nd.level == 0 || r_lo < 0.1) return ConeSampler(*grid_, base_.system, nd.rep, 2.0, 0.0);
    const double R = std::tanh(eta_);
    const double spread = 8.0 * (1.0 - r_lo) / ((1.0 - R * R) * r_lo);
    const double cap = std::pow(std::sqrt(nd.cap_radius) + std::sqrt(spread), 2);
    return ConeSampler(*grid_, base_.system, nd.rep, cap, r_lo);
  }

  RealEstimate volume(std::uint64_t budget = kTentVolumeBudget) const {
    const ConeSampler c = cone();
    detail::Moments m;
    detail::for_each_sample(Sampler(grid_->config().seed, kube_stream(base_) ^ 0xE0ull), budget, [&](Sampler& s) {
      auto d = c.draw(s);
      m.add(d.weight > 0.0 && contains(d.point) ? d.weight : 0.0);
    });
    return {c.scale() * m.mean().real(), c.scale() * m.mean_stderr(), budget, grid_->config().seed};
  }

  std::vector<CVec> points(std::size_t count, std::uint64_t stream = 0) const {
    const ConeSampler c = cone();
    Sampler s = Sampler(grid_->config().seed, kube_stream(base_) ^ 0xE1ull).substream(stream);
    std::vector<CVec> out;
    std::size_t guard = 0;
    while (out.size() < count) {
      if (++guard > 2000 * count + 100000) throw std::runtime_error("TentExpansion: acceptance rate collapsed");
      auto p = c.draw_uniform(s);
      if (p && contains(*p)) out.push_back(std::move(*p));
    }
    return out;
  }

 private:
  const DyadicGrid* grid_;
  KubeId base_;
  double eta_;
  std::vector<CVec> probes_;
};

}  // namespace blab
