#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "core.hpp"

namespace blab {

// ---------------------------------------------------------------------------
// Vector helpers on C^n
// ---------------------------------------------------------------------------

inline void require_same_dim(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
}

// <a,b> = sum_j a_j conj(b_j)
inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  require_same_dim(a, b);
  cplx s{0.0, 0.0};
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::conj(b[j]);
  return s;
}

inline double norm2(std::span<const cplx> a) {
  double s = 0.0;
  for (const auto& x : a) s += std::norm(x);
  return s;
}

inline double norm(std::span<const cplx> a) { return std::sqrt(norm2(a)); }

inline CVec scaled(std::span<const cplx> a, cplx s) {
  CVec out(a.begin(), a.end());
  for (auto& x : out) x *= s;
  return out;
}

inline CVec added(std::span<const cplx> a, std::span<const cplx> b) {
  require_same_dim(a, b);
  CVec out(a.begin(), a.end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += b[j];
  return out;
}

inline CVec subtracted(std::span<const cplx> a, std::span<const cplx> b) {
  require_same_dim(a, b);
  CVec out(a.begin(), a.end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] -= b[j];
  return out;
}

inline double distance(std::span<const cplx> a, std::span<const cplx> b) { return norm(subtracted(a, b)); }

inline CVec unit_vector(int n, int axis = 0) {
  CVec e(static_cast<std::size_t>(n), cplx{0.0, 0.0});
  e[static_cast<std::size_t>(axis)] = 1.0;
  return e;
}

// ---------------------------------------------------------------------------
// BallPoint
// ---------------------------------------------------------------------------

// A point of the open unit ball of C^n, kept at least kBoundaryClamp away from the sphere.
class BallPoint {
 public:
  explicit BallPoint(CVec coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw std::invalid_argument("BallPoint: dimension must be >= 1");
    const double r = blab::norm(coords_);
    if (!(r < 1.0 - kBoundaryClamp)) throw std::domain_error("BallPoint: |z| must be < 1 - 1e-12");
  }

  BallPoint(std::initializer_list<cplx> coords) : BallPoint(CVec(coords)) {}

  static BallPoint origin(int n) { return BallPoint(CVec(static_cast<std::size_t>(n), cplx{0.0, 0.0})); }

  // (s, 0, ..., 0)
  static BallPoint on_axis(int n, cplx s) {
    CVec v(static_cast<std::size_t>(n), cplx{0.0, 0.0});
    v[0] = s;
    return BallPoint(std::move(v));
  }

  static bool admissible(std::span<const cplx> v) { return !v.empty() && blab::norm(v) < 1.0 - kBoundaryClamp; }

  int dim() const { return static_cast<int>(coords_.size()); }
  const CVec& coords() const { return coords_; }
  cplx operator[](std::size_t j) const { return coords_[j]; }
  double norm() const { return blab::norm(coords_); }
  bool is_origin() const { return norm2(coords_) == 0.0; }

  operator std::span<const cplx>() const { return coords_; }

  friend bool operator==(const BallPoint& a, const BallPoint& b) { return a.coords_ == b.coords_; }

 private:
  CVec coords_;
};

inline cplx herm_inner(const BallPoint& z, const BallPoint& w) { return inner(z.coords(), w.coords()); }

// ---------------------------------------------------------------------------
// Radial / tangential decomposition
// ---------------------------------------------------------------------------

// (P_z w, Q_z w): projection onto span(z) and onto its orthogonal complement.
inline std::pair<CVec, CVec> radial_split(std::span<const cplx> z, std::span<const cplx> w) {
  require_same_dim(z, w);
  const double zz = norm2(z);
  if (zz == 0.0) throw std::invalid_argument("radial_split: z must be nonzero");
  const cplx coef = inner(w, z) / zz;
  CVec p = scaled(z, coef);
  CVec q = subtracted(w, p);
  return {std::move(p), std::move(q)};
}

// Orthonormal frame e_1 = z/|z|, e_2..e_n completing it. The completion is the
// Householder reflector taking e_1 to the standard basis vector, so the frame
// is a deterministic function of z. For z = 0 the standard basis is used.
class Frame {
 public:
  explicit Frame(std::span<const cplx> z) {
    const auto n = z.size();
    if (n == 0) throw std::invalid_argument("Frame: empty vector");
    vectors_.assign(n, CVec(n, cplx{0.0, 0.0}));
    const double r = norm(z);
    if (r == 0.0) {
      for (std::size_t j = 0; j < n; ++j) vectors_[j][j] = 1.0;
      return;
    }
    CVec x(z.begin(), z.end());
    for (auto& c : x) c /= r;
    const double a0 = std::abs(x[0]);
    const cplx alpha = a0 > 0.0 ? -x[0] / a0 : cplx{-1.0, 0.0};
    CVec v = x;
    v[0] -= alpha;
    const double vv = norm2(v);
    vectors_[0] = x;
    // Columns 1..n-1 of H = I - 2 v v^* / (v^* v).
    for (std::size_t col = 1; col < n; ++col) {
      CVec& e = vectors_[col];
      for (std::size_t row = 0; row < n; ++row) {
        e[row] = (row == col ? 1.0 : 0.0) - 2.0 * v[row] * std::conj(v[col]) / vv;
      }
    }
  }

  int dim() const { return static_cast<int>(vectors_.size()); }
  const CVec& operator[](std::size_t j) const { return vectors_[j]; }

  // xi_j = <w, e_j>
  CVec coordinates(std::span<const cplx> w) const {
    CVec xi(vectors_.size());
    for (std::size_t j = 0; j < vectors_.size(); ++j) xi[j] = inner(w, vectors_[j]);
    return xi;
  }

  CVec point(std::span<const cplx> xi) const {
    const auto n = vectors_.size();
    CVec w(n, cplx{0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) w[i] += xi[j] * vectors_[j][i];
    return w;
  }

 private:
  std::vector<CVec> vectors_;
};

// ---------------------------------------------------------------------------
// Automorphisms and distances
// ---------------------------------------------------------------------------

// phi_a(w) = (a - P_a w - sqrt(1-|a|^2) Q_a w) / (1 - <w,a>)
inline CVec mobius_involution(std::span<const cplx> a, std::span<const cplx> w) {
  require_same_dim(a, w);
  const double aa = norm2(a);
  if (aa == 0.0) return scaled(w, -1.0);
  const cplx wa = inner(w, a);
  const double sa = std::sqrt(1.0 - aa);
  const cplx denom = 1.0 - wa;
  CVec out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const cplx pw = wa / aa * a[j];
    const cplx qw = w[j] - pw;
    out[j] = (a[j] - pw - sa * qw) / denom;
  }
  return out;
}

inline BallPoint mobius_involution(const BallPoint& a, const BallPoint& w) {
  CVec v = mobius_involution(a.coords(), w.coords());
  // Round-off can push |phi_a(w)| a hair past the clamp when w is near the sphere.
  const double r = norm(v);
  if (r >= 1.0 - kBoundaryClamp) {
    for (auto& c : v) c *= (1.0 - 2.0 * kBoundaryClamp) / r;
  }
  return BallPoint(std::move(v));
}

inline constexpr double kDistanceSentinel = 1e3;

// 1 - |phi_z(w)|^2 = (1-|z|^2)(1-|w|^2) / |1-<z,w>|^2
inline double pseudo_hyperbolic_complement(std::span<const cplx> z, std::span<const cplx> w) {
  const double num = (1.0 - norm2(z)) * (1.0 - norm2(w));
  return num / std::norm(1.0 - inner(z, w));
}

inline double bergman_distance(std::span<const cplx> z, std::span<const cplx> w) {
  const double q = std::clamp(pseudo_hyperbolic_complement(z, w), 0.0, 1.0);
  const double t = std::sqrt(1.0 - q);
  if (q <= 0.0) return kDistanceSentinel;
  const double d = 0.5 * std::log((1.0 + t) * (1.0 + t) / q);
  return std::min(d, kDistanceSentinel);
}

inline double bergman_distance(const BallPoint& z, const BallPoint& w) {
  return bergman_distance(std::span<const cplx>(z.coords()), std::span<const cplx>(w.coords()));
}

inline double koranyi_distance(std::span<const cplx> z, std::span<const cplx> w) {
  const double rz = norm(z), rw = norm(w);
  if (rz == 0.0 || rw == 0.0) return rz + rw;
  return std::abs(rz - rw) + std::abs(1.0 - inner(z, w) / (rz * rw));
}

inline double koranyi_distance(const BallPoint& z, const BallPoint& w) {
  return koranyi_distance(std::span<const cplx>(z.coords()), std::span<const cplx>(w.coords()));
}

// ---------------------------------------------------------------------------
// Ellipsoid form of Bergman balls
// ---------------------------------------------------------------------------

struct EllipsoidParams {
  double R = 0.0;      // tanh r
  CVec center;         // (1-R^2) z / (1-R^2|z|^2)
  double sigma = 1.0;  // (1-|z|^2) / (1-R^2|z|^2)
  double rhat = 0.0;   // 2 R sigma
};

// z = 0 is accepted and gives the limiting values sigma = 1, c = 0.
inline EllipsoidParams ellipsoid_params(const BallPoint& z, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("ellipsoid_params: r must be positive");
  EllipsoidParams p;
  p.R = std::tanh(r);
  const double R2 = p.R * p.R;
  const double zz = norm2(z.coords());
  const double d = 1.0 - R2 * zz;
  p.center = scaled(z.coords(), (1.0 - R2) / d);
  p.sigma = (1.0 - zz) / d;
  p.rhat = 2.0 * p.R * p.sigma;
  return p;
}

// Ellipsoid membership; equals D(z,r) for z != 0.
inline bool in_bergman_ellipsoid(const BallPoint& z, const EllipsoidParams& p, std::span<const cplx> w) {
  if (norm2(w) >= 1.0) return false;
  if (z.is_origin()) return norm(w) < p.R;
  auto [pw, qw] = radial_split(z.coords(), w);
  const double radial = norm2(subtracted(pw, p.center)) / (p.R * p.R * p.sigma * p.sigma);
  const double tangential = norm2(qw) / (p.R * p.R * p.sigma);
  return radial + tangential < 1.0;
}

// |D(z,r)| = (pi^n/n!) R^{2n} sigma^{n+1}
inline double bergman_ball_volume(const BallPoint& z, double r) {
  const auto p = ellipsoid_params(z, r);
  const int n = z.dim();
  return unit_ball_volume(n) * std::pow(p.R, 2 * n) * std::pow(p.sigma, n + 1);
}

// |E(z,r)| = pi r^2 * (pi r)^{n-1}
inline double polydisk_volume(int n, double r) { return kPi * r * r * std::pow(kPi * r, n - 1); }

// E(z,r) lies inside the ball iff (|z|+r)^2 + (n-1) r < 1.
inline bool polydisk_inside_ball(const BallPoint& z, double r) {
  const double a = z.norm() + r;
  return a * a + (z.dim() - 1) * r < 1.0;
}

}  // namespace blab
