#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "geometry.hpp"
#include "rng.hpp"

namespace blab {

// Subsets of the ball that carry a membership predicate. Inequalities are strict
// as written except for the annulus U_m, whose two bounds are closed.
struct WholeBall {
  int dim = 1;
};
struct EuclideanBall {
  BallPoint center;
  double radius;
};
struct Polydisk {  // E(z, r): radius r along z, sqrt(r) in the tangential slots
  BallPoint center;
  double radius;
};
struct BergmanBall {  // D(z, r) with r the hyperbolic radius
  BallPoint center;
  double radius;
};
struct KoranyiBall {
  BallPoint center;
  double radius;
};
struct CarlesonTent {  // T_z; T_0 is the whole ball
  BallPoint apex;
};
struct Annulus {  // U_m = {2^{m-k-1} <= |1 - z_1| <= 2^{m-k}}
  int dim = 1;
  int k = 1;
  int m = 0;
};

using Region = std::variant<WholeBall, EuclideanBall, Polydisk, BergmanBall, KoranyiBall, CarlesonTent, Annulus>;

inline Annulus make_annulus(int dim, int k, int m) {
  if (!(0 < m && m < k)) throw std::invalid_argument("Annulus: need 0 < m < k");
  return Annulus{dim, k, m};
}

inline int region_dim(const Region& region) {
  return std::visit(
      [](const auto& r) -> int {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, WholeBall> || std::is_same_v<T, Annulus>) {
          return r.dim;
        } else if constexpr (std::is_same_v<T, CarlesonTent>) {
          return r.apex.dim();
        } else {
          return r.center.dim();
        }
      },
      region);
}

inline std::string region_name(const Region& region) {
  static const char* names[] = {"ball", "euclidean_ball", "polydisk", "bergman_ball", "koranyi_ball", "carleson_tent", "annulus"};
  return names[region.index()];
}

// Membership of E(z, r), with the frame of z fixing the tangential coordinates.
inline bool in_polydisk(const BallPoint& z, double r, std::span<const cplx> w) {
  const Frame frame(z.coords());
  const CVec xi = frame.coordinates(w);
  if (!(std::abs(xi[0] - z.norm()) < r)) return false;
  const double s = std::sqrt(r);
  for (std::size_t j = 1; j < xi.size(); ++j)
    if (!(std::abs(xi[j]) < s)) return false;
  return true;
}

inline bool in_carleson_tent(const BallPoint& z, std::span<const cplx> w) {
  if (z.is_origin()) return true;
  const double r = z.norm();
  return std::abs(1.0 - inner(z.coords(), w) / r) < 1.0 - r;
}

inline bool region_contains(const Region& region, std::span<const cplx> w) {
  if (norm2(w) >= 1.0) return false;
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, WholeBall>) {
          return true;
        } else if constexpr (std::is_same_v<T, EuclideanBall>) {
          return distance(r.center.coords(), w) < r.radius;
        } else if constexpr (std::is_same_v<T, Polydisk>) {
          return in_polydisk(r.center, r.radius, w);
        } else if constexpr (std::is_same_v<T, BergmanBall>) {
          return bergman_distance(r.center.coords(), w) < r.radius;
        } else if constexpr (std::is_same_v<T, KoranyiBall>) {
          return koranyi_distance(r.center.coords(), w) < r.radius;
        } else if constexpr (std::is_same_v<T, CarlesonTent>) {
          return in_carleson_tent(r.apex, w);
        } else {
          const double d = std::abs(1.0 - w[0]);
          return std::ldexp(1.0, r.m - r.k - 1) <= d && d <= std::ldexp(1.0, r.m - r.k);
        }
      },
      region);
}

// Closed-form volume when one exists.
inline std::optional<double> region_exact_volume(const Region& region) {
  return std::visit(
      [](const auto& r) -> std::optional<double> {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, WholeBall>) {
          return unit_ball_volume(r.dim);
        } else if constexpr (std::is_same_v<T, EuclideanBall>) {
          if (r.center.norm() + r.radius <= 1.0) return euclidean_ball_volume(r.center.dim(), r.radius);
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Polydisk>) {
          if (polydisk_inside_ball(r.center, r.radius)) return polydisk_volume(r.center.dim(), r.radius);
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, BergmanBall>) {
          return bergman_ball_volume(r.center, r.radius);
        } else if constexpr (std::is_same_v<T, CarlesonTent>) {
          if (r.apex.is_origin()) return unit_ball_volume(r.apex.dim());
          return std::nullopt;
        } else {
          return std::nullopt;
        }
      },
      region);
}

// ---------------------------------------------------------------------------
// Uniform samplers
// ---------------------------------------------------------------------------

// Uniform in the unit ball of C^n (direction on S^{2n-1}, radius U^{1/(2n)}).
inline CVec sample_unit_ball(Sampler& s, int n) {
  if (n == 0) return {};
  CVec v(static_cast<std::size_t>(n));
  for (auto& c : v) c = s.complex_normal();
  const double r = std::pow(s.uniform(), 1.0 / (2.0 * n)) / norm(v);
  for (auto& c : v) c *= r;
  return v;
}

inline CVec sample_sphere(Sampler& s, int n) {
  CVec v(static_cast<std::size_t>(n));
  for (auto& c : v) c = s.complex_normal();
  const double r = norm(v);
  for (auto& c : v) c /= r;
  return v;
}

// Proposal distribution: uniform on a superset with known volume. Points are
// rejected by membership afterwards, so the proposal need only contain the region.
class Proposal {
 public:
  enum class Kind { Ball, EuclideanBall, Polydisk, Ellipsoid, Cap };

  static Proposal whole_ball(int n) {
    Proposal p(Kind::Ball, n);
    p.volume_ = unit_ball_volume(n);
    return p;
  }

  static Proposal euclidean_ball(const CVec& center, double radius) {
    Proposal p(Kind::EuclideanBall, static_cast<int>(center.size()));
    p.center_ = center;
    p.a_ = radius;
    p.volume_ = euclidean_ball_volume(p.n_, radius);
    return p;
  }

  static Proposal polydisk(const BallPoint& z, double r) {
    Proposal p(Kind::Polydisk, z.dim());
    p.frame_ = Frame(z.coords());
    p.center_ = z.coords();
    p.a_ = r;
    p.b_ = z.norm();
    p.volume_ = polydisk_volume(p.n_, r);
    return p;
  }

  static Proposal ellipsoid(const BallPoint& z, double r) {
    Proposal p(Kind::Ellipsoid, z.dim());
    const auto e = ellipsoid_params(z, r);
    p.frame_ = Frame(z.coords());
    p.center_ = e.center;
    p.a_ = e.R * e.sigma;
    p.b_ = e.R * std::sqrt(e.sigma);
    p.volume_ = bergman_ball_volume(z, r);
    return p;
  }

  // {xi_1 : rho_in <= |1 - xi_1| < rho_out} x {|xi'| < tau} in the frame of `direction`.
  static Proposal cap(std::span<const cplx> direction, double rho_in, double rho_out, double tau) {
    Proposal p(Kind::Cap, static_cast<int>(direction.size()));
    p.frame_ = Frame(direction);
    p.a_ = rho_in;
    p.b_ = rho_out;
    p.tau_ = tau;
    p.volume_ = kPi * (rho_out * rho_out - rho_in * rho_in) * euclidean_ball_volume(p.n_ - 1, tau);
    return p;
  }

  int dim() const { return n_; }
  double volume() const { return volume_; }
  Kind kind() const { return kind_; }

  CVec draw(Sampler& s) const {
    switch (kind_) {
      case Kind::Ball:
        return sample_unit_ball(s, n_);
      case Kind::EuclideanBall: {
        CVec u = sample_unit_ball(s, n_);
        for (std::size_t j = 0; j < u.size(); ++j) u[j] = center_[j] + a_ * u[j];
        return u;
      }
      case Kind::Polydisk: {
        CVec xi(static_cast<std::size_t>(n_));
        xi[0] = b_ + a_ * s.unit_disk();
        const double t = std::sqrt(a_);
        for (std::size_t j = 1; j < xi.size(); ++j) xi[j] = t * s.unit_disk();
        return frame_.point(xi);
      }
      case Kind::Ellipsoid: {
        CVec u = sample_unit_ball(s, n_);
        u[0] *= a_;
        for (std::size_t j = 1; j < u.size(); ++j) u[j] *= b_;
        CVec w = frame_.point(u);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] += center_[j];
        return w;
      }
      case Kind::Cap: {
        CVec xi(static_cast<std::size_t>(n_));
        const double r = std::sqrt(s.uniform(a_ * a_, b_ * b_));
        xi[0] = 1.0 - std::polar(r, 2.0 * kPi * s.uniform());
        if (n_ > 1) {
          CVec t = sample_unit_ball(s, n_ - 1);
          for (std::size_t j = 1; j < xi.size(); ++j) xi[j] = tau_ * t[j - 1];
        }
        return frame_.point(xi);
      }
    }
    return {};
  }

 private:
  Proposal(Kind kind, int n) : kind_(kind), n_(n), frame_(unit_vector(n)) {}

  Kind kind_;
  int n_;
  Frame frame_;
  CVec center_;
  double a_ = 0.0, b_ = 0.0, tau_ = 0.0;
  double volume_ = 0.0;
};

// A superset of the region that can be sampled uniformly.
inline Proposal region_proposal(const Region& region) {
  return std::visit(
      [](const auto& r) -> Proposal {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, WholeBall>) {
          return Proposal::whole_ball(r.dim);
        } else if constexpr (std::is_same_v<T, EuclideanBall>) {
          return Proposal::euclidean_ball(r.center.coords(), r.radius);
        } else if constexpr (std::is_same_v<T, Polydisk>) {
          return Proposal::polydisk(r.center, r.radius);
        } else if constexpr (std::is_same_v<T, BergmanBall>) {
          return Proposal::ellipsoid(r.center, r.radius);
        } else if constexpr (std::is_same_v<T, KoranyiBall>) {
          const double rz = r.center.norm();
          const double h = 1.0 - rz;
          const double rho = h + 2.0 * r.radius;
          if (r.radius >= rz || rho >= 1.0) return Proposal::whole_ball(r.center.dim());
          return Proposal::cap(r.center.coords(), 0.0, rho, std::sqrt(2.0 * r.radius));
        } else if constexpr (std::is_same_v<T, CarlesonTent>) {
          if (r.apex.is_origin()) return Proposal::whole_ball(r.apex.dim());
          const double h = 1.0 - r.apex.norm();
          return Proposal::cap(r.apex.coords(), 0.0, h, std::sqrt(2.0 * h));
        } else {
          const double hi = std::ldexp(1.0, r.m - r.k);
          return Proposal::cap(unit_vector(r.dim), 0.5 * hi, hi, std::sqrt(2.0 * hi));
        }
      },
      region);
}

}  // namespace blab
