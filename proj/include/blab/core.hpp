#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace blab {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;

// Points closer than this to the sphere are rejected.
inline constexpr double kBoundaryClamp = 1e-12;

// Query beyond the depth horizon of a dyadic grid.
class HorizonError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A construction exceeded a configured resource cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Monte Carlo value with its standard error and provenance.
template <typename T>
struct MCEstimate {
  T value{};
  double std_err = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  double lower(double sigmas = 3.0) const { return std::real(value) - sigmas * std_err; }
  double upper(double sigmas = 3.0) const { return std::real(value) + sigmas * std_err; }
};

using RealEstimate = MCEstimate<double>;
using ComplexEstimate = MCEstimate<cplx>;

// Estimated volume of a set, from a hit count inside a sampled superset.
struct MeasureEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  std::string tag;

  double lower(double sigmas = 3.0) const { return value - sigmas * std_err; }
  double upper(double sigmas = 3.0) const { return value + sigmas * std_err; }
};

// c_n = n!/pi^n
inline double bergman_constant(int n) {
  double c = 1.0;
  for (int j = 1; j <= n; ++j) c *= static_cast<double>(j) / kPi;
  return c;
}

// Lebesgue volume of the Euclidean ball of radius r in C^n = R^{2n}.
inline double euclidean_ball_volume(int n, double r) {
  double v = 1.0;
  for (int j = 1; j <= n; ++j) v *= kPi * r * r / static_cast<double>(j);
  return v;
}

inline double unit_ball_volume(int n) { return euclidean_ball_volume(n, 1.0); }

}  // namespace blab
