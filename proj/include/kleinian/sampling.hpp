#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "geometry.hpp"

namespace kleinian {

inline constexpr std::uint64_t kProbeSeed = 0x5eed2024ULL;

/// Deterministic probe set: `count` points in [-2,2]^3 plus 0, infinity and the unit vectors.
inline std::vector<ExtPoint> probe_points(std::size_t count = 50, std::uint64_t seed = kProbeSeed) {
  std::vector<ExtPoint> out;
  out.reserve(count + 5);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (std::size_t k = 0; k < count; ++k) {
    const double x = dist(rng), y = dist(rng), z = dist(rng);
    out.emplace_back(Point3(x, y, z));
  }
  out.emplace_back(Point3(Point3::Zero()));
  out.push_back(ExtPoint::infinity());
  out.emplace_back(Point3(Point3::UnitX()));
  out.emplace_back(Point3(Point3::UnitY()));
  out.emplace_back(Point3(Point3::UnitZ()));
  return out;
}

/// Largest chordal distance between f(x) and g(x) over the probes.
inline double max_deviation(const MobiusR3& f, const MobiusR3& g,
                            const std::vector<ExtPoint>& probes) {
  double worst = 0.0;
  for (const auto& x : probes) worst = std::max(worst, chordal_distance(f(x), g(x)));
  return worst;
}

inline double max_deviation(const MobiusR3& f, const MobiusR3& g) {
  static const std::vector<ExtPoint> probes = probe_points();
  return max_deviation(f, g, probes);
}

/// Largest chordal displacement |f(x) - x| over the probes.
inline double max_displacement(const MobiusR3& f, const std::vector<ExtPoint>& probes) {
  double worst = 0.0;
  for (const auto& x : probes) worst = std::max(worst, chordal_distance(f(x), x));
  return worst;
}

inline bool is_identity(const MobiusR3& f, const Tolerances& tol = default_tolerances) {
  static const std::vector<ExtPoint> probes = probe_points();
  return max_displacement(f, probes) < tol.point;
}

}  // namespace kleinian
