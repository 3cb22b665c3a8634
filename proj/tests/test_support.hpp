#pragma once

#include <random>

#include "kleinian/geometry.hpp"

namespace ktest {

using kleinian::Affine;
using kleinian::Inversive;
using kleinian::MobiusR3;
using kleinian::OrthMatrix3;
using kleinian::Point3;

inline Point3 random_point(std::mt19937_64& rng, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  const double x = d(rng), y = d(rng), z = d(rng);
  return Point3(x, y, z);
}

inline OrthMatrix3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double w = n(rng), x = n(rng), y = n(rng), z = n(rng);
  Eigen::Quaterniond q(w, x, y, z);
  q.normalize();
  return OrthMatrix3(q.toRotationMatrix());
}

inline MobiusR3 random_affine(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> s(0.5, 2.0);
  return Affine{s(rng), random_rotation(rng), random_point(rng)};
}

inline MobiusR3 random_inversive(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> s(0.25, 4.0);
  return Inversive{s(rng), random_rotation(rng) * OrthMatrix3::reflect_y(), random_point(rng),
                   random_point(rng)};
}

/// Random conjugator mixing both normal forms.
inline MobiusR3 random_mobius(std::mt19937_64& rng) {
  return kleinian::compose(random_affine(rng), random_inversive(rng));
}

}  // namespace ktest
