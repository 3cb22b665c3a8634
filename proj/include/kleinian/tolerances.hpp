#pragma once

namespace kleinian {

/// Numerical thresholds shared by every algorithm in the library.
struct Tolerances {
  double point = 1e-9;           ///< point coincidence, relative to max(1, |x|)
  double orthogonality = 1e-9;   ///< residual allowed in P^T P - I
  double classification = 1e-7;  ///< band around the parabolic boundary
  double fixed_point = 1e-8;     ///< residual allowed in f(x) - x
};

inline constexpr Tolerances default_tolerances{};

}  // namespace kleinian
