#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "geometry.hpp"
#include "sampling.hpp"

namespace kleinian {

enum class MapKind { Identity, Elliptic, ParabolicPure, ParabolicScrew, Loxodromic };

inline const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::Identity: return "identity";
    case MapKind::Elliptic: return "elliptic";
    case MapKind::ParabolicPure: return "parabolic_pure";
    case MapKind::ParabolicScrew: return "parabolic_screw";
    case MapKind::Loxodromic: return "loxodromic";
  }
  return "?";
}

inline bool is_parabolic(MapKind k) {
  return k == MapKind::ParabolicPure || k == MapKind::ParabolicScrew;
}

/// Classification with the modulus of the multiplier (>= 1) and the rotation angle.
struct Classification {
  MapKind kind = MapKind::Identity;
  double lambda = 1.0;
  double theta = 0.0;
};

/// Boundary fixed set beyond isolated points: a circle, or a line through infinity.
struct FixedLocus {
  enum class Kind { None, Circle, Line };
  Kind kind = Kind::None;
  Point3 center = Point3::Zero();  ///< circle centre, or a point of the line
  Point3 axis = Point3::UnitZ();   ///< circle normal, or line direction
  double radius = 0.0;
};

struct FixedPointSet {
  std::vector<ExtPoint> points;
  FixedLocus locus;
};

namespace detail {

/// Rotation angle in [0, pi] and unit axis of a rotation matrix.
inline std::pair<double, Point3> angle_axis(const Matrix3& R) {
  Eigen::AngleAxisd aa(R);
  double angle = aa.angle();
  Point3 axis = aa.axis();
  if (angle > std::numbers::pi) {
    angle = 2.0 * std::numbers::pi - angle;
    axis = -axis;
  }
  return {angle, axis};
}

/// Closed-form analysis of an inversive map conjugated to y -> P J(y) + c.
struct InversiveAnalysis {
  double sqrt_lambda = 1.0;
  Point3 u = Point3::Zero();
  Point3 c = Point3::Zero();
  double phi = 0.0;  ///< angle of R = -P
  double cos_phi = 1.0;
  Point3 a = Point3::UnitX();
  Point3 b1 = Point3::UnitY();
  Point3 b2 = Point3::UnitZ();
  double ca = 0.0;
  std::complex<double> z{0.0, 0.0};
  bool planar_zero = false;
  double kappa2 = 4.0;
  double Phi = 0.0;

  explicit InversiveAnalysis(const Inversive& f) {
    sqrt_lambda = std::sqrt(f.lambda);
    u = f.u;
    c = (f.v - f.u) / sqrt_lambda;
    const Matrix3 R = -f.P.matrix();
    std::tie(phi, a) = angle_axis(R);
    cos_phi = std::cos(phi);
    std::tie(b1, b2) = orthonormal_complement(a);
    ca = c.dot(a);
    z = {c.dot(b1), c.dot(b2)};
    const double beta = std::norm(z);
    const double zero_band = 1e-10 * std::max(1.0, c.norm());
    planar_zero = beta <= zero_band * zero_band;
    kappa2 = std::max(0.0, 2.0 + 2.0 * cos_phi);
    double zterm = 0.0;
    if (!planar_zero)
      zterm = kappa2 > 0.0 ? beta / kappa2 : std::numeric_limits<double>::infinity();
    Phi = ca * ca / 4.0 + zterm;
  }

  /// Solution of (I + t R) y = c in the normalized coordinates.
  Point3 solve(double t) const {
    Point3 y = (ca / (1.0 + t)) * a;
    if (!planar_zero) {
      const std::complex<double> den = 1.0 + t * std::polar(1.0, phi);
      if (std::abs(den) > 0.0) {
        const std::complex<double> w = z / den;
        y += w.real() * b1 + w.imag() * b2;
      }
    }
    return y;
  }

  Point3 to_original(const Point3& y) const { return u + sqrt_lambda * y; }

  /// The larger multiplier t >= 1 of a loxodromic map.
  double loxodromic_t() const {
    const double alpha = ca * ca;
    const double beta = planar_zero ? 0.0 : std::norm(z);
    const double C = cos_phi;
    const double B = 2.0 + 2.0 * C - alpha - beta;
    const double K = 4.0 * C - 2.0 * alpha * C - 2.0 * beta;
    const double disc = std::max(0.0, B * B - 4.0 * K);
    const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    double w = q;
    if (q != 0.0) w = std::max(q, K / q);
    w = std::max(w, 2.0);
    const double s = std::sqrt(std::max(0.0, (w - 2.0) * (w + 2.0)));
    return 0.5 * (w + s);
  }
};

inline bool near_identity_rotation(const Matrix3& P, double eps) {
  return angle_axis(P).first < eps;
}

}  // namespace detail

/// sigma f sigma^-1 where sigma(x) = Jhat J(x - x0) sends the fixed point x0 to infinity.
inline MobiusR3 conjugate_to_infinity(const MobiusR3& f, const Point3& x0) {
  const MobiusR3 sigma = Inversive{1.0, OrthMatrix3::reflect_y(), x0, Point3::Zero()};
  const MobiusR3 sigma_inv = inverse(sigma);
  const Point3 candidates[] = {Point3::UnitX(), Point3::UnitY(), Point3::UnitZ(),
                               Point3(-1, 0, 0), Point3(0, -1, 0), Point3(0, 0, -1)};
  Point3 best_y = candidates[0];
  double best = -1.0;
  for (const Point3& y : candidates) {
    const ExtPoint fx = f(sigma_inv(ExtPoint(y)));
    if (fx.is_infinite()) continue;
    const double d = (fx.point() - x0).norm();
    if (d > best) {
      best = d;
      best_y = y;
    }
  }
  if (!(best > 0.0))
    throw Error(ErrorCode::ClassificationUnstable, "no admissible probe for conjugation");
  const Point3 x1 = sigma_inv.apply_finite(best_y);
  const Point3 fx1 = f.apply_finite(x1);
  const Matrix3 M = derivative(sigma, fx1) * derivative(f, x1) * derivative(sigma_inv, best_y);
  const double s = std::cbrt(std::abs(M.determinant()));
  const OrthMatrix3 P = OrthMatrix3::nearest(M / s);
  const Point3 t = sigma.apply_finite(fx1) - s * (P * best_y);
  return Affine{s, P, t};
}

namespace detail {

inline Classification classify_affine(const Affine& f, const Tolerances& tol) {
  Classification out;
  const auto [phi, axis] = angle_axis(f.P.matrix());
  if (std::abs(f.lambda - 1.0) >= tol.classification) {
    out.kind = MapKind::Loxodromic;
    out.lambda = std::max(f.lambda, 1.0 / f.lambda);
    out.theta = phi;
    return out;
  }
  out.lambda = 1.0;
  if (phi < tol.classification) {
    out.kind = MapKind::ParabolicPure;
    out.theta = 0.0;
    return out;
  }
  const double s = f.u.dot(axis);
  if (std::abs(s) <= tol.classification * std::max(1.0, f.u.norm())) {
    out.kind = MapKind::Elliptic;
    out.theta = phi;
    return out;
  }
  out.kind = MapKind::ParabolicScrew;
  out.theta = s > 0.0 ? phi : 2.0 * std::numbers::pi - phi;
  return out;
}

inline Point3 parabolic_fixed_point(const InversiveAnalysis& an) {
  return an.to_original(an.solve(1.0));
}

inline void require_fixed(const MobiusR3& f, const Point3& x, double eps) {
  if (!(chordal_distance(f(ExtPoint(x)), ExtPoint(x)) <= eps))
    throw Error(ErrorCode::ClassificationUnstable, "fixed point residual too large");
}

}  // namespace detail

inline Classification classify(const MobiusR3& f, const Tolerances& tol = default_tolerances) {
  if (is_identity(f, tol)) return {MapKind::Identity, 1.0, 0.0};
  if (f.is_affine()) return detail::classify_affine(f.affine(), tol);

  const detail::InversiveAnalysis an(f.inversive());
  Classification out;
  if (an.Phi > 1.0 + tol.classification) {
    const double t = an.loxodromic_t();
    // Residuals are taken where the map contracts: f at the attracting point, f^-1 at the
    // repelling one.
    const Point3 x = an.to_original(an.solve(t));
    detail::require_fixed(f, an.to_original(an.solve(1.0 / t)), tol.fixed_point * 10.0);
    detail::require_fixed(inverse(f), x, tol.fixed_point * 10.0);
    out.kind = MapKind::Loxodromic;
    out.lambda = t;
    const Matrix3 D = derivative(f, x);
    out.theta = detail::angle_axis(D / std::cbrt(D.determinant())).first;
    return out;
  }
  if (std::abs(an.Phi - 1.0) <= tol.classification) {
    const Point3 x = detail::parabolic_fixed_point(an);
    detail::require_fixed(f, x, std::sqrt(tol.fixed_point));
    const Affine g = conjugate_to_infinity(f, x).affine();
    Classification c = detail::classify_affine(Affine{1.0, g.P, g.u}, tol);
    if (c.kind == MapKind::Elliptic || c.kind == MapKind::Identity)
      throw Error(ErrorCode::ClassificationUnstable, "parabolic conjugate has no translation");
    return c;
  }
  out.kind = MapKind::Elliptic;
  out.lambda = 1.0;
  if (an.kappa2 < 1e-12 && an.planar_zero && std::abs(an.ca) < 2.0) {
    const Point3 x = an.to_original(0.5 * an.ca * an.a +
                                    std::sqrt(1.0 - an.ca * an.ca / 4.0) * an.b1);
    const Matrix3 D = derivative(f, x);
    out.theta = detail::angle_axis(D / std::cbrt(D.determinant())).first;
  } else {
    out.theta = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

/// Boundary fixed points; elliptic maps report their fixed circle or line in `locus`.
inline FixedPointSet fixed_points(const MobiusR3& f, const Tolerances& tol = default_tolerances) {
  FixedPointSet out;
  const Classification c = classify(f, tol);
  if (c.kind == MapKind::Identity)
    throw Error(ErrorCode::InvalidArgument, "identity fixes every point");
  if (f.is_affine()) {
    const Affine& a = f.affine();
    if (c.kind == MapKind::Loxodromic) {
      const Matrix3 A = Matrix3::Identity() - a.lambda * a.P.matrix();
      out.points.emplace_back(Point3(A.fullPivLu().solve(a.u)));
      out.points.push_back(ExtPoint::infinity());
    } else if (is_parabolic(c.kind)) {
      out.points.push_back(ExtPoint::infinity());
    } else {
      const auto [phi, axis] = detail::angle_axis(a.P.matrix());
      const auto [b1, b2] = orthonormal_complement(axis);
      const std::complex<double> zu{a.u.dot(b1), a.u.dot(b2)};
      const std::complex<double> w = zu / (1.0 - std::polar(1.0, phi));
      const Point3 p = w.real() * b1 + w.imag() * b2;
      out.points.emplace_back(p);
      out.points.push_back(ExtPoint::infinity());
      out.locus = {FixedLocus::Kind::Line, p, axis, 0.0};
    }
    return out;
  }
  const detail::InversiveAnalysis an(f.inversive());
  if (c.kind == MapKind::Loxodromic) {
    const double t = an.loxodromic_t();
    out.points.emplace_back(an.to_original(an.solve(t)));
    out.points.emplace_back(an.to_original(an.solve(1.0 / t)));
  } else if (is_parabolic(c.kind)) {
    out.points.emplace_back(detail::parabolic_fixed_point(an));
  } else if (an.kappa2 < 1e-12 && an.planar_zero && std::abs(an.ca) < 2.0) {
    const double rho = std::sqrt(1.0 - an.ca * an.ca / 4.0);
    const Point3 center = an.to_original(0.5 * an.ca * an.a);
    out.locus = {FixedLocus::Kind::Circle, center, an.a, an.sqrt_lambda * rho};
    out.points.emplace_back(Point3(center + an.sqrt_lambda * rho * an.b1));
  }
  return out;
}

}  // namespace kleinian
