#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <variant>

#include "errors.hpp"
#include "geometry.hpp"

namespace kleinian {

/// Closed half-space {normal . x <= offset} together with infinity.
struct HalfSpace {
  Point3 normal = Point3::UnitZ();
  double offset = 0.0;
};

/// Closed round ball |x - center| <= radius.
struct RoundBall {
  Point3 center = Point3::Zero();
  double radius = 1.0;
};

/// Closed exterior |x - center| >= radius together with infinity.
struct ExteriorBall {
  Point3 center = Point3::Zero();
  double radius = 1.0;
};

/// Closed topological ball in the extended 3-space bounded by a generalized sphere.
using BallRegion = std::variant<HalfSpace, RoundBall, ExteriorBall>;

inline BallRegion make_half_space(const Point3& normal, double offset) {
  const double n = normal.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "half-space normal must be nonzero");
  return HalfSpace{normal / n, offset / n};
}

inline BallRegion make_round_ball(const Point3& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
  return RoundBall{center, radius};
}

inline BallRegion make_exterior_ball(const Point3& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
  return ExteriorBall{center, radius};
}

inline GeneralizedSphere boundary(const BallRegion& k) {
  if (const auto* h = std::get_if<HalfSpace>(&k)) return PlaneSphere{h->normal, h->offset};
  if (const auto* b = std::get_if<RoundBall>(&k)) return RoundSphere{b->center, b->radius};
  const auto& e = std::get<ExteriorBall>(k);
  return RoundSphere{e.center, e.radius};
}

inline bool contains_infinity(const BallRegion& k) { return !std::holds_alternative<RoundBall>(k); }

/// Signed Euclidean distance to the boundary: negative inside, positive outside.
inline double signed_distance(const BallRegion& k, const ExtPoint& x) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (x.is_infinite()) return contains_infinity(k) ? -inf : inf;
  const Point3& p = x.point();
  if (const auto* h = std::get_if<HalfSpace>(&k)) return h->normal.dot(p) - h->offset;
  if (const auto* b = std::get_if<RoundBall>(&k)) return (p - b->center).norm() - b->radius;
  const auto& e = std::get<ExteriorBall>(k);
  return e.radius - (p - e.center).norm();
}

/// Closure of the complement.
inline BallRegion complement(const BallRegion& k) {
  if (const auto* h = std::get_if<HalfSpace>(&k)) return HalfSpace{-h->normal, -h->offset};
  if (const auto* b = std::get_if<RoundBall>(&k)) return ExteriorBall{b->center, b->radius};
  const auto& e = std::get<ExteriorBall>(k);
  return RoundBall{e.center, e.radius};
}

/// Characteristic length of a region, used to scale tolerances.
inline double region_scale(const BallRegion& k) {
  if (const auto* h = std::get_if<HalfSpace>(&k)) return std::max(1.0, std::abs(h->offset));
  if (const auto* b = std::get_if<RoundBall>(&k)) return std::max({1.0, b->center.norm(), b->radius});
  const auto& e = std::get<ExteriorBall>(k);
  return std::max({1.0, e.center.norm(), e.radius});
}

namespace detail {

/// Finite points well inside the region, deepest first.
inline std::vector<Point3> interior_probes(const BallRegion& k) {
  std::vector<Point3> out;
  if (const auto* h = std::get_if<HalfSpace>(&k)) {
    const auto [b1, b2] = orthonormal_complement(h->normal);
    const Point3 foot = h->offset * h->normal;
    for (double depth : {1.0, 3.0, 0.5})
      for (const Point3& side : {Point3(Point3::Zero()), Point3(b1), Point3(b2)})
        out.push_back(foot - depth * h->normal + side);
  } else if (const auto* b = std::get_if<RoundBall>(&k)) {
    out.push_back(b->center);
    for (int a = 0; a < 3; ++a) out.push_back(b->center + 0.5 * b->radius * Point3::Unit(a));
  } else {
    const auto& e = std::get<ExteriorBall>(k);
    for (int a = 0; a < 3; ++a) out.push_back(e.center + 2.0 * e.radius * Point3::Unit(a));
  }
  return out;
}

}  // namespace detail

/// Image region f(K), boundary computed exactly and side chosen by a mapped interior point.
inline BallRegion image(const MobiusR3& f, const BallRegion& k) {
  const GeneralizedSphere s = image(f, boundary(k));
  // A round image contains infinity exactly when the pole of f lies inside K.
  if (const auto* r = std::get_if<RoundSphere>(&s)) {
    const bool has_inf = f.is_affine() ? contains_infinity(k)
                                       : signed_distance(k, f.inversive().u) < 0.0;
    if (has_inf) return ExteriorBall{r->center, r->radius};
    return RoundBall{r->center, r->radius};
  }
  const auto& pl = std::get<PlaneSphere>(s);
  double best = 0.0;
  for (const Point3& x : detail::interior_probes(k)) {
    const ExtPoint y = f(ExtPoint(x));
    if (y.is_infinite()) continue;
    const double side = pl.normal.dot(y.point()) - pl.offset;
    if (std::abs(side) > std::abs(best)) best = side;
  }
  if (best == 0.0) throw Error(ErrorCode::InvalidArgument, "cannot resolve side of image region");
  if (best < 0.0) return HalfSpace{pl.normal, pl.offset};
  return HalfSpace{-pl.normal, -pl.offset};
}

/// Same region (boundary and side) within tol relative to its size.
inline bool same_region(const BallRegion& a, const BallRegion& b, double tol) {
  if (a.index() != b.index()) return false;
  if (const auto* h = std::get_if<HalfSpace>(&a)) {
    const auto& g = std::get<HalfSpace>(b);
    const double scale = std::max(1.0, std::abs(h->offset));
    return (h->normal - g.normal).norm() <= tol && std::abs(h->offset - g.offset) <= tol * scale;
  }
  return same_sphere(boundary(a), boundary(b), tol);
}

/// Gap between the interiors: positive when disjoint, zero when tangent, negative when they overlap.
/// Pairs whose interiors always meet return -infinity.
inline double interior_gap(const BallRegion& a, const BallRegion& b) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (const auto* ra = std::get_if<RoundBall>(&a)) {
    if (const auto* rb = std::get_if<RoundBall>(&b))
      return (ra->center - rb->center).norm() - ra->radius - rb->radius;
    if (const auto* hb = std::get_if<HalfSpace>(&b))
      return hb->normal.dot(ra->center) - ra->radius - hb->offset;
    const auto& eb = std::get<ExteriorBall>(b);
    return eb.radius - (ra->center - eb.center).norm() - ra->radius;
  }
  if (std::holds_alternative<RoundBall>(b)) return interior_gap(b, a);
  if (const auto* ha = std::get_if<HalfSpace>(&a)) {
    if (const auto* hb = std::get_if<HalfSpace>(&b)) {
      if ((ha->normal + hb->normal).norm() <= 1e-12) return -hb->offset - ha->offset;
      return neg_inf;
    }
  }
  return neg_inf;
}

struct IntersectionFrame {
  Point3 point;    ///< a point on both boundaries
  Point3 normal1;  ///< outward unit normal of the first region there
  Point3 normal2;
};

namespace detail {

inline Point3 outward_normal(const BallRegion& k, const Point3& x) {
  if (const auto* h = std::get_if<HalfSpace>(&k)) return h->normal;
  if (const auto* b = std::get_if<RoundBall>(&k)) return (x - b->center).normalized();
  const auto& e = std::get<ExteriorBall>(k);
  return (e.center - x).normalized();
}

}  // namespace detail

/// A point where both boundaries cross transversally, with the outward normals there.
inline IntersectionFrame boundary_intersection(const BallRegion& k1, const BallRegion& k2,
                                               double tol = 1e-12) {
  const GeneralizedSphere s1 = boundary(k1);
  const GeneralizedSphere s2 = boundary(k2);
  Point3 x;
  const auto* r1 = std::get_if<RoundSphere>(&s1);
  const auto* r2 = std::get_if<RoundSphere>(&s2);
  if (r1 && r2) {
    const Point3 axis = r2->center - r1->center;
    const double d = axis.norm();
    const double scale = std::max({1.0, r1->radius, r2->radius});
    if (d <= tol * scale) throw Error(ErrorCode::NoIntersection, "concentric boundaries");
    const double lo = std::abs(r1->radius - r2->radius), hi = r1->radius + r2->radius;
    if (std::abs(d - lo) <= tol * scale || std::abs(d - hi) <= tol * scale)
      throw Error(ErrorCode::Tangent, "boundaries are tangent");
    if (d < lo || d > hi) throw Error(ErrorCode::NoIntersection, "boundaries do not meet");
    const Point3 a = axis / d;
    const double t = (d * d + r1->radius * r1->radius - r2->radius * r2->radius) / (2.0 * d);
    const double h = std::sqrt(std::max(0.0, r1->radius * r1->radius - t * t));
    x = r1->center + t * a + h * orthonormal_complement(a).first;
  } else if (r1 || r2) {
    const RoundSphere& r = r1 ? *r1 : *r2;
    const PlaneSphere& p = std::get<PlaneSphere>(r1 ? s2 : s1);
    const double s = p.normal.dot(r.center) - p.offset;
    const double scale = std::max(1.0, r.radius);
    if (std::abs(std::abs(s) - r.radius) <= tol * scale)
      throw Error(ErrorCode::Tangent, "boundaries are tangent");
    if (std::abs(s) > r.radius) throw Error(ErrorCode::NoIntersection, "boundaries do not meet");
    const double h = std::sqrt(r.radius * r.radius - s * s);
    x = r.center - s * p.normal + h * orthonormal_complement(p.normal).first;
  } else {
    const auto& p1 = std::get<PlaneSphere>(s1);
    const auto& p2 = std::get<PlaneSphere>(s2);
    const Point3 dir = p1.normal.cross(p2.normal);
    if (dir.norm() <= tol) throw Error(ErrorCode::Tangent, "parallel planes meet only at infinity");
    Matrix3 m;
    m.row(0) = p1.normal.transpose();
    m.row(1) = p2.normal.transpose();
    m.row(2) = dir.transpose();
    x = m.colPivHouseholderQr().solve(Point3(p1.offset, p2.offset, 0.0));
  }
  return {x, detail::outward_normal(k1, x), detail::outward_normal(k2, x)};
}

/// Dihedral angle of K1 and K2 along the intersection of their boundaries, in (0, pi).
inline double lens_inner_angle(const BallRegion& k1, const BallRegion& k2, double tol = 1e-12) {
  const IntersectionFrame f = boundary_intersection(k1, k2, tol);
  const double c = std::clamp(f.normal1.dot(f.normal2), -1.0, 1.0);
  return std::numbers::pi - std::acos(c);
}

}  // namespace kleinian
