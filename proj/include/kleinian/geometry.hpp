#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include <Eigen/Dense>

#include "errors.hpp"
#include "tolerances.hpp"

namespace kleinian {

using Point3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// A point of the one-point compactification R^3 u {inf}.
class ExtPoint {
 public:
  ExtPoint() : p_(Point3::Zero()), infinite_(false) {}
  ExtPoint(const Point3& p) : p_(p), infinite_(false) {}  // NOLINT(implicit)

  static ExtPoint infinity() {
    ExtPoint e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }

  /// Coordinates of a finite point.
  const Point3& point() const {
    if (infinite_) throw Error(ErrorCode::InvalidArgument, "point() called on infinity");
    return p_;
  }

 private:
  Point3 p_;
  bool infinite_;
};

/// Chordal distance on the 3-sphere; well defined when either argument is infinity.
inline double chordal_distance(const ExtPoint& a, const ExtPoint& b) {
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite() || b.is_infinite()) {
    const Point3& x = a.is_infinite() ? b.point() : a.point();
    return 2.0 / std::sqrt(1.0 + x.squaredNorm());
  }
  const Point3& x = a.point();
  const Point3& y = b.point();
  return 2.0 * (x - y).norm() /
         (std::sqrt(1.0 + x.squaredNorm()) * std::sqrt(1.0 + y.squaredNorm()));
}

/// |x - y| / max(1, |x|, |y|), with infinity equal only to itself.
inline double relative_deviation(const ExtPoint& a, const ExtPoint& b) {
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite() || b.is_infinite()) return std::numeric_limits<double>::infinity();
  const Point3& x = a.point();
  const Point3& y = b.point();
  return (x - y).norm() / std::max({1.0, x.norm(), y.norm()});
}

/// Orthogonal 3x3 matrix with its determinant cached as +1 or -1.
class OrthMatrix3 {
 public:
  OrthMatrix3() : m_(Matrix3::Identity()), parity_(1) {}

  /// Validates orthogonality against tol.orthogonality; throws InvalidArgument.
  explicit OrthMatrix3(const Matrix3& m, const Tolerances& tol = default_tolerances) : m_(m) {
    const double residual = (m.transpose() * m - Matrix3::Identity()).cwiseAbs().maxCoeff();
    if (!(residual <= tol.orthogonality))
      throw Error(ErrorCode::InvalidArgument, "matrix is not orthogonal");
    parity_ = m.determinant() > 0 ? 1 : -1;
  }

  /// Nearest orthogonal matrix (polar factor), no validation.
  static OrthMatrix3 nearest(const Matrix3& m) {
    Eigen::JacobiSVD<Matrix3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    OrthMatrix3 r;
    r.m_ = svd.matrixU() * svd.matrixV().transpose();
    r.parity_ = r.m_.determinant() > 0 ? 1 : -1;
    return r;
  }

  static OrthMatrix3 identity() { return OrthMatrix3(); }

  /// Rotation by angle about the x axis.
  static OrthMatrix3 rotation_x(double angle) {
    Matrix3 m;
    const double c = std::cos(angle), s = std::sin(angle);
    m << 1, 0, 0, 0, c, -s, 0, s, c;
    return trusted(m, 1);
  }

  /// Rotation by angle about the z axis.
  static OrthMatrix3 rotation_z(double angle) {
    Matrix3 m;
    const double c = std::cos(angle), s = std::sin(angle);
    m << c, -s, 0, s, c, 0, 0, 0, 1;
    return trusted(m, 1);
  }

  /// Rotation by angle about a unit axis.
  static OrthMatrix3 rotation(const Point3& axis, double angle) {
    return trusted(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(), 1);
  }

  /// The reflection (x, y, z) -> (x, -y, z).
  static OrthMatrix3 reflect_y() { return trusted(Eigen::Vector3d(1, -1, 1).asDiagonal(), -1); }

  /// Reflection in the plane through 0 orthogonal to n.
  static OrthMatrix3 reflection(const Point3& n) {
    const Point3 u = n.normalized();
    return trusted(Matrix3::Identity() - 2.0 * u * u.transpose(), -1);
  }

  const Matrix3& matrix() const { return m_; }
  int parity() const { return parity_; }
  OrthMatrix3 transpose() const { return trusted(m_.transpose(), parity_); }

  friend OrthMatrix3 operator*(const OrthMatrix3& a, const OrthMatrix3& b) {
    return trusted(a.m_ * b.m_, a.parity_ * b.parity_);
  }
  friend Point3 operator*(const OrthMatrix3& a, const Point3& x) { return a.m_ * x; }

 private:
  static OrthMatrix3 trusted(const Matrix3& m, int parity) {
    OrthMatrix3 r;
    r.m_ = m;
    r.parity_ = parity;
    return r;
  }

  Matrix3 m_;
  int parity_;
};

/// Round sphere |x - center| = radius.
struct RoundSphere {
  Point3 center = Point3::Zero();
  double radius = 1.0;
};

/// Plane normal . x = offset with unit normal (together with infinity).
struct PlaneSphere {
  Point3 normal = Point3::UnitZ();
  double offset = 0.0;
};

/// A round sphere or a plane through infinity.
using GeneralizedSphere = std::variant<RoundSphere, PlaneSphere>;

inline GeneralizedSphere make_round(const Point3& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorCode::InvalidArgument, "sphere radius must be positive");
  return RoundSphere{center, radius};
}

inline GeneralizedSphere make_plane(const Point3& normal, double offset) {
  const double n = normal.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "plane normal must be nonzero");
  return PlaneSphere{normal / n, offset / n};
}

/// Inversion (or reflection) in a generalized sphere.
inline ExtPoint invert_in_sphere(const GeneralizedSphere& s, const ExtPoint& x) {
  if (const auto* r = std::get_if<RoundSphere>(&s)) {
    if (x.is_infinite()) return r->center;
    const Point3 d = x.point() - r->center;
    const double n2 = d.squaredNorm();
    if (n2 == 0.0) return ExtPoint::infinity();
    return Point3(r->center + (r->radius * r->radius / n2) * d);
  }
  const auto& p = std::get<PlaneSphere>(s);
  if (x.is_infinite()) return x;
  const Point3& y = x.point();
  return Point3(y - 2.0 * (p.normal.dot(y) - p.offset) * p.normal);
}

/// x -> lambda P x + u.
struct Affine {
  double lambda = 1.0;
  OrthMatrix3 P;
  Point3 u = Point3::Zero();
};

/// x -> lambda P J(x - u) + v with det P = -1, J(x) = x / |x|^2.
struct Inversive {
  double lambda = 1.0;
  OrthMatrix3 P = OrthMatrix3::reflect_y();
  Point3 u = Point3::Zero();
  Point3 v = Point3::Zero();
};

/// Orientation-preserving Moebius transformation of the extended 3-space in normal form.
class MobiusR3 {
 public:
  MobiusR3() : rep_(Affine{}) {}

  MobiusR3(const Affine& a) : rep_(a) {  // NOLINT(implicit)
    if (!(a.lambda > 0.0) || !std::isfinite(a.lambda))
      throw Error(ErrorCode::InvalidArgument, "scale must be positive and finite");
    if (a.P.parity() != 1)
      throw Error(ErrorCode::InvalidArgument, "affine part must be a rotation");
  }

  MobiusR3(const Inversive& i) : rep_(i) {  // NOLINT(implicit)
    if (!(i.lambda > 0.0) || !std::isfinite(i.lambda))
      throw Error(ErrorCode::InvalidArgument, "scale must be positive and finite");
    if (i.P.parity() != -1)
      throw Error(ErrorCode::InvalidArgument, "inversive part needs det P = -1");
  }

  static MobiusR3 identity() { return MobiusR3(); }
  static MobiusR3 translation(const Point3& t) { return Affine{1.0, OrthMatrix3::identity(), t}; }
  static MobiusR3 dilation(double s) { return Affine{s, OrthMatrix3::identity(), Point3::Zero()}; }
  static MobiusR3 rotation(const OrthMatrix3& r) { return Affine{1.0, r, Point3::Zero()}; }

  bool is_affine() const { return std::holds_alternative<Affine>(rep_); }
  bool fixes_infinity() const { return is_affine(); }
  const Affine& affine() const { return std::get<Affine>(rep_); }
  const Inversive& inversive() const { return std::get<Inversive>(rep_); }
  double lambda() const { return is_affine() ? affine().lambda : inversive().lambda; }
  const OrthMatrix3& P() const { return is_affine() ? affine().P : inversive().P; }

  ExtPoint operator()(const ExtPoint& x) const {
    if (const auto* a = std::get_if<Affine>(&rep_)) {
      if (x.is_infinite()) return x;
      return Point3(a->lambda * (a->P * x.point()) + a->u);
    }
    const auto& i = std::get<Inversive>(rep_);
    if (x.is_infinite()) return i.v;
    const Point3 d = x.point() - i.u;
    const double n2 = d.squaredNorm();
    if (n2 == 0.0) return ExtPoint::infinity();
    return Point3((i.lambda / n2) * (i.P * d) + i.v);
  }

  /// Image of a finite point that is not the pole.
  Point3 apply_finite(const Point3& x) const { return (*this)(ExtPoint(x)).point(); }

 private:
  std::variant<Affine, Inversive> rep_;
};

inline ExtPoint apply(const MobiusR3& f, const ExtPoint& x) { return f(x); }

/// x / |x|^2 with 0 <-> infinity.
inline ExtPoint unit_inversion(const ExtPoint& x) {
  if (x.is_infinite()) return Point3(Point3::Zero());
  const double n2 = x.point().squaredNorm();
  if (n2 == 0.0) return ExtPoint::infinity();
  return Point3(x.point() / n2);
}

inline MobiusR3 inverse(const MobiusR3& f) {
  if (f.is_affine()) {
    const Affine& a = f.affine();
    const OrthMatrix3 Pt = a.P.transpose();
    return Affine{1.0 / a.lambda, Pt, -(Pt * a.u) / a.lambda};
  }
  const Inversive& i = f.inversive();
  return Inversive{i.lambda, i.P.transpose(), i.v, i.u};
}

/// Jacobian of f at a finite point other than the pole.
inline Matrix3 derivative(const MobiusR3& f, const Point3& x) {
  if (f.is_affine()) return f.affine().lambda * f.affine().P.matrix();
  const Inversive& i = f.inversive();
  const Point3 d = x - i.u;
  const double n2 = d.squaredNorm();
  if (n2 == 0.0) throw Error(ErrorCode::InvalidArgument, "derivative requested at the pole");
  return (i.lambda / n2) * i.P.matrix() * (Matrix3::Identity() - 2.0 * d * d.transpose() / n2);
}

/// Isometric sphere |x - u| = sqrt(lambda); throws FixesInfinity for affine maps.
inline RoundSphere isometric_sphere(const MobiusR3& f) {
  if (f.is_affine()) throw Error(ErrorCode::FixesInfinity, "affine map has no isometric sphere");
  return RoundSphere{f.inversive().u, std::sqrt(f.inversive().lambda)};
}

/// f o g in normal form.
inline MobiusR3 compose(const MobiusR3& f, const MobiusR3& g,
                        const Tolerances& tol = default_tolerances) {
  if (f.is_affine() && g.is_affine()) {
    const Affine& a = f.affine();
    const Affine& b = g.affine();
    return Affine{a.lambda * b.lambda, a.P * b.P, a.lambda * (a.P * b.u) + a.u};
  }
  if (f.is_affine()) {
    const Affine& a = f.affine();
    const Inversive& b = g.inversive();
    return Inversive{a.lambda * b.lambda, a.P * b.P, b.u, f.apply_finite(b.v)};
  }
  if (g.is_affine()) {
    const Inversive& a = f.inversive();
    const Affine& b = g.affine();
    const Point3 w = (b.P.transpose() * (a.u - b.u)) / b.lambda;
    return Inversive{a.lambda / b.lambda, a.P * b.P, w, a.v};
  }
  const Inversive& a = f.inversive();
  const Inversive& b = g.inversive();
  const Point3 d = b.v - a.u;
  const double dn = d.norm();
  if (dn <= tol.point * std::max(1.0, a.u.norm())) {
    const double s = a.lambda / b.lambda;
    const OrthMatrix3 Q = a.P * b.P;
    return Affine{s, Q, a.v - s * (Q * b.u)};
  }
  const double d2 = dn * dn;
  const double lam = a.lambda * b.lambda / d2;
  const Point3 u = b.u - b.lambda * (b.P.transpose() * d) / d2;
  const Point3 v = a.v + a.lambda * (a.P * d) / d2;
  // Differential of f o g at a point x0 = u + sqrt(lam) e of its isometric sphere is
  // P (I - 2 e e^T); e points away from the pole of g, which may itself lie on that sphere.
  const Point3 e = (u - b.u).normalized();
  const Point3 x0 = u + std::sqrt(lam) * e;
  const Point3 n1 = x0 - b.u;
  const double n1sq = n1.squaredNorm();
  const Point3 y0 = (b.lambda / n1sq) * (b.P * n1) + b.v;
  const Point3 n2 = y0 - a.u;
  const double n2sq = n2.squaredNorm();
  const double scale = a.lambda * b.lambda / (n1sq * n2sq);
  if (!(std::abs(scale - 1.0) <= std::sqrt(tol.orthogonality)))
    throw Error(ErrorCode::DegenerateComposition, "isometric sphere consistency lost");
  const Matrix3 I = Matrix3::Identity();
  const Matrix3 M = a.P.matrix() * (I - 2.0 * n2 * n2.transpose() / n2sq) * b.P.matrix() *
                    (I - 2.0 * n1 * n1.transpose() / n1sq) * (I - 2.0 * e * e.transpose());
  const double residual = (M.transpose() * M - I).cwiseAbs().maxCoeff();
  if (!(residual <= tol.orthogonality))
    throw Error(ErrorCode::DegenerateComposition, "recovered linear part is not orthogonal");
  return Inversive{lam, OrthMatrix3::nearest(M), u, v};
}

/// g f g^-1.
inline MobiusR3 conjugate(const MobiusR3& g, const MobiusR3& f,
                          const Tolerances& tol = default_tolerances) {
  return compose(compose(g, f, tol), inverse(g), tol);
}

/// f g f^-1 g^-1.
inline MobiusR3 commutator(const MobiusR3& f, const MobiusR3& g,
                           const Tolerances& tol = default_tolerances) {
  return compose(compose(f, g, tol), compose(inverse(f), inverse(g), tol), tol);
}

/// f^n for any integer n.
inline MobiusR3 power(const MobiusR3& f, int n, const Tolerances& tol = default_tolerances) {
  const MobiusR3 base = n < 0 ? inverse(f) : f;
  MobiusR3 r;
  for (int k = 0; k < std::abs(n); ++k) r = compose(r, base, tol);
  return r;
}

namespace detail {

constexpr double kThroughOriginRel = 1e-13;

inline GeneralizedSphere unit_inversion_image(const GeneralizedSphere& s) {
  if (const auto* r = std::get_if<RoundSphere>(&s)) {
    const double c2 = r->center.squaredNorm();
    const double r2 = r->radius * r->radius;
    const double k = c2 - r2;
    if (std::abs(k) <= kThroughOriginRel * (c2 + r2)) {
      const double cn = std::sqrt(c2);
      return PlaneSphere{r->center / cn, 1.0 / (2.0 * cn)};
    }
    return RoundSphere{r->center / k, r->radius / std::abs(k)};
  }
  const auto& p = std::get<PlaneSphere>(s);
  if (std::abs(p.offset) <= kThroughOriginRel) return PlaneSphere{p.normal, 0.0};
  return RoundSphere{p.normal / (2.0 * p.offset), 1.0 / (2.0 * std::abs(p.offset))};
}

inline GeneralizedSphere similarity_image(double lambda, const OrthMatrix3& P, const Point3& t,
                                          const GeneralizedSphere& s) {
  if (const auto* r = std::get_if<RoundSphere>(&s))
    return RoundSphere{lambda * (P * r->center) + t, lambda * r->radius};
  const auto& p = std::get<PlaneSphere>(s);
  const Point3 n = P * p.normal;
  return PlaneSphere{n, lambda * p.offset + n.dot(t)};
}

}  // namespace detail

/// Image of a generalized sphere, computed exactly from the normal form.
inline GeneralizedSphere image(const MobiusR3& f, const GeneralizedSphere& s) {
  if (f.is_affine()) return detail::similarity_image(f.affine().lambda, f.affine().P, f.affine().u, s);
  const Inversive& i = f.inversive();
  const GeneralizedSphere shifted =
      detail::similarity_image(1.0, OrthMatrix3::identity(), -i.u, s);
  return detail::similarity_image(i.lambda, i.P, i.v, detail::unit_inversion_image(shifted));
}

/// Largest |x| of a point on the sphere; infinity for planes.
inline double sphere_extent(const GeneralizedSphere& s) {
  if (const auto* r = std::get_if<RoundSphere>(&s)) return r->center.norm() + r->radius;
  return std::numeric_limits<double>::infinity();
}

/// Whether two generalized spheres agree within tol (relative to their size).
inline bool same_sphere(const GeneralizedSphere& a, const GeneralizedSphere& b, double tol) {
  if (a.index() != b.index()) return false;
  if (const auto* r = std::get_if<RoundSphere>(&a)) {
    const auto& q = std::get<RoundSphere>(b);
    const double scale = std::max({1.0, r->radius, r->center.norm()});
    return (r->center - q.center).norm() <= tol * scale &&
           std::abs(r->radius - q.radius) <= tol * scale;
  }
  const auto& p = std::get<PlaneSphere>(a);
  const auto& q = std::get<PlaneSphere>(b);
  const double scale = std::max(1.0, std::abs(p.offset));
  if ((p.normal - q.normal).norm() <= tol && std::abs(p.offset - q.offset) <= tol * scale)
    return true;
  return (p.normal + q.normal).norm() <= tol && std::abs(p.offset + q.offset) <= tol * scale;
}

/// Unsigned Euclidean distance from a finite point to the sphere.
inline double distance_to_sphere(const GeneralizedSphere& s, const Point3& x) {
  if (const auto* r = std::get_if<RoundSphere>(&s)) return std::abs((x - r->center).norm() - r->radius);
  const auto& p = std::get<PlaneSphere>(s);
  return std::abs(p.normal.dot(x) - p.offset);
}

/// Orthonormal pair completing a unit vector to a right-handed frame (a, b1, b2).
inline std::pair<Point3, Point3> orthonormal_complement(const Point3& a) {
  const Point3 seed = std::abs(a.x()) < 0.9 ? Point3::UnitX() : Point3::UnitY();
  const Point3 b1 = (seed - seed.dot(a) * a).normalized();
  return {b1, a.cross(b1)};
}

}  // namespace kleinian
