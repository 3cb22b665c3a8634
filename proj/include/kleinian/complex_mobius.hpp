#pragma once

#include <complex>
#include <optional>

#include "geometry.hpp"

namespace kleinian {

using Complex = std::complex<double>;

/// A point of the Riemann sphere; nullopt is infinity.
using ExtComplex = std::optional<Complex>;

/// tau -> (a tau + b) / (c tau + d) with ad - bc != 0.
struct ComplexMobius {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  ComplexMobius() = default;
  ComplexMobius(Complex a_, Complex b_, Complex c_, Complex d_) : a(a_), b(b_), c(c_), d(d_) {
    if (det() == Complex(0.0))
      throw Error(ErrorCode::SingularMatrix, "ad - bc vanishes");
  }

  Complex det() const { return a * d - b * c; }

  ExtComplex operator()(const ExtComplex& tau) const {
    if (!tau) {
      if (c == Complex(0.0)) return std::nullopt;
      return a / c;
    }
    const Complex den = c * *tau + d;
    if (den == Complex(0.0)) return std::nullopt;
    return (a * *tau + b) / den;
  }

  /// Representative with determinant 1.
  ComplexMobius normalized() const {
    const Complex s = std::sqrt(det());
    return {a / s, b / s, c / s, d / s};
  }

  /// Projective trace squared, tr^2 / det.
  Complex trace_squared() const { return (a + d) * (a + d) / det(); }
};

inline ComplexMobius compose(const ComplexMobius& f, const ComplexMobius& g) {
  return {f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d, f.c * g.a + f.d * g.c,
          f.c * g.b + f.d * g.d};
}

inline ComplexMobius inverse(const ComplexMobius& f) { return {f.d, -f.b, -f.c, f.a}; }

/// Largest entry difference between normalized representatives, minimized over sign.
inline double projective_distance(const ComplexMobius& f, const ComplexMobius& g) {
  const ComplexMobius p = f.normalized(), q = g.normalized();
  auto dist = [&](double s) {
    return std::max({std::abs(p.a - s * q.a), std::abs(p.b - s * q.b), std::abs(p.c - s * q.c),
                     std::abs(p.d - s * q.d)});
  };
  return std::min(dist(1.0), dist(-1.0));
}

/// The unique map sending 0, 1, infinity to w0, w1, winf (distinct).
inline ComplexMobius from_three_points(const ExtComplex& w0, const ExtComplex& w1,
                                       const ExtComplex& winf) {
  ComplexMobius s;
  if (!winf) {
    s = {Complex(1.0), -*w0, Complex(0.0), *w1 - *w0};
  } else if (!w0) {
    s = {Complex(0.0), *w1 - *winf, Complex(1.0), -*winf};
  } else if (!w1) {
    s = {Complex(1.0), -*w0, Complex(1.0), -*winf};
  } else {
    s = {*w1 - *winf, -*w0 * (*w1 - *winf), *w1 - *w0, -*winf * (*w1 - *w0)};
  }
  return inverse(s);
}

/// Poincare extension of a complex Moebius map to the upper half-space model on R^3,
/// identifying tau = x + i y with the plane z = 0.
inline MobiusR3 poincare_extension(const ComplexMobius& m) {
  if (m.c == Complex(0.0)) {
    const Complex k = m.a / m.d;
    const Complex t = m.b / m.d;
    return Affine{std::abs(k), OrthMatrix3::rotation_z(std::arg(k)),
                  Point3(t.real(), t.imag(), 0.0)};
  }
  const Complex k = -m.det() / (m.c * m.c);
  const Complex u = -m.d / m.c;
  const Complex v = m.a / m.c;
  return Inversive{std::abs(k), OrthMatrix3::rotation_z(std::arg(k)) * OrthMatrix3::reflect_y(),
                   Point3(u.real(), u.imag(), 0.0), Point3(v.real(), v.imag(), 0.0)};
}

/// Restriction of a map preserving the plane z = 0 (with its orientation) to that plane.
inline ComplexMobius restrict_to_plane_z0(const MobiusR3& f) {
  auto to_c = [](const ExtPoint& p) -> ExtComplex {
    if (p.is_infinite()) return std::nullopt;
    return Complex(p.point().x(), p.point().y());
  };
  return from_three_points(to_c(f(ExtPoint(Point3(0, 0, 0)))), to_c(f(ExtPoint(Point3(1, 0, 0)))),
                           to_c(f(ExtPoint::infinity())));
}

}  // namespace kleinian
