#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "classify.hpp"
#include "complex_mobius.hpp"
#include "groups.hpp"

namespace kleinian {

/// Group types: (0,3) = <B, C>, (0,4) = H_p, (1,1) = G_p, (1,0;2) = K_p.
enum class NormalizeKind { Type03, Type04, Type11, Type102 };

inline const char* to_string(NormalizeKind k) {
  switch (k) {
    case NormalizeKind::Type03: return "Type03";
    case NormalizeKind::Type04: return "Type04";
    case NormalizeKind::Type11: return "Type11";
    case NormalizeKind::Type102: return "Type102";
  }
  return "?";
}

inline NormalizeKind parse_normalize_kind(const std::string& s) {
  for (NormalizeKind k : {NormalizeKind::Type03, NormalizeKind::Type04, NormalizeKind::Type11,
                          NormalizeKind::Type102})
    if (s == to_string(k)) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown normalization kind '" + s + "'");
}

/// Outcome of a normalization: conjugator g with g gens g^-1 equal to `canonical`.
struct NormalizeResult {
  MobiusR3 conjugator;
  Point3 p = Point3::Zero();   ///< parameter of G_p, H_p or K_p
  Complex mu{0.0, 0.0};        ///< certified translation parameter (2 or sqrt 2)
  std::vector<int> exponents;  ///< +1 or -1 per generator against the canonical one
  GeneratorSet canonical;
  double max_deviation = 0.0;  ///< worst chordal deviation over probe points
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::HypothesisViolated, what);
}

inline void require_pure(const MobiusR3& f, const std::string& name, const Tolerances& tol) {
  require(classify(f, tol).kind == MapKind::ParabolicPure, name + " must be pure parabolic");
}

inline void require_pure_either(const MobiusR3& b, const MobiusR3& g, const std::string& name,
                                const Tolerances& tol) {
  const bool plus = classify(compose(b, g, tol), tol).kind == MapKind::ParabolicPure;
  const bool minus = classify(compose(b, inverse(g), tol), tol).kind == MapKind::ParabolicPure;
  require(plus || minus, name + " must be pure parabolic for one orientation");
}

inline ExtPoint parabolic_fixed(const MobiusR3& f, const Tolerances& tol) {
  return fixed_points(f, tol).points.front();
}

/// Inversive map Jhat J(x - x0), sending x0 to infinity; identity if x0 is infinity.
inline MobiusR3 send_to_infinity(const ExtPoint& x0) {
  if (x0.is_infinite()) return MobiusR3::identity();
  return Inversive{1.0, OrthMatrix3::reflect_y(), x0.point(), Point3::Zero()};
}

/// Accumulates a conjugator while keeping the conjugated generators current.
struct Conjugation {
  MobiusR3 g;
  std::vector<MobiusR3> maps;
  Tolerances tol;

  void apply(const MobiusR3& step) {
    g = compose(step, g, tol);
    for (auto& m : maps) m = conjugate(step, m, tol);
  }
};

inline double worst_deviation(const std::vector<MobiusR3>& a, const std::vector<MobiusR3>& b) {
  double w = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) w = std::max(w, max_deviation(a[k], b[k]));
  return w;
}

/// Shared steps for the (1,1) and (1,0;2) cases: returns translation parameter mu.
inline Complex normalize_alpha_beta(Conjugation& cj, double expected_mu, const Tolerances& tol) {
  const MobiusR3 beta = cj.maps[1];
  const ExtPoint xb = parabolic_fixed(beta, tol);
  if (chordal_distance(cj.maps[0](xb), xb) <= tol.point)
    throw Error(ErrorCode::SharedFixedPoint, "alpha and beta share a fixed point");
  cj.apply(send_to_infinity(xb));
  require(cj.maps[1].is_affine(), "beta is not conjugated to a translation");
  if (cj.maps[0].is_affine())
    throw Error(ErrorCode::SharedFixedPoint, "alpha fixes the fixed point of beta");
  cj.apply(MobiusR3::translation(-cj.maps[0].inversive().u));
  cj.apply(MobiusR3::dilation(1.0 / std::sqrt(cj.maps[0].inversive().lambda)));

  const Matrix3 P = cj.maps[0].inversive().P.matrix();
  const Point3 u = cj.maps[1].affine().u;
  const Point3 w = P.transpose() * u;
  const Point3 m = u + w;
  require(m.norm() > 1e-6 * std::max(1.0, u.norm()), "translation is reversed by alpha");
  const Point3 e1 = m.normalized();
  Point3 d = (u - w) - (u - w).dot(e1) * e1;
  const Point3 e2 = d.norm() > 1e-12 * std::max(1.0, u.norm()) ? Point3(d.normalized())
                                                              : orthonormal_complement(e1).first;
  Matrix3 Q;
  Q.row(0) = e1.transpose();
  Q.row(1) = e2.transpose();
  Q.row(2) = e1.cross(e2).transpose();
  cj.apply(MobiusR3::rotation(OrthMatrix3::nearest(Q)));

  const Point3 uq = cj.maps[1].affine().u;
  const Complex mu(uq.x(), uq.y());
  const MobiusR3& a = cj.maps[0];
  const MobiusR3& b = cj.maps[1];
  const MobiusR3 k =
      compose(compose(inverse(a), inverse(b), tol), compose(a, b, tol), tol);
  const ComplexMobius restricted = restrict_to_plane_z0(k);
  const ComplexMobius expected(1.0, mu, -mu, 1.0 - mu * mu);
  require(projective_distance(restricted, expected) < 1e-6,
          "commutator does not restrict to the expected planar map");
  require(std::abs(mu - Complex(expected_mu, 0.0)) < 1e-6,
          "commutator certification gives mu = " + std::to_string(mu.real()) + "+" +
              std::to_string(mu.imag()) + "i");
  return mu;
}

/// Final rotation about the x axis turning P into Jhat; `shift` selects theta or theta + pi.
inline void align_reflection(Conjugation& cj, bool shift) {
  const Matrix3 M = cj.maps[0].inversive().P.matrix() * OrthMatrix3::reflect_y().matrix();
  const double phi = std::atan2(M(2, 1), M(1, 1));
  const double theta = -phi / 2.0 + (shift ? std::numbers::pi : 0.0);
  cj.apply(MobiusR3::rotation(OrthMatrix3::rotation_x(theta)));
}

}  // namespace detail

/// Conjugates generators to canonical form following the constructive normalization.
/// Generator order: Type03 (beta, gamma); Type04 (beta, gamma, delta);
/// Type11 (alpha, beta); Type102 (alpha, beta, gamma).
inline NormalizeResult normalize(const std::vector<MobiusR3>& gens, NormalizeKind kind,
                                 const Tolerances& tol = default_tolerances) {
  using namespace detail;
  NormalizeResult res;
  detail::Conjugation cj{MobiusR3::identity(), gens, tol};
  switch (kind) {
    case NormalizeKind::Type11: {
      require(gens.size() == 2, "Type11 takes (alpha, beta)");
      require_pure(gens[1], "beta", tol);
      require(is_parabolic(classify(commutator(gens[0], gens[1], tol), tol).kind),
              "[alpha, beta] must be parabolic");
      res.mu = normalize_alpha_beta(cj, 2.0, tol);
      align_reflection(cj, false);
      res.p = cj.maps[0].inversive().v;
      res.canonical = family_Gp(res.p);
      res.exponents = {1, 1};
      break;
    }
    case NormalizeKind::Type102: {
      require(gens.size() == 3, "Type102 takes (alpha, beta, gamma)");
      require_pure(gens[1], "beta", tol);
      require_pure(gens[2], "gamma", tol);
      require(classify(commutator(gens[0], compose(gens[1], gens[2], tol), tol), tol).kind ==
                  MapKind::ParabolicPure,
              "[alpha, beta gamma] must be pure parabolic");
      require(max_displacement(power(commutator(gens[0], gens[1], tol), 2, tol), probe_points()) <
                  1e-6,
              "[alpha, beta]^2 must be the identity");
      res.mu = normalize_alpha_beta(cj, std::numbers::sqrt2, tol);
      const auto saved = cj;
      align_reflection(cj, false);
      require(cj.maps[2].is_affine(), "gamma does not fix the fixed point of beta");
      if (cj.maps[2].affine().u.z() < 0.0) {
        cj = saved;
        align_reflection(cj, true);
      }
      res.p = cj.maps[0].inversive().v;
      res.canonical = family_Kp(res.p);
      res.exponents = {1, 1, 1};
      break;
    }
    case NormalizeKind::Type03:
    case NormalizeKind::Type04: {
      const bool four = kind == NormalizeKind::Type04;
      require(gens.size() == (four ? 3u : 2u), four ? "Type04 takes (beta, gamma, delta)"
                                                    : "Type03 takes (beta, gamma)");
      for (std::size_t k = 0; k < gens.size(); ++k)
        require_pure(gens[k], k == 0 ? "beta" : k == 1 ? "gamma" : "delta", tol);
      require_pure_either(gens[0], gens[1], "beta gamma", tol);
      if (four) require_pure_either(gens[0], gens[2], "beta delta", tol);
      const ExtPoint xb = parabolic_fixed(gens[0], tol);
      const ExtPoint xg = parabolic_fixed(gens[1], tol);
      if (chordal_distance(xb, xg) <= tol.point)
        throw Error(ErrorCode::SharedFixedPoint, "beta and gamma share their fixed point");
      cj.apply(send_to_infinity(xb));
      const ExtPoint xg1 = cj.g(xg);
      cj.apply(MobiusR3::translation(-xg1.point()));
      const Point3 u = cj.maps[0].affine().u;
      const Eigen::Quaterniond q = Eigen::Quaterniond::FromTwoVectors(u, Point3::UnitX());
      cj.apply(MobiusR3::rotation(OrthMatrix3::nearest(q.toRotationMatrix())));
      cj.apply(MobiusR3::dilation(2.0 / u.norm()));
      const MobiusR3 C = map_C();
      const double dp = max_deviation(cj.maps[1], C), dm = max_deviation(cj.maps[1], inverse(C));
      require(std::min(dp, dm) < 1e-6, "gamma is not conjugated to C or its inverse");
      res.exponents = {1, dp <= dm ? 1 : -1};
      res.mu = 2.0;
      if (!four) {
        res.canonical = GeneratorSet("BC", {"b", "c"}, {map_B(), map_C()});
        break;
      }
      const ExtPoint xd = parabolic_fixed(cj.maps[2], tol);
      require(!xd.is_infinite(), "delta fixes infinity");
      const Point3 pd = xd.point();
      cj.apply(MobiusR3::rotation(OrthMatrix3::rotation_x(-std::atan2(pd.z(), pd.y()))));
      res.p = parabolic_fixed(cj.maps[2], tol).point();
      res.p.z() = 0.0;
      const MobiusR3 D = map_D(res.p);
      const double ep = max_deviation(cj.maps[2], D), em = max_deviation(cj.maps[2], inverse(D));
      require(std::min(ep, em) < 1e-6, "delta is not conjugated to D_p or its inverse");
      res.exponents.push_back(ep <= em ? 1 : -1);
      res.canonical = family_Hp(res.p);
      break;
    }
  }
  res.conjugator = cj.g;
  std::vector<MobiusR3> target;
  for (int k = 0; k < res.canonical.rank(); ++k)
    target.push_back(res.exponents[static_cast<std::size_t>(k)] > 0 ? res.canonical.map(k)
                                                                    : inverse(res.canonical.map(k)));
  std::vector<MobiusR3> conj_inputs;
  for (const auto& f : gens) conj_inputs.push_back(conjugate(res.conjugator, f, tol));
  res.max_deviation = detail::worst_deviation(conj_inputs, target);
  return res;
}

inline NormalizeResult normalize(const GeneratorSet& gens, NormalizeKind kind,
                                 const Tolerances& tol = default_tolerances) {
  std::vector<MobiusR3> maps;
  for (int k = 0; k < gens.rank(); ++k) maps.push_back(gens.map(k));
  return normalize(maps, kind, tol);
}

}  // namespace kleinian
