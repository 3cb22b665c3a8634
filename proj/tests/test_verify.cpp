#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kleinian/verify.hpp"
#include "test_support.hpp"

using namespace kleinian;

namespace {

constexpr double kPi = std::numbers::pi;

/// Inversive map of isometric radius r preserving the plane x = 0 with its sides.
MobiusR3 plane_preserving(double r, double alpha, double uy, double uz, double vy, double vz) {
  return Inversive{r * r, OrthMatrix3::rotation_x(alpha) * OrthMatrix3::reflect_y(), Point3(0, uy, uz),
                   Point3(0, vy, vz)};
}

/// Random loxodromic map of radius r preserving the plane x = 0.
MobiusR3 random_plane_loxodromic(double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(0.0, 2.0 * kPi), d(-3.0, 3.0);
  for (;;) {
    const MobiusR3 f = plane_preserving(r, a(rng), d(rng), d(rng), d(rng), d(rng));
    try {
      if (classify(f).kind == MapKind::Loxodromic) return f;
    } catch (const Error&) {
    }
  }
}

TEST(Lens, OrthogonalPlanes) {
  const BallRegion a = make_half_space(Point3::UnitZ(), 0.0);
  const BallRegion b = make_half_space(Point3::UnitX(), 0.0);
  EXPECT_NEAR(lens_inner_angle(a, b), kPi / 2, 1e-12);
}

TEST(Lens, TiltedHalfSpace) {
  const BallRegion a = make_half_space(Point3::UnitZ(), 0.0);
  for (double phi : {0.1, 0.4, 0.7, 1.2}) {
    // Normal (0, -sin phi, cos phi) tilts the plane z = 0 by phi about the x axis.
    const BallRegion b = make_half_space(Point3(0, -std::sin(phi), std::cos(phi)), 0.0);
    const BallRegion c = make_half_space(Point3(0, std::sin(phi), -std::cos(phi)), 0.0);
    const double ab = lens_inner_angle(a, b), ac = lens_inner_angle(a, c);
    EXPECT_NEAR(ab + ac, kPi, 1e-12);
    EXPECT_NEAR(std::max(ab, ac), kPi / 2 + (kPi / 2 - phi), 1e-12);
    const BallRegion side = make_half_space(Point3(0, std::cos(phi), std::sin(phi)), 0.0);
    EXPECT_NEAR(lens_inner_angle(a, side), kPi / 2 + phi, 1e-12);
  }
}

TEST(Lens, UnitBallAgainstLowerHalfSpace) {
  EXPECT_NEAR(lens_inner_angle(make_round_ball(Point3::Zero(), 1.0), make_half_space(Point3::UnitZ(), 0.0)),
              kPi / 2, 1e-12);
}

TEST(Lens, ErrorsForDisjointAndTangent) {
  try {
    lens_inner_angle(make_round_ball(Point3::Zero(), 1.0), make_round_ball(Point3(5, 0, 0), 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoIntersection);
  }
  try {
    lens_inner_angle(make_round_ball(Point3::Zero(), 1.0), make_round_ball(Point3(2, 0, 0), 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Tangent);
  }
}

TEST(Lens, MobiusCovariance) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> rad(0.8, 1.6);
  int checked = 0;
  for (int k = 0; k < 40; ++k) {
    const BallRegion k1 = make_round_ball(ktest::random_point(rng, -0.5, 0.5), rad(rng));
    const BallRegion k2 = make_half_space(ktest::random_rotation(rng) * Point3::UnitZ(), 0.1);
    double base = 0.0;
    try {
      base = lens_inner_angle(k1, k2);
    } catch (const Error&) {
      continue;
    }
    const MobiusR3 g = ktest::random_mobius(rng);
    EXPECT_NEAR(lens_inner_angle(image(g, k1), image(g, k2)), base, 1e-7);
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(Commutator, FixedRadii) {
  std::mt19937_64 rng(3);
  const struct {
    double r;
    MapKind kind;
  } cases[] = {{0.5, MapKind::Loxodromic}, {1.0, MapKind::ParabolicPure}, {2.0, MapKind::Elliptic}};
  for (const auto& c : cases) {
    const CommutatorReport rep = commutator_type(random_plane_loxodromic(c.r, rng));
    EXPECT_NEAR(rep.radius, c.r, 1e-12);
    EXPECT_EQ(rep.verdict.kind, c.kind) << c.r;
    EXPECT_TRUE(rep.consistent);
  }
}

TEST(Commutator, RandomRadiiFollowTrichotomy) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> rad(0.2, 3.0);
  for (int k = 0; k < 50; ++k) {
    const double r = rad(rng);
    const CommutatorReport rep = commutator_type(random_plane_loxodromic(r, rng));
    EXPECT_TRUE(rep.consistent) << "r = " << r << " got " << to_string(rep.verdict.kind);
  }
}

TEST(Commutator, Hypotheses) {
  EXPECT_THROW(commutator_type(map_B()), Error);
  // Moves the plane x = 0.
  EXPECT_THROW(commutator_type(Inversive{0.25, OrthMatrix3::reflect_y(), Point3(1, 0, 0), Point3(0, 3, 0)}),
               Error);
  // A_0 is an involution, hence not loxodromic.
  EXPECT_THROW(commutator_type(map_A(Point3(0, 0, 0))), Error);
  EXPECT_NO_THROW(commutator_type(map_A(Point3(0, 0, 3))));
}

TEST(Combination, PassesInsideTheSlice) {
  const CombinationReport rep = check_combination(combination_setup_hp(Point3(0, 0, 2.5), 4));
  for (const auto& c : rep.conditions) EXPECT_EQ(c.status, CheckStatus::Pass) << c.index << " " << c.detail;
  EXPECT_EQ(rep.overall, CheckStatus::Pass);
  EXPECT_EQ(rep.exit_code(), 0);
  EXPECT_NE(to_text(rep).find("overall: Pass"), std::string::npos);
}

TEST(Combination, FailsNearTheOrigin) {
  const CombinationReport rep = check_combination(combination_setup_hp(Point3(0, 0, 0.4), 6));
  EXPECT_EQ(rep.overall, CheckStatus::Fail);
  EXPECT_EQ(rep.exit_code(), 2);
  bool named = false;
  for (const auto& c : rep.conditions)
    if (c.status == CheckStatus::Fail) named = named || !c.witness_word.empty();
  EXPECT_TRUE(named);
  EXPECT_NE(to_text(rep).find("witness_word:"), std::string::npos);
}

TEST(Combination, CyclicFreeCase) {
  CombinationConfig cfg = combination_setup_cyclic(Point3(0, 0, 3), 4);
  const CombinationReport rep = check_combination(cfg);
  EXPECT_EQ(rep.overall, CheckStatus::Pass) << to_text(rep);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_LT(std::abs(rep.witness->x()), 1.0);
}

TEST(Combination, FailuresPersistAsLGrows) {
  for (double r : {0.4, 0.8}) {
    std::array<CheckStatus, 5> prev{};
    for (int L = 2; L <= 5; ++L) {
      const CombinationReport rep = check_combination(combination_setup_hp(Point3(0, 0, r), L));
      for (int k = 0; k < 5; ++k) {
        if (L > 2 && prev[k] == CheckStatus::Fail) { EXPECT_EQ(rep.conditions[k].status, CheckStatus::Fail); }
        prev[k] = rep.conditions[k].status;
      }
    }
  }
}

TEST(Combination, ThreadCountDoesNotChangeReport) {
  CombinationConfig cfg = combination_setup_hp(Point3(0, 0, 0.4), 4);
  const std::string a = to_text(check_combination(cfg));
  cfg.threads = 4;
  EXPECT_EQ(to_text(check_combination(cfg)), a);
}

TEST(Combination, WitnessSearchAndMissingWitness) {
  CombinationConfig cfg = combination_setup_hp(Point3(0, 0, 2.5), 3);
  cfg.witness.reset();
  const CombinationReport rep = check_combination(cfg);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_EQ(rep.conditions[2].status, CheckStatus::Pass);

  // B1 and B2 together cover everything, so no witness exists.
  CombinationConfig bad = combination_setup_cyclic(Point3(0, 0, 3), 2);
  bad.B1 = make_half_space(Point3::UnitX(), 0.5);
  bad.B2 = make_half_space(-Point3::UnitX(), 0.5);
  bad.witness.reset();
  try {
    check_combination(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WitnessMissing);
  }
}

TEST(Ford, Examples) {
  const GeneratorSet g("<A_p>", {"a"}, {map_A(Point3(0, 0, 3))});
  EXPECT_TRUE(ford_membership(ExtPoint(Point3(2, 0, 0)), g, 3).inside);
  const FordResult r = ford_membership(ExtPoint(Point3(0.1, 0, 0)), g, 3);
  EXPECT_FALSE(r.inside);
  EXPECT_TRUE(r.violating == "a" || r.violating == "A");
  EXPECT_TRUE(ford_membership(ExtPoint::infinity(), g, 3).inside);
}

TEST(Ford, InfinityStabilized) {
  try {
    ford_membership(ExtPoint(Point3(2, 0, 0)), family_Gp(Point3(0, 2.5, 0)), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfinityStabilized);
  }
}

TEST(Hexahedron, AnglesAtQ4) {
  const HexahedronReport rep = hexahedron_check(4.0);
  EXPECT_EQ(rep.edges.size(), 12u);
  EXPECT_EQ(rep.quarter_edges, 8);
  EXPECT_EQ(rep.right_edges, 4);
  EXPECT_LE(rep.worst_angle_error, 1e-9);
  EXPECT_TRUE(rep.pass) << to_text(rep);
}

TEST(Hexahedron, RelationsAndPairings) {
  const HexahedronReport rep = hexahedron_check(4.0);
  EXPECT_TRUE(rep.relations.all_verified);
  for (const auto& rel : rep.relations.relations) EXPECT_LE(rel.max_deviation, 1e-10) << rel.name;
  ASSERT_EQ(rep.pairings.size(), 3u);
  for (const auto& p : rep.pairings) EXPECT_TRUE(p.ok) << p.generator;
  const GeneratorSet K = family_Kp(Point3(0, 4, 0));
  const Point3 x(-1.0 / std::numbers::sqrt2, 2.0, 0.1);
  EXPECT_NEAR(K["b"].apply_finite(x).x(), 1.0 / std::numbers::sqrt2, 1e-15);
}

TEST(Hexahedron, OtherHeightsAndDegenerate) {
  for (double q : {2.5, 3.0, 7.0}) EXPECT_TRUE(hexahedron_check(q).pass) << q;
  try {
    hexahedron_check(2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateHexahedron);
  }
}

TEST(PlanarModel, BAndCPreserveLowerHalfPlane) {
  const GeneratorSet h = family_H2D(Complex(0, 2));
  const ComplexMobius B = *h.planar(0), C = *h.planar(1);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> re(-5, 5), im(-5, -1e-3);
  for (int k = 0; k < 100; ++k) {
    const Complex tau(re(rng), im(rng));
    EXPECT_LT(B(tau)->imag(), 0.0);
    EXPECT_LT(C(tau)->imag(), 0.0);
  }
}

}  // namespace
