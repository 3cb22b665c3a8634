#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kleinian/slices.hpp"

using namespace kleinian;

namespace {

using K = SliceVerdict::Kind;

TEST(Recurrence, ClosedForms) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const Complex mu(d(rng), d(rng));
    auto rel = [](Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    EXPECT_LT(rel(c_n(mu, 3), mu * mu - 1.0), 1e-12);
    EXPECT_LT(rel(c_n(mu, 4), mu * mu * mu - 2.0 * mu), 1e-12);
    EXPECT_LT(rel(c_n(mu, 5), mu * mu * mu * mu - 3.0 * mu * mu + 1.0), 1e-12);
  }
  EXPECT_EQ(c_n(Complex(0, 2), 3), Complex(-5, 0));
  EXPECT_EQ(c_n(Complex(0.3, 0.7), 1), Complex(1, 0));
  EXPECT_EQ(c_n(Complex(0.3, 0.7), 2), Complex(0.3, 0.7));
  EXPECT_THROW(c_n(Complex(1, 0), 0), Error);
  const auto seq = c_sequence(Complex(0, 2), 6);
  ASSERT_EQ(seq.size(), 6u);
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(seq[n - 1], c_n(Complex(0, 2), n));
}

TEST(Membership, Examples) {
  EXPECT_EQ(membership_p0(Complex(0.5, 0.1), 200), SliceVerdict::excluded_at(2));
  EXPECT_EQ(membership_p0(Complex(0, 2), 200), SliceVerdict::inside_up_to(200));
  EXPECT_EQ(membership_p0(Complex(0, 2.5), 200).kind, K::InsideByBound);
  EXPECT_EQ(membership_p0(Complex(0, 2.5), 200, false), SliceVerdict::inside_up_to(200));
  for (int n = 1; n <= 200; ++n) EXPECT_GE(std::abs(c_n(Complex(0, 2), n)), 1.0);
  EXPECT_THROW(membership_p0(Complex(0, 1), 1), Error);
}

TEST(Membership, CertificatesAreMonotoneInTruncation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int k = 0; k < 300; ++k) {
    const Complex mu(d(rng), d(rng));
    const SliceVerdict v = membership_p0(mu, 20, false);
    if (v.kind != K::ExcludedAt) continue;
    for (int N : {v.n, v.n + 1, 40, 200}) EXPECT_EQ(membership_p0(mu, N, false), v);
    EXPECT_LT(std::abs(c_n(mu, v.n)), 1.0);
  }
}

TEST(Membership, SymmetricUnderNegationAndConjugation) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int k = 0; k < 300; ++k) {
    const Complex mu(d(rng), d(rng));
    const SliceVerdict v = membership_p0(mu, 30);
    EXPECT_EQ(membership_p0(-mu, 30), v);
    EXPECT_EQ(membership_p0(std::conj(mu), 30), v);
  }
}

TEST(IsometricRadius, MatchesRecurrence) {
  EXPECT_NEAR(isometric_radius_power(Point3(0, 0, 2), 3), 0.2, 1e-12);
  EXPECT_NEAR(isometric_radius_power(Point3(0, 1, 1), 2), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(isometric_radius_power(Point3(0.4, -1.3, 2.2), 1), 1.0, 1e-12);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    const double q = d(rng), r = d(rng);
    for (int n = 1; n <= 10; ++n) {
      const double geo = isometric_radius_power(Point3(0, q, r), n);
      EXPECT_NEAR(geo * std::abs(c_n(Complex(q, r), n)), 1.0, 1e-9);
    }
  }
}

TEST(IsometricRadius, PowerFixingInfinity) {
  // A_0 is an involution, so its square is the identity.
  EXPECT_THROW(isometric_radius_power(Point3(0, 0, 0), 2), Error);
}

TEST(RotatePlane, Examples) {
  EXPECT_TRUE(rotate_plane(Complex(1.5, -2), 0).isApprox(Point3(1.5, -2, 0)));
  EXPECT_LT((rotate_plane(Complex(0, 2), M_PI / 2) - Point3(0, 0, 2)).norm(), 1e-15);
  EXPECT_LT((rotate_plane(Complex(1, 3), M_PI / 2) - Point3(1, 0, 3)).norm(), 1e-15);
  EXPECT_TRUE(slice_point(SlicePlane::P_p0, Complex(1, 2)).isApprox(Point3(0, 1, 2)));
  EXPECT_TRUE(slice_point(SlicePlane::P_q0, Complex(1, 2)).isApprox(Point3(1, 0, 2)));
  EXPECT_TRUE(slice_point(SlicePlane::P_r0, Complex(1, 2)).isApprox(Point3(1, 2, 0)));
}

TEST(Bounds, Examples) {
  EXPECT_EQ(bounds_classify(Point3(0, 0, 2.5)).kind, K::InsideByBound);
  EXPECT_EQ(bounds_classify(Point3(1, 0.3, 0.3)).kind, K::OutsideByBound);
  EXPECT_EQ(bounds_classify(Point3(0, 1.2, 0)).kind, K::Unknown);
  EXPECT_EQ(bounds_classify(Point3(5, 2, 0)).kind, K::InsideByBound);
}

TEST(Bounds, NeverContradictRecurrence) {
  for (int i = 0; i < 60; ++i)
    for (int j = 0; j < 60; ++j) {
      const double q = -3 + 6.0 * i / 59, r = -3 + 6.0 * j / 59;
      const SliceVerdict b = bounds_classify(Point3(0, q, r));
      const SliceVerdict m = membership_p0(Complex(q, r), 200, false);
      if (b.kind == K::InsideByBound) { EXPECT_NE(m.kind, K::ExcludedAt) << q << " " << r; }
      if (b.kind == K::OutsideByBound) { EXPECT_EQ(m.kind, K::ExcludedAt) << q << " " << r; }
    }
}

TEST(Scan, UnitCircleArcOnSmallGrid) {
  ScanGrid g{0.0, 2.0, 0.0, 1.0, 80, 40};
  ScanOptions o;
  o.N = 10;
  const ScanResult r = scan_slice(g, o);
  ASSERT_EQ(r.cells.size(), 80u * 40u);
  int arc = 0, off = 0;
  for (int j = 0; j < g.height; ++j)
    for (int i = 0; i < g.width; ++i) {
      const Complex mu = g.center(i, j);
      const double cell = std::hypot(2.0 / 80, 1.0 / 40);
      const bool near_circle = std::abs(std::abs(mu) - 1.0) < 0.5 * std::min(2.0 / 80, 1.0 / 40);
      const bool far = std::abs(std::abs(mu) - 1.0) > cell;
      if (near_circle && r.locus(i, j, 2)) ++arc;
      if (far) { EXPECT_FALSE(r.locus(i, j, 2)); }
      if (near_circle) ++off;
    }
  EXPECT_EQ(arc, off);
  EXPECT_GT(arc, 20);
}

TEST(Scan, ExcludedCellsReverify) {
  ScanGrid g{-2.0, 2.0, -1.0, 1.0, 60, 30};
  ScanOptions o;
  o.N = 20;
  const ScanResult r = scan_slice(g, o);
  for (const auto& c : r.cells) {
    if (c.verdict.kind == K::ExcludedAt) {
      EXPECT_LT(std::abs(c_n(c.mu, c.verdict.n)), 1.0);
      EXPECT_EQ(c.first_excluding_n, c.verdict.n);
      EXPECT_GE(c.overlap, 1);
    } else {
      EXPECT_EQ(c.verdict, SliceVerdict::inside_up_to(20));
      EXPECT_EQ(c.overlap, 0);
    }
  }
}

TEST(Scan, MirrorSymmetry) {
  ScanGrid g{-2.0, 2.0, -1.0, 1.0, 40, 20};
  ScanOptions o;
  o.N = 20;
  const ScanResult r = scan_slice(g, o);
  for (int j = 0; j < g.height; ++j)
    for (int i = 0; i < g.width; ++i) {
      EXPECT_EQ(r.at(i, j).verdict, r.at(g.width - 1 - i, g.height - 1 - j).verdict);
      EXPECT_EQ(r.at(i, j).verdict, r.at(i, g.height - 1 - j).verdict);
      EXPECT_EQ(r.at(i, j).overlap, r.at(g.width - 1 - i, j).overlap);
    }
}

TEST(Scan, ThreadCountDoesNotChangeResult) {
  ScanGrid g{-2.0, 2.0, -1.0, 1.0, 64, 32};
  ScanOptions o;
  o.N = 20;
  const ScanResult a = scan_slice(g, o);
  o.threads = 4;
  const ScanResult b = scan_slice(g, o);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t k = 0; k < a.cells.size(); ++k) {
    EXPECT_EQ(a.cells[k].verdict, b.cells[k].verdict);
    EXPECT_EQ(a.cells[k].locus_bits, b.cells[k].locus_bits);
    EXPECT_EQ(a.cells[k].overlap, b.cells[k].overlap);
  }
  EXPECT_EQ(locus_raster(a), locus_raster(b));
  EXPECT_EQ(overlap_raster(a), overlap_raster(b));
}

TEST(Scan, OtherPlanesUseBounds) {
  ScanGrid g{-3.0, 3.0, -3.0, 3.0, 12, 12};
  ScanOptions o;
  o.plane = SlicePlane::P_r0;
  const ScanResult r = scan_slice(g, o);
  for (const auto& c : r.cells)
    EXPECT_EQ(c.verdict, bounds_classify(slice_point(SlicePlane::P_r0, c.mu)));
}

TEST(Nondiscreteness, FindsEllipticCommutator) {
  const auto res = nondiscreteness_search(family_Gp(Point3(0, 0, 0.5)), 4);
  ASSERT_TRUE(res.certificate.has_value());
  EXPECT_EQ(res.certificate->text, "aa");
  EXPECT_NEAR(res.certificate->radius, 2.0, 1e-9);
  EXPECT_EQ(res.certificate->commutator_kind, MapKind::Elliptic);
}

TEST(Nondiscreteness, NotFoundInsideBounds) {
  EXPECT_FALSE(nondiscreteness_search(family_Gp(Point3(0, 0, 2.5)), 8).certificate.has_value());
  EXPECT_FALSE(nondiscreteness_search(family_Gp(Point3(0, 2.5, 0)), 8).certificate.has_value());
}

TEST(Nondiscreteness, RequiresTranslation) {
  GeneratorSet g("only a", {"a"}, {map_A(Point3(0, 0, 1))});
  EXPECT_THROW(nondiscreteness_search(g, 3), Error);
}

TEST(Nondiscreteness, RationalAngles) {
  EXPECT_EQ(rational_denominator(0.5), 2);
  EXPECT_EQ(rational_denominator(2.0 / 3.0), 3);
  EXPECT_EQ(rational_denominator(1.0), 1);
  EXPECT_EQ(rational_denominator(1.0 / std::sqrt(2.0)), 0);
}

}  // namespace
