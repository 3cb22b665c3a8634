#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>

#include "kleinian/render.hpp"

using namespace kleinian;

namespace {

RenderConfig small_config() {
  RenderConfig cfg;
  cfg.max_word_len = 7;
  cfg.prune_radius = 1e-2;
  cfg.width = 64;
  cfg.height = 64;
  return cfg;
}

double nearest(const PointCloud& c, const Point3& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point3& p : c.points) best = std::min(best, (p - x).norm());
  return best;
}

TEST(LimitPoints, ContainsOrbitPoints) {
  const PointCloud c = limit_points(family_Gp(Point3(0, 2.5, 0)), small_config());
  ASSERT_FALSE(c.points.empty());
  EXPECT_LT(nearest(c, Point3(0, 0, 0)), 1e-6);
  EXPECT_LT(nearest(c, Point3(2, 0, 0)), 1e-6);
  EXPECT_EQ(c.points.size(), c.depth.size());
  EXPECT_EQ(c.points.size(), c.words.size());
}

TEST(LimitPoints, EmptyGroup) {
  const GeneratorSet trivial("trivial", {}, {});
  EXPECT_TRUE(limit_points(trivial, small_config()).points.empty());
}

TEST(LimitPoints, ClippedShortlexAndConsistent) {
  const GeneratorSet g = family_Gp(Point3(0, 2.5, 0));
  const RenderConfig cfg = small_config();
  const PointCloud c = limit_points(g, cfg);
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    EXPECT_LE(std::abs(c.points[k].x()), cfg.clip_x);
    EXPECT_EQ(c.depth[k], c.points[k].z());
    const ExtPoint y = apply_word(c.words[k], g, ExtPoint::infinity());
    ASSERT_FALSE(y.is_infinite());
    EXPECT_LT((y.point() - c.points[k]).norm(), 1e-9);
    if (k > 0) { EXPECT_FALSE(shortlex_less(c.words[k], c.words[k - 1])); }
  }
}

TEST(LimitPoints, PruningIsMonotone) {
  const GeneratorSet g = family_Gp(Point3(0, 2.5, 0));
  RenderConfig coarse = small_config();
  coarse.max_word_len = 12;
  RenderConfig fine = coarse;
  fine.prune_radius = 2e-3;
  const PointCloud a = limit_points(g, coarse), b = limit_points(g, fine);
  EXPECT_GT(b.points.size(), a.points.size());
  std::set<Word> fine_words(b.words.begin(), b.words.end());
  for (const Word& w : a.words) EXPECT_TRUE(fine_words.count(w)) << g.format(w);
}

TEST(LimitPoints, GeneratorInvariance) {
  const GeneratorSet g = family_Gp(Point3(0, 2.5, 0));
  RenderConfig cfg;
  cfg.max_word_len = 10;
  const PointCloud c = limit_points(g, cfg);
  const InvarianceReport rep = generator_invariance(c, g, cfg, 5.0 * cfg.prune_radius);
  EXPECT_EQ(rep.samples, 1000u);
  EXPECT_GT(rep.checks, 1000u);
  EXPECT_EQ(rep.misses, 0u);
  EXPECT_LT(rep.worst, 5.0 * cfg.prune_radius);
}

TEST(LimitPoints, ThreadsGiveIdenticalBytes) {
  const GeneratorSet g = family_Hp(Point3(0, 0, 2.5));
  RenderConfig cfg = small_config();
  const std::string a = encode_csv(limit_points(g, cfg));
  cfg.threads = 5;
  EXPECT_EQ(encode_csv(limit_points(g, cfg)), a);
}

TEST(Project, SinglePointAlongY) {
  PointCloud c;
  c.points = {Point3(0, 0, 0)};
  c.depth = {0.0};
  c.words = {Word{}};
  c.radius = {1.0};
  RenderConfig cfg;
  cfg.axis = 1;
  cfg.width = 9;
  cfg.height = 9;
  const Image img = project_render(c, cfg);
  int lit = 0;
  for (int r = 0; r < 9; ++r)
    for (int k = 0; k < 9; ++k)
      if (img.at(k, r)) {
        ++lit;
        EXPECT_EQ(k, 4);
        EXPECT_EQ(r, 4);
      }
  EXPECT_EQ(lit, 1);
}

TEST(Project, MaxRuleOnDepth) {
  RenderConfig cfg;
  cfg.width = cfg.height = 5;
  PointCloud lo, hi, both;
  lo.points = {Point3(0, 0, 0.1)};
  hi.points = {Point3(0, 0, 0.9)};
  both.points = {Point3(0, 0, 0.9), Point3(0, 0, 0.1)};
  const auto v = [&](const PointCloud& c) { return project_render(c, cfg).at(2, 2); };
  EXPECT_LT(v(lo), v(hi));
  EXPECT_EQ(v(both), v(hi));
}

TEST(Project, ClipRegionRespected) {
  RenderConfig cfg;
  cfg.width = cfg.height = 40;
  cfg.extent = 5.0;
  PointCloud c;
  c.points = {Point3(4, 0, 0), Point3(-3.5, 1, 0), Point3(2.9, 0, 0)};
  const Image img = project_render(c, cfg);
  int lit = 0;
  for (int r = 0; r < 40; ++r)
    for (int k = 0; k < 40; ++k) {
      if (!img.at(k, r)) continue;
      ++lit;
      const double x = -5.0 + 10.0 * (k + 0.5) / 40.0;
      EXPECT_LE(std::abs(x), 3.0 + 0.25);
    }
  EXPECT_EQ(lit, 1);
}

TEST(Export, EmptyCloudCsvAndPly) {
  const PointCloud c;
  EXPECT_EQ(encode_csv(c), "x,y,z,depth\n");
  EXPECT_NE(encode_ply(c).find("element vertex 0"), std::string::npos);
}

TEST(Export, OnePixelPpm) {
  Image img{1, 1, {255}};
  EXPECT_EQ(encode_ppm(img), std::string("P6\n1 1\n255\n") + std::string(3, '\xff'));
}

TEST(Export, FilesAreByteStable) {
  const GeneratorSet g = family_Gp(Point3(0, 2.5, 0));
  const RenderConfig cfg = small_config();
  const std::string path = testing::TempDir() + "render_stable.csv";
  std::string first;
  for (int run = 0; run < 2; ++run) {
    export_points(limit_points(g, cfg), ExportFormat::CSV, path);
    std::ifstream in(path, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (run == 0) first = bytes;
    else EXPECT_EQ(bytes, first);
  }
  std::remove(path.c_str());
  EXPECT_THROW(export_points(PointCloud{}, ExportFormat::CSV, "/nonexistent-dir/x.csv"), Error);
}

TEST(SpheresK, BaseOnlyAtLengthZero) {
  RenderConfig cfg = small_config();
  cfg.max_word_len = 0;
  const SphereCloud s = orbit_spheres_K(Point3(0, 4, 0), cfg);
  ASSERT_EQ(s.spheres.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<PlaneSphere>(s.spheres[0].sphere));
}

TEST(SpheresK, ImageOfBasePlaneUnderA) {
  const GeneratorSet K = family_Kp(Point3(0, 4, 0));
  const GeneralizedSphere s = image(K["a"], GeneralizedSphere(PlaneSphere{Point3::UnitY(), 0.0}));
  EXPECT_TRUE(same_sphere(s, make_plane(Point3::UnitY(), 4.0), 1e-12));
  for (const Point3& x : {Point3(0.3, 0, 1.2), Point3(-2, 0, 0.5), Point3(1, 0, -1)})
    EXPECT_NEAR(K["a"].apply_finite(x).y(), 4.0, 1e-12);
}

TEST(SpheresK, EverySphereRederives) {
  RenderConfig cfg = small_config();
  cfg.max_word_len = 6;
  for (bool transform : {false, true}) {
    cfg.ball_transform = transform;
    const SphereCloud s = orbit_spheres_K(Point3(0, 4, 0), cfg);
    EXPECT_GT(s.spheres.size(), 10u);
    for (const auto& e : s.spheres) {
      EXPECT_EQ(e.depth, static_cast<int>(e.word.size()));
      EXPECT_TRUE(same_sphere(e.sphere, rederive_sphere(Point3(0, 4, 0), e.word, transform), 1e-9));
    }
  }
}

TEST(SpheresK, NoDuplicates) {
  RenderConfig cfg = small_config();
  cfg.max_word_len = 5;
  const SphereCloud s = orbit_spheres_K(Point3(0, 4, 0), cfg);
  for (std::size_t i = 0; i < s.spheres.size(); ++i)
    for (std::size_t j = i + 1; j < std::min(s.spheres.size(), i + 200); ++j)
      EXPECT_FALSE(same_sphere(s.spheres[i].sphere, s.spheres[j].sphere, 1e-9));
}

TEST(SpheresK, TransformTakesBasePlaneToUnitSphere) {
  const MobiusR3 f = ball_transform();
  EXPECT_TRUE(same_sphere(image(f, GeneralizedSphere(PlaneSphere{Point3::UnitY(), 0.0})),
                          make_round(Point3::Zero(), 1.0), 1e-12));
  const ExtPoint inside = f(ExtPoint(Point3(0.2, -1.0, 0.3)));
  EXPECT_LT(inside.point().norm(), 1.0);
}

TEST(SpheresK, ThreadsGiveIdenticalBytes) {
  RenderConfig cfg = small_config();
  cfg.max_word_len = 6;
  const auto labels = family_Kp(Point3(0, 4, 0)).labels();
  const std::string a = encode_sphere_csv(orbit_spheres_K(Point3(0, 4, 0), cfg), labels);
  cfg.threads = 8;
  EXPECT_EQ(encode_sphere_csv(orbit_spheres_K(Point3(0, 4, 0), cfg), labels), a);
  EXPECT_EQ(encode_ppm(project_render(orbit_spheres_K(Point3(0, 4, 0), cfg), cfg)),
            encode_ppm(project_render(orbit_spheres_K(Point3(0, 4, 0), cfg), cfg)));
}

}  // namespace
