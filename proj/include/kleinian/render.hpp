#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "groups.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "regions.hpp"

namespace kleinian {

struct RenderConfig {
  int max_word_len = 12;
  double prune_radius = 1e-3;
  double clip_x = 3.0;      ///< keep |x| <= clip_x
  int axis = 2;             ///< projection axis: 0 = x, 1 = y, 2 = z
  int width = 512;
  int height = 512;
  double extent = 3.0;      ///< half-width of the view window
  double depth_min = -3.0;  ///< z mapped to the dimmest lit value
  double depth_max = 3.0;   ///< z mapped to full brightness
  std::uint64_t seed = 1;   ///< sampling seed for property checks
  int threads = 1;
  bool ball_transform = false;  ///< post-compose sphere clouds with 2 J^ J (x - e2) - e2
};

struct PointCloud {
  std::vector<Point3> points;
  std::vector<double> depth;  ///< z-value per point
  std::vector<Word> words;    ///< generating word per point, shortlex sorted
  std::vector<double> radius; ///< radius of I(w^-1) at the generating word
};

struct SphereEntry {
  GeneralizedSphere sphere;
  Word word;
  int depth = 0;  ///< generation (word length)
};

struct SphereCloud {
  std::vector<SphereEntry> spheres;
};

namespace detail {

/// Pairs of affine generator letters that commute; such runs are kept in nondecreasing
/// generator order so each product is visited once.
struct CommuteTable {
  int letters = 0;
  std::vector<char> affine;
  std::vector<char> commute;

  explicit CommuteTable(const GeneratorSet& gens) : letters(2 * gens.rank()) {
    affine.resize(static_cast<std::size_t>(letters));
    commute.assign(static_cast<std::size_t>(letters * letters), 0);
    for (int a = 0; a < letters; ++a)
      affine[a] = gens.letter(Letter{static_cast<std::uint16_t>(a)}).is_affine();
    for (int a = 0; a < letters; ++a)
      for (int b = 0; b < letters; ++b) {
        if (!affine[a] || !affine[b]) continue;
        const MobiusR3& f = gens.letter(Letter{static_cast<std::uint16_t>(a)});
        const MobiusR3& g = gens.letter(Letter{static_cast<std::uint16_t>(b)});
        commute[a * letters + b] = max_deviation(compose(f, g), compose(g, f)) <= 1e-12;
      }
  }

  /// Whether `next` may follow `prev` in a reduced canonical word.
  bool allowed(Letter prev, Letter next) const {
    if (next == prev.inverse()) return false;
    if (affine[prev.code] && affine[next.code] && commute[prev.code * letters + next.code] &&
        next.generator() < prev.generator())
      return false;
    return true;
  }
};

inline bool ball_meets_slab(const Point3& c, double r, double clip) {
  return std::abs(c.x()) - r <= clip;
}

}  // namespace detail

/// Orbit points w(infinity) from a depth-first walk over reduced words. A word's subtree is cut
/// when the isometric sphere of w^-1 is smaller than prune_radius or misses the slab |x| <= clip_x.
/// Points are recorded for words moving infinity whose last letter moves infinity, which avoids
/// repeating the point of the prefix.
inline PointCloud limit_points(const GeneratorSet& gens, const RenderConfig& cfg) {
  PointCloud out;
  if (gens.rank() == 0 || cfg.max_word_len < 1) return out;
  const detail::CommuteTable table(gens);
  const int letters = 2 * gens.rank();

  struct Buffer {
    std::vector<Point3> points;
    std::vector<Word> words;
    std::vector<double> radius;
  };
  std::vector<Buffer> buffers(static_cast<std::size_t>(letters));

  parallel_for(static_cast<std::size_t>(letters), cfg.threads, [&](std::size_t first) {
    Buffer& buf = buffers[first];
    Word word;
    auto visit = [&](auto&& self, Letter l, const MobiusR3& parent) -> void {
      const MobiusR3 f = compose(parent, gens.letter(l));
      word.push_back(l);
      bool expand = static_cast<int>(word.size()) < cfg.max_word_len;
      if (!f.fixes_infinity()) {
        const Inversive& inv = f.inversive();
        const double r = std::sqrt(inv.lambda);
        if (!gens.letter(l).fixes_infinity() && std::abs(inv.v.x()) <= cfg.clip_x) {
          buf.points.push_back(inv.v);
          buf.words.push_back(word);
          buf.radius.push_back(r);
        }
        if (r < cfg.prune_radius || !detail::ball_meets_slab(inv.v, r, cfg.clip_x)) expand = false;
      } else if (std::abs(f.affine().u.x()) > cfg.clip_x + 4.0) {
        expand = false;
      }
      if (expand)
        for (int c = 0; c < letters; ++c) {
          const Letter next{static_cast<std::uint16_t>(c)};
          if (table.allowed(l, next)) self(self, next, f);
        }
      word.pop_back();
    };
    visit(visit, Letter{static_cast<std::uint16_t>(first)}, MobiusR3::identity());
  });

  std::vector<std::size_t> order;
  std::vector<Point3> pts;
  std::vector<Word> words;
  std::vector<double> radius;
  for (auto& b : buffers) {
    pts.insert(pts.end(), b.points.begin(), b.points.end());
    words.insert(words.end(), b.words.begin(), b.words.end());
    radius.insert(radius.end(), b.radius.begin(), b.radius.end());
  }
  order.resize(pts.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return shortlex_less(words[a], words[b]); });
  out.points.reserve(order.size());
  for (std::size_t k : order) {
    out.points.push_back(pts[k]);
    out.depth.push_back(pts[k].z());
    out.words.push_back(std::move(words[k]));
    out.radius.push_back(radius[k]);
  }
  return out;
}

struct InvarianceReport {
  std::size_t samples = 0;  ///< cloud points tested
  std::size_t checks = 0;   ///< (point, letter) pairs whose image lies in the clip slab
  std::size_t misses = 0;   ///< images farther than delta from the cloud
  double worst = 0.0;       ///< largest distance from an image to the cloud
};

/// One-sided invariance of a point cloud: for up to `samples` points generated by words shorter
/// than cfg.max_word_len and every generator letter g, the distance from g(x) to the cloud.
/// Images outside the slab |x| <= clip_x are not expected in the cloud and are skipped.
inline InvarianceReport generator_invariance(const PointCloud& cloud, const GeneratorSet& gens,
                                             const RenderConfig& cfg, double delta,
                                             std::size_t samples = 1000) {
  InvarianceReport rep;
  std::vector<std::size_t> eligible;
  for (std::size_t k = 0; k < cloud.points.size(); ++k)
    if (static_cast<int>(cloud.words[k].size()) < cfg.max_word_len) eligible.push_back(k);
  if (eligible.empty()) return rep;

  struct CellHash {
    std::size_t operator()(const std::array<long long, 3>& c) const {
      return static_cast<std::size_t>(c[0] * 73856093LL ^ c[1] * 19349663LL ^ c[2] * 83492791LL);
    }
  };
  std::unordered_map<std::array<long long, 3>, std::vector<std::size_t>, CellHash> grid;
  auto cell_of = [&](const Point3& x) {
    return std::array<long long, 3>{static_cast<long long>(std::floor(x.x() / delta)),
                                    static_cast<long long>(std::floor(x.y() / delta)),
                                    static_cast<long long>(std::floor(x.z() / delta))};
  };
  for (std::size_t k = 0; k < cloud.points.size(); ++k) grid[cell_of(cloud.points[k])].push_back(k);
  auto nearest = [&](const Point3& y) {
    double best = std::numeric_limits<double>::infinity();
    const auto c = cell_of(y);
    for (long long i = -1; i <= 1; ++i)
      for (long long j = -1; j <= 1; ++j)
        for (long long l = -1; l <= 1; ++l) {
          const auto it = grid.find({c[0] + i, c[1] + j, c[2] + l});
          if (it == grid.end()) continue;
          for (std::size_t k : it->second) best = std::min(best, (cloud.points[k] - y).norm());
        }
    return best;
  };

  const std::size_t n = std::min(samples, eligible.size());
  for (std::size_t s = 0; s < n; ++s) {
    const Point3& x = cloud.points[eligible[s * eligible.size() / n]];
    ++rep.samples;
    for (int c = 0; c < 2 * gens.rank(); ++c) {
      const ExtPoint y = gens.letter(Letter{static_cast<std::uint16_t>(c)})(ExtPoint(x));
      if (y.is_infinite() || std::abs(y.point().x()) > cfg.clip_x) continue;
      ++rep.checks;
      const double d = nearest(y.point());
      rep.worst = std::max(rep.worst, d);
      if (!(d < delta)) ++rep.misses;
    }
  }
  return rep;
}

/// The map 2 J^ J (x - e2) - e2, taking the half-space y <= 0 to the unit ball.
inline MobiusR3 ball_transform() {
  return Inversive{2.0, OrthMatrix3::reflect_y(), Point3::UnitY(), -Point3::UnitY()};
}

namespace detail {

/// Hash of a sphere quantized at `cell`; planes and round spheres use separate key spaces.
struct SphereKey {
  std::array<std::int64_t, 5> k;
  bool operator==(const SphereKey&) const = default;
};

struct SphereKeyHash {
  std::size_t operator()(const SphereKey& s) const {
    std::size_t h = 1469598103934665603ULL;
    for (auto v : s.k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
    return h;
  }
};

inline std::array<double, 5> sphere_coords(const GeneralizedSphere& s) {
  if (const auto* r = std::get_if<RoundSphere>(&s))
    return {0.0, r->center.x(), r->center.y(), r->center.z(), r->radius};
  auto p = std::get<PlaneSphere>(s);
  // Orient planes canonically so both normal signs hash alike.
  const double sgn = (p.normal.x() < 0 || (p.normal.x() == 0 && (p.normal.y() < 0 ||
                                           (p.normal.y() == 0 && p.normal.z() < 0))))
                         ? -1.0 : 1.0;
  return {1.0, sgn * p.normal.x(), sgn * p.normal.y(), sgn * p.normal.z(), sgn * p.offset};
}

/// Set of spheres with coincidence at tolerance `tol` (checked across neighbouring cells).
class SphereSet {
 public:
  explicit SphereSet(double tol) : tol_(tol), cell_(std::max(tol * 16.0, 1e-7)) {}

  bool contains(const GeneralizedSphere& s) const {
    const auto c = sphere_coords(s);
    std::array<std::int64_t, 5> base{};
    for (int i = 0; i < 5; ++i) base[i] = static_cast<std::int64_t>(std::floor(c[i] / cell_));
    for (int m = 0; m < 81; ++m) {
      SphereKey key{base};
      int t = m;
      for (int i = 1; i < 5; ++i) {
        key.k[i] += (t % 3) - 1;
        t /= 3;
      }
      const auto it = map_.find(key);
      if (it == map_.end()) continue;
      for (const auto& other : it->second)
        if (same_sphere(other, s, tol_)) return true;
    }
    return false;
  }

  void insert(const GeneralizedSphere& s) {
    const auto c = sphere_coords(s);
    SphereKey key{};
    for (int i = 0; i < 5; ++i) key.k[i] = static_cast<std::int64_t>(std::floor(c[i] / cell_));
    map_[key].push_back(s);
  }

 private:
  double tol_;
  double cell_;
  std::unordered_map<SphereKey, std::vector<GeneralizedSphere>, SphereKeyHash> map_;
};

inline bool sphere_meets_slab(const GeneralizedSphere& s, double clip) {
  if (const auto* r = std::get_if<RoundSphere>(&s)) return std::abs(r->center.x()) - r->radius <= clip;
  const auto& p = std::get<PlaneSphere>(s);
  if (std::abs(p.normal.x()) < 1.0 - 1e-12) return true;
  return std::abs(p.offset) <= clip;
}

}  // namespace detail

/// Images of the plane y = 0 under reduced words of K_p, breadth first and shortlex within each
/// length. New letters are prepended, so a sphere already seen spans the same subtree and is
/// not expanded again. Spheres smaller than prune_radius or outside the slab |x| <= clip_x are
/// neither emitted nor expanded.
inline SphereCloud orbit_spheres_K(const Point3& p, const RenderConfig& cfg,
                                   const Tolerances& tol = default_tolerances) {
  const GeneratorSet K = family_Kp(p);
  const int letters = 2 * K.rank();
  SphereCloud out;
  detail::SphereSet seen(tol.point);

  struct Node {
    Word word;  ///< word applied to the base plane, first letter outermost
    GeneralizedSphere sphere;
  };
  const GeneralizedSphere base = PlaneSphere{Point3::UnitY(), 0.0};
  std::vector<Node> frontier{{Word{}, base}};
  seen.insert(base);
  out.spheres.push_back({base, Word{}, 0});

  for (int len = 1; len <= cfg.max_word_len && !frontier.empty(); ++len) {
    std::vector<Node> cand(frontier.size() * static_cast<std::size_t>(letters));
    std::vector<char> valid(cand.size(), 0);
    parallel_for(frontier.size(), cfg.threads, [&](std::size_t i) {
      const Node& n = frontier[i];
      for (int c = 0; c < letters; ++c) {
        const Letter l{static_cast<std::uint16_t>(c)};
        if (!n.word.empty() && n.word.front() == l.inverse()) continue;
        const GeneralizedSphere s = image(K.letter(l), n.sphere);
        if (const auto* r = std::get_if<RoundSphere>(&s))
          if (r->radius < cfg.prune_radius) continue;
        if (!detail::sphere_meets_slab(s, cfg.clip_x)) continue;
        Node& out_node = cand[i * static_cast<std::size_t>(letters) + static_cast<std::size_t>(c)];
        out_node.word.reserve(n.word.size() + 1);
        out_node.word.push_back(l);
        out_node.word.insert(out_node.word.end(), n.word.begin(), n.word.end());
        out_node.sphere = s;
        valid[i * static_cast<std::size_t>(letters) + static_cast<std::size_t>(c)] = 1;
      }
    });
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < cand.size(); ++k)
      if (valid[k]) order.push_back(k);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return shortlex_less(cand[a].word, cand[b].word);
    });
    std::vector<Node> next;
    for (std::size_t k : order) {
      if (seen.contains(cand[k].sphere)) continue;
      seen.insert(cand[k].sphere);
      out.spheres.push_back({cand[k].sphere, cand[k].word, len});
      next.push_back(std::move(cand[k]));
    }
    frontier = std::move(next);
  }

  if (cfg.ball_transform) {
    const MobiusR3 f = ball_transform();
    for (auto& e : out.spheres) e.sphere = image(f, e.sphere);
  }
  return out;
}

/// Re-evaluates the stored word on the base plane (and the optional transform).
inline GeneralizedSphere rederive_sphere(const Point3& p, const Word& w, bool with_transform) {
  const GeneratorSet K = family_Kp(p);
  GeneralizedSphere s = image(evaluate_word(w, K), GeneralizedSphere(PlaneSphere{Point3::UnitY(), 0.0}));
  if (with_transform) s = image(ball_transform(), s);
  return s;
}

// ---------------------------------------------------------------------------
// Projection
// ---------------------------------------------------------------------------

/// Gray image; 0 is background, lit pixels are 1..255.
struct Image {
  int width = 0, height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int col, int row) const {
    return pixels[static_cast<std::size_t>(row) * width + static_cast<std::size_t>(col)];
  }
};

namespace detail {

inline std::array<int, 2> screen_axes(int axis) {
  switch (axis) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

inline std::uint8_t brightness(double z, const RenderConfig& cfg) {
  const double span = cfg.depth_max - cfg.depth_min;
  const double t = span > 0.0 ? std::clamp((z - cfg.depth_min) / span, 0.0, 1.0) : 1.0;
  return static_cast<std::uint8_t>(1 + std::lround(254.0 * t));
}

inline void plot(Image& img, const RenderConfig& cfg, const Point3& x) {
  if (std::abs(x.x()) > cfg.clip_x) return;
  const auto ax = screen_axes(cfg.axis);
  const double half_w = cfg.extent;
  const double half_h = cfg.extent * double(img.height) / double(img.width);
  const double u = x[ax[0]], v = x[ax[1]];
  const double fc = (u + half_w) / (2.0 * half_w) * img.width;
  const double fr = (half_h - v) / (2.0 * half_h) * img.height;
  if (!(fc >= 0.0 && fc < img.width && fr >= 0.0 && fr < img.height)) return;
  const int col = static_cast<int>(fc), row = static_cast<int>(fr);
  auto& px = img.pixels[static_cast<std::size_t>(row) * img.width + static_cast<std::size_t>(col)];
  px = std::max(px, brightness(x.z(), cfg));
}

}  // namespace detail

/// Orthographic projection along cfg.axis with max-compositing of a monotone map of z.
inline Image project_render(const PointCloud& cloud, const RenderConfig& cfg) {
  if (cfg.width < 1 || cfg.height < 1) throw Error(ErrorCode::InvalidArgument, "image size must be positive");
  Image img{cfg.width, cfg.height,
            std::vector<std::uint8_t>(static_cast<std::size_t>(cfg.width) * cfg.height, 0)};
  for (const Point3& x : cloud.points) detail::plot(img, cfg, x);
  return img;
}

/// Spheres drawn as the outline of their projected disc; planes are not drawn.
inline Image project_render(const SphereCloud& cloud, const RenderConfig& cfg) {
  if (cfg.width < 1 || cfg.height < 1) throw Error(ErrorCode::InvalidArgument, "image size must be positive");
  Image img{cfg.width, cfg.height,
            std::vector<std::uint8_t>(static_cast<std::size_t>(cfg.width) * cfg.height, 0)};
  const auto ax = detail::screen_axes(cfg.axis);
  const double pixel = 2.0 * cfg.extent / cfg.width;
  for (const auto& e : cloud.spheres) {
    const auto* r = std::get_if<RoundSphere>(&e.sphere);
    if (!r) continue;
    const int steps = std::clamp(static_cast<int>(std::ceil(2.0 * std::numbers::pi * r->radius / pixel)) * 2, 8, 1 << 16);
    for (int k = 0; k < steps; ++k) {
      const double a = 2.0 * std::numbers::pi * k / steps;
      Point3 x = r->center;
      x[ax[0]] += r->radius * std::cos(a);
      x[ax[1]] += r->radius * std::sin(a);
      detail::plot(img, cfg, x);
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

enum class ExportFormat { PPM, CSV, PLY };

inline std::string encode_csv(const PointCloud& c) {
  std::string out = "x,y,z,depth\n";
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    const Point3& p = c.points[k];
    out += fmt17(p.x()) + "," + fmt17(p.y()) + "," + fmt17(p.z()) + "," + fmt17(c.depth[k]) + "\n";
  }
  return out;
}

inline std::string encode_ply(const PointCloud& c) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(c.points.size()) +
                    "\nproperty double x\nproperty double y\nproperty double z\n"
                    "property double depth\nend_header\n";
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    const Point3& p = c.points[k];
    out += fmt17(p.x()) + " " + fmt17(p.y()) + " " + fmt17(p.z()) + " " + fmt17(c.depth[k]) + "\n";
  }
  return out;
}

/// One row per sphere: kind, centre or normal, radius or offset, generation and word.
inline std::string encode_sphere_csv(const SphereCloud& c, const std::vector<std::string>& labels) {
  std::string out = "kind,a,b,c,d,generation,word\n";
  for (const auto& e : c.spheres) {
    if (const auto* r = std::get_if<RoundSphere>(&e.sphere))
      out += "sphere," + fmt17(r->center.x()) + "," + fmt17(r->center.y()) + "," +
             fmt17(r->center.z()) + "," + fmt17(r->radius);
    else {
      const auto& p = std::get<PlaneSphere>(e.sphere);
      out += "plane," + fmt17(p.normal.x()) + "," + fmt17(p.normal.y()) + "," +
             fmt17(p.normal.z()) + "," + fmt17(p.offset);
    }
    out += "," + std::to_string(e.depth) + "," + to_string(e.word, labels) + "\n";
  }
  return out;
}

inline std::string encode_ppm(const Image& img) { return encode_ppm(img.width, img.height, gray_to_rgb(img.pixels)); }

inline void export_image(const Image& img, const std::string& path) { write_file(path, encode_ppm(img)); }

inline void export_points(const PointCloud& c, ExportFormat f, const std::string& path) {
  switch (f) {
    case ExportFormat::CSV: write_file(path, encode_csv(c)); return;
    case ExportFormat::PLY: write_file(path, encode_ply(c)); return;
    case ExportFormat::PPM: throw Error(ErrorCode::InvalidArgument, "render the cloud before PPM export");
  }
}

}  // namespace kleinian
