#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "complex_mobius.hpp"
#include "groups.hpp"
#include "parallel.hpp"
#include "verify.hpp"

namespace kleinian {

enum class SlicePlane { P_r0, P_q0, P_p0, Rtheta };

inline const char* to_string(SlicePlane p) {
  switch (p) {
    case SlicePlane::P_r0: return "r0";
    case SlicePlane::P_q0: return "q0";
    case SlicePlane::P_p0: return "p0";
    case SlicePlane::Rtheta: return "rtheta";
  }
  return "?";
}

inline SlicePlane parse_slice_plane(const std::string& s) {
  if (s == "r0") return SlicePlane::P_r0;
  if (s == "q0") return SlicePlane::P_q0;
  if (s == "p0") return SlicePlane::P_p0;
  if (s == "rtheta") return SlicePlane::Rtheta;
  throw Error(ErrorCode::InvalidArgument, "unknown slice plane '" + s + "'");
}

/// A point of a coordinate plane in parameter space, given by a complex coordinate.
struct SliceParam {
  SlicePlane plane = SlicePlane::P_p0;
  double theta = 0.0;  ///< used by Rtheta, in [0, pi)
  Complex mu{0.0, 0.0};
};

/// R_theta(p + iq) = (p, q cos theta, q sin theta).
inline Point3 rotate_plane(Complex mu, double theta) {
  return Point3(mu.real(), mu.imag() * std::cos(theta), mu.imag() * std::sin(theta));
}

/// Parameter p in R^3 for a slice coordinate: r=0 plane mu = p + iq, q=0 plane mu = p + ir,
/// p=0 plane mu = q + ir, rotated plane R_theta(mu).
inline Point3 slice_point(SlicePlane plane, Complex mu, double theta = 0.0) {
  switch (plane) {
    case SlicePlane::P_r0: return Point3(mu.real(), mu.imag(), 0.0);
    case SlicePlane::P_q0: return Point3(mu.real(), 0.0, mu.imag());
    case SlicePlane::P_p0: return Point3(0.0, mu.real(), mu.imag());
    case SlicePlane::Rtheta: return rotate_plane(mu, theta);
  }
  return Point3::Zero();
}

inline Point3 slice_point(const SliceParam& s) { return slice_point(s.plane, s.mu, s.theta); }

/// c_1 = 1, c_2 = mu, c_{n+2} = mu c_{n+1} - c_n.
inline Complex c_n(Complex mu, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "c_n needs n >= 1");
  Complex prev(1.0, 0.0), cur = mu;
  if (n == 1) return prev;
  for (int k = 2; k < n; ++k) {
    const Complex next = mu * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// c_1 .. c_n (index 0 holds c_1).
inline std::vector<Complex> c_sequence(Complex mu, int n) {
  std::vector<Complex> out;
  if (n < 1) return out;
  out.reserve(static_cast<std::size_t>(n));
  out.emplace_back(1.0, 0.0);
  if (n >= 2) out.push_back(mu);
  for (int k = 2; k < n; ++k) out.push_back(mu * out[k - 1] - out[k - 2]);
  return out;
}

struct SliceVerdict {
  enum class Kind { ExcludedAt, InsideUpTo, InsideByBound, OutsideByBound, Unknown, ExcludedByWord };
  Kind kind = Kind::Unknown;
  int n = 0;  ///< index for ExcludedAt, truncation for InsideUpTo, word length for ExcludedByWord

  static SliceVerdict excluded_at(int n) { return {Kind::ExcludedAt, n}; }
  static SliceVerdict inside_up_to(int n) { return {Kind::InsideUpTo, n}; }
  static SliceVerdict inside_by_bound() { return {Kind::InsideByBound, 0}; }
  static SliceVerdict outside_by_bound() { return {Kind::OutsideByBound, 0}; }
  static SliceVerdict unknown() { return {Kind::Unknown, 0}; }
  static SliceVerdict excluded_by_word(int len) { return {Kind::ExcludedByWord, len}; }

  bool excluded() const {
    return kind == Kind::ExcludedAt || kind == Kind::OutsideByBound || kind == Kind::ExcludedByWord;
  }
  friend bool operator==(const SliceVerdict&, const SliceVerdict&) = default;
};

inline std::string to_string(const SliceVerdict& v) {
  using K = SliceVerdict::Kind;
  switch (v.kind) {
    case K::ExcludedAt: return "ExcludedAt(" + std::to_string(v.n) + ")";
    case K::InsideUpTo: return "InsideUpTo(" + std::to_string(v.n) + ")";
    case K::InsideByBound: return "InsideByBound";
    case K::OutsideByBound: return "OutsideByBound";
    case K::Unknown: return "Unknown";
    case K::ExcludedByWord: return "ExcludedByWord(" + std::to_string(v.n) + ")";
  }
  return "?";
}

/// Short tag used in CSV output.
inline const char* verdict_tag(const SliceVerdict& v) {
  using K = SliceVerdict::Kind;
  switch (v.kind) {
    case K::ExcludedAt: return "ExcludedAt";
    case K::InsideUpTo: return "InsideUpTo";
    case K::InsideByBound: return "InsideByBound";
    case K::OutsideByBound: return "OutsideByBound";
    case K::Unknown: return "Unknown";
    case K::ExcludedByWord: return "ExcludedByWord";
  }
  return "?";
}

inline constexpr double kGrowthCap = 1e12;
inline constexpr int kGrowthRun = 5;

/// Membership of p = (0, q, r), mu = q + ir: the least n <= N with |c_n| < 1 excludes it.
/// Strictly |mu| > 2 is accepted by the bound first when `use_bound` is set; the sequence stops
/// early once |c_n| exceeds the growth cap for several consecutive increasing steps.
inline SliceVerdict membership_p0(Complex mu, int N = 200, bool use_bound = true) {
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "truncation must be at least 2");
  if (use_bound && std::abs(mu) > 2.0) return SliceVerdict::inside_by_bound();
  Complex prev(1.0, 0.0), cur = mu;
  double last = 1.0;
  int run = 0;
  for (int n = 2; n <= N; ++n) {
    if (n > 2) {
      const Complex next = mu * cur - prev;
      prev = cur;
      cur = next;
    }
    const double m = std::abs(cur);
    if (m < 1.0) return SliceVerdict::excluded_at(n);
    run = (m > kGrowthCap && m > last) ? run + 1 : 0;
    if (run >= kGrowthRun) break;
    last = m;
  }
  return SliceVerdict::inside_up_to(N);
}

/// Radius of I(A_p^n), read off the composed normal form.
inline double isometric_radius_power(const Point3& p, int n,
                                     const Tolerances& tol = default_tolerances) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "power must be positive");
  const MobiusR3 f = power(map_A(p), n, tol);
  if (f.fixes_infinity()) throw Error(ErrorCode::PowerFixesInfinity, "A_p^n fixes infinity");
  return std::sqrt(f.lambda());
}

/// Bounds in terms of rho = sqrt(q^2 + r^2). The inner inclusion gives InsideByBound for
/// rho >= 2. For the outer one, the slice lies in the union of rotations of the four-times
/// punctured sphere slice, which is half the punctured torus slice and so sits in
/// {|Im mu| > 1/2}; hence rho <= 1/2 is outside.
inline SliceVerdict bounds_classify(const Point3& p) {
  const double rho = std::hypot(p.y(), p.z());
  if (rho >= 2.0) return SliceVerdict::inside_by_bound();
  if (rho <= 0.5) return SliceVerdict::outside_by_bound();
  return SliceVerdict::unknown();
}

// ---------------------------------------------------------------------------
// Non-discreteness search
// ---------------------------------------------------------------------------

struct NondiscretenessCertificate {
  Word word;
  std::string text;
  double radius = 0.0;  ///< radius of I(w)
  double angle = 0.0;   ///< rotation angle of [w, B]
  bool finite_order = false;
  int order = 0;        ///< denominator of angle / pi when finite_order
  MapKind commutator_kind = MapKind::Elliptic;
};

struct NondiscretenessResult {
  std::optional<NondiscretenessCertificate> certificate;
  std::vector<std::string> screw_parabolic_words;  ///< words whose commutator is a screw parabolic
  std::size_t words_examined = 0;
};

inline constexpr double kAngleEpsilon = 1e-6;
inline constexpr int kAngleDenominator = 64;

/// Smallest q <= max_den with |x - k/q| <= eps for some integer k; 0 when none.
inline int rational_denominator(double x, int max_den = kAngleDenominator, double eps = kAngleEpsilon) {
  for (int q = 1; q <= max_den; ++q)
    if (std::abs(x * q - std::round(x * q)) <= eps * q) return q;
  return 0;
}

/// Searches reduced words w (shortlex, length <= max_len) that move infinity, preserve the plane
/// x = 0 with its sides and are loxodromic, for an elliptic [w, B] with B the translation generator.
inline NondiscretenessResult nondiscreteness_search(const GeneratorSet& gens, int max_len,
                                                    const Tolerances& tol = default_tolerances) {
  int bidx = -1;
  for (int g = 0; g < gens.rank() && bidx < 0; ++g) {
    const MobiusR3& m = gens.map(g);
    if (m.is_affine() && std::abs(m.affine().lambda - 1.0) <= tol.point &&
        (m.affine().P.matrix() - Matrix3::Identity()).norm() <= tol.orthogonality &&
        m.affine().u.norm() > tol.point)
      bidx = g;
  }
  if (bidx < 0) throw Error(ErrorCode::HypothesisViolated, "no translation generator");
  const MobiusR3& B = gens.map(bidx);

  NondiscretenessResult res;
  bool done = false;
  for_each_reduced_word(gens.rank(), max_len, [&](const Word& w) {
    if (done) return;
    ++res.words_examined;
    const MobiusR3 f = evaluate_word(w, gens, tol);
    if (f.fixes_infinity() || !preserves_plane_x0(f)) return;
    if (classify(f, tol).kind != MapKind::Loxodromic) return;
    const Classification c = classify(commutator(f, B, tol), tol);
    if (c.kind == MapKind::ParabolicScrew) res.screw_parabolic_words.push_back(gens.format(w));
    if (c.kind != MapKind::Elliptic) return;
    NondiscretenessCertificate cert;
    cert.word = w;
    cert.text = gens.format(w);
    cert.radius = std::sqrt(f.lambda());
    cert.angle = c.theta;
    cert.commutator_kind = c.kind;
    if (std::isfinite(c.theta)) {
      cert.order = rational_denominator(c.theta / std::numbers::pi);
      cert.finite_order = cert.order > 0;
    }
    res.certificate = cert;
    done = true;
  });
  return res;
}

// ---------------------------------------------------------------------------
// Grid scans
// ---------------------------------------------------------------------------

struct ScanGrid {
  double re_min = 0.0, re_max = 2.0, im_min = 0.0, im_max = 1.0;
  int width = 400, height = 200;

  /// Complex coordinate of the centre of cell (i, j); row j counts upward from im_min.
  Complex center(int i, int j) const {
    return {re_min + (re_max - re_min) * (i + 0.5) / width,
            im_min + (im_max - im_min) * (j + 0.5) / height};
  }
  Complex corner(int i, int j) const {
    return {re_min + (re_max - re_min) * double(i) / width,
            im_min + (im_max - im_min) * double(j) / height};
  }
};

struct ScanOptions {
  SlicePlane plane = SlicePlane::P_p0;
  double theta = 0.0;
  int N = 20;
  int threads = 1;
  int search_len = 0;  ///< word length for the non-discreteness search off the p=0 plane
};

struct ScanCell {
  Complex mu;
  SliceVerdict verdict;
  int first_excluding_n = 0;  ///< least n with |c_n(centre)| < 1, 0 when none
  int overlap = 0;            ///< number of n <= N with |c_n| < 1 at the centre
  int locus_min_n = 0;        ///< least n whose locus |c_n| = 1 crosses the cell, 0 when none
  std::uint64_t locus_bits = 0;  ///< bit n set when the n-th locus crosses the cell (n < 64)
};

struct ScanResult {
  ScanGrid grid;
  ScanOptions options;
  std::vector<ScanCell> cells;  ///< row-major, row 0 at im_min

  const ScanCell& at(int i, int j) const {
    return cells[static_cast<std::size_t>(j) * grid.width + static_cast<std::size_t>(i)];
  }
  bool locus(int i, int j, int n) const {
    return n < 64 && ((at(i, j).locus_bits >> n) & 1ULL) != 0;
  }
};

/// Scans the grid. On the p=0 plane every cell gets the recurrence verdict plus the |c_n| = 1
/// locus from sign changes of |c_n| - 1 at the cell corners and the count of n with |c_n| < 1.
/// Other planes use the bounds and optionally the word search.
inline ScanResult scan_slice(const ScanGrid& grid, const ScanOptions& opt) {
  if (grid.width < 1 || grid.height < 1)
    throw Error(ErrorCode::InvalidArgument, "grid resolution must be positive");
  if (opt.N < 2) throw Error(ErrorCode::InvalidArgument, "truncation must be at least 2");
  ScanResult res;
  res.grid = grid;
  res.options = opt;
  res.cells.resize(static_cast<std::size_t>(grid.width) * grid.height);
  const bool exact = opt.plane == SlicePlane::P_p0;

  parallel_for(static_cast<std::size_t>(grid.height), opt.threads, [&](std::size_t row) {
    const int j = static_cast<int>(row);
    std::vector<double> lower(static_cast<std::size_t>(grid.width + 1) * (opt.N + 1));
    std::vector<double> upper(lower.size());
    auto fill = [&](std::vector<double>& buf, int jj) {
      for (int i = 0; i <= grid.width; ++i) {
        const auto seq = c_sequence(grid.corner(i, jj), opt.N);
        for (int n = 1; n <= opt.N; ++n)
          buf[static_cast<std::size_t>(i) * (opt.N + 1) + n] = std::abs(seq[n - 1]) - 1.0;
      }
    };
    if (exact) {
      fill(lower, j);
      fill(upper, j + 1);
    }
    for (int i = 0; i < grid.width; ++i) {
      ScanCell& cell = res.cells[static_cast<std::size_t>(j) * grid.width + i];
      cell.mu = grid.center(i, j);
      const Point3 p = slice_point(opt.plane, cell.mu, opt.theta);
      const auto seq = c_sequence(cell.mu, opt.N);
      for (int n = 2; n <= opt.N; ++n)
        if (std::abs(seq[n - 1]) < 1.0) {
          ++cell.overlap;
          if (cell.first_excluding_n == 0) cell.first_excluding_n = n;
        }
      if (exact) {
        for (int n = 2; n <= opt.N; ++n) {
          const double v[4] = {lower[static_cast<std::size_t>(i) * (opt.N + 1) + n],
                               lower[static_cast<std::size_t>(i + 1) * (opt.N + 1) + n],
                               upper[static_cast<std::size_t>(i) * (opt.N + 1) + n],
                               upper[static_cast<std::size_t>(i + 1) * (opt.N + 1) + n]};
          bool neg = false, pos = false;
          for (double x : v) (x < 0.0 ? neg : pos) = true;
          if (neg && pos) {
            if (cell.locus_min_n == 0) cell.locus_min_n = n;
            if (n < 64) cell.locus_bits |= 1ULL << n;
          }
        }
        cell.verdict = membership_p0(cell.mu, opt.N, false);
      } else {
        cell.verdict = bounds_classify(p);
        if (cell.verdict.kind == SliceVerdict::Kind::Unknown && opt.search_len > 0) {
          const auto found = nondiscreteness_search(family_Gp(p), opt.search_len);
          if (found.certificate)
            cell.verdict = SliceVerdict::excluded_by_word(static_cast<int>(found.certificate->word.size()));
        }
      }
    }
  });
  return res;
}

/// Cells where some locus crosses are black on white; rows run top (im_max) to bottom.
inline std::vector<std::uint8_t> locus_raster(const ScanResult& r) {
  const int w = r.grid.width, h = r.grid.height;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3, 255);
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i)
      if (r.at(i, j).locus_min_n != 0) {
        const std::size_t k = (static_cast<std::size_t>(h - 1 - j) * w + i) * 3;
        rgb[k] = rgb[k + 1] = rgb[k + 2] = 0;
      }
  return rgb;
}

/// Darkness grows with the number of n for which |c_n| < 1; rows run top to bottom.
inline std::vector<std::uint8_t> overlap_raster(const ScanResult& r) {
  const int w = r.grid.width, h = r.grid.height;
  const int levels = std::max(1, r.options.N - 1);
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(w) * h, 255);
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      const double t = std::min(1.0, double(r.at(i, j).overlap) / levels);
      gray[static_cast<std::size_t>(h - 1 - j) * w + i] =
          static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
    }
  return gray;
}

}  // namespace kleinian
