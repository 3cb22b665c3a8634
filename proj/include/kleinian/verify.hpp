#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "classify.hpp"
#include "groups.hpp"
#include "parallel.hpp"
#include "regions.hpp"

namespace kleinian {

// ---------------------------------------------------------------------------
// Commutator trichotomy for maps preserving the plane x = 0
// ---------------------------------------------------------------------------

struct CommutatorReport {
  double radius = 0.0;        ///< radius of the isometric sphere I(f)
  Classification verdict;     ///< classification of [f, B]
  MapKind expected = MapKind::Identity;  ///< kind predicted by the radius
  bool consistent = false;
};

/// Whether f maps the plane x = 0 to itself and keeps the side x > 0.
inline bool preserves_plane_x0(const MobiusR3& f, double eps = 1e-8) {
  const Point3 e1 = Point3::UnitX();
  if (f.is_affine()) {
    const Affine& a = f.affine();
    return (a.P * e1 - e1).norm() <= eps && std::abs(a.u.x()) <= eps * std::max(1.0, a.u.norm());
  }
  const Inversive& i = f.inversive();
  return (i.P * e1 - e1).norm() <= eps && std::abs(i.u.x()) <= eps * std::max(1.0, i.u.norm()) &&
         std::abs(i.v.x()) <= eps * std::max(1.0, i.v.norm());
}

/// Radius of I(f) and the type of [f, B] for a loxodromic f preserving the plane x = 0.
inline CommutatorReport commutator_type(const MobiusR3& f, const MobiusR3& B = map_B(),
                                        const Tolerances& tol = default_tolerances) {
  if (f.fixes_infinity())
    throw Error(ErrorCode::HypothesisViolated, "map must move infinity");
  if (!preserves_plane_x0(f))
    throw Error(ErrorCode::HypothesisViolated, "map must preserve the plane x = 0 and its sides");
  if (classify(f, tol).kind != MapKind::Loxodromic)
    throw Error(ErrorCode::HypothesisViolated, "map must be loxodromic");
  CommutatorReport rep;
  rep.radius = std::sqrt(f.lambda());
  rep.verdict = classify(commutator(f, B, tol), tol);
  if (rep.radius < 1.0 - tol.classification) rep.expected = MapKind::Loxodromic;
  else if (rep.radius > 1.0 + tol.classification) rep.expected = MapKind::Elliptic;
  else rep.expected = MapKind::ParabolicPure;
  rep.consistent = rep.verdict.kind == rep.expected;
  return rep;
}

// ---------------------------------------------------------------------------
// Combination theorem conditions
// ---------------------------------------------------------------------------

enum class CheckStatus { Pass, Fail, Indeterminate };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "Pass";
    case CheckStatus::Fail: return "Fail";
    case CheckStatus::Indeterminate: return "Indeterminate";
  }
  return "?";
}

inline int exit_code(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return 0;
    case CheckStatus::Fail: return 2;
    case CheckStatus::Indeterminate: return 3;
  }
  return 2;
}

/// Worst of two statuses: Fail dominates Indeterminate dominates Pass.
inline CheckStatus worst_status(CheckStatus a, CheckStatus b) {
  if (a == CheckStatus::Fail || b == CheckStatus::Fail) return CheckStatus::Fail;
  if (a == CheckStatus::Indeterminate || b == CheckStatus::Indeterminate)
    return CheckStatus::Indeterminate;
  return CheckStatus::Pass;
}

struct ConditionResult {
  int index = 0;
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double margin = std::numeric_limits<double>::infinity();  ///< worst margin, negative on failure
  std::string witness_word;  ///< first failing word in shortlex order, if any
  std::string detail;
  std::size_t checks = 0;
  std::size_t tangencies = 0;  ///< contacts with |margin| within tolerance
};

struct CombinationReport {
  int L = 0;
  std::size_t samples = 0;
  std::size_t words = 0;
  std::optional<Point3> witness;
  std::array<ConditionResult, 5> conditions;
  CheckStatus overall = CheckStatus::Pass;
  int exit_code() const { return kleinian::exit_code(overall); }
};

/// Inputs of the second combination theorem: H, subgroups J1 and J2, the map A and balls B1, B2.
struct CombinationConfig {
  GeneratorSet H;
  GeneratorSet J1;
  GeneratorSet J2;
  MobiusR3 A;
  BallRegion B1 = HalfSpace{};
  BallRegion B2 = HalfSpace{};
  std::optional<Point3> witness;
  int L = 4;
  std::size_t samples = 64;
  int threads = 1;
  Tolerances tol = default_tolerances;
};

/// Configuration for p = (p, 0, r), r > 0: H = <B, C, D_p>, J1 = <B, C>, J2 = <B, D_p>, A = A_p,
/// B1 = {z <= 0}, B2 = {z >= r}, witness (0, r, r/2).
inline CombinationConfig combination_setup_hp(const Point3& p, int L = 4) {
  if (!(p.z() > 0.0)) throw Error(ErrorCode::InvalidArgument, "setup needs r > 0");
  CombinationConfig c;
  c.H = family_Hp(p);
  c.J1 = GeneratorSet("J1", {"b", "c"}, {map_B(), map_C()});
  c.J2 = GeneratorSet("J2", {"b", "d"}, {map_B(), map_D(p)});
  c.A = map_A(p);
  c.B1 = HalfSpace{Point3::UnitZ(), 0.0};
  c.B2 = HalfSpace{-Point3::UnitZ(), -p.z()};
  c.witness = Point3(0.0, p.z(), 0.5 * p.z());
  c.L = L;
  return c;
}

/// Configuration for the cyclic group H = <A_p> with trivial J1, J2, A = B,
/// B1 = {x <= -1}, B2 = {x >= 1}.
inline CombinationConfig combination_setup_cyclic(const Point3& p, int L = 4) {
  CombinationConfig c;
  c.H = GeneratorSet("<A_p>", {"a"}, {map_A(p)});
  c.J1 = GeneratorSet("J1", {}, {});
  c.J2 = GeneratorSet("J2", {}, {});
  c.A = map_B();
  c.B1 = HalfSpace{Point3::UnitX(), -1.0};
  c.B2 = HalfSpace{-Point3::UnitX(), -1.0};
  c.L = L;
  return c;
}

namespace detail {

struct ShortlexLess {
  bool operator()(const Word& a, const Word& b) const { return shortlex_less(a, b); }
};

/// Deterministic sample points on the boundary of a region.
inline std::vector<Point3> boundary_samples(const BallRegion& k, std::size_t n) {
  std::vector<Point3> out;
  out.reserve(n);
  if (const auto* h = std::get_if<HalfSpace>(&k)) {
    const auto [b1, b2] = orthonormal_complement(h->normal);
    const Point3 foot = h->offset * h->normal;
    const std::size_t side = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::sqrt(double(n)))));
    for (std::size_t i = 0; i < side; ++i)
      for (std::size_t j = 0; j < side && out.size() < n; ++j) {
        const double s = -4.0 + 8.0 * double(i) / double(side - 1);
        const double t = -4.0 + 8.0 * double(j) / double(side - 1);
        out.push_back(foot + s * b1 + t * b2);
      }
    return out;
  }
  const Point3 c = std::holds_alternative<RoundBall>(k) ? std::get<RoundBall>(k).center
                                                       : std::get<ExteriorBall>(k).center;
  const double r = std::holds_alternative<RoundBall>(k) ? std::get<RoundBall>(k).radius
                                                       : std::get<ExteriorBall>(k).radius;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double y = 1.0 - 2.0 * (double(i) + 0.5) / double(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - y * y));
    const double phi = golden * double(i);
    out.push_back(c + r * Point3(rho * std::cos(phi), y, rho * std::sin(phi)));
  }
  return out;
}

/// First H-word of length <= max_len evaluating to m.
inline std::optional<Word> express_as_word(const MobiusR3& m, const GeneratorSet& H, int max_len,
                                           const Tolerances& tol) {
  std::optional<Word> found;
  const auto words = enumerate_reduced_words(H.rank(), max_len, true);
  for (const Word& w : words) {
    if (max_deviation(evaluate_word(w, H, tol), m) <= tol.point) {
      found = w;
      break;
    }
  }
  return found;
}

/// Reduced H-words of length <= L representing elements of the subgroup generated by J.
inline std::set<Word, ShortlexLess> subgroup_words(const GeneratorSet& J, const GeneratorSet& H,
                                                   int L, const Tolerances& tol) {
  std::vector<Word> gens;
  for (int g = 0; g < J.rank(); ++g) {
    auto w = express_as_word(J.map(g), H, L, tol);
    if (!w)
      throw Error(ErrorCode::HypothesisViolated,
                  "generator " + J.labels()[g] + " is not an H-word of length <= L");
    gens.push_back(*w);
  }
  std::set<Word, ShortlexLess> out;
  out.insert(Word{});
  for_each_reduced_word(J.rank(), L, [&](const Word& jw) {
    Word hw;
    for (Letter l : jw) {
      const Word& piece = gens[static_cast<std::size_t>(l.generator())];
      hw = concat(hw, l.inverted() ? inverse(piece) : piece);
    }
    hw = reduce(hw);
    if (static_cast<int>(hw.size()) <= L) out.insert(hw);
  });
  return out;
}

/// Largest distance of mapped boundary samples of `from` to the boundary of `to`.
inline double boundary_transfer_error(const MobiusR3& f, const std::vector<Point3>& samples,
                                      const BallRegion& to) {
  const GeneralizedSphere s = boundary(to);
  double worst = 0.0;
  for (const Point3& x : samples) {
    const ExtPoint y = f(ExtPoint(x));
    if (y.is_infinite()) {
      if (!std::holds_alternative<PlaneSphere>(s)) worst = std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, distance_to_sphere(s, y.point()) / std::max(1.0, y.point().norm()));
  }
  return worst;
}

/// Candidate witnesses for condition (3): a lattice inside the slab between antiparallel
/// half-spaces, otherwise a coarse cube lattice.
inline std::vector<Point3> witness_candidates(const BallRegion& b1, const BallRegion& b2) {
  std::vector<Point3> out;
  const auto* h1 = std::get_if<HalfSpace>(&b1);
  const auto* h2 = std::get_if<HalfSpace>(&b2);
  if (h1 && h2 && (h1->normal + h2->normal).norm() <= 1e-12) {
    const double gap = -h1->offset - h2->offset;
    if (gap > 0.0) {
      const Point3 mid = (h1->offset + 0.5 * gap) * h1->normal;
      const auto [u, v] = orthonormal_complement(h1->normal);
      const double steps[] = {0.0, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0, 8.0, -8.0};
      for (double s : steps)
        for (double t : steps) out.push_back(mid + gap * (s * u + t * v));
    }
  }
  for (int i = -8; i <= 8; ++i)
    for (int j = -8; j <= 8; ++j)
      for (int k = -8; k <= 8; ++k) out.push_back(0.5 * Point3(i, j, k));
  return out;
}

inline void record(ConditionResult& c, double margin, double tol, const std::string& word,
                   bool hard_check = true) {
  ++c.checks;
  if (std::abs(margin) <= tol) ++c.tangencies;
  if (margin < c.margin) c.margin = margin;
  if (hard_check && margin < -tol) {
    if (c.status != CheckStatus::Fail) c.witness_word = word;
    c.status = CheckStatus::Fail;
  }
}

}  // namespace detail

/// Truncated numeric check of the five combination conditions over H-words of length <= L.
/// Tangent contacts (margins within tolerance) count as disjoint interiors.
inline CombinationReport check_combination(const CombinationConfig& cfg) {
  const Tolerances& tol = cfg.tol;
  CombinationReport rep;
  rep.L = cfg.L;
  rep.samples = cfg.samples;
  const char* names[5] = {"(H,J_i)-invariance of B_i", "h(int B1) and int B2 disjoint",
                          "complement of H-orbits has an interior point",
                          "A maps int B1 onto the exterior of B2", "J2 = A J1 A^-1"};
  for (int k = 0; k < 5; ++k) {
    rep.conditions[k].index = k + 1;
    rep.conditions[k].name = names[k];
  }

  const auto J1words = detail::subgroup_words(cfg.J1, cfg.H, cfg.L, tol);
  const auto J2words = detail::subgroup_words(cfg.J2, cfg.H, cfg.L, tol);
  const std::vector<Word> words = enumerate_reduced_words(cfg.H.rank(), cfg.L, true);
  rep.words = words.size();
  const std::vector<Point3> samples1 = detail::boundary_samples(cfg.B1, cfg.samples);
  const std::vector<Point3> samples2 = detail::boundary_samples(cfg.B2, cfg.samples);

  struct PerWord {
    MobiusR3 h;
    BallRegion img1, img2;
    double c1a = 0.0, c1b = 0.0;  // invariance error or disjointness gap for i = 1, 2
    bool in_j1 = false, in_j2 = false;
    double c2 = 0.0;
  };
  std::vector<PerWord> per(words.size());
  parallel_for(words.size(), cfg.threads, [&](std::size_t i) {
    PerWord& pw = per[i];
    pw.h = evaluate_word(words[i], cfg.H, tol);
    pw.img1 = image(pw.h, cfg.B1);
    pw.img2 = image(pw.h, cfg.B2);
    pw.in_j1 = J1words.count(words[i]) > 0;
    pw.in_j2 = J2words.count(words[i]) > 0;
    auto invariance = [&](const BallRegion& img, const BallRegion& b,
                          const std::vector<Point3>& s) {
      double err = detail::boundary_transfer_error(pw.h, s, b);
      if (!same_region(img, b, tol.point)) err = std::max(err, 1.0);
      return -err;
    };
    pw.c1a = pw.in_j1 ? invariance(pw.img1, cfg.B1, samples1) : interior_gap(pw.img1, cfg.B1);
    pw.c1b = pw.in_j2 ? invariance(pw.img2, cfg.B2, samples2) : interior_gap(pw.img2, cfg.B2);
    pw.c2 = interior_gap(pw.img1, cfg.B2);
  });

  // Conditions (1) and (2), merged in shortlex order.
  ConditionResult& c1 = rep.conditions[0];
  ConditionResult& c2 = rep.conditions[1];
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string label = cfg.H.format(words[i]);
    const PerWord& pw = per[i];
    if (!words[i].empty() || pw.in_j1)
      detail::record(c1, pw.c1a, tol.point * std::max(region_scale(pw.img1), region_scale(cfg.B1)),
                     label + " (B1)");
    if (!words[i].empty() || pw.in_j2)
      detail::record(c1, pw.c1b, tol.point * std::max(region_scale(pw.img2), region_scale(cfg.B2)),
                     label + " (B2)");
    detail::record(c2, pw.c2, tol.point * std::max(region_scale(pw.img1), region_scale(cfg.B2)),
                   label);
  }

  // Condition (3): a witness point outside every image of B1 and B2.
  ConditionResult& c3 = rep.conditions[2];
  auto clearance = [&](const Point3& w, std::string* word) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < words.size(); ++i) {
      const double d = std::min(signed_distance(per[i].img1, w), signed_distance(per[i].img2, w));
      if (d < best) {
        best = d;
        if (word) *word = cfg.H.format(words[i]);
      }
    }
    return best;
  };
  std::optional<Point3> witness = cfg.witness;
  if (!witness) {
    const auto candidates = detail::witness_candidates(cfg.B1, cfg.B2);
    std::vector<double> score(candidates.size());
    parallel_for(candidates.size(), cfg.threads,
                 [&](std::size_t i) { score[i] = clearance(candidates[i], nullptr); });
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
      if (score[i] > score[best]) best = i;
    if (candidates.empty() || !(score[best] > tol.point * std::max(1.0, candidates[best].norm())))
      throw Error(ErrorCode::WitnessMissing, "no interior point found outside the H-orbits of B1, B2");
    witness = candidates[best];
  }
  rep.witness = witness;
  {
    std::string word;
    const double m = clearance(*witness, &word);
    const double t = tol.point * std::max(1.0, witness->norm());
    c3.checks = words.size();
    c3.margin = m;
    if (m < -t) {
      c3.status = CheckStatus::Fail;
      c3.witness_word = word;
      c3.detail = "witness covered by an image of B1 or B2";
    } else if (m <= t) {
      c3.status = CheckStatus::Indeterminate;
      c3.witness_word = word;
      c3.detail = "witness on the boundary of an image";
      c3.tangencies = 1;
    }
  }

  // Condition (4): A(dB1) = dB2 and A(int B1) misses int B2.
  ConditionResult& c4 = rep.conditions[3];
  {
    const BallRegion img = image(cfg.A, cfg.B1);
    const BallRegion target = complement(cfg.B2);
    const double err = detail::boundary_transfer_error(cfg.A, samples1, cfg.B2);
    const double t = tol.point * std::max(region_scale(img), region_scale(target));
    c4.checks = samples1.size() + 1;
    c4.margin = -err;
    double probe_side = -std::numeric_limits<double>::infinity();
    for (const Point3& x : detail::interior_probes(cfg.B1)) {
      const ExtPoint y = cfg.A(ExtPoint(x));
      probe_side = std::max(probe_side, signed_distance(cfg.B2, y));
    }
    if (!same_region(img, target, tol.point) || err > t || !(probe_side > t)) {
      c4.status = CheckStatus::Fail;
      c4.witness_word = "A";
      c4.detail = "A(B1) differs from the closed exterior of B2";
      c4.margin = std::min(c4.margin, -std::max(err, t + 1.0));
    }
  }

  // Condition (5): conjugation by A carries the J1 generators onto the J2 generators.
  ConditionResult& c5 = rep.conditions[4];
  {
    const MobiusR3 Ainv = inverse(cfg.A);
    std::vector<bool> hit(static_cast<std::size_t>(cfg.J2.rank()), false);
    double worst = 0.0;
    for (int g = 0; g < cfg.J1.rank(); ++g) {
      const MobiusR3 conj = compose(compose(cfg.A, cfg.J1.map(g), tol), Ainv, tol);
      double best = std::numeric_limits<double>::infinity();
      int best_k = -1;
      for (int k = 0; k < cfg.J2.rank(); ++k) {
        for (const MobiusR3& cand : {cfg.J2.map(k), inverse(cfg.J2.map(k))}) {
          const double d = max_deviation(conj, cand);
          if (d < best) {
            best = d;
            best_k = k;
          }
        }
      }
      ++c5.checks;
      if (best_k >= 0 && best <= tol.point) hit[static_cast<std::size_t>(best_k)] = true;
      worst = std::max(worst, best_k >= 0 ? best : 1.0);
      if ((best_k < 0 || best > tol.point) && c5.status != CheckStatus::Fail) {
        c5.status = CheckStatus::Fail;
        c5.witness_word = "A " + cfg.J1.labels()[static_cast<std::size_t>(g)] + " A^-1";
      }
    }
    if (cfg.J1.rank() != cfg.J2.rank() && c5.status != CheckStatus::Fail) {
      c5.status = CheckStatus::Fail;
      c5.detail = "J1 and J2 have different numbers of generators";
    }
    for (std::size_t k = 0; k < hit.size(); ++k)
      if (!hit[k] && c5.status != CheckStatus::Fail) {
        c5.status = CheckStatus::Fail;
        c5.witness_word = cfg.J2.labels()[k];
      }
    c5.margin = worst > 0.0 ? -worst : 0.0;
  }

  rep.overall = CheckStatus::Pass;
  for (const auto& c : rep.conditions) rep.overall = worst_status(rep.overall, c.status);
  return rep;
}

/// Overload taking the theorem's inputs directly.
inline CombinationReport check_combination(const GeneratorSet& H, const GeneratorSet& J1,
                                           const GeneratorSet& J2, const MobiusR3& A,
                                           const BallRegion& B1, const BallRegion& B2, int L,
                                           std::size_t samples,
                                           std::optional<Point3> witness = std::nullopt,
                                           int threads = 1) {
  CombinationConfig cfg;
  cfg.H = H;
  cfg.J1 = J1;
  cfg.J2 = J2;
  cfg.A = A;
  cfg.B1 = B1;
  cfg.B2 = B2;
  cfg.L = L;
  cfg.samples = samples;
  cfg.witness = witness;
  cfg.threads = threads;
  return check_combination(cfg);
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

/// Key: value report, one block per condition.
inline std::string to_text(const CombinationReport& r) {
  std::ostringstream os;
  os << "truncation_L: " << r.L << "\n";
  os << "boundary_samples: " << r.samples << "\n";
  os << "words_checked: " << r.words << "\n";
  if (r.witness)
    os << "witness: " << format_double(r.witness->x()) << "," << format_double(r.witness->y())
       << "," << format_double(r.witness->z()) << "\n";
  for (const auto& c : r.conditions) {
    os << "\ncondition: " << c.index << "\n";
    os << "name: " << c.name << "\n";
    os << "status: " << to_string(c.status) << "\n";
    os << "worst_margin: " << format_double(c.margin) << "\n";
    os << "checks: " << c.checks << "\n";
    os << "tangent_contacts: " << c.tangencies << "\n";
    if (!c.witness_word.empty()) os << "witness_word: " << c.witness_word << "\n";
    if (!c.detail.empty()) os << "detail: " << c.detail << "\n";
  }
  os << "\noverall: " << to_string(r.overall) << "\n";
  os << "note: certificate truncated at word length " << r.L << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Ford domain membership
// ---------------------------------------------------------------------------

struct FordResult {
  bool inside = true;
  std::optional<Word> violating_word;
  std::string violating;  ///< text form of the violating word
};

/// Whether x lies outside every isometric sphere I(w) for reduced words 1 <= |w| <= L.
inline FordResult ford_membership(const ExtPoint& x, const GeneratorSet& gens, int L,
                                  const Tolerances& tol = default_tolerances) {
  std::vector<Word> words = enumerate_reduced_words(gens.rank(), L);
  std::vector<MobiusR3> maps(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    maps[i] = evaluate_word(words[i], gens, tol);
    if (maps[i].fixes_infinity())
      throw Error(ErrorCode::InfinityStabilized,
                  "word " + gens.format(words[i]) + " fixes infinity");
  }
  FordResult r;
  if (x.is_infinite()) return r;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Inversive& f = maps[i].inversive();
    const double radius = std::sqrt(f.lambda);
    if ((x.point() - f.u).norm() < radius * (1.0 - tol.point)) {
      r.inside = false;
      r.violating_word = words[i];
      r.violating = gens.format(words[i]);
      return r;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Ideal hexahedron with face pairings
// ---------------------------------------------------------------------------

struct HexEdge {
  int face1 = 0, face2 = 0;
  double angle = 0.0;
  Point3 sample = Point3::Zero();
};

struct FacePairing {
  std::string generator;
  int source = 0, target = 0;
  std::size_t samples = 0;
  double max_deviation = 0.0;  ///< distance of mapped points to the partner face
  double max_outside = 0.0;    ///< largest excursion of mapped points outside the polyhedron
  bool ok = false;
};

struct HexahedronReport {
  double q = 0.0;
  std::vector<std::string> faces;
  std::vector<HexEdge> edges;
  int quarter_edges = 0;  ///< edges at pi/4
  int right_edges = 0;    ///< edges at pi/2
  double worst_angle_error = 0.0;
  std::vector<FacePairing> pairings;
  RelationReport relations;
  bool pass = false;
};

namespace detail {

struct HexDomain {
  double q;
  std::vector<BallRegion> faces;

  /// Largest violation of the defining inequalities (<= 0 inside).
  double violation(const Point3& x) const {
    double v = std::max(-x.y(), x.y() - q);
    for (const auto& f : faces) v = std::max(v, signed_distance(f, x));
    return v;
  }
};

/// Points on the intersection curve of two face boundaries.
inline std::vector<Point3> curve_samples(const BallRegion& k1, const BallRegion& k2, double span,
                                         std::size_t n) {
  std::vector<Point3> out;
  const GeneralizedSphere s1 = boundary(k1), s2 = boundary(k2);
  const auto* r1 = std::get_if<RoundSphere>(&s1);
  const auto* r2 = std::get_if<RoundSphere>(&s2);
  if (!r1 && !r2) {
    const auto& p1 = std::get<PlaneSphere>(s1);
    const auto& p2 = std::get<PlaneSphere>(s2);
    const Point3 dir = p1.normal.cross(p2.normal).normalized();
    const Point3 x0 = boundary_intersection(k1, k2).point;
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(x0 + (-span + 2.0 * span * double(i) / double(n - 1)) * dir);
    return out;
  }
  Point3 center, axis;
  double radius;
  if (r1 && r2) {
    axis = (r2->center - r1->center).normalized();
    const double d = (r2->center - r1->center).norm();
    const double t = (d * d + r1->radius * r1->radius - r2->radius * r2->radius) / (2.0 * d);
    center = r1->center + t * axis;
    radius = std::sqrt(std::max(0.0, r1->radius * r1->radius - t * t));
  } else {
    const RoundSphere& r = r1 ? *r1 : *r2;
    const PlaneSphere& p = std::get<PlaneSphere>(r1 ? s2 : s1);
    const double s = p.normal.dot(r.center) - p.offset;
    axis = p.normal;
    center = r.center - s * p.normal;
    radius = std::sqrt(std::max(0.0, r.radius * r.radius - s * s));
  }
  const auto [b1, b2] = orthonormal_complement(axis);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * double(i) / double(n);
    out.push_back(center + radius * (std::cos(a) * b1 + std::sin(a) * b2));
  }
  return out;
}

/// Sample points of a face of the domain.
inline std::vector<Point3> face_samples(const HexDomain& D, int face, std::size_t per_axis) {
  std::vector<Point3> out;
  const GeneralizedSphere s = boundary(D.faces[static_cast<std::size_t>(face)]);
  const double tol = 1e-12;
  if (const auto* p = std::get_if<PlaneSphere>(&s)) {
    const auto [b1, b2] = orthonormal_complement(p->normal);
    const Point3 foot = p->offset * p->normal;
    const double span = D.q + 2.0;
    for (std::size_t i = 0; i < per_axis; ++i)
      for (std::size_t j = 0; j < per_axis; ++j) {
        const Point3 x = foot + (-span + 2.0 * span * double(i) / double(per_axis - 1)) * b1 +
                         (-span + 2.0 * span * double(j) / double(per_axis - 1)) * b2;
        if (D.violation(x) <= tol) out.push_back(x);
      }
    return out;
  }
  const auto& r = std::get<RoundSphere>(s);
  for (std::size_t i = 0; i < per_axis; ++i)
    for (std::size_t j = 0; j < per_axis; ++j) {
      const double th = std::numbers::pi * (double(i) + 0.5) / double(per_axis);
      const double ph = 2.0 * std::numbers::pi * double(j) / double(per_axis);
      const Point3 x = r.center + r.radius * Point3(std::sin(th) * std::cos(ph), std::cos(th),
                                                    std::sin(th) * std::sin(ph));
      if (D.violation(x) <= tol) out.push_back(x);
    }
  return out;
}

}  // namespace detail

/// Builds the hexahedron for p = (0, q, 0), measures its edge angles and checks the face pairings.
inline HexahedronReport hexahedron_check(double q, const Tolerances& tol = default_tolerances) {
  if (!(q > 2.0)) throw Error(ErrorCode::DegenerateHexahedron, "hexahedron needs q > 2");
  const double h = 1.0 / std::numbers::sqrt2;
  const Point3 p(0.0, q, 0.0);
  detail::HexDomain D{q,
                      {HalfSpace{Point3::UnitX(), h}, HalfSpace{-Point3::UnitX(), h},
                       HalfSpace{Point3::UnitZ(), h}, HalfSpace{-Point3::UnitZ(), h},
                       ExteriorBall{Point3::Zero(), 1.0}, ExteriorBall{p, 1.0}}};
  HexahedronReport rep;
  rep.q = q;
  rep.faces = {"x = 1/sqrt2", "x = -1/sqrt2", "z = 1/sqrt2", "z = -1/sqrt2", "|x| = 1", "|x - p| = 1"};

  const double edge_tol = 1e-9;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      std::vector<Point3> pts;
      try {
        boundary_intersection(D.faces[i], D.faces[j]);
        pts = detail::curve_samples(D.faces[i], D.faces[j], q + 4.0, 4001);
      } catch (const Error&) {
        continue;
      }
      std::size_t inside = 0;
      Point3 witness = Point3::Zero();
      for (const Point3& x : pts)
        if (D.violation(x) <= edge_tol) {
          if (inside == 0) witness = x;
          ++inside;
        }
      if (inside < 2) continue;
      HexEdge e{i, j, lens_inner_angle(D.faces[i], D.faces[j]), witness};
      const double quarter = std::abs(e.angle - std::numbers::pi / 4);
      const double right = std::abs(e.angle - std::numbers::pi / 2);
      if (quarter <= 1e-9) ++rep.quarter_edges;
      if (right <= 1e-9) ++rep.right_edges;
      rep.worst_angle_error = std::max(rep.worst_angle_error, std::min(quarter, right));
      rep.edges.push_back(e);
    }

  GeneratorSet K = family_Kp(p);
  struct Pairing {
    const char* name;
    int source, target;
  };
  const Pairing pairs[] = {{"b", 1, 0}, {"c", 3, 2}, {"a", 4, 5}};
  bool pairings_ok = true;
  for (const auto& pr : pairs) {
    const MobiusR3& g = K[pr.name];
    const auto pts = detail::face_samples(D, pr.source, 41);
    FacePairing fp{pr.name, pr.source, pr.target, pts.size(), 0.0, 0.0, false};
    const GeneralizedSphere target = boundary(D.faces[static_cast<std::size_t>(pr.target)]);
    for (const Point3& x : pts) {
      const Point3 y = g.apply_finite(x);
      fp.max_deviation = std::max(fp.max_deviation, distance_to_sphere(target, y));
      fp.max_outside = std::max(fp.max_outside, D.violation(y));
    }
    fp.ok = !pts.empty() && fp.max_deviation <= tol.point && fp.max_outside <= tol.point;
    pairings_ok = pairings_ok && fp.ok;
    rep.pairings.push_back(fp);
  }
  rep.relations = check_relations(K, 100, Tolerances{1e-10, tol.orthogonality, tol.classification,
                                                     tol.fixed_point});
  rep.pass = rep.edges.size() == 12 && rep.quarter_edges == 8 && rep.right_edges == 4 &&
             pairings_ok && rep.relations.all_verified;
  return rep;
}

inline std::string to_text(const HexahedronReport& r) {
  std::ostringstream os;
  os.precision(15);
  os << "q: " << r.q << "\n";
  os << "edges: " << r.edges.size() << "\n";
  os << "edges_at_pi_over_4: " << r.quarter_edges << "\n";
  os << "edges_at_pi_over_2: " << r.right_edges << "\n";
  os << "worst_angle_error: " << r.worst_angle_error << "\n";
  for (const auto& e : r.edges)
    os << "edge: " << r.faces[static_cast<std::size_t>(e.face1)] << " / "
       << r.faces[static_cast<std::size_t>(e.face2)] << " angle " << e.angle << "\n";
  for (const auto& p : r.pairings)
    os << "pairing: " << p.generator << " maps " << r.faces[static_cast<std::size_t>(p.source)]
       << " onto " << r.faces[static_cast<std::size_t>(p.target)] << " samples " << p.samples
       << " max_deviation " << p.max_deviation << " max_outside " << p.max_outside
       << (p.ok ? " ok" : " FAILED") << "\n";
  for (const auto& rel : r.relations.relations)
    os << "relation: " << rel.name << " max_deviation " << rel.max_deviation
       << (rel.verified ? " ok" : " FAILED") << "\n";
  os << "overall: " << (r.pass ? "Pass" : "Fail") << "\n";
  return os.str();
}

}  // namespace kleinian
