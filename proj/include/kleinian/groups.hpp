#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "complex_mobius.hpp"
#include "geometry.hpp"
#include "sampling.hpp"
#include "words.hpp"

namespace kleinian {

/// A declared relation: evaluate(word) should equal `target` (identity by default).
struct Relation {
  std::string name;
  Word word;
  MobiusR3 target;
  double max_deviation = std::numeric_limits<double>::quiet_NaN();
  bool verified = false;
};

/// Labelled generators with cached inverses and declared relations.
class GeneratorSet {
 public:
  GeneratorSet() = default;

  GeneratorSet(std::string name, std::vector<std::string> labels, std::vector<MobiusR3> maps)
      : name_(std::move(name)), labels_(std::move(labels)), maps_(std::move(maps)) {
    if (labels_.size() != maps_.size())
      throw Error(ErrorCode::InvalidArgument, "one map per label required");
    for (const auto& m : maps_) inverses_.push_back(inverse(m));
    planar_.resize(maps_.size());
  }

  /// Generators carried as planar maps and lifted through the Poincare extension.
  static GeneratorSet from_planar(std::string name, std::vector<std::string> labels,
                                  std::vector<ComplexMobius> planar) {
    std::vector<MobiusR3> maps;
    for (const auto& m : planar) maps.push_back(poincare_extension(m));
    GeneratorSet g(std::move(name), std::move(labels), std::move(maps));
    for (std::size_t k = 0; k < planar.size(); ++k) g.planar_[k] = planar[k];
    return g;
  }

  const std::string& name() const { return name_; }
  int rank() const { return static_cast<int>(maps_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const MobiusR3& map(int g) const { return maps_.at(static_cast<std::size_t>(g)); }
  const MobiusR3& letter(Letter l) const {
    const auto g = static_cast<std::size_t>(l.generator());
    if (g >= maps_.size()) throw Error(ErrorCode::UnknownLabel, "letter outside generator set");
    return l.inverted() ? inverses_[g] : maps_[g];
  }
  const std::optional<ComplexMobius>& planar(int g) const {
    return planar_.at(static_cast<std::size_t>(g));
  }

  int index_of(const std::string& label) const {
    for (std::size_t k = 0; k < labels_.size(); ++k)
      if (labels_[k] == label) return static_cast<int>(k);
    throw Error(ErrorCode::UnknownLabel, "no generator labelled '" + label + "'");
  }
  const MobiusR3& operator[](const std::string& label) const { return map(index_of(label)); }

  Word parse(const std::string& text) const { return parse_word(text, labels_); }
  std::string format(const Word& w) const { return to_string(w, labels_); }

  std::vector<Relation>& relations() { return relations_; }
  const std::vector<Relation>& relations() const { return relations_; }
  void add_relation(std::string name, const std::string& word, MobiusR3 target = MobiusR3{}) {
    relations_.push_back(Relation{std::move(name), parse(word), std::move(target)});
  }

 private:
  std::string name_;
  std::vector<std::string> labels_;
  std::vector<MobiusR3> maps_;
  std::vector<MobiusR3> inverses_;
  std::vector<std::optional<ComplexMobius>> planar_;
  std::vector<Relation> relations_;
};

/// Left-to-right fold of compose; the empty word is the identity.
inline MobiusR3 evaluate_word(const Word& w, const GeneratorSet& gens,
                              const Tolerances& tol = default_tolerances) {
  MobiusR3 r;
  for (Letter l : w) r = compose(r, gens.letter(l), tol);
  return r;
}

/// Applies the word to a point letter by letter (rightmost letter first).
inline ExtPoint apply_word(const Word& w, const GeneratorSet& gens, ExtPoint x) {
  for (auto it = w.rbegin(); it != w.rend(); ++it) x = gens.letter(*it)(x);
  return x;
}

// ---- canonical maps ----

/// A_p = Jhat J + p.
inline MobiusR3 map_A(const Point3& p) {
  return Inversive{1.0, OrthMatrix3::reflect_y(), Point3::Zero(), p};
}

/// Translation by (2, 0, 0).
inline MobiusR3 map_B() { return MobiusR3::translation(Point3(2, 0, 0)); }

/// C = J B J, i.e. the inversive map with pole (-1/2,0,0) and image of infinity (1/2,0,0).
inline MobiusR3 map_C() {
  return Inversive{0.25, OrthMatrix3::reflection(Point3::UnitX()), Point3(-0.5, 0, 0),
                   Point3(0.5, 0, 0)};
}

/// D_p(x) = C(x - p) + p.
inline MobiusR3 map_D(const Point3& p) {
  return compose(compose(MobiusR3::translation(p), map_C()), MobiusR3::translation(-p));
}

/// Unit inversion J(x) = x/|x|^2 as an orientation-reversing helper, applied pointwise.
inline ExtPoint map_J(const ExtPoint& x) { return unit_inversion(x); }

enum class FamilyKind { G2D, Gp, H2D, Hp, Kp, L };

inline const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::G2D: return "G2D";
    case FamilyKind::Gp: return "Gp";
    case FamilyKind::H2D: return "H2D";
    case FamilyKind::Hp: return "Hp";
    case FamilyKind::Kp: return "Kp";
    case FamilyKind::L: return "L";
  }
  return "?";
}

inline FamilyKind parse_family_kind(const std::string& s) {
  for (FamilyKind k : {FamilyKind::G2D, FamilyKind::Gp, FamilyKind::H2D, FamilyKind::Hp,
                       FamilyKind::Kp, FamilyKind::L})
    if (s == to_string(k)) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown family '" + s + "'");
}

struct FamilyParams {
  FamilyKind kind = FamilyKind::Gp;
  Complex mu{0.0, 2.0};        ///< planar families
  Point3 p = Point3(0, 2, 0);  ///< spatial families
};

inline GeneratorSet family_G2D(Complex mu) {
  GeneratorSet g = GeneratorSet::from_planar(
      "G2D", {"a", "b"}, {ComplexMobius(mu, 1.0, 1.0, 0.0), ComplexMobius(1.0, 2.0, 0.0, 1.0)});
  g.add_relation("C = a^-1 b a", "Aba", poincare_extension(ComplexMobius(1.0, 0.0, 2.0, 1.0)));
  return g;
}

inline GeneratorSet family_H2D(Complex mu) {
  const ComplexMobius C(1.0, 0.0, 2.0, 1.0);
  const ComplexMobius T(1.0, mu, 0.0, 1.0);
  const ComplexMobius D = compose(compose(T, C), inverse(T));
  return GeneratorSet::from_planar("H2D", {"b", "c", "d"},
                                   {ComplexMobius(1.0, 2.0, 0.0, 1.0), C, D});
}

inline GeneratorSet family_Gp(const Point3& p) {
  GeneratorSet g("Gp", {"a", "b"}, {map_A(p), map_B()});
  g.add_relation("C = a^-1 b a", "Aba", map_C());
  g.add_relation("D_p = a b a^-1", "abA", map_D(p));
  return g;
}

inline GeneratorSet family_Hp(const Point3& p) {
  GeneratorSet g("Hp", {"b", "c", "d"}, {map_B(), map_C(), map_D(p)});
  return g;
}

inline GeneratorSet family_Kp(const Point3& p) {
  const double s = std::numbers::sqrt2;
  GeneratorSet g("Kp", {"a", "b", "c"},
                 {map_A(p), MobiusR3::translation(Point3(s, 0, 0)),
                  MobiusR3::translation(Point3(0, 0, s))});
  g.add_relation("[a,b]^2 = id", "abABabAB");
  g.add_relation("[a,c]^2 = id", "acACacAC");
  g.add_relation("[b,c] = id", "bcBC");
  return g;
}

inline GeneratorSet family_L() {
  const double s = std::numbers::sqrt2;
  const MobiusR3 b = MobiusR3::translation(Point3(s, 0, 0));
  const MobiusR3 c = MobiusR3::translation(Point3(0, 0, s));
  const MobiusR3 J0 = Inversive{1.0, OrthMatrix3::reflection(Point3::UnitY()), Point3::Zero(),
                                Point3::Zero()};
  // J = J0 composed with the reflection in y = 0; conjugating translations along x and z by
  // that reflection changes nothing, so J b J = J0 b J0.
  GeneratorSet g("L", {"b", "c", "e", "f"}, {b, c, conjugate(J0, b), conjugate(J0, c)});
  g.add_relation("[b,c] = id", "bcBC");
  g.add_relation("[e,f] = id", "efEF");
  return g;
}

inline GeneratorSet make_family(const FamilyParams& fp) {
  switch (fp.kind) {
    case FamilyKind::G2D: return family_G2D(fp.mu);
    case FamilyKind::Gp: return family_Gp(fp.p);
    case FamilyKind::H2D: return family_H2D(fp.mu);
    case FamilyKind::Hp: return family_Hp(fp.p);
    case FamilyKind::Kp: return family_Kp(fp.p);
    case FamilyKind::L: return family_L();
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family");
}

struct RelationReport {
  std::vector<Relation> relations;
  bool all_verified = true;
  double worst = 0.0;
};

/// Pointwise check of every declared relation over `samples` random probes plus the fixed ones.
inline RelationReport check_relations(GeneratorSet& gens, std::size_t samples = 50,
                                      const Tolerances& tol = default_tolerances) {
  const auto probes = probe_points(samples);
  RelationReport rep;
  for (auto& r : gens.relations()) {
    double worst = 0.0;
    for (const auto& x : probes)
      worst = std::max(worst, chordal_distance(apply_word(r.word, gens, x), r.target(x)));
    const MobiusR3 folded = evaluate_word(r.word, gens, tol);
    worst = std::max(worst, max_deviation(folded, r.target, probes));
    r.max_deviation = worst;
    r.verified = worst < tol.point;
    rep.all_verified = rep.all_verified && r.verified;
    rep.worst = std::max(rep.worst, worst);
  }
  rep.relations = gens.relations();
  return rep;
}

}  // namespace kleinian
