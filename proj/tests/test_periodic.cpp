#include "ayoz/periodic.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "ayoz/surface.hpp"

using namespace ayoz;

namespace {

FieldElement fe(long a, long b, long c) {
  return FieldElement(Rational(a), Rational(b), Rational(c));
}

Vec2 vec(const FieldElement& x, const FieldElement& y) { return Vec2(x, y); }

// Coefficient lambda with holonomy == lambda * direction.
FieldElement coeff_along(const SaddleConnection& sc, const Vec2& theta) {
  return sc.holonomy.x / theta.x;
}

Vec2 segment_sum(const SaddleConnection& sc) {
  Vec2 s(FieldElement(0), FieldElement(0));
  for (const TraceSegment& seg : sc.segments) s += seg.to - seg.from;
  return s;
}

bool cyclically_equal(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  const std::size_t n = a.size();
  for (std::size_t r = 0; r < n; ++r) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = a[i] == b[(i + r) % n];
    if (ok) return true;
  }
  return false;
}

// Search for a relabeling perm (canonical label j of `cand` -> perm[j-1])
// under which cand matches ref: equal direction coefficients per label and
// cyclically equal boundary words per cylinder.  Cylinder order must agree
// already (it is sorted by projectively invariant data).
std::optional<std::vector<int>> find_relabeling(
    const PeriodicDirectionData& ref, const PeriodicDirectionData& cand) {
  const int k = static_cast<int>(ref.saddles.size());
  if (static_cast<int>(cand.saddles.size()) != k) return std::nullopt;
  if (ref.cylinders.size() != cand.cylinders.size()) return std::nullopt;
  std::vector<FieldElement> lr, lc;
  for (const SaddleConnection& sc : ref.saddles)
    lr.push_back(coeff_along(sc, ref.direction));
  for (const SaddleConnection& sc : cand.saddles)
    lc.push_back(coeff_along(sc, cand.direction));
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 1);
  do {
    bool ok = true;
    for (int j = 0; j < k && ok; ++j) ok = lr[perm[j] - 1] == lc[j];
    for (std::size_t i = 0; i < ref.cylinders.size() && ok; ++i) {
      auto mapped = [&](const std::vector<int>& cyc) {
        std::vector<int> out;
        for (int x : cyc) out.push_back(perm[x - 1]);
        return out;
      };
      ok = cyclically_equal(mapped(cand.combinatorics.bottomCycles[i]),
                            ref.combinatorics.bottomCycles[i]) &&
           cyclically_equal(mapped(cand.combinatorics.topCycles[i]),
                            ref.combinatorics.topCycles[i]);
    }
    if (ok) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

DecomposeOptions options_like(const PeriodicDirectionData& ref,
                              std::vector<int> relabel) {
  DecomposeOptions o;
  o.relabel = std::move(relabel);
  o.marking.bottom = ref.combinatorics.bottomMark;
  o.marking.top = ref.combinatorics.topMark;
  o.n0 = ref.n0;
  return o;
}

// Exhaustive comparison against the reference table for slope 1 - a^2.
void check_table_one(const PeriodicDirectionData& d) {
  REQUIRE(d.saddles.size() == 6);
  REQUIRE(d.cylinders.size() == 3);
  CHECK(d.direction == vec(fe(1, 0, 0), fe(1, 0, -1)));
  CHECK(d.n0 == 0);

  const std::vector<FieldElement> L2 = {fe(16, 18, 10), fe(4, -6, -1),
                                        fe(16, 18, 10), fe(4, -6, 6),
                                        fe(4, -6, -1),  fe(4, -6, 6)};
  CHECK(d.L2 == L2);
  for (int i = 0; i < 6; ++i) {
    CHECK(d.saddles[i].label == i + 1);
    CHECK(dot(d.saddles[i].holonomy, d.saddles[i].holonomy) == L2[i]);
  }
  CHECK(d.saddles[1].holonomy == vec(fe(0, 1, 0), fe(-1, 2, 1)));
  CHECK(d.saddles[2].holonomy == vec(fe(3, 2, 1), fe(2, 2, 0)));
  CHECK(d.saddles[0].holonomy == d.saddles[2].holonomy);
  CHECK(d.saddles[4].holonomy == d.saddles[1].holonomy);
  CHECK(d.saddles[5].holonomy == vec(fe(1, 0, 1), fe(2, -2, 0)));
  CHECK(d.saddles[3].holonomy == d.saddles[5].holonomy);

  CHECK(d.combinatorics.bottomCycles ==
        std::vector<std::vector<int>>{{3, 2, 6, 5}, {4}, {1}});
  CHECK(d.combinatorics.topCycles ==
        std::vector<std::vector<int>>{{2, 4, 5, 1}, {6}, {3}});
  CHECK(d.combinatorics.bottomMark == std::vector<int>{3, 4, 1});
  CHECK(d.combinatorics.topMark == std::vector<int>{2, 6, 3});
  CHECK(d.combinatorics.piB == std::vector<int>{0, 1, 6, 2, 4, 3, 5});
  CHECK(d.combinatorics.piT == std::vector<int>{0, 2, 4, 3, 5, 1, 6});

  const std::vector<FieldElement> W = {fe(4, 4, 2), fe(1, 0, 1), fe(3, 2, 1)};
  const std::vector<FieldElement> H = {fe(2, -4, 2), fe(-2, 2, 4),
                                       fe(-2, 6, -4)};
  const std::vector<FieldElement> V = {fe(1, 0, -1), fe(1, -1, 0),
                                       fe(1, 1, 2)};
  for (int i = 0; i < 3; ++i) {
    CHECK(d.cylinders[i].widthCoeff == W[i]);
    CHECK(d.cylinders[i].heightY == H[i]);
    CHECK(d.cylinders[i].vCoeff == V[i]);
    CHECK(d.cylinders[i].width == W[i] * d.direction);
    CHECK(d.cylinders[i].v == V[i] * d.direction);
  }
  CHECK(d.H == H);
  // Projectively the heights are (3+3a+2a^2 : 2+2a+a^2 : 1).
  CHECK(H[0] == H[2] * fe(3, 3, 2));
  CHECK(H[1] == H[2] * fe(2, 2, 1));

  CHECK(d.cylinders[0].twistRatio == fe(0, 0, 0));
  CHECK(d.cylinders[1].twistRatio == fe(0, 0, 0));
  CHECK(d.cylinders[2].twistRatio == fe(1, -1, 0));
  CHECK(d.twistSquares ==
        std::vector<FieldElement>{fe(0, 0, 0), fe(1, -2, 1)});
  CHECK(d.normalizedTwistSquares ==
        std::vector<FieldElement>{fe(0, 0, 0), fe(1, -2, 1)});
  CHECK(d.twistIntegers == std::vector<long>{0, 0});

  // T^2 |w|^2 = |t|^2 on the last cylinder: (1-2a+a^2)(16+18a+10a^2).
  CHECK(fe(1, -2, 1) * fe(16, 18, 10) == fe(4, 8, -8));
  CHECK(dot(d.cylinders[2].twist, d.cylinders[2].twist) == fe(4, 8, -8));

  FieldElement area(0);
  for (const CylinderGeom& g : d.cylinders) area += g.area;
  CHECK(area == fe(-4, 16, -4));

  NormalizingMatrix nm = normalizing_matrix(d);
  Mat2 F = nm.M.inverse();
  CHECK(F.column(0) == vec(fe(4, 4, 2), fe(2, 4, 2)));
  CHECK(F.column(1) == vec(fe(1, 0, -1), fe(2, -2, 0)));
  CHECK(nm.M.apply(F.column(0)) == vec(fe(1, 0, 0), fe(0, 0, 0)));
  CHECK(nm.M.apply(F.column(1)) == vec(fe(0, 0, 0), fe(1, 0, 0)));
}

// Exhaustive comparison against the reference table for slope 3 + a^2.
void check_table_two(const PeriodicDirectionData& d) {
  REQUIRE(d.saddles.size() == 6);
  REQUIRE(d.cylinders.size() == 3);
  CHECK(d.direction == vec(fe(1, 0, 0), fe(3, 0, 1)));
  CHECK(d.n0 == -1);

  const std::vector<FieldElement> L2 = {
      fe(26, 20, 11),     fe(144, 114, 74),   fe(144, 114, 74),
      fe(26, 20, 11),     fe(1612, 1354, 878), fe(1612, 1354, 878)};
  CHECK(d.L2 == L2);
  CHECK(d.saddles[0].holonomy == vec(fe(1, 1, 1), fe(3, 4, 3)));
  CHECK(d.saddles[3].holonomy == d.saddles[0].holonomy);
  CHECK(d.saddles[1].holonomy == vec(fe(3, 2, 1), fe(10, 6, 4)));
  CHECK(d.saddles[2].holonomy == d.saddles[1].holonomy);
  CHECK(d.saddles[4].holonomy == vec(fe(9, 8, 5), fe(30, 26, 16)));
  CHECK(d.saddles[5].holonomy == d.saddles[4].holonomy);

  CHECK(d.combinatorics.bottomCycles ==
        std::vector<std::vector<int>>{{5, 4, 2, 1}, {3}, {6}});
  CHECK(d.combinatorics.topCycles ==
        std::vector<std::vector<int>>{{4, 3, 1, 6}, {2}, {5}});
  CHECK(d.combinatorics.bottomMark == std::vector<int>{5, 3, 6});
  CHECK(d.combinatorics.topMark == std::vector<int>{4, 2, 5});

  const std::vector<FieldElement> W = {fe(14, 12, 8), fe(3, 2, 1),
                                       fe(9, 8, 5)};
  const std::vector<FieldElement> H = {fe(-6, 8, 6), fe(-2, 6, -4),
                                       fe(10, -14, -8)};
  const std::vector<FieldElement> V = {fe(5, 2, -1), fe(4, -3, -1),
                                       fe(-1, 5, 6)};
  for (int i = 0; i < 3; ++i) {
    CHECK(d.cylinders[i].widthCoeff == W[i]);
    CHECK(d.cylinders[i].heightY == H[i]);
    CHECK(d.cylinders[i].vCoeff == V[i]);
  }

  CHECK(d.cylinders[1].twistRatio == fe(3, 0, 0));
  CHECK(d.cylinders[2].twistRatio == fe(1, -1, 0));
  CHECK(d.twistSquares == std::vector<FieldElement>{fe(9, 0, 0), fe(1, -2, 1)});
  CHECK(d.normalizedTwistSquares ==
        std::vector<FieldElement>{fe(0, 0, 0), fe(1, -2, 1)});
  CHECK(d.twistIntegers == std::vector<long>{3, 0});
  CHECK(d.cylinders[1].twistFloor == 3);

  FieldElement area(0);
  for (const CylinderGeom& g : d.cylinders) area += g.area;
  CHECK(area == fe(-4, 16, -4));

  NormalizingMatrix nm = normalizing_matrix(d);
  Mat2 F = nm.M.inverse();
  CHECK(F.column(0) == vec(fe(14, 12, 8), fe(46, 40, 26)));
  CHECK(F.column(1) == vec(fe(-9, -10, -9), fe(-34, -30, -20)));
  // The slope of the second frame column is (367+252a+175a^2)/169.
  CHECK(fe(-34, -30, -20) * fe(169, 0, 0) ==
        fe(367, 252, 175) * fe(-9, -10, -9));
}

TranslationSurface unit_torus() {
  CylinderFamily fam;
  fam.direction = vec(fe(1, 0, 0), fe(0, 0, 0));
  fam.lengths = {fe(1, 0, 0)};
  fam.cylinders = {{{0}, {0}, fe(1, 0, 0), fe(0, 0, 0)}};
  return build_from_cylinders(fam);
}

TranslationSurface three_square_origami() {
  CylinderFamily fam;
  fam.direction = vec(fe(1, 0, 0), fe(0, 0, 0));
  fam.lengths = {fe(1, 0, 0), fe(1, 0, 0), fe(1, 0, 0)};
  fam.cylinders = {{{0, 1}, {0, 2}, fe(1, 0, 0), fe(0, 0, 0)},
                   {{2}, {1}, fe(1, 0, 0), fe(0, 0, 0)}};
  return build_from_cylinders(fam);
}

// The first reference table as bare cylinder data (marked-first cycles,
// 0-based labels, v-coefficients as twists).
CylinderFamily reference_family_one() {
  CylinderFamily fam;
  fam.direction = vec(fe(1, 0, 0), fe(1, 0, -1));
  fam.lengths = {fe(3, 2, 1), fe(0, 1, 0), fe(3, 2, 1),
                 fe(1, 0, 1), fe(0, 1, 0), fe(1, 0, 1)};
  fam.cylinders = {{{2, 1, 5, 4}, {1, 3, 4, 0}, fe(2, -4, 2), fe(1, 0, -1)},
                   {{3}, {5}, fe(-2, 2, 4), fe(1, -1, 0)},
                   {{0}, {2}, fe(-2, 6, -4), fe(1, 1, 2)}};
  return fam;
}

}  // namespace

TEST_CASE("reference direction one golden tables", "[periodic]") {
  TranslationSurface S = build_arnoux_yoccoz();
  auto preset = find_preset("ay1");
  REQUIRE(preset.has_value());
  PeriodicDirectionData d = decompose(S, preset->direction, preset->options);
  check_table_one(d);

  SECTION("tracing is exact") {
    for (const SaddleConnection& sc : d.saddles) {
      CHECK(segment_sum(sc) == sc.holonomy);
      CHECK(!sc.segments.empty());
    }
  }
  SECTION("cone endpoints") {
    // Labels 1,2,3 emanate from the first cone class, 4,5,6 from the second;
    // label 2 ends at the second class, label 5 at the first.
    std::vector<std::pair<int, int>> ends;
    for (const SaddleConnection& sc : d.saddles)
      ends.push_back({sc.fromCone, sc.toCone});
    CHECK(ends == std::vector<std::pair<int, int>>{
                      {0, 0}, {0, 1}, {0, 0}, {1, 1}, {1, 0}, {1, 1}});
  }
}

TEST_CASE("reference direction two golden tables", "[periodic]") {
  TranslationSurface S = build_arnoux_yoccoz();
  auto preset = find_preset("ay2");
  REQUIRE(preset.has_value());
  PeriodicDirectionData d = decompose(S, preset->direction, preset->options);
  check_table_two(d);
  for (const SaddleConnection& sc : d.saddles)
    CHECK(segment_sum(sc) == sc.holonomy);
}

TEST_CASE("direction presets", "[periodic]") {
  CHECK(!find_preset("nope").has_value());
  auto p1 = find_preset("ay1");
  auto p2 = find_preset("ay2");
  REQUIRE(p1.has_value());
  REQUIRE(p2.has_value());
  CHECK(p1->options.relabel == p2->options.relabel);

  auto byDir = find_preset_for_direction(vec(fe(2, 0, 0), fe(2, 0, -2)));
  REQUIRE(byDir.has_value());
  CHECK(byDir->name == "ay1");
  auto byDirNeg = find_preset_for_direction(vec(fe(-1, 0, 0), fe(-3, 0, -1)));
  REQUIRE(byDirNeg.has_value());
  CHECK(byDirNeg->name == "ay2");
  CHECK(!find_preset_for_direction(vec(fe(1, 0, 0), fe(1, 0, 0))).has_value());
}

TEST_CASE("separatrix tracing and step budget", "[periodic]") {
  TranslationSurface S = build_arnoux_yoccoz();
  Vec2 theta = vec(fe(1, 0, 0), fe(1, 0, -1));

  std::vector<SaddleConnection> conns = trace_separatrices(S, theta);
  REQUIRE(conns.size() == 6);
  for (std::size_t i = 0; i < conns.size(); ++i) {
    CHECK(conns[i].label == static_cast<int>(i) + 1);
    CHECK(segment_sum(conns[i]) == conns[i].holonomy);
    CHECK(coeff_along(conns[i], theta).sign() > 0);
  }

  Vec2 steep = vec(fe(1, 0, 0), fe(3, 0, 1));
  bool threw = false;
  try {
    trace_separatrices(S, steep, 8);
  } catch (const NotDetectedPeriodic& e) {
    threw = true;
    CHECK(e.partial.size() < 6);
    for (const SaddleConnection& sc : e.partial)
      CHECK(segment_sum(sc) == sc.holonomy);
  }
  CHECK(threw);
  CHECK_THROWS_AS(decompose(S, steep, [] {
                    DecomposeOptions o;
                    o.maxSteps = 8;
                    return o;
                  }()),
                  NotDetectedPeriodic);
}

TEST_CASE("degenerate and invalid inputs", "[periodic]") {
  TranslationSurface S = build_arnoux_yoccoz();
  CHECK_THROWS_AS(decompose(S, vec(fe(0, 0, 0), fe(0, 0, 0))),
                  DegenerateDirection);
  CHECK_THROWS_AS(decompose(S, vec(fe(0, 0, 0), fe(1, 0, 0))),
                  DegenerateDirection);

  // A negative-x direction is folded back onto its opposite.
  PeriodicDirectionData dPos = decompose(S, vec(fe(1, 0, 0), fe(1, 0, -1)));
  PeriodicDirectionData dNeg = decompose(S, vec(fe(-1, 0, 0), fe(-1, 0, 1)));
  CHECK(dNeg.direction == dPos.direction);
  CHECK(dNeg.L2 == dPos.L2);
  CHECK(dNeg.combinatorics.bottomCycles == dPos.combinatorics.bottomCycles);

  auto preset = find_preset("ay1");
  REQUIRE(preset.has_value());
  DecomposeOptions bad = preset->options;
  bad.relabel = {1, 2};
  CHECK_THROWS_AS(decompose(S, preset->direction, bad), InvalidMarking);
  bad = preset->options;
  bad.relabel = {1, 1, 2, 3, 4, 5};
  CHECK_THROWS_AS(decompose(S, preset->direction, bad), InvalidMarking);
  bad = preset->options;
  bad.relabel = {0, 1, 2, 3, 4, 7};
  CHECK_THROWS_AS(decompose(S, preset->direction, bad), InvalidMarking);
  bad = preset->options;
  bad.marking.bottom = {3, 4};
  CHECK_THROWS_AS(decompose(S, preset->direction, bad), InvalidMarking);
  bad = preset->options;
  bad.marking.bottom = {1, 4, 1};  // label 1 is not on the big bottom cycle
  CHECK_THROWS_AS(decompose(S, preset->direction, bad), InvalidMarking);

  PeriodicDirectionData empty;
  CHECK_THROWS_AS(normalizing_matrix(empty), SingularFrame);
}

TEST_CASE("torus decompositions", "[periodic]") {
  TranslationSurface T = unit_torus();
  CHECK(T.area() == fe(1, 0, 0));
  CHECK(T.genus() == 1);
  CHECK(T.singular_classes().empty());

  SECTION("horizontal") {
    PeriodicDirectionData d = decompose(T, vec(fe(1, 0, 0), fe(0, 0, 0)));
    REQUIRE(d.saddles.size() == 1);
    REQUIRE(d.cylinders.size() == 1);
    CHECK(d.saddles[0].holonomy == vec(fe(1, 0, 0), fe(0, 0, 0)));
    CHECK(d.cylinders[0].widthCoeff == fe(1, 0, 0));
    CHECK(d.cylinders[0].heightY == fe(1, 0, 0));
    CHECK(d.cylinders[0].vCoeff == fe(0, 0, 0));
    CHECK(d.combinatorics.bottomCycles ==
          std::vector<std::vector<int>>{{1}});
    CHECK(d.combinatorics.topCycles == std::vector<std::vector<int>>{{1}});
    CHECK(normalizing_matrix(d).M == Mat2::identity());
  }
  SECTION("slope one") {
    PeriodicDirectionData d = decompose(T, vec(fe(1, 0, 0), fe(1, 0, 0)));
    REQUIRE(d.saddles.size() == 1);
    REQUIRE(d.cylinders.size() == 1);
    CHECK(d.saddles[0].holonomy == vec(fe(1, 0, 0), fe(1, 0, 0)));
    CHECK(d.cylinders[0].heightY == fe(1, 0, 0));
    CHECK(d.cylinders[0].vCoeff == fe(0, 0, 0));
    CHECK(d.cylinders[0].area == fe(1, 0, 0));
    Mat2 F = normalizing_matrix(d).M.inverse();
    CHECK(F.column(0) == vec(fe(1, 0, 0), fe(1, 0, 0)));
    CHECK(F.column(1) == vec(fe(0, 0, 0), fe(1, 0, 0)));
  }
}

TEST_CASE("three-square origami", "[periodic]") {
  TranslationSurface S = three_square_origami();
  CHECK(S.area() == fe(3, 0, 0));
  CHECK(S.genus() == 2);
  REQUIRE(S.singular_classes().size() == 1);
  CHECK(S.vertex_class(S.singular_classes()[0]).turns == 3);

  SECTION("horizontal round trip") {
    PeriodicDirectionData d = decompose(S, vec(fe(1, 0, 0), fe(0, 0, 0)));
    REQUIRE(d.saddles.size() == 3);
    REQUIRE(d.cylinders.size() == 2);
    CHECK(d.cylinders[0].widthCoeff == fe(2, 0, 0));
    CHECK(d.cylinders[1].widthCoeff == fe(1, 0, 0));
    CHECK(d.cylinders[0].heightY == fe(1, 0, 0));
    CHECK(d.cylinders[1].heightY == fe(1, 0, 0));
    CHECK(d.cylinders[0].vCoeff == fe(0, 0, 0));
    CHECK(d.cylinders[1].vCoeff == fe(0, 0, 0));
    CHECK(d.twistSquares == std::vector<FieldElement>{fe(0, 0, 0)});
    FieldElement area(0);
    for (const CylinderGeom& g : d.cylinders) area += g.area;
    CHECK(area == fe(3, 0, 0));
  }
  SECTION("slope one is periodic with exact traces") {
    PeriodicDirectionData d = decompose(S, vec(fe(1, 0, 0), fe(1, 0, 0)));
    FieldElement area(0);
    for (const CylinderGeom& g : d.cylinders) area += g.area;
    CHECK(area == fe(3, 0, 0));
    for (const SaddleConnection& sc : d.saddles)
      CHECK(segment_sum(sc) == sc.holonomy);
  }
}

TEST_CASE("cylinder data round trip", "[periodic]") {
  TranslationSurface AY = build_arnoux_yoccoz();
  TranslationSurface S = build_from_cylinders(reference_family_one());
  CHECK(S.area() == fe(-4, 16, -4));
  CHECK(S.genus() == 3);
  CHECK(S.singular_classes().size() == 2);

  auto p1 = find_preset("ay1");
  auto p2 = find_preset("ay2");
  REQUIRE(p1.has_value());
  REQUIRE(p2.has_value());
  PeriodicDirectionData ref1 = decompose(AY, p1->direction, p1->options);
  PeriodicDirectionData ref2 = decompose(AY, p2->direction, p2->options);

  // In the construction direction the rebuilt surface must reproduce the
  // full reference table.
  PeriodicDirectionData d1 = decompose(S, p1->direction);
  auto sigma1 = find_relabeling(ref1, d1);
  REQUIRE(sigma1.has_value());
  check_table_one(decompose(S, p1->direction, options_like(ref1, *sigma1)));

  // And in the other reference direction as well: the data of one table
  // pins the surface up to translation equivalence.
  PeriodicDirectionData d2 = decompose(S, p2->direction);
  auto sigma2 = find_relabeling(ref2, d2);
  REQUIRE(sigma2.has_value());
  check_table_two(decompose(S, p2->direction, options_like(ref2, *sigma2)));
}

TEST_CASE("projective invariance", "[periodic]") {
  TranslationSurface S = build_arnoux_yoccoz();
  const FieldElement one(1), zero(0);
  auto shearU = [&](const FieldElement& b) { return Mat2(one, b, zero, one); };
  auto shearL = [&](const FieldElement& c) { return Mat2(one, zero, c, one); };

  std::vector<Mat2> mats = {
      shearU(fe(0, 1, 0)),
      shearL(fe(1, -1, 0)),
      shearU(fe(0, 0, 1)) * shearL(fe(-1, 0, 1)),
      shearL(fe(2, 0, 0)) * shearU(fe(0, 1, 1)) * shearL(fe(0, -1, 0)),
      shearU(fe(-1, 2, 0)) * shearL(fe(1, 1, 1)),
      Mat2(one, zero, zero, fe(2, 0, 0)),  // det 2: any det > 0 is allowed
  };

  auto presets = ay_direction_presets();
  for (const DirectionPreset& ps : presets) {
    PeriodicDirectionData ref = decompose(S, ps.direction, ps.options);
    for (const Mat2& A : mats) {
      if (A.det().sign() <= 0) continue;
      Vec2 thetaA = A.apply(ps.direction);
      if (thetaA.x.sign() <= 0) continue;
      TranslationSurface SA = apply_matrix(S, A);
      PeriodicDirectionData dA = decompose(SA, thetaA);
      auto sigma = find_relabeling(ref, dA);
      REQUIRE(sigma.has_value());
      PeriodicDirectionData dAm =
          decompose(SA, thetaA, options_like(ref, *sigma));

      CHECK(dAm.combinatorics.bottomCycles == ref.combinatorics.bottomCycles);
      CHECK(dAm.combinatorics.topCycles == ref.combinatorics.topCycles);
      CHECK(dAm.combinatorics.piB == ref.combinatorics.piB);
      CHECK(dAm.combinatorics.piT == ref.combinatorics.piT);
      REQUIRE(dAm.cylinders.size() == ref.cylinders.size());
      // A shears the vertical axis: the v-coefficients pick up a common
      // multiple of the heights modulo the widths, and that term cancels in
      // the twists.  kappa = (A e_y)_x / (A theta)_x.
      FieldElement kappa = A.b / thetaA.x;
      for (std::size_t i = 0; i < ref.cylinders.size(); ++i) {
        // Direction coefficients are invariant outright...
        CHECK(dAm.cylinders[i].widthCoeff == ref.cylinders[i].widthCoeff);
        FieldElement wrap = (dAm.cylinders[i].vCoeff -
                             ref.cylinders[i].vCoeff - kappa * ref.H[i]) /
                            ref.cylinders[i].widthCoeff;
        CHECK(wrap.is_rational());
        CHECK(wrap.coeff0().get_den() == 1);
        CHECK(dAm.cylinders[i].twistRatio == ref.cylinders[i].twistRatio);
        // ...heights and lengths only projectively.
        CHECK(dAm.H[i] * ref.H[0] == ref.H[i] * dAm.H[0]);
      }
      for (std::size_t i = 0; i < ref.L2.size(); ++i)
        CHECK(dAm.L2[i] * ref.L2[0] == ref.L2[i] * dAm.L2[0]);
      CHECK(dAm.twistSquares == ref.twistSquares);
      CHECK(dAm.normalizedTwistSquares == ref.normalizedTwistSquares);
      CHECK(dAm.twistIntegers == ref.twistIntegers);
    }
  }
}
