#pragma once

// Affine self-maps detected from periodic-direction data.
//
// Two cylinder decompositions of the same surface admit an affine
// diffeomorphism carrying one to the other exactly when their boundary
// combinatorics are isomorphic and the projectivized length, height, and
// normalized-twist data agree.  Each match produces the derivative
// Df = F' * F^{-1} mapping the normalizing frame of the source direction to
// the frame of the target direction.  The derivative is then classified by
// its trace, and hyperbolic derivatives carry the certified minimal
// polynomial of their expansion eigenvalue.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "field.hpp"
#include "linalg.hpp"
#include "periodic.hpp"
#include "polynomial.hpp"
#include "surface.hpp"

namespace ayoz {

struct NonUnimodular : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotHyperbolic : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class DerivativeClass { pseudoAnosov, parabolic, elliptic };

inline std::string to_string(DerivativeClass c) {
  switch (c) {
    case DerivativeClass::pseudoAnosov: return "pseudoAnosov";
    case DerivativeClass::parabolic: return "parabolic";
    default: return "elliptic";
  }
}

struct Classification {
  DerivativeClass type = DerivativeClass::elliptic;
  FieldElement trace;
  // Certified minimal polynomial over Q of the larger-modulus eigenvalue;
  // present exactly for hyperbolic derivatives.  Its degree is the degree of
  // the expansion factor over Q.
  std::optional<CertifiedPoly> expansion;
};

// Classify a unimodular derivative by the sign of trace^2 - 4.  Trace of
// magnitude exactly 2 splits into +-identity (finite order) and genuine
// shears (parabolic).
inline Classification classify(const Mat2& Df) {
  if (!(Df.det() == FieldElement(1)))
    throw NonUnimodular("derivative must have determinant 1");
  Classification out;
  out.trace = Df.trace();
  FieldElement disc = out.trace * out.trace - FieldElement(4);
  int s = disc.sign();
  if (s > 0) {
    out.type = DerivativeClass::pseudoAnosov;
    out.expansion = eigenvalue_minpoly(out.trace, FieldElement(1));
  } else if (s < 0) {
    out.type = DerivativeClass::elliptic;
  } else {
    Mat2 id = Mat2::identity();
    bool pmId = (Df == id) || (Df == FieldElement(-1) * id);
    out.type = pmId ? DerivativeClass::elliptic : DerivativeClass::parabolic;
  }
  return out;
}

struct AffineCandidate {
  // Saddle-connection relabeling: source label j maps to pi1[j-1] (1-based).
  std::vector<int> pi1;
  // Cylinder relabeling: source cylinder i maps to pi2[i] (0-based).
  std::vector<int> pi2;
  // Frame integer chosen on the target side.
  long n0prime = 0;
  Mat2 Df;
  Classification cls;
};

namespace detail {

// Projective equality over the field: every 2x2 minor of the stacked pair
// vanishes.  Exact, with no divisions.
inline bool projectively_equal(const std::vector<FieldElement>& a,
                               const std::vector<FieldElement>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (!(a[i] * b[j] - a[j] * b[i]).is_zero()) return false;
  return true;
}

// Reduce x modulo w into [0, w), w > 0.
inline FieldElement reduce_mod(const FieldElement& x, const FieldElement& w) {
  Integer q = (x / w).floor();
  return x - FieldElement(Rational(q)) * w;
}

inline bool cyclically_equal_seq(const std::vector<int>& a,
                                 const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  for (std::size_t s = 0; s < b.size(); ++s) {
    bool ok = true;
    for (std::size_t r = 0; r < a.size() && ok; ++r)
      ok = a[r] == b[(s + r) % b.size()];
    if (ok) return true;
  }
  return false;
}

}  // namespace detail

// Search for affine diffeomorphisms carrying the periodic direction of d1 to
// that of d2.  A hit is a triple (pi1, pi2, n0') such that the boundary
// combinatorics correspond under (pi1, pi2), the squared lengths and the
// heights agree projectively, and the normalized twists computed on the
// target side with the marking induced by pi1 reproduce those of the source.
// Each hit yields Df mapping the source normalizing frame to the induced
// target frame; only unimodular derivatives are kept (automatic when both
// data live on one surface, since frame determinants are cylinder areas).
inline std::vector<AffineCandidate> match_directions(
    const PeriodicDirectionData& d1, const PeriodicDirectionData& d2,
    long n0lo = -8, long n0hi = 8) {
  std::vector<AffineCandidate> hits;
  const std::size_t k = d1.saddles.size();
  const std::size_t p = d1.cylinders.size();
  if (k == 0 || p == 0) return hits;
  if (d2.saddles.size() != k || d2.cylinders.size() != p) return hits;
  if (n0lo > n0hi) return hits;

  // Lengths of saddle connections along their direction, indexed by label-1.
  std::vector<FieldElement> lam2(k, FieldElement(0));
  for (std::size_t j = 0; j < k; ++j)
    lam2[j] = d2.saddles[j].holonomy.x / d2.direction.x;

  const Combinatorics& c1 = d1.combinatorics;
  const Combinatorics& c2 = d2.combinatorics;

  Mat2 M1 = normalizing_matrix(d1).M;

  std::vector<int> pi2(p);
  std::iota(pi2.begin(), pi2.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < p && ok; ++i)
      ok = c1.bottomCycles[i].size() == c2.bottomCycles[pi2[i]].size() &&
           c1.topCycles[i].size() == c2.topCycles[pi2[i]].size();
    if (!ok) continue;
    // Heights must agree projectively under pi2.
    for (std::size_t i = 0; i < p && ok; ++i)
      for (std::size_t j = i + 1; j < p && ok; ++j)
        ok = (d2.H[pi2[i]] * d1.H[j] - d2.H[pi2[j]] * d1.H[i]).is_zero();
    if (!ok) continue;

    // Enumerate pi1 cylinder by cylinder: on each bottom cycle, pi1 must be
    // a rotation-aligned bijection onto the image bottom cycle.
    std::vector<std::size_t> off(p, 0);
    while (true) {
      std::vector<int> pi1(k, 0);
      for (std::size_t i = 0; i < p; ++i) {
        const std::vector<int>& src = c1.bottomCycles[i];
        const std::vector<int>& dst = c2.bottomCycles[pi2[i]];
        for (std::size_t r = 0; r < src.size(); ++r)
          pi1[src[r] - 1] = dst[(off[i] + r) % dst.size()];
      }
      // Top cycles must then correspond up to rotation as well.
      bool good = true;
      for (std::size_t i = 0; i < p && good; ++i) {
        std::vector<int> mapped;
        mapped.reserve(c1.topCycles[i].size());
        for (int x : c1.topCycles[i]) mapped.push_back(pi1[x - 1]);
        good = detail::cyclically_equal_seq(mapped, c2.topCycles[pi2[i]]);
      }
      // Squared lengths agree projectively under pi1.
      if (good) {
        std::vector<FieldElement> img(k, FieldElement(0));
        for (std::size_t j = 0; j < k; ++j) img[j] = d2.L2[pi1[j] - 1];
        good = detail::projectively_equal(img, d1.L2);
      }
      if (good) {
        // The marking induced on the target: cylinder pi2[i] is marked by
        // the images of d1's marked labels.  Shift the stored cross-vector
        // coefficients accordingly: advancing the bottom origin past a
        // boundary connection subtracts its length, advancing the top origin
        // adds it.
        std::vector<FieldElement> vInd(p, FieldElement(0));
        for (std::size_t i = 0; i < p && good; ++i) {
          int q = pi2[i];
          const CylinderGeom& cyl = d2.cylinders[q];
          FieldElement v = cyl.vCoeff;
          int bm = pi1[c1.bottomMark[i] - 1];
          int tm = pi1[c1.topMark[i] - 1];
          const std::vector<int>& bc = c2.bottomCycles[q];
          const std::vector<int>& tc = c2.topCycles[q];
          bool foundB = false, foundT = false;
          for (std::size_t r = 0; r < bc.size() && !foundB; ++r) {
            if (bc[r] == bm) { foundB = true; break; }
            v = v - lam2[bc[r] - 1];
          }
          for (std::size_t r = 0; r < tc.size() && !foundT; ++r) {
            if (tc[r] == tm) { foundT = true; break; }
            v = v + lam2[tc[r] - 1];
          }
          if (!foundB || !foundT) { good = false; break; }
          vInd[q] = detail::reduce_mod(v, cyl.widthCoeff);
        }
        if (good) {
          const int q0 = pi2[0];
          const FieldElement& W0 = d2.cylinders[q0].widthCoeff;
          const FieldElement& H0 = d2.H[q0];
          for (long n0p = n0lo; n0p <= n0hi; ++n0p) {
            FieldElement vplus = vInd[q0] + FieldElement(Rational(n0p)) * W0;
            bool twistOk = true;
            for (std::size_t i = 1; i < p && twistOk; ++i) {
              int q = pi2[i];
              FieldElement t = vInd[q] - (d2.H[q] / H0) * vplus;
              FieldElement T = t / d2.cylinders[q].widthCoeff;
              FieldElement fr = T - FieldElement(Rational(T.floor()));
              twistOk = (fr * fr == d1.normalizedTwistSquares[i - 1]);
            }
            if (!twistOk) continue;
            Vec2 tau2 = Vec2(FieldElement(0), H0) + vplus * d2.direction;
            Mat2 F2 = Mat2::from_columns(d2.cylinders[q0].width, tau2);
            Mat2 Df = F2 * M1;
            if (!(Df.det() == FieldElement(1))) continue;
            AffineCandidate cand;
            cand.pi1 = pi1;
            cand.pi2 = pi2;
            cand.n0prime = n0p;
            cand.Df = Df;
            cand.cls = classify(Df);
            hits.push_back(std::move(cand));
          }
        }
      }
      // Advance the rotation odometer.
      std::size_t pos = 0;
      while (pos < p) {
        if (++off[pos] < c2.bottomCycles[pi2[pos]].size()) break;
        off[pos] = 0;
        ++pos;
      }
      if (pos == p) break;
    }
  } while (std::next_permutation(pi2.begin(), pi2.end()));

  std::sort(hits.begin(), hits.end(),
            [](const AffineCandidate& x, const AffineCandidate& y) {
              if (x.n0prime != y.n0prime) return x.n0prime < y.n0prime;
              if (x.pi1 != y.pi1) return x.pi1 < y.pi1;
              return x.pi2 < y.pi2;
            });
  return hits;
}

// Whether two hyperbolic derivatives have a common power: true exactly when
// their eigendirection pairs coincide.  A direction v is an eigendirection
// of Df iff det(Df v, v) = 0, a quadratic form in the slope; the unordered
// eigendirection pair is the projective class of that form.
inline bool share_power(const Mat2& A, const Mat2& B) {
  for (const Mat2* m : {&A, &B}) {
    if (!(m->det() == FieldElement(1)))
      throw NonUnimodular("derivative must have determinant 1");
    FieldElement tr = m->trace();
    if ((tr * tr - FieldElement(4)).sign() <= 0)
      throw NotHyperbolic("derivative is not hyperbolic");
  }
  std::vector<FieldElement> qa = {FieldElement(0) - A.c, A.a - A.d, A.b};
  std::vector<FieldElement> qb = {FieldElement(0) - B.c, B.a - B.d, B.b};
  return detail::projectively_equal(qa, qb);
}

namespace detail {

// Full-table equality of two decompositions: same labels with equal
// holonomies and lengths, identical cylinder geometry, identical marked
// boundary combinatorics and successor permutations, same frame integer.
// Two surfaces producing equal tables are translation-equivalent: either one
// rebuilds from the shared table.
inline bool same_table(const PeriodicDirectionData& a,
                       const PeriodicDirectionData& b) {
  if (a.saddles.size() != b.saddles.size()) return false;
  if (a.cylinders.size() != b.cylinders.size()) return false;
  if (a.n0 != b.n0) return false;
  if (!(a.direction == b.direction)) return false;
  for (std::size_t j = 0; j < a.saddles.size(); ++j) {
    if (a.saddles[j].label != b.saddles[j].label) return false;
    if (!(a.saddles[j].holonomy == b.saddles[j].holonomy)) return false;
    if (!(a.L2[j] == b.L2[j])) return false;
  }
  const Combinatorics& ca = a.combinatorics;
  const Combinatorics& cb = b.combinatorics;
  if (ca.bottomCycles != cb.bottomCycles || ca.topCycles != cb.topCycles)
    return false;
  if (ca.bottomMark != cb.bottomMark || ca.topMark != cb.topMark) return false;
  if (ca.piB != cb.piB || ca.piT != cb.piT) return false;
  for (std::size_t i = 0; i < a.cylinders.size(); ++i) {
    const CylinderGeom& x = a.cylinders[i];
    const CylinderGeom& y = b.cylinders[i];
    if (!(x.widthCoeff == y.widthCoeff)) return false;
    if (!(x.heightY == y.heightY)) return false;
    if (!(x.vCoeff == y.vCoeff)) return false;
    if (!(x.twistRatio == y.twistRatio)) return false;
  }
  return true;
}

// Search a label bijection sigma under which the decomposition of the
// candidate surface reproduces ref's table verbatim (relabeled, with ref's
// marking and frame integer).  Returns the relabeling, or nullopt.
inline std::optional<std::vector<int>> find_table_match(
    const TranslationSurface& candSurface, const PeriodicDirectionData& ref,
    const PeriodicDirectionData& cand, int maxSteps) {
  const std::size_t k = ref.saddles.size();
  if (cand.saddles.size() != k) return std::nullopt;
  if (cand.cylinders.size() != ref.cylinders.size()) return std::nullopt;
  std::vector<FieldElement> lamRef(k, FieldElement(0)),
      lamCand(k, FieldElement(0));
  for (std::size_t j = 0; j < k; ++j) {
    lamRef[j] = ref.saddles[j].holonomy.x / ref.direction.x;
    lamCand[j] = cand.saddles[j].holonomy.x / cand.direction.x;
  }
  std::vector<int> sigma(k);
  std::iota(sigma.begin(), sigma.end(), 1);
  do {
    bool ok = true;
    for (std::size_t j = 0; j < k && ok; ++j)
      ok = (lamCand[j] == lamRef[sigma[j] - 1]);
    for (std::size_t i = 0; i < ref.cylinders.size() && ok; ++i) {
      std::vector<int> mb, mt;
      for (int x : cand.combinatorics.bottomCycles[i])
        mb.push_back(sigma[x - 1]);
      for (int x : cand.combinatorics.topCycles[i]) mt.push_back(sigma[x - 1]);
      ok = cyclically_equal_seq(mb, ref.combinatorics.bottomCycles[i]) &&
           cyclically_equal_seq(mt, ref.combinatorics.topCycles[i]);
    }
    if (!ok) continue;
    DecomposeOptions opt;
    opt.relabel = sigma;
    opt.n0 = ref.n0;
    opt.marking.bottom = ref.combinatorics.bottomMark;
    opt.marking.top = ref.combinatorics.topMark;
    opt.maxSteps = maxSteps;
    PeriodicDirectionData redo;
    try {
      redo = decompose(candSurface, ref.direction, opt);
    } catch (const InvalidMarking&) {
      continue;
    }
    if (same_table(ref, redo)) return sigma;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return std::nullopt;
}

}  // namespace detail

// Decide whether the surface admits an affine automorphism with derivative
// -Id, and count its fixed points.
//
// Method: pick a periodic direction theta detected among cone-to-cone chords
// (within one chart, or developed across a single gluing).  Negating every
// chart gives an isometric copy S-; the automorphism exists iff S- is
// translation-equivalent to S, which is certified by a label bijection under
// which both decompose to the same table.  The fixed points are then counted
// cell by cell in the direction-theta decomposition: an invariant cylinder
// carries exactly two interior fixed points (on its core circle), an
// invariant saddle connection carries its midpoint, and a fixed cone class
// carries the cone point itself.
inline std::pair<bool, int> find_involution(const TranslationSurface& S,
                                            int maxSteps = 4096) {
  // Cone-to-cone chord directions, deduplicated projectively.
  std::vector<int> baseClasses = S.singular_classes();
  if (baseClasses.empty())
    for (int c = 0; c < S.num_vertex_classes(); ++c) baseClasses.push_back(c);
  std::vector<std::pair<int, Vec2>> basePts;  // (polygon, chart coordinates)
  for (int cls : baseClasses)
    for (const CornerRef& c : S.vertex_class(cls).corners)
      basePts.emplace_back(c.poly, S.vertex(c.poly, c.vertex));

  std::vector<Vec2> candidates;
  std::set<std::string> seen;
  auto add = [&](Vec2 v) {
    if (v.is_zero() || v.x.is_zero()) return;  // need a nonvertical seed
    if (v.x.sign() < 0) v = -v;
    std::string key = (v.y / v.x).to_string();
    if (seen.insert(key).second) candidates.push_back(v);
  };
  for (const auto& [pa, A] : basePts)
    for (const auto& [pb, B] : basePts)
      if (pa == pb) add(B - A);
  for (int p = 0; p < S.num_polygons(); ++p) {
    int n = S.edge_count(p);
    for (int e = 0; e < n; ++e) {
      EdgeRef f = S.paired(EdgeRef{p, e});
      Vec2 t = S.crossing_translation(f);  // f.poly chart -> p chart
      for (const auto& [pa, A] : basePts) {
        if (pa != p) continue;
        for (const auto& [pb, B] : basePts)
          if (pb == f.poly) add(B + t - A);
      }
    }
  }

  // Probe candidates cheaply first; widen the budget only if nothing short
  // was periodic.
  std::optional<PeriodicDirectionData> dOpt;
  Vec2 theta;
  for (int budget : {std::min(256, maxSteps), maxSteps}) {
    for (const Vec2& cand : candidates) {
      DecomposeOptions opt;
      opt.maxSteps = budget;
      try {
        PeriodicDirectionData d = decompose(S, cand, opt);
        theta = cand;
        dOpt = std::move(d);
        break;
      } catch (const NotDetectedPeriodic&) {
        continue;
      } catch (const DegenerateDirection&) {
        continue;
      }
    }
    if (dOpt || budget == maxSteps) break;
  }
  if (!dOpt) return {false, 0};
  const PeriodicDirectionData& d = *dOpt;

  TranslationSurface Sm = apply_matrix(S, FieldElement(-1) * Mat2::identity());
  PeriodicDirectionData dm;
  {
    DecomposeOptions opt;
    opt.maxSteps = maxSteps;
    try {
      dm = decompose(Sm, theta, opt);
    } catch (const NotDetectedPeriodic&) {
      return {false, 0};
    }
  }
  std::optional<std::vector<int>> sigmaOpt =
      detail::find_table_match(Sm, d, dm, maxSteps);
  if (!sigmaOpt) return {false, 0};
  const std::vector<int>& sigma = *sigmaOpt;

  // Label action of the automorphism.  Negating charts turns the arrival
  // germ of a connection into the departure germ of its mirror image, at the
  // same corner; matching corners recovers the mirror bijection rho, and the
  // table bijection sigma transports it back: A = sigma . rho.
  const std::size_t k = d.saddles.size();
  detail::DirectionTrace tr = detail::trace_direction(S, theta, maxSteps);
  detail::DirectionTrace trm = detail::trace_direction(Sm, theta, maxSteps);
  if (tr.conns.size() != k || trm.conns.size() != k)
    throw std::logic_error("trace and decomposition disagree");
  std::vector<int> act(k, 0);  // d-label m -> d-label of its image
  for (std::size_t m = 0; m < k; ++m) {
    int hit = -1;
    for (std::size_t j = 0; j < k; ++j)
      if (trm.conns[j].startCorner == tr.conns[m].endGermCorner) {
        if (hit >= 0) throw std::logic_error("ambiguous mirror connection");
        hit = static_cast<int>(j);
      }
    if (hit < 0) throw std::logic_error("mirror connection not found");
    act[m] = sigma[hit];
  }
  for (std::size_t m = 0; m < k; ++m)
    if (act[act[m] - 1] != static_cast<int>(m) + 1)
      throw std::logic_error("symmetry does not act as an involution");

  // Cylinder action: the image of a bottom boundary is a top boundary.
  const std::size_t p = d.cylinders.size();
  auto labelSet = [&](const std::vector<int>& cyc, bool mapped) {
    std::set<int> s;
    for (int x : cyc) s.insert(mapped ? act[x - 1] : x);
    return s;
  };
  int fixedCylinders = 0;
  for (std::size_t i = 0; i < p; ++i) {
    std::set<int> img = labelSet(d.combinatorics.bottomCycles[i], true);
    int nu = -1;
    for (std::size_t j = 0; j < p; ++j)
      if (labelSet(d.combinatorics.topCycles[j], false) == img) {
        nu = static_cast<int>(j);
        break;
      }
    if (nu < 0) throw std::logic_error("cylinder image not found");
    std::set<int> imgTop = labelSet(d.combinatorics.topCycles[i], true);
    if (labelSet(d.combinatorics.bottomCycles[nu], false) != imgTop)
      throw std::logic_error("cylinder boundaries map inconsistently");
    if (nu == static_cast<int>(i)) ++fixedCylinders;
  }

  // Cone-class action: the start of a connection maps to the end of its
  // image.
  std::map<int, int> coneAct;
  auto record = [&](int from, int to) {
    auto [it, inserted] = coneAct.emplace(from, to);
    if (!inserted && it->second != to)
      throw std::logic_error("cone classes map inconsistently");
  };
  for (std::size_t m = 0; m < k; ++m) {
    const detail::TracedConnection& src = tr.conns[m];
    const detail::TracedConnection& img = tr.conns[act[m] - 1];
    record(src.fromCone, img.toCone);
    record(src.toCone, img.fromCone);
  }
  int fixedCones = 0;
  for (const auto& [from, to] : coneAct)
    if (from == to) ++fixedCones;

  int fixedConns = 0;
  for (std::size_t m = 0; m < k; ++m)
    if (act[m] == static_cast<int>(m) + 1) ++fixedConns;

  return {true, 2 * fixedCylinders + fixedConns + fixedCones};
}

}  // namespace ayoz
