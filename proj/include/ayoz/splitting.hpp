#ifndef AYOZ_SPLITTING_HPP
#define AYOZ_SPLITTING_HPP

// Parallel splittings of a translation surface.  A distinguished kind of
// direction carries exactly four saddle connections with one common holonomy
// vector whose complement falls apart into two flat cylinders and two
// once-slit flat tori ("two tori, two cylinders").  This header cuts a
// surface along such connections, closes the pieces up, and computes their
// period lattices exactly; it renormalizes the splitting so the connections
// become the unit horizontal vector; it builds the two-parameter shear
// family of such splittings together with the polynomial identities its
// area map satisfies; and it packages the torus-lattice hypotheses used by
// Ratner-type unipotent-orbit arguments, including the symbolic Lie bracket
// computations behind them.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ayoz/field.hpp"
#include "ayoz/linalg.hpp"
#include "ayoz/periodic.hpp"
#include "ayoz/polynomial.hpp"
#include "ayoz/surface.hpp"

namespace ayoz {

// The requested direction does not split the surface into two tori and two
// cylinders bounded by four equal-holonomy saddle connections.
struct NotTwoToriTwoCylinders : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A lattice normal form was requested for a lattice without vertical vectors.
struct NotNormalizable : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A parameter value degenerates the sheared splitting family.
struct DegenerateInstance : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Plane lattices with exact field coordinates
// ---------------------------------------------------------------------------

// Rank-two lattice spanned over the integers by two independent vectors.
// Default-constructed: the integer lattice with unit generators.
struct Lattice {
  Vec2 g1{FieldElement(1), FieldElement(0)};
  Vec2 g2{FieldElement(0), FieldElement(1)};

  Lattice() = default;
  Lattice(const Vec2& a, const Vec2& b) : g1(a), g2(b) {
    if (cross(g1, g2).is_zero())
      throw SingularMatrix("lattice generators are dependent");
  }

  FieldElement det() const { return cross(g1, g2); }
  FieldElement area() const { return det().abs(); }
};

namespace detail {

// Basis of the module generated over the integers by exact plane vectors.
// Each vector is flattened to six integers (three rational coordinates per
// plane coordinate, denominators cleared), and column-style Euclidean
// elimination produces an echelon basis; the result has one vector per unit
// of module rank.
inline std::vector<Vec2> integer_span_basis(const std::vector<Vec2>& gens) {
  using Col = std::array<Integer, 6>;
  Integer den(1);
  auto foldDen = [&](const FieldElement& x) {
    const Rational* cs[3] = {&x.coeff0(), &x.coeff1(), &x.coeff2()};
    for (const Rational* q : cs) {
      Integer d = q->get_den();
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
    }
  };
  for (const Vec2& v : gens) {
    foldDen(v.x);
    foldDen(v.y);
  }
  std::vector<Col> active;
  for (const Vec2& v : gens) {
    Col c;
    int k = 0;
    const FieldElement* xy[2] = {&v.x, &v.y};
    for (const FieldElement* fe : xy) {
      const Rational* cs[3] = {&fe->coeff0(), &fe->coeff1(), &fe->coeff2()};
      for (const Rational* q : cs) {
        Rational scaled = *q * Rational(den);
        if (scaled.get_den() != 1)
          throw std::logic_error("denominator clearing failed");
        c[k++] = scaled.get_num();
      }
    }
    active.push_back(std::move(c));
  }
  std::vector<Col> basis;
  for (int row = 0; row < 6; ++row) {
    for (;;) {
      std::vector<int> nz;
      for (int i = 0; i < static_cast<int>(active.size()); ++i)
        if (sgn(active[i][row]) != 0) nz.push_back(i);
      if (nz.empty()) break;
      if (nz.size() == 1) {
        Col p = active[nz[0]];
        if (sgn(p[row]) < 0)
          for (Integer& e : p) e = -e;
        basis.push_back(std::move(p));
        active.erase(active.begin() + nz[0]);
        break;
      }
      int best = nz[0];
      for (int i : nz)
        if (mpz_cmpabs(active[i][row].get_mpz_t(),
                       active[best][row].get_mpz_t()) < 0)
          best = i;
      for (int i : nz) {
        if (i == best) continue;
        Integer q = active[i][row] / active[best][row];
        if (sgn(q) != 0)
          for (int r = 0; r < 6; ++r) active[i][r] -= q * active[best][r];
      }
    }
  }
  std::vector<Vec2> out;
  for (const Col& c : basis) {
    auto fe = [&](int base) {
      Rational r0(c[base]), r1(c[base + 1]), r2(c[base + 2]), D(den);
      return FieldElement(r0 / D, r1 / D, r2 / D);
    };
    out.push_back(Vec2{fe(0), fe(3)});
  }
  return out;
}

}  // namespace detail

// Lattice generated over the integers by a list of period vectors.  Throws
// std::invalid_argument unless the span is a discrete rank-two subgroup of
// the plane.
inline Lattice lattice_from_periods(const std::vector<Vec2>& periods) {
  std::vector<Vec2> basis = detail::integer_span_basis(periods);
  if (basis.size() != 2)
    throw std::invalid_argument("periods generate a module of rank " +
                                std::to_string(basis.size()) +
                                ", not a plane lattice");
  if (cross(basis[0], basis[1]).is_zero())
    throw std::invalid_argument("period module is dense in a line, not a lattice");
  return Lattice(basis[0], basis[1]);
}

// Whether two lattices coincide as subsets of the plane.
inline bool same_lattice(const Lattice& A, const Lattice& B) {
  const FieldElement d = B.det();
  auto isInt = [](const FieldElement& x) {
    return x.is_rational() && x.rational_value().get_den() == 1;
  };
  auto inB = [&](const Vec2& v) {
    FieldElement m = cross(v, B.g2) / d;
    FieldElement n = cross(B.g1, v) / d;
    return isInt(m) && isInt(n);
  };
  if (!inB(A.g1) || !inB(A.g2)) return false;
  FieldElement r = A.det() / d;
  if (!r.is_rational()) return false;
  const Rational& q = r.rational_value();
  return q == 1 || q == -1;
}

// Normal form <(0, a), (b, c)> of a lattice that contains a vertical
// vector: a and b positive and 0 <= c < a.  Such a form exists exactly when
// the generators' horizontal parts are rationally dependent.
struct LatticeNormalForm {
  FieldElement a, b, c;
};

inline LatticeNormalForm normalize_lattice(const Lattice& L) {
  auto scale = [](const Integer& k, const Vec2& v) {
    FieldElement f((Rational(k)));
    return Vec2{f * v.x, f * v.y};
  };
  Vec2 w, u;
  if (L.g1.x.is_zero()) {
    w = L.g1;
    u = L.g2;
  } else if (L.g2.x.is_zero()) {
    w = L.g2;
    u = L.g1;
  } else {
    FieldElement r = L.g1.x / L.g2.x;
    if (!r.is_rational())
      throw NotNormalizable("lattice contains no vertical vector");
    const Rational& q = r.rational_value();
    Integer p = q.get_num(), qq = q.get_den();
    // w = qq*g1 - p*g2 is vertical, and primitive because gcd(p, qq) = 1.
    w = scale(qq, L.g1) - scale(p, L.g2);
    Integer g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), qq.get_mpz_t(),
               p.get_mpz_t());
    if (g != 1) throw std::logic_error("gcd of coprime integers is not one");
    // The basis change [[qq, -p], [t, s]] has determinant qq*s + p*t = 1.
    u = scale(t, L.g1) + scale(s, L.g2);
  }
  if (w.y.sign() < 0) w = -w;
  if (u.x.is_zero()) throw std::logic_error("degenerate vertical completion");
  if (u.x.sign() < 0) u = -u;
  FieldElement a = w.y, b = u.x, c = u.y;
  Integer k = (c / a).floor();
  c -= FieldElement((Rational(k))) * a;
  return LatticeNormalForm{a, b, c};
}

// Vertical displacement, as a fraction of the vertical circumference, of the
// first return of the rightward horizontal flow on the torus with the given
// lattice normal form.
inline FieldElement torus_twist(const LatticeNormalForm& nf) {
  if (nf.c.is_zero()) return FieldElement(0);
  return (nf.a - nf.c) / nf.a;
}

// ---------------------------------------------------------------------------
// Unipotent-orbit hypotheses for a pair of tori (Ratner-type criteria)
// ---------------------------------------------------------------------------

// For two flat tori, the orbit of the pair under the common horizontal
// unipotent flow equidistributes in the product when neither lattice has a
// horizontal vector and the square roots of the two areas generate distinct
// fields over the rationals.  The report records each hypothesis separately.
struct RatnerReport {
  LatticeNormalForm n1, n2;
  FieldElement area1, area2;
  bool noHorizontal1 = false, noHorizontal2 = false;
  bool sqrtArea1NotInField = false, sqrtArea2NotInField = false;
  bool distinctExtensions = false;
  std::optional<bool> distinctOverQ;
  std::string criterion;

  bool all_hold() const {
    return noHorizontal1 && noHorizontal2 && distinctOverQ.has_value() &&
           *distinctOverQ;
  }
};

inline RatnerReport ratner_hypotheses(const Lattice& L1, const Lattice& L2) {
  RatnerReport R;
  R.n1 = normalize_lattice(L1);
  R.n2 = normalize_lattice(L2);
  R.area1 = L1.area();
  R.area2 = L2.area();
  R.noHorizontal1 = !(R.n1.c / R.n1.a).is_rational();
  R.noHorizontal2 = !(R.n2.c / R.n2.a).is_rational();
  R.sqrtArea1NotInField = !fe_is_square(R.area1);
  R.sqrtArea2NotInField = !fe_is_square(R.area2);
  R.distinctExtensions = sqrt_extension_distinct(R.area1, R.area2);
  if (R.distinctExtensions) {
    R.distinctOverQ = true;
    R.criterion =
        "sqrt(area1) and sqrt(area2) generate distinct quadratic extensions "
        "of the cubic field, hence distinct fields over the rationals";
  } else {
    FieldElement ratio = R.area1 / R.area2;
    if (ratio.is_rational()) {
      const Rational& q = ratio.rational_value();
      Integer num = q.get_num(), denq = q.get_den();
      if (mpz_perfect_square_p(num.get_mpz_t()) &&
          mpz_perfect_square_p(denq.get_mpz_t())) {
        R.distinctOverQ = false;
        R.criterion =
            "the area ratio is the square of a rational, so the square roots "
            "generate one field over the rationals";
      }
    }
    if (!R.distinctOverQ.has_value())
      R.criterion =
          "inconclusive: the extensions of the cubic field coincide and the "
          "area ratio is not a rational square";
  }
  return R;
}

// ---------------------------------------------------------------------------
// Cutting a surface along the saddle connections of a direction
// ---------------------------------------------------------------------------

namespace detail {

// One node of the cyclic boundary of a cut piece.  The tag describes the
// boundary arc leaving this node toward the next node.
struct CutNode {
  Vec2 pos;
  bool slit = false;      // true: one side of a cut arc
  int origEdge = -1;      // !slit: index of the original polygon edge
  int conn = -1;          // slit: index of the cut arc
  bool leftSide = false;  // slit: the piece lies left of the traced arc
};

struct CutPiece {
  int poly = -1;
  std::vector<CutNode> ring;  // counterclockwise
};

struct Chord {
  Vec2 from, to;  // oriented along the traced direction
  int conn = -1;
};

// Index of the ring node at the given position, inserting one on the
// interior of an original-edge arc when necessary.
inline int ring_node_at(CutPiece& pc, const Vec2& pos) {
  const int m = static_cast<int>(pc.ring.size());
  for (int i = 0; i < m; ++i)
    if (pc.ring[i].pos == pos) return i;
  for (int i = 0; i < m; ++i) {
    const CutNode& a = pc.ring[i];
    const CutNode& b = pc.ring[(i + 1) % m];
    Vec2 e = b.pos - a.pos;
    Vec2 d = pos - a.pos;
    if (!cross(e, d).is_zero()) continue;
    FieldElement t = dot(d, e);
    if (t.sign() <= 0) continue;
    if ((t - dot(e, e)).sign() >= 0) continue;
    if (a.slit)
      throw std::logic_error("cut arc endpoint inside another cut arc");
    CutNode n = a;  // continuation of the same original edge
    n.pos = pos;
    pc.ring.insert(pc.ring.begin() + i + 1, n);
    return i + 1;
  }
  throw std::logic_error("cut arc endpoint not on the piece boundary");
}

// Split one convex piece along a chord.  The piece left of the oriented
// chord traverses it forward; the right piece traverses it backward.
inline void split_piece(const CutPiece& pc, const Chord& ch, CutPiece& left,
                        CutPiece& right) {
  CutPiece work = pc;
  ring_node_at(work, ch.from);
  int j = ring_node_at(work, ch.to);
  int i = ring_node_at(work, ch.from);  // relocate: inserting 'to' may shift
  const int m = static_cast<int>(work.ring.size());
  if (j == (i + 1) % m || i == (j + 1) % m)
    throw NotTwoToriTwoCylinders(
        "a saddle connection runs along a polygon edge; cutting along such a "
        "direction is not supported");
  left.poly = right.poly = pc.poly;
  left.ring.clear();
  right.ring.clear();
  CutNode cut;
  cut.slit = true;
  cut.conn = ch.conn;
  cut.pos = ch.from;
  cut.leftSide = true;
  left.ring.push_back(cut);
  for (int k = j; k != i; k = (k + 1) % m) left.ring.push_back(work.ring[k]);
  cut.pos = ch.to;
  cut.leftSide = false;
  right.ring.push_back(cut);
  for (int k = i; k != j; k = (k + 1) % m) right.ring.push_back(work.ring[k]);
}

// Side of the splitting chord a second, disjoint chord lies on: positive for
// left.  Parallel arcs on one line inside a convex polygon cannot happen.
inline int chord_side(const Chord& ch, const Chord& c) {
  const FieldElement half((Rational(1, 2)));
  Vec2 mid{half * (c.from.x + c.to.x), half * (c.from.y + c.to.y)};
  FieldElement s = cross(ch.to - ch.from, mid - ch.from);
  if (s.is_zero())
    throw std::logic_error("parallel cut arcs share a line inside one polygon");
  return s.sign();
}

// Cut one polygon along all its chords.
inline std::vector<CutPiece> subdivide_polygon(const TranslationSurface& S,
                                               int p,
                                               std::vector<Chord> chords) {
  CutPiece base;
  base.poly = p;
  const TranslationSurface::Polygon& P = S.polygon(p);
  for (int v = 0; v < static_cast<int>(P.size()); ++v) {
    CutNode nd;
    nd.pos = P[v];
    nd.origEdge = v;
    base.ring.push_back(nd);
  }
  std::vector<CutPiece> out;
  std::vector<std::pair<CutPiece, std::vector<Chord>>> stack;
  stack.emplace_back(std::move(base), std::move(chords));
  while (!stack.empty()) {
    auto [pc, chs] = std::move(stack.back());
    stack.pop_back();
    if (chs.empty()) {
      out.push_back(std::move(pc));
      continue;
    }
    Chord ch = chs.back();
    chs.pop_back();
    CutPiece L, R;
    split_piece(pc, ch, L, R);
    std::vector<Chord> lch, rch;
    for (const Chord& c : chs)
      (chord_side(ch, c) > 0 ? lch : rch).push_back(c);
    stack.emplace_back(std::move(L), std::move(lch));
    stack.emplace_back(std::move(R), std::move(rch));
  }
  return out;
}

}  // namespace detail

// One complementary piece of the splitting, closed up along its two cut
// sides.
struct SplitPiece {
  bool isCylinder = false;
  Lattice lattice;     // period lattice of the closed-up piece
  FieldElement area;   // flat area; equals the lattice covolume
  Vec2 crossing;       // translation matching the two cut sides
  Vec2 circumference;  // primitive boundary period (cylinders only)
  std::array<int, 2> sides{0, 0};  // bounding connection labels, ascending
};

// A direction together with its four equal-holonomy saddle connections and
// the two tori and two cylinders they cut the surface into.
struct TwoToriTwoCylinders {
  Vec2 direction;
  Vec2 beta;  // common holonomy of the four connections
  std::vector<SaddleConnection> connections;  // relabeled 1..4 in trace order
  SplitPiece T1, T2;  // tori, by decreasing area (ties: smaller label)
  SplitPiece C1, C2;  // cylinders, by smaller bounding label
  FieldElement totalArea;
};

// Cut the surface along the saddle connections of the given direction and
// close up the complementary pieces.  Throws NotTwoToriTwoCylinders unless
// there are exactly four connections with one common holonomy vector whose
// complement consists of two cylinders and two once-slit tori.
inline TwoToriTwoCylinders split_two_tori_two_cylinders(
    const TranslationSurface& S, const Vec2& direction, int maxSteps = 4096) {
  detail::DirectionTrace tr = detail::trace_direction(S, direction, maxSteps);

  std::vector<int> fin;
  for (int i = 0; i < static_cast<int>(tr.conns.size()); ++i)
    if (tr.conns[i].finished) fin.push_back(i);
  if (fin.size() != 4)
    throw NotTwoToriTwoCylinders(
        "expected exactly four saddle connections in the direction, found " +
        std::to_string(fin.size()));
  const Vec2 beta = tr.conns[fin[0]].holonomy;
  for (int i : fin)
    if (!(tr.conns[i].holonomy == beta))
      throw NotTwoToriTwoCylinders(
          "the four saddle connections do not share one holonomy vector");

  // Cut every polygon along the connection segments it carries.
  std::vector<std::vector<detail::Chord>> chords(S.num_polygons());
  for (int k = 0; k < 4; ++k)
    for (const TraceSegment& sg : tr.conns[fin[k]].segments)
      chords[sg.poly].push_back(detail::Chord{sg.from, sg.to, k});
  std::vector<detail::CutPiece> pieces;
  for (int p = 0; p < S.num_polygons(); ++p)
    for (detail::CutPiece& pc : detail::subdivide_polygon(S, p, chords[p]))
      pieces.push_back(std::move(pc));
  const int NP = static_cast<int>(pieces.size());

  // Match the subdivided original edges across the surface's identifications.
  using GKey = std::pair<std::pair<int, int>, std::array<FieldElement, 4>>;
  auto gkey = [](int poly, int edge, const Vec2& a, const Vec2& b) {
    return GKey{{poly, edge}, {a.x, a.y, b.x, b.y}};
  };
  struct ERef {
    int piece, node;
  };
  std::map<GKey, ERef> edgeAt;
  for (int q = 0; q < NP; ++q) {
    const detail::CutPiece& pc = pieces[q];
    const int m = static_cast<int>(pc.ring.size());
    for (int k = 0; k < m; ++k) {
      if (pc.ring[k].slit) continue;
      const Vec2& A = pc.ring[k].pos;
      const Vec2& B = pc.ring[(k + 1) % m].pos;
      if (!edgeAt.insert({gkey(pc.poly, pc.ring[k].origEdge, A, B), ERef{q, k}})
               .second)
        throw std::logic_error("duplicate boundary sub-edge");
    }
  }
  struct GluePair {
    int a, b;    // pieces
    Vec2 shift;  // a-chart point x sits at x + shift in the b-chart
  };
  std::vector<GluePair> glues;
  std::map<std::pair<int, int>, std::pair<std::pair<int, int>, Vec2>> glueAt;
  {
    std::set<std::pair<int, int>> used;
    for (int q = 0; q < NP; ++q) {
      const detail::CutPiece& pc = pieces[q];
      const int m = static_cast<int>(pc.ring.size());
      for (int k = 0; k < m; ++k) {
        if (pc.ring[k].slit) continue;
        if (used.count({q, k})) continue;
        EdgeRef e{pc.poly, pc.ring[k].origEdge};
        EdgeRef f = S.paired(e);
        Vec2 T = S.crossing_translation(e);
        const Vec2& A = pc.ring[k].pos;
        const Vec2& B = pc.ring[(k + 1) % m].pos;
        auto it = edgeAt.find(gkey(f.poly, f.edge, B + T, A + T));
        if (it == edgeAt.end())
          throw std::logic_error(
              "cut points do not match across an edge identification");
        ERef o = it->second;
        used.insert({q, k});
        used.insert({o.piece, o.node});
        glues.push_back({q, o.piece, T});
        glueAt[{q, k}] = {{o.piece, o.node}, T};
        glueAt[{o.piece, o.node}] = {{q, k}, -T};
      }
    }
  }

  // Components of the cut surface, with a developed translation per piece.
  std::vector<std::vector<std::pair<int, Vec2>>> nbr(NP);
  for (const GluePair& g : glues) {
    nbr[g.a].push_back({g.b, g.shift});
    nbr[g.b].push_back({g.a, -g.shift});
  }
  std::vector<int> comp(NP, -1);
  std::vector<Vec2> dev(NP);
  int ncomp = 0;
  for (int s = 0; s < NP; ++s) {
    if (comp[s] != -1) continue;
    comp[s] = ncomp;
    std::vector<int> bfs{s};
    while (!bfs.empty()) {
      int q = bfs.back();
      bfs.pop_back();
      for (const auto& [o, T] : nbr[q]) {
        if (comp[o] != -1) continue;
        comp[o] = ncomp;
        dev[o] = dev[q] - T;
        bfs.push_back(o);
      }
    }
    ++ncomp;
  }
  if (ncomp != 4)
    throw NotTwoToriTwoCylinders("cutting yields " + std::to_string(ncomp) +
                                 " pieces, expected two tori and two cylinders");

  // Periods of the developed gluing loops, per component.
  std::vector<std::vector<Vec2>> periods(4);
  for (const GluePair& g : glues) {
    if (comp[g.a] != comp[g.b])
      throw std::logic_error("gluing crosses components");
    periods[comp[g.a]].push_back(dev[g.a] - dev[g.b] - g.shift);
  }

  // Group the slit arcs by connection and side; find each side's component
  // and the developed position of the connection's start point on it.
  struct SideInfo {
    int component = -1;
    bool leftSide = false;
    int count = 0;
    bool haveStart = false;
    Vec2 startDev;
  };
  std::map<std::pair<int, int>, SideInfo> sideOf;  // (conn, 0=left/1=right)
  for (int q = 0; q < NP; ++q) {
    const detail::CutPiece& pc = pieces[q];
    const int m = static_cast<int>(pc.ring.size());
    for (int k = 0; k < m; ++k) {
      const detail::CutNode& nd = pc.ring[k];
      if (!nd.slit) continue;
      SideInfo& si = sideOf[{nd.conn, nd.leftSide ? 0 : 1}];
      if (si.count == 0) {
        si.component = comp[q];
        si.leftSide = nd.leftSide;
      } else if (si.component != comp[q]) {
        throw NotTwoToriTwoCylinders(
            "one side of a connection borders two different pieces");
      }
      ++si.count;
      const TraceSegment& s0 = tr.conns[fin[nd.conn]].segments.front();
      if (pc.poly == s0.poly) {
        const Vec2& endPos = pc.ring[(k + 1) % m].pos;
        if ((nd.leftSide && nd.pos == s0.from) ||
            (!nd.leftSide && endPos == s0.from)) {
          if (si.haveStart) throw std::logic_error("ambiguous side start");
          si.haveStart = true;
          si.startDev = dev[q] + s0.from;
        }
      }
    }
  }
  if (sideOf.size() != 8)
    throw std::logic_error("expected eight bounded connection sides");
  for (const auto& [key, si] : sideOf) {
    if (si.count != static_cast<int>(tr.conns[fin[key.first]].segments.size()))
      throw std::logic_error("side sub-arc count mismatch");
    if (!si.haveStart) throw std::logic_error("side start not found");
  }
  std::vector<std::vector<std::pair<int, int>>> csides(4);
  for (const auto& [key, si] : sideOf) csides[si.component].push_back(key);
  std::vector<Vec2> crossingOf(4);
  for (int c = 0; c < 4; ++c) {
    std::sort(csides[c].begin(), csides[c].end());
    if (csides[c].size() != 2)
      throw NotTwoToriTwoCylinders(
          "a piece is bounded by " + std::to_string(csides[c].size()) +
          " connection sides, expected two");
    const SideInfo& s0 = sideOf.at(csides[c][0]);
    const SideInfo& s1 = sideOf.at(csides[c][1]);
    if (s0.leftSide == s1.leftSide)
      throw NotTwoToriTwoCylinders(
          "the two sides bounding a piece have equal handedness");
    const SideInfo& L = s0.leftSide ? s0 : s1;
    const SideInfo& R = s0.leftSide ? s1 : s0;
    crossingOf[c] = R.startDev - L.startDev;
  }

  // Classify each piece: it is a flat cylinder exactly when the boundary is
  // straight, i.e. every boundary corner has total angle pi.  The corner at
  // the end of a slit arc is developed by fanning counterclockwise through
  // the glued pieces; the angle is pi exactly when the departure arc is
  // opposite the arrival arc and every crossed edge ray stays strictly on
  // one side.
  std::size_t totalNodes = 0;
  for (const detail::CutPiece& pc : pieces) totalNodes += pc.ring.size();
  auto edgeDir = [&](int q, int k) {
    const std::vector<detail::CutNode>& r = pieces[q].ring;
    const int m = static_cast<int>(r.size());
    return r[(k + 1) % m].pos - r[k].pos;
  };
  auto cornerFlat = [&](int q0, int k0) {
    Vec2 v0 = -edgeDir(q0, k0);
    int q = q0;
    int k = (k0 + 1) % static_cast<int>(pieces[q0].ring.size());
    for (std::size_t guard = 0; guard <= totalNodes; ++guard) {
      Vec2 u = edgeDir(q, k);
      if (pieces[q].ring[k].slit)
        return cross(v0, u).is_zero() && dot(v0, u).sign() < 0;
      if (cross(v0, u).sign() >= 0) return false;
      auto it = glueAt.find({q, k});
      if (it == glueAt.end()) throw std::logic_error("unglued boundary arc");
      q = it->second.first.first;
      k = (it->second.first.second + 1) %
          static_cast<int>(pieces[q].ring.size());
    }
    throw std::logic_error("boundary corner walk did not terminate");
  };
  std::vector<bool> isCyl(4, true);
  for (int q = 0; q < NP; ++q) {
    const int m = static_cast<int>(pieces[q].ring.size());
    for (int k = 0; k < m; ++k)
      if (pieces[q].ring[k].slit && !cornerFlat(q, k)) isCyl[comp[q]] = false;
  }

  // Flat areas per component.
  std::vector<FieldElement> compArea(4);
  for (int q = 0; q < NP; ++q) {
    TranslationSurface::Polygon poly;
    for (const detail::CutNode& nd : pieces[q].ring) poly.push_back(nd.pos);
    compArea[comp[q]] += TranslationSurface::polygon_area(poly);
  }

  // Period lattices: gluing-loop periods plus the side-matching translation.
  std::vector<SplitPiece> out(4);
  for (int c = 0; c < 4; ++c) {
    std::vector<Vec2> internal = detail::integer_span_basis(periods[c]);
    std::vector<Vec2> gens = periods[c];
    gens.push_back(crossingOf[c]);
    Lattice L;
    try {
      L = lattice_from_periods(gens);
    } catch (const std::invalid_argument& ex) {
      throw NotTwoToriTwoCylinders(std::string("piece periods degenerate: ") +
                                   ex.what());
    }
    SplitPiece& sp = out[c];
    sp.isCylinder = isCyl[c];
    sp.lattice = L;
    sp.area = compArea[c];
    sp.crossing = crossingOf[c];
    sp.sides = {csides[c][0].first + 1, csides[c][1].first + 1};
    if (isCyl[c]) {
      if (internal.size() != 1)
        throw NotTwoToriTwoCylinders(
            "a straight-boundary piece has boundary periods of rank " +
            std::to_string(internal.size()));
      Vec2 w = internal[0];
      if (!cross(w, direction).is_zero())
        throw NotTwoToriTwoCylinders(
            "cylinder circumference is not parallel to the direction");
      if (dot(w, direction).sign() < 0) w = -w;
      sp.circumference = w;
    }
    if (!(sp.area == L.area()))
      throw NotTwoToriTwoCylinders(
          "piece area does not match its lattice covolume");
  }

  std::vector<int> cyl, tor;
  for (int c = 0; c < 4; ++c) (isCyl[c] ? cyl : tor).push_back(c);
  if (cyl.size() != 2)
    throw NotTwoToriTwoCylinders("found " + std::to_string(cyl.size()) +
                                 " cylinder pieces, expected two");
  if (out[cyl[1]].sides[0] < out[cyl[0]].sides[0]) std::swap(cyl[0], cyl[1]);
  FieldElement d = out[tor[0]].area - out[tor[1]].area;
  if (d.sign() < 0 ||
      (d.is_zero() && out[tor[1]].sides[0] < out[tor[0]].sides[0]))
    std::swap(tor[0], tor[1]);
  if (!(out[cyl[0]].area == out[cyl[1]].area))
    throw NotTwoToriTwoCylinders("the two cylinder pieces differ in area");

  FieldElement total = compArea[0] + compArea[1] + compArea[2] + compArea[3];
  if (!(total == S.area()))
    throw std::logic_error("piece areas do not sum to the surface area");

  TwoToriTwoCylinders R;
  R.direction = direction;
  R.beta = beta;
  for (int k = 0; k < 4; ++k) {
    const detail::TracedConnection& tc = tr.conns[fin[k]];
    SaddleConnection sc;
    sc.holonomy = tc.holonomy;
    sc.fromCone = tc.fromCone;
    sc.toCone = tc.toCone;
    sc.label = k + 1;
    sc.segments = tc.segments;
    R.connections.push_back(std::move(sc));
  }
  R.T1 = out[tor[0]];
  R.T2 = out[tor[1]];
  R.C1 = out[cyl[0]];
  R.C2 = out[cyl[1]];
  R.totalArea = total;
  return R;
}

// ---------------------------------------------------------------------------
// Renormalized splitting
// ---------------------------------------------------------------------------

// The splitting carried to coordinates where the connections become the unit
// horizontal vector and the first cylinder's transverse crossing (taken
// parallel to a chosen crossing direction) becomes vertical of length one.
struct AdjustedSplitting {
  Mat2 renorm;                  // determinant-positive renormalizing matrix
  TranslationSurface adjusted;  // the surface in renormalized coordinates
  TwoToriTwoCylinders split;    // its splitting in the horizontal direction
  FieldElement connLen;         // horizontal connection length (unit)
  FieldElement heightC1;        // vertical extent of the first cylinder
  FieldElement vertT1, vertT2;  // vertical circumferences of the tori
  LatticeNormalForm nfT1, nfT2;
  Vec2 shiftT1, shiftT2;  // torus crossings minus one horizontal unit step
  FieldElement twistT1, twistT2;
  FieldElement areaT1, areaT2, areaC;
  bool cylinderCrossingsAgree = false;  // the two cylinders cross identically
};

inline AdjustedSplitting build_adjusted_splitting(const TranslationSurface& S,
                                                  const Vec2& slitDirection,
                                                  const Vec2& crossingDirection,
                                                  int maxSteps = 4096) {
  if (cross(slitDirection, crossingDirection).is_zero())
    throw std::invalid_argument(
        "crossing direction is parallel to the slit direction");
  TwoToriTwoCylinders base =
      split_two_tori_two_cylinders(S, slitDirection, maxSteps);

  // Transverse crossing of the first cylinder, projected parallel to its
  // boundary onto the crossing direction.
  const Vec2& w = base.C1.circumference;
  const Vec2& t = base.C1.crossing;
  FieldElement lam =
      cross(crossingDirection, t) / cross(crossingDirection, w);
  Vec2 g2 = t - Vec2{lam * w.x, lam * w.y};
  if (g2.is_zero()) throw std::logic_error("cylinder crossing degenerates");
  // Orient the crossing so that (connection, -crossing) is a positive basis.
  if (cross(base.beta, g2).sign() > 0) g2 = -g2;
  Mat2 A = Mat2::from_columns(base.beta, -g2).inverse();
  TranslationSurface S2 = apply_matrix(S, A);
  TwoToriTwoCylinders sp = split_two_tori_two_cylinders(
      S2, Vec2{FieldElement(1), FieldElement(0)}, maxSteps);
  const Vec2 unitX{FieldElement(1), FieldElement(0)};
  if (!(sp.beta == unitX))
    throw std::logic_error(
        "renormalized connections do not have unit horizontal holonomy");

  FieldElement connLen(1);
  if (!sp.C1.circumference.y.is_zero() || sp.C1.circumference.x.sign() <= 0)
    throw std::logic_error("renormalized cylinder boundary is not horizontal");
  FieldElement heightC1 = sp.C1.area / sp.C1.circumference.x;

  LatticeNormalForm nf1 = normalize_lattice(sp.T1.lattice);
  LatticeNormalForm nf2 = normalize_lattice(sp.T2.lattice);

  // Shift vectors: adding the unit horizontal step to each shift gives the
  // normal-form crossing generator (b, c) of the corresponding torus lattice.
  Vec2 shiftT1{nf1.b - FieldElement(1), nf1.c};
  Vec2 shiftT2{nf2.b - FieldElement(1), nf2.c};

  FieldElement tw1 = torus_twist(nf1);
  FieldElement tw2 = torus_twist(nf2);

  auto reducedCrossing = [&](const SplitPiece& C) {
    Vec2 c = C.crossing;
    if (c.y.sign() < 0) c = -c;
    Integer k = (c.x / C.circumference.x).floor();
    c.x -= FieldElement((Rational(k))) * C.circumference.x;
    return c;
  };
  bool agree = reducedCrossing(sp.C1) == reducedCrossing(sp.C2);

  FieldElement a1 = sp.T1.area, a2 = sp.T2.area, aC = sp.C1.area;
  return AdjustedSplitting{A,
                           std::move(S2),
                           std::move(sp),
                           connLen,
                           heightC1,
                           nf1.a,
                           nf2.a,
                           nf1,
                           nf2,
                           shiftT1,
                           shiftT2,
                           tw1,
                           tw2,
                           a1,
                           a2,
                           aC,
                           agree};
}

// ---------------------------------------------------------------------------
// Bivariate polynomials over the field (two shear parameters)
// ---------------------------------------------------------------------------

class BivarPoly {
 public:
  using Key = std::pair<int, int>;  // exponents of the two parameters

  BivarPoly() = default;
  explicit BivarPoly(const FieldElement& c) { add(0, 0, c); }
  static BivarPoly monomial(int i, int j, const FieldElement& c) {
    BivarPoly p;
    p.add(i, j, c);
    return p;
  }
  static BivarPoly u1() { return monomial(1, 0, FieldElement(1)); }
  static BivarPoly u2() { return monomial(0, 1, FieldElement(1)); }

  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, FieldElement>& terms() const { return terms_; }

  void add(int i, int j, const FieldElement& c) {
    if (c.is_zero()) return;
    auto it = terms_.find({i, j});
    if (it == terms_.end()) {
      terms_.emplace(Key{i, j}, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  BivarPoly& operator+=(const BivarPoly& o) {
    for (const auto& [k, v] : o.terms_) add(k.first, k.second, v);
    return *this;
  }
  BivarPoly& operator-=(const BivarPoly& o) {
    for (const auto& [k, v] : o.terms_) add(k.first, k.second, -v);
    return *this;
  }
  friend BivarPoly operator+(BivarPoly a, const BivarPoly& b) {
    a += b;
    return a;
  }
  friend BivarPoly operator-(BivarPoly a, const BivarPoly& b) {
    a -= b;
    return a;
  }
  BivarPoly operator-() const {
    BivarPoly r;
    for (const auto& [k, v] : terms_) r.add(k.first, k.second, -v);
    return r;
  }
  friend BivarPoly operator*(const BivarPoly& a, const BivarPoly& b) {
    BivarPoly r;
    for (const auto& [ka, va] : a.terms_)
      for (const auto& [kb, vb] : b.terms_)
        r.add(ka.first + kb.first, ka.second + kb.second, va * vb);
    return r;
  }
  friend BivarPoly operator*(const FieldElement& s, const BivarPoly& p) {
    BivarPoly r;
    for (const auto& [k, v] : p.terms_) r.add(k.first, k.second, s * v);
    return r;
  }
  bool operator==(const BivarPoly& o) const { return terms_ == o.terms_; }

  FieldElement eval(const FieldElement& a, const FieldElement& b) const {
    FieldElement s(0);
    for (const auto& [k, v] : terms_)
      s += v * a.pow(k.first) * b.pow(k.second);
    return s;
  }
  BivarPoly d1() const {
    BivarPoly r;
    for (const auto& [k, v] : terms_)
      if (k.first > 0) r.add(k.first - 1, k.second, FieldElement(k.first) * v);
    return r;
  }
  BivarPoly d2() const {
    BivarPoly r;
    for (const auto& [k, v] : terms_)
      if (k.second > 0)
        r.add(k.first, k.second - 1, FieldElement(k.second) * v);
    return r;
  }

 private:
  std::map<Key, FieldElement> terms_;
};

struct BivarVec2 {
  BivarPoly x, y;
  Vec2 eval(const FieldElement& a, const FieldElement& b) const {
    return Vec2{x.eval(a, b), y.eval(a, b)};
  }
};

inline BivarVec2 operator+(const BivarVec2& a, const BivarVec2& b) {
  return BivarVec2{a.x + b.x, a.y + b.y};
}
inline BivarPoly cross(const BivarVec2& a, const BivarVec2& b) {
  return a.x * b.y - a.y * b.x;
}

// Ratio of two bivariate polynomials, with derivatives by the quotient rule.
struct BivarRational {
  BivarPoly num, den;

  BivarRational() : num(), den(FieldElement(1)) {}
  BivarRational(BivarPoly n, BivarPoly d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw std::invalid_argument("zero denominator");
  }

  BivarRational d1() const { return {num.d1() * den - num * den.d1(), den * den}; }
  BivarRational d2() const { return {num.d2() * den - num * den.d2(), den * den}; }
  FieldElement eval(const FieldElement& a, const FieldElement& b) const {
    FieldElement d = den.eval(a, b);
    if (d.is_zero()) throw std::domain_error("evaluation at a pole");
    return num.eval(a, b) / d;
  }
};

inline BivarRational operator*(const BivarRational& a, const BivarRational& b) {
  return {a.num * b.num, a.den * b.den};
}
inline BivarRational operator-(const BivarRational& a, const BivarRational& b) {
  return {a.num * b.den - b.num * a.den, a.den * b.den};
}
inline bool equivalent(const BivarRational& a, const BivarRational& b) {
  return a.num * b.den == b.num * a.den;
}

// ---------------------------------------------------------------------------
// Jacobian of the normalized-area coordinate change
// ---------------------------------------------------------------------------

// The change of coordinates (x, y) -> (2x, 2y) / (1 - x - y) between two
// parameterizations of a pair of normalized piece areas has Jacobian
// determinant 4 / (1 - x - y)^3.  The report verifies the identity exactly,
// confirms that a perturbed right-hand side fails, and evaluates at zero.
struct AreaChartReport {
  bool identityHolds = false;
  bool perturbedFails = false;
  FieldElement valueAtOrigin;
};

inline AreaChartReport area_chart_jacobian_check() {
  BivarPoly x = BivarPoly::u1(), y = BivarPoly::u2();
  BivarPoly one(FieldElement(1)), two(FieldElement(2));
  BivarPoly D = one - x - y;
  BivarRational f1{two * x, D}, f2{two * y, D};
  BivarRational J = f1.d1() * f2.d2() - f1.d2() * f2.d1();
  BivarRational target{BivarPoly(FieldElement(4)), D * D * D};
  BivarRational wrong{BivarPoly(FieldElement(3)), D * D * D};
  AreaChartReport r;
  r.identityHolds = equivalent(J, target);
  r.perturbedFails = !equivalent(J, wrong);
  r.valueAtOrigin = J.eval(FieldElement(0), FieldElement(0));
  return r;
}

// ---------------------------------------------------------------------------
// The sheared splitting family
// ---------------------------------------------------------------------------

// Shearing the first torus by u1 and both cylinders by u2 (unit horizontal
// shears of the vertical pieces of the renormalized splitting) produces a
// family of surfaces that split along the direction of the return vector
// V(u1, u2).  The piece lattices become affine families in the parameters.
struct TwistedFamily {
  FieldElement heightC1, vertT1, vertT2, connLen;
  Vec2 shiftT1, shiftT2;
  BivarVec2 V;            // holonomy of the transverse return loop
  BivarVec2 L1g1, L1g2;   // first torus lattice generators
  BivarVec2 L2g1, L2g2;   // second torus lattice generators
  BivarVec2 L3g1, L3g2;   // cylinder lattice generators
  BivarPoly areaT1, areaT2;  // area polynomials, as classically displayed
  BivarPoly areaMapJacobian;  // displayed Jacobian of (u1,u2) -> areas
};

inline TwistedFamily build_twisted_family(const AdjustedSplitting& adj) {
  TwistedFamily F;
  F.heightC1 = adj.heightC1;
  F.vertT1 = adj.vertT1;
  F.vertT2 = adj.vertT2;
  F.connLen = adj.connLen;
  F.shiftT1 = adj.shiftT1;
  F.shiftT2 = adj.shiftT2;
  const BivarPoly u1 = BivarPoly::u1(), u2 = BivarPoly::u2();
  auto C = [](const FieldElement& c) { return BivarPoly(c); };
  const FieldElement two(2);
  const FieldElement vTotal = two * F.heightC1 + F.vertT2 + F.vertT1;
  // V = (2 u2 hC + u1 vT1 + connLen, 2 hC + vT2 + vT1): one horizontal jump
  // across the slit plus the sheared vertical crossings of all four pieces.
  F.V.x = C(two * F.heightC1) * u2 + C(F.vertT1) * u1 + C(F.connLen);
  F.V.y = C(vTotal);
  F.L1g1 = BivarVec2{C(F.vertT1) * u1, C(F.vertT1)};
  F.L1g2 = BivarVec2{F.V.x + C(F.shiftT1.x) + C(F.shiftT1.y) * u1,
                     F.V.y + C(F.shiftT1.y)};
  F.L2g1 = BivarVec2{BivarPoly(), C(F.vertT2)};
  F.L2g2 = BivarVec2{F.V.x + C(F.shiftT2.x), F.V.y + C(F.shiftT2.y)};
  F.L3g1 = BivarVec2{C(F.heightC1) * u2, C(F.heightC1)};
  F.L3g2 = F.V;
  const BivarPoly common =
      C(two * F.heightC1) * u2 + C(F.vertT1) * u1 + C(F.connLen);
  F.areaT1 =
      u1 * C(F.vertT1) * C(vTotal) - C(F.vertT1) * (common + C(F.shiftT1.x));
  F.areaT2 = C(F.vertT2) * (common + C(F.shiftT2.x));
  F.areaMapJacobian =
      C(two * F.heightC1 * F.vertT1 * F.vertT2 * vTotal);
  return F;
}

// Identities satisfied by the family, verified as exact polynomial
// statements in the shear parameters.
struct TwistedFamilyChecks {
  bool areaT1MatchesDet = false;       // displayed area = det of L1
  bool areaT2MatchesDetOpposite = false;  // displayed area = -det of L2
  bool jacobianMatches = false;        // Jacobian of the area map as displayed
  bool jacobianPositive = false;       // it is a positive constant
  bool areaT1Specializes = false;      // |value at 0| = renormalized torus area
  bool areaT2Specializes = false;
  bool baseReturnVector = false;       // V(0,0) = (1, total vertical extent)
  bool cylinderLatticeAreaMatches = false;  // |det L3|(0,0) = cylinder area
  bool firstShiftIrrational = false;   // shiftT1.y / vertT1 is irrational
  bool parallelAvoidance1 = false;     // V-parallel loci are proper lines (L1)
  bool parallelAvoidance2 = false;     // V-parallel loci are proper lines (L2)

  bool all_hold() const {
    return areaT1MatchesDet && areaT2MatchesDetOpposite && jacobianMatches &&
           jacobianPositive && areaT1Specializes && areaT2Specializes &&
           baseReturnVector && cylinderLatticeAreaMatches &&
           firstShiftIrrational && parallelAvoidance1 && parallelAvoidance2;
  }
};

inline TwistedFamilyChecks check_twisted_family(const TwistedFamily& F,
                                                const AdjustedSplitting& adj) {
  TwistedFamilyChecks R;
  R.areaT1MatchesDet = (F.areaT1 == cross(F.L1g1, F.L1g2));
  R.areaT2MatchesDetOpposite = (-F.areaT2 == cross(F.L2g1, F.L2g2));
  BivarPoly J = F.areaT1.d1() * F.areaT2.d2() - F.areaT1.d2() * F.areaT2.d1();
  R.jacobianMatches = (J == F.areaMapJacobian);
  R.jacobianPositive = !F.areaMapJacobian.is_zero() &&
                       F.areaMapJacobian.terms().size() == 1 &&
                       F.areaMapJacobian.terms().begin()->first ==
                           BivarPoly::Key{0, 0} &&
                       F.areaMapJacobian.terms().begin()->second.sign() > 0;
  const FieldElement z(0);
  R.areaT1Specializes = (F.areaT1.eval(z, z).abs() == adj.areaT1);
  R.areaT2Specializes = (F.areaT2.eval(z, z).abs() == adj.areaT2);
  Vec2 V0 = F.V.eval(z, z);
  R.baseReturnVector =
      V0.x == adj.connLen &&
      V0.y == FieldElement(2) * adj.heightC1 + adj.vertT2 + adj.vertT1;
  R.cylinderLatticeAreaMatches =
      (cross(F.L3g1, F.L3g2).eval(z, z).abs() == adj.areaC);
  R.firstShiftIrrational = !(F.shiftT1.y / F.vertT1).is_rational();

  // For every nonzero integer pair (n, p), the locus where n*g1 + p*(g2 - V)
  // is parallel to V must be a proper line in the parameter plane.  This
  // holds exactly when cross(g1, V) and cross(g2 - V, V) are linearly
  // independent over the rationals as polynomials.
  auto avoidance = [&](const BivarVec2& g1, const BivarVec2& g2) {
    BivarVec2 h{g2.x - F.V.x, g2.y - F.V.y};
    BivarPoly P = cross(g1, F.V);
    BivarPoly Q = cross(h, F.V);
    if (P.is_zero() || Q.is_zero()) return false;
    for (const auto& [k, v] : P.terms())
      if (!Q.terms().count(k)) return true;
    for (const auto& [k, v] : Q.terms())
      if (!P.terms().count(k)) return true;
    const auto& [k0, p0] = *P.terms().begin();
    FieldElement lam = p0 / Q.terms().at(k0);
    if (!lam.is_rational()) return true;
    return !(P == lam * Q);
  };
  R.parallelAvoidance1 = avoidance(F.L1g1, F.L1g2);
  R.parallelAvoidance2 = avoidance(F.L2g1, F.L2g2);
  return R;
}

// Unipotent-orbit hypotheses at one parameter value of the family: areas,
// absence of lattice vectors parallel to the return vector, and the field
// hypotheses on the square roots of the areas.
struct TwistedInstanceReport {
  Vec2 V;
  FieldElement area1, area2;
  bool noVectorParallelToV1 = false, noVectorParallelToV2 = false;
  bool sqrtArea1NotInField = false, sqrtArea2NotInField = false;
  bool distinctExtensions = false;

  bool all_hold() const {
    return noVectorParallelToV1 && noVectorParallelToV2 && distinctExtensions;
  }
};

inline TwistedInstanceReport twisted_instance_checks(const TwistedFamily& F,
                                                     const FieldElement& s1,
                                                     const FieldElement& s2) {
  TwistedInstanceReport R;
  R.V = F.V.eval(s1, s2);
  if (R.V.is_zero()) throw DegenerateInstance("return vector vanishes");
  auto latAt = [&](const BivarVec2& a, const BivarVec2& b) {
    Vec2 g1 = a.eval(s1, s2), g2 = b.eval(s1, s2);
    if (cross(g1, g2).is_zero())
      throw DegenerateInstance("torus lattice degenerates");
    return std::pair<Vec2, Vec2>{g1, g2};
  };
  auto [a1, b1] = latAt(F.L1g1, F.L1g2);
  auto [a2, b2] = latAt(F.L2g1, F.L2g2);
  R.area1 = cross(a1, b1).abs();
  R.area2 = cross(a2, b2).abs();
  auto noPar = [&](const Vec2& g1, const Vec2& g2) {
    FieldElement d1 = cross(g1, R.V), d2 = cross(g2, R.V);
    if (d1.is_zero() || d2.is_zero()) return false;
    return !(d1 / d2).is_rational();
  };
  R.noVectorParallelToV1 = noPar(a1, b1);
  R.noVectorParallelToV2 = noPar(a2, b2);
  R.sqrtArea1NotInField = !fe_is_square(R.area1);
  R.sqrtArea2NotInField = !fe_is_square(R.area2);
  R.distinctExtensions = sqrt_extension_distinct(R.area1, R.area2);
  return R;
}

// ---------------------------------------------------------------------------
// Symbolic Lie bracket checks
// ---------------------------------------------------------------------------

// Polynomials with rational coefficients in the seven coefficients of a
// linear form on the Lie algebra below.
class CoeffPoly {
 public:
  using Key = std::array<int, 7>;

  CoeffPoly() = default;
  explicit CoeffPoly(const Rational& c) { add(Key{}, c); }
  static CoeffPoly var(int i) {
    Key k{};
    k[i] = 1;
    CoeffPoly p;
    p.add(k, Rational(1));
    return p;
  }

  bool is_zero() const { return terms_.empty(); }
  void add(const Key& k, const Rational& c) {
    if (sgn(c) == 0) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, c);
    } else {
      it->second += c;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
  }
  CoeffPoly& operator+=(const CoeffPoly& o) {
    for (const auto& [k, v] : o.terms_) add(k, v);
    return *this;
  }
  friend CoeffPoly operator+(CoeffPoly a, const CoeffPoly& b) {
    a += b;
    return a;
  }
  CoeffPoly operator-() const {
    CoeffPoly r;
    for (const auto& [k, v] : terms_) r.add(k, -v);
    return r;
  }
  friend CoeffPoly operator-(const CoeffPoly& a, const CoeffPoly& b) {
    return a + (-b);
  }
  friend CoeffPoly operator*(const CoeffPoly& a, const CoeffPoly& b) {
    CoeffPoly r;
    for (const auto& [ka, va] : a.terms_)
      for (const auto& [kb, vb] : b.terms_) {
        Key k;
        for (int i = 0; i < 7; ++i) k[i] = ka[i] + kb[i];
        r.add(k, va * vb);
      }
    return r;
  }
  friend CoeffPoly operator*(const Rational& s, const CoeffPoly& p) {
    CoeffPoly r;
    for (const auto& [k, v] : p.terms_) r.add(k, s * v);
    return r;
  }
  bool operator==(const CoeffPoly& o) const { return terms_ == o.terms_; }

 private:
  std::map<Key, Rational> terms_;
};

// Element of the seven-dimensional Lie algebra: two commuting copies of the
// standard (nilpotent, diagonal, opposite) sl2 triple plus one central
// nilpotent direction, written in the basis e0..e6 with coefficients that
// are polynomials in the symbolic form coefficients.
using LieElement = std::array<CoeffPoly, 7>;

inline LieElement lie_basis(int i) {
  LieElement e;
  e[i] = CoeffPoly(Rational(1));
  return e;
}
inline LieElement lie_add(const LieElement& a, const LieElement& b) {
  LieElement r;
  for (int i = 0; i < 7; ++i) r[i] = a[i] + b[i];
  return r;
}
inline LieElement lie_sub(const LieElement& a, const LieElement& b) {
  LieElement r;
  for (int i = 0; i < 7; ++i) r[i] = a[i] - b[i];
  return r;
}
inline bool lie_is_zero(const LieElement& a) {
  for (const CoeffPoly& c : a)
    if (!c.is_zero()) return false;
  return true;
}

// Structure constants: within each copy {n, a, u} (indices 0..2 and 3..5),
// [n, a] = -2n, [n, u] = a, [a, u] = -2u; e6 is central.
inline LieElement lie_bracket(const LieElement& X, const LieElement& Y) {
  LieElement Z;
  auto addPair = [&](int i, int j, int k, long c) {
    Z[k] += Rational(c) * (X[i] * Y[j] - X[j] * Y[i]);
  };
  for (int off : {0, 3}) {
    addPair(off + 0, off + 1, off + 0, -2);
    addPair(off + 0, off + 2, off + 1, 1);
    addPair(off + 1, off + 2, off + 2, -2);
  }
  return Z;
}

// Symbolic verification of the bracket bookkeeping used in the orbit-closure
// argument: a subalgebra of the seven-dimensional algebra that surjects onto
// each coordinate either is everything or lies in a linear hyperplane; the
// cleared-denominator generators b_i = a6*e_i - a_i*e6 stay in the
// hyperplane, their brackets recover both sl2 copies scaled by a6^2, and the
// diagonal nilpotent element then recovers the central direction.
struct LieBracketReport {
  bool sl2ConstantsHold = false;   // 2x2 matrix commutators match the table
  bool structureConsistent = false;  // antisymmetry and the Jacobi identity
  bool hyperplaneClosed = false;   // the b_i lie in the kernel of the form
  bool firstCopySpanned = false;   // [b0,b2], [b0,b1], [b2,b1] span copy one
  bool secondCopySpanned = false;  // [b3,b5], [b3,b4], [b5,b4] span copy two
  bool centerRecovered = false;    // e6 = (e0+e3+e6) - e0 - e3

  bool all_hold() const {
    return sl2ConstantsHold && structureConsistent && hyperplaneClosed &&
           firstCopySpanned && secondCopySpanned && centerRecovered;
  }
};

inline LieBracketReport lie_bracket_checks() {
  LieBracketReport R;

  const FieldElement z(0), one(1);
  Mat2 n{z, one, z, z};
  Mat2 a{one, z, z, -one};
  Mat2 u{z, z, one, z};
  auto comm = [](const Mat2& X, const Mat2& Y) { return X * Y - Y * X; };
  const FieldElement m2(-2);
  R.sl2ConstantsHold = comm(n, a) == m2 * n && comm(n, u) == a &&
                       comm(a, u) == m2 * u;

  bool consistent = true;
  std::array<LieElement, 7> e;
  for (int i = 0; i < 7; ++i) e[i] = lie_basis(i);
  for (int i = 0; i < 7 && consistent; ++i)
    for (int j = 0; j < 7 && consistent; ++j) {
      if (!lie_is_zero(lie_add(lie_bracket(e[i], e[j]), lie_bracket(e[j], e[i]))))
        consistent = false;
      for (int k = 0; k < 7 && consistent; ++k) {
        LieElement s = lie_add(
            lie_add(lie_bracket(lie_bracket(e[i], e[j]), e[k]),
                    lie_bracket(lie_bracket(e[j], e[k]), e[i])),
            lie_bracket(lie_bracket(e[k], e[i]), e[j]));
        if (!lie_is_zero(s)) consistent = false;
      }
    }
  R.structureConsistent = consistent;

  LieElement b[6];
  for (int i = 0; i < 6; ++i) {
    b[i][i] = CoeffPoly::var(6);
    b[i][6] = -CoeffPoly::var(i);
  }
  auto formValue = [&](const LieElement& X) {
    CoeffPoly s;
    for (int i = 0; i < 7; ++i) s += CoeffPoly::var(i) * X[i];
    return s;
  };
  bool hp = true;
  for (int i = 0; i < 6; ++i)
    if (!formValue(b[i]).is_zero()) hp = false;
  R.hyperplaneClosed = hp;

  CoeffPoly a6sq = CoeffPoly::var(6) * CoeffPoly::var(6);
  auto isScaledBasis = [&](const LieElement& X, int k, long c) {
    for (int i = 0; i < 7; ++i) {
      CoeffPoly want = (i == k) ? Rational(c) * a6sq : CoeffPoly();
      if (!(X[i] == want)) return false;
    }
    return true;
  };
  R.firstCopySpanned = isScaledBasis(lie_bracket(b[0], b[2]), 1, 1) &&
                       isScaledBasis(lie_bracket(b[0], b[1]), 0, -2) &&
                       isScaledBasis(lie_bracket(b[2], b[1]), 2, 2);
  R.secondCopySpanned = isScaledBasis(lie_bracket(b[3], b[5]), 4, 1) &&
                        isScaledBasis(lie_bracket(b[3], b[4]), 3, -2) &&
                        isScaledBasis(lie_bracket(b[5], b[4]), 5, 2);

  LieElement diag = lie_add(lie_add(e[0], e[3]), e[6]);
  R.centerRecovered =
      lie_is_zero(lie_sub(lie_sub(lie_sub(diag, e[0]), e[3]), e[6])) &&
      formValue(diag) ==
          CoeffPoly::var(0) + CoeffPoly::var(3) + CoeffPoly::var(6);
  return R;
}

}  // namespace ayoz

#endif  // AYOZ_SPLITTING_HPP
