#pragma once

// Exact analysis of completely periodic directions on a translation surface:
// separatrix tracing, saddle connections, cylinder decompositions with
// boundary combinatorics, heights, twists, and the normalizing matrix of a
// direction pair.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "field.hpp"
#include "linalg.hpp"
#include "surface.hpp"

namespace ayoz {

struct DegenerateDirection : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidMarking : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularFrame : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// One straight segment of a traced geodesic inside a single polygon.
struct TraceSegment {
  int poly = -1;
  Vec2 from, to;
};

// A geodesic segment in the queried direction joining two cone points
// (marked points when the surface is non-singular).
struct SaddleConnection {
  Vec2 holonomy;
  int fromCone = -1;
  int toCone = -1;
  int label = 0;  // 1-based
  std::vector<TraceSegment> segments;
};

// Raised when some separatrix did not close up within the step budget; the
// connections that did complete are carried along for inspection.
struct NotDetectedPeriodic : std::runtime_error {
  explicit NotDetectedPeriodic(std::string msg,
                               std::vector<SaddleConnection> done)
      : std::runtime_error(std::move(msg)), partial(std::move(done)) {}
  std::vector<SaddleConnection> partial;
};

// Boundary words of the cylinders over saddle-connection labels.  Cycle i
// belongs to cylinder i; each cycle is stored rotated so that its marked
// element comes first.
struct Combinatorics {
  std::vector<std::vector<int>> bottomCycles, topCycles;
  std::vector<int> bottomMark, topMark;  // m_b(i), m_t(i)
  // Successor permutations over labels 1..k (index 0 unused): the next label
  // encountered along the same boundary walk.
  std::vector<int> piB, piT;
};

// Exact per-cylinder geometry.  All vectors live in the plane of the
// unfolded surface; "coeff" values express a vector parallel to the
// direction theta as (coeff) * theta.
struct CylinderGeom {
  Vec2 width;                  // w_i, boundary holonomy
  FieldElement widthCoeff;     // w_i = widthCoeff * theta
  FieldElement heightY;        // vertical component (h_i)_y, positive
  Vec2 v;                      // cross vector component parallel to theta,
  FieldElement vCoeff;         //   reduced to [0, widthCoeff)
  Vec2 twist;                  // t_i (zero vector for the first cylinder)
  FieldElement twistRatio;     // t_i = twistRatio * w_i
  long twistFloor = 0;         // floor(twistRatio)
  FieldElement twistSquare;          // twistRatio^2
  FieldElement normalizedTwistSquare;  // (twistRatio - twistFloor)^2, in [0,1)
  FieldElement area;           // width_x * heightY
};

struct PeriodicDirectionData {
  Vec2 direction;  // sign-normalized so direction.x > 0
  std::vector<SaddleConnection> saddles;   // sorted by label
  std::vector<CylinderGeom> cylinders;     // sorted by decreasing heightY
  Combinatorics combinatorics;
  long n0 = 0;
  std::vector<FieldElement> L2;  // squared lengths, by label
  std::vector<FieldElement> H;   // heights (h_i)_y, cylinder order
  // Twist data for cylinders 2..p relative to cylinder 1.
  std::vector<FieldElement> twistSquares;            // raw ratio squared
  std::vector<FieldElement> normalizedTwistSquares;  // fractional part squared
  std::vector<long> twistIntegers;                   // floor of the ratio
};

// Chosen marked element per cylinder (labels).  Empty vectors select the
// default: the smallest label of each cycle.
struct MarkingChoice {
  std::vector<int> bottom, top;
};

struct DecomposeOptions {
  long n0 = 0;
  MarkingChoice marking;
  // Optional relabeling applied to the canonical labels: canonical label j
  // becomes relabel[j-1].  Must be a permutation of 1..k.
  std::vector<int> relabel;
  int maxSteps = 4096;
};

struct NormalizingMatrix {
  Mat2 M;          // M * w1 = (1,0)^T and M * tau1 = (0,1)^T
  Vec2 theta;      // the periodic direction
  Vec2 thetaPerp;  // tau1 = h1 + v1 + n0*w1
};

namespace detail {

inline bool same_direction(const Vec2& a, const Vec2& b) {
  return cross(a, b).is_zero() && dot(a, b).sign() > 0;
}

// First exit of the ray P + t*d (t > 0) from the convex polygon p.
struct RayExit {
  FieldElement t;
  Vec2 point;
  bool atVertex = false;
  int vertex = -1;  // valid when atVertex
  int edge = -1;    // valid when !atVertex: the exit point is interior to it
};

inline RayExit ray_exit(const TranslationSurface& S, int p, const Vec2& P,
                        const Vec2& d) {
  int n = S.edge_count(p);
  bool found = false;
  RayExit best;
  for (int e = 0; e < n; ++e) {
    Vec2 E = S.edge_vector(EdgeRef{p, e});
    FieldElement cde = cross(d, E);
    Vec2 rhs = S.vertex(p, e) - P;
    if (cde.is_zero()) {
      // Parallel edge.  If it lies on the ray line itself, its endpoints
      // ahead of P stop the ray (consecutive collinear edges would otherwise
      // hide the vertex between them).
      if (!cross(rhs, d).is_zero()) continue;
      FieldElement dd = dot(d, d);
      for (int q = 0; q < 2; ++q) {
        int vi = (e + q) % n;
        FieldElement t = dot(S.vertex(p, vi) - P, d) / dd;
        if (t.sign() <= 0) continue;
        if (found && (t - best.t).sign() >= 0) continue;
        best.t = t;
        found = true;
        best.atVertex = true;
        best.vertex = vi;
        best.edge = -1;
        best.point = S.vertex(p, vi);
      }
      continue;
    }
    // t*d - s*E = rhs
    FieldElement t = cross(rhs, E) / cde;
    FieldElement s = cross(rhs, d) / cde;
    if (t.sign() <= 0) continue;
    int s0 = s.sign();
    int s1 = (s - FieldElement(1)).sign();
    if (s0 < 0 || s1 > 0) continue;
    if (found && (t - best.t).sign() >= 0) continue;
    best.t = t;
    found = true;
    if (s0 == 0) {
      best.atVertex = true;
      best.vertex = e;
      best.edge = -1;
      best.point = S.vertex(p, e);
    } else if (s1 == 0) {
      best.atVertex = true;
      best.vertex = (e + 1) % n;
      best.edge = -1;
      best.point = S.vertex(p, (e + 1) % n);
    } else {
      best.atVertex = false;
      best.vertex = -1;
      best.edge = e;
      best.point = S.vertex(p, e) + s * E;
    }
  }
  if (!found) throw std::logic_error("ray does not leave the polygon");
  return best;
}

// Sector [u, w) at a polygon corner.
inline void corner_sector(const TranslationSurface& S, const CornerRef& c,
                          Vec2& u, Vec2& w) {
  int n = S.edge_count(c.poly);
  u = S.edge_vector(EdgeRef{c.poly, c.vertex});
  w = -S.edge_vector(EdgeRef{c.poly, (c.vertex + n - 1) % n});
}

inline bool corner_contains(const TranslationSurface& S, const CornerRef& c,
                            const Vec2& d) {
  Vec2 u, w;
  corner_sector(S, c, u, w);
  return TranslationSurface::sector_contains(u, w, d);
}

// A ray germ in direction +theta (outgoing) or -theta (incoming) at a cone
// point, attached to the polygon corner whose sector carries it.
struct Germ {
  CornerRef corner;
  bool outgoing = false;
  int conn = -1;  // connection index, filled after tracing
};

struct TracedConnection {
  std::vector<TraceSegment> segments;
  Vec2 holonomy;
  int fromCone = -1, toCone = -1;
  CornerRef startCorner, endGermCorner;
  bool finished = false;
  int label = 0;
};

struct DirectionTrace {
  Vec2 theta;
  std::vector<int> baseClasses;            // class ids, sorted by base point
  std::vector<std::vector<Germ>> germs;    // per base class, CCW cyclic order
  std::vector<TracedConnection> conns;     // indexed by canonical label - 1
  int unfinished = 0;
};

// Canonical cyclic rotation of a vertex class: start at the corner with the
// lexicographically smallest coordinate (ties by corner id).
inline std::vector<CornerRef> rotated_corners(const TranslationSurface& S,
                                              int cls) {
  const ConeClass& cc = S.vertex_class(cls);
  std::size_t bestPos = 0;
  for (std::size_t i = 1; i < cc.corners.size(); ++i) {
    const Vec2& a = S.vertex(cc.corners[i].poly, cc.corners[i].vertex);
    const Vec2& b =
        S.vertex(cc.corners[bestPos].poly, cc.corners[bestPos].vertex);
    if (TranslationSurface::lex_less(a, b) ||
        (a == b && cc.corners[i] < cc.corners[bestPos]))
      bestPos = i;
  }
  std::vector<CornerRef> out;
  out.reserve(cc.corners.size());
  for (std::size_t i = 0; i < cc.corners.size(); ++i)
    out.push_back(cc.corners[(bestPos + i) % cc.corners.size()]);
  return out;
}

// Trace every separatrix of direction theta emanating from the base classes
// (the singular classes, or every vertex class when the surface is regular).
inline DirectionTrace trace_direction(const TranslationSurface& S,
                                      const Vec2& theta, int maxSteps) {
  if (theta.is_zero()) throw DegenerateDirection("direction is zero");
  if (maxSteps < 1) throw std::invalid_argument("maxSteps must be >= 1");

  DirectionTrace tr;
  tr.theta = theta;
  tr.baseClasses = S.singular_classes();
  if (tr.baseClasses.empty()) {
    for (int c = 0; c < S.num_vertex_classes(); ++c)
      tr.baseClasses.push_back(c);
    std::sort(tr.baseClasses.begin(), tr.baseClasses.end(), [&](int a, int b) {
      return TranslationSurface::lex_less(S.smallest_point(a),
                                          S.smallest_point(b));
    });
  }
  std::map<int, int> coneIndex;  // class id -> base index
  for (std::size_t i = 0; i < tr.baseClasses.size(); ++i)
    coneIndex[tr.baseClasses[i]] = static_cast<int>(i);

  const Vec2 minusTheta = -theta;

  // Germ lists, in canonical cyclic order around each base class.
  std::map<CornerRef, std::pair<int, int>> germAt;  // corner -> (base, pos)
  tr.germs.resize(tr.baseClasses.size());
  for (std::size_t b = 0; b < tr.baseClasses.size(); ++b) {
    std::vector<CornerRef> corners = rotated_corners(S, tr.baseClasses[b]);
    for (const CornerRef& c : corners) {
      bool out = corner_contains(S, c, theta);
      bool in = corner_contains(S, c, minusTheta);
      if (out && in)
        throw std::logic_error("corner sector carries both germ directions");
      if (!out && !in) continue;
      germAt[c] = {static_cast<int>(b), static_cast<int>(tr.germs[b].size())};
      tr.germs[b].push_back(Germ{c, out, -1});
    }
    int turns = S.vertex_class(tr.baseClasses[b]).turns;
    if (static_cast<int>(tr.germs[b].size()) != 2 * turns)
      throw std::logic_error("unexpected germ count at a cone point");
    for (std::size_t i = 0; i < tr.germs[b].size(); ++i)
      if (tr.germs[b][i].outgoing ==
          tr.germs[b][(i + 1) % tr.germs[b].size()].outgoing)
        throw std::logic_error("germs do not alternate around a cone point");
  }

  // Trace one separatrix per outgoing germ, in canonical order.
  for (std::size_t b = 0; b < tr.baseClasses.size(); ++b) {
    for (Germ& g : tr.germs[b]) {
      if (!g.outgoing) continue;
      TracedConnection tc;
      tc.fromCone = static_cast<int>(b);
      tc.startCorner = g.corner;
      int p = g.corner.poly;
      Vec2 P = S.vertex(g.corner.poly, g.corner.vertex);
      int steps = 0;
      while (true) {
        if (++steps > maxSteps) break;
        RayExit ex = ray_exit(S, p, P, theta);
        tc.segments.push_back(TraceSegment{p, P, ex.point});
        if (!ex.atVertex) {
          Vec2 t = S.crossing_translation(EdgeRef{p, ex.edge});
          EdgeRef f = S.paired(EdgeRef{p, ex.edge});
          P = ex.point + t;
          p = f.poly;
          continue;
        }
        CornerRef vc{p, ex.vertex};
        int cls = S.class_of(vc);
        auto base = coneIndex.find(cls);
        if (base != coneIndex.end()) {
          // Terminal cone point.  The incoming germ sits in the sector of
          // the arrival corner itself (interior approach) or of the next
          // corner around the vertex (approach along an edge).
          CornerRef germCorner = vc;
          if (!corner_contains(S, germCorner, minusTheta)) {
            germCorner = S.next_corner_ccw(vc);
            Vec2 u, w;
            corner_sector(S, germCorner, u, w);
            if (!same_direction(u, minusTheta))
              throw std::logic_error("arrival germ not found");
          }
          tc.toCone = base->second;
          tc.endGermCorner = germCorner;
          tc.finished = true;
          break;
        }
        // Regular point: pass straight through.
        const ConeClass& cc = S.vertex_class(cls);
        const CornerRef* next = nullptr;
        for (const CornerRef& c2 : cc.corners)
          if (corner_contains(S, c2, theta)) {
            if (next) throw std::logic_error("ambiguous pass-through corner");
            next = &c2;
          }
        if (!next) throw std::logic_error("no pass-through corner");
        p = next->poly;
        P = S.vertex(next->poly, next->vertex);
      }
      for (const TraceSegment& sgm : tc.segments)
        tc.holonomy += sgm.to - sgm.from;
      if (!tc.finished) ++tr.unfinished;
      tr.conns.push_back(std::move(tc));
    }
  }

  // Canonical labels follow the trace order; wire germs to connections.
  for (std::size_t i = 0; i < tr.conns.size(); ++i) {
    TracedConnection& tc = tr.conns[i];
    tc.label = static_cast<int>(i) + 1;
    auto s = germAt.find(tc.startCorner);
    if (s == germAt.end()) throw std::logic_error("missing start germ");
    tr.germs[s->second.first][s->second.second].conn = static_cast<int>(i);
    if (!tc.finished) continue;
    auto e = germAt.find(tc.endGermCorner);
    if (e == germAt.end()) throw std::logic_error("missing end germ");
    Germ& ge = tr.germs[e->second.first][e->second.second];
    if (ge.outgoing || ge.conn != -1)
      throw std::logic_error("two connections arrive at one germ");
    ge.conn = static_cast<int>(i);
  }
  if (tr.unfinished == 0)
    for (const auto& lst : tr.germs)
      for (const Germ& g : lst)
        if (g.conn == -1) throw std::logic_error("unmatched germ");
  return tr;
}

inline std::vector<SaddleConnection> public_connections(
    const DirectionTrace& tr, bool finishedOnly) {
  std::vector<SaddleConnection> out;
  for (const TracedConnection& tc : tr.conns) {
    if (finishedOnly && !tc.finished) continue;
    SaddleConnection sc;
    sc.holonomy = tc.holonomy;
    sc.fromCone = tc.fromCone;
    sc.toCone = tc.toCone;
    sc.label = tc.label;
    sc.segments = tc.segments;
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace detail

// Follow every separatrix in direction theta from each cone point (from each
// marked point when the surface has no cone points).  Each separatrix either
// closes up into a saddle connection or exceeds maxSteps, in which case
// NotDetectedPeriodic carries the completed ones.
inline std::vector<SaddleConnection> trace_separatrices(
    const TranslationSurface& S, const Vec2& theta, int maxSteps = 4096) {
  detail::DirectionTrace tr = detail::trace_direction(S, theta, maxSteps);
  if (tr.unfinished > 0)
    throw NotDetectedPeriodic(
        std::to_string(tr.unfinished) +
            " separatrix trace(s) exceeded the step budget",
        detail::public_connections(tr, true));
  return detail::public_connections(tr, false);
}

namespace detail {

// Transverse crossing of one cylinder: shot from a base point on a bottom
// connection, upward (left of theta), to the first hit on a top connection.
struct CrossShot {
  int hitConn = -1;          // connection index (0-based)
  FieldElement hitCoeff;     // theta-coefficient of the hit along that
                             // connection, measured from its origin
  FieldElement baseCoeff;    // theta-coefficient of the base point on the
                             // bottom connection, from its origin
  Vec2 crossVec;             // developed vector base -> hit
};

struct ShotRetry {};  // the ray met a vertex or a cone point: move the base

struct SegIndex {
  struct Item {
    int conn = -1;
    int poly = -1;     // chart in which a and b are expressed
    FieldElement cum;  // theta-coeff of segment start within the connection
    Vec2 a, b;
  };
  std::map<int, std::vector<Item>> byPoly;
  // Along-edge segments keyed by the edge they cover.
  std::map<std::pair<int, int>, Item> byEdge;
};

inline SegIndex index_segments(const TranslationSurface& S,
                               const std::vector<TracedConnection>& conns,
                               const Vec2& theta) {
  SegIndex idx;
  for (std::size_t c = 0; c < conns.size(); ++c) {
    FieldElement cum(0);
    for (const TraceSegment& sgm : conns[c].segments) {
      SegIndex::Item item{static_cast<int>(c), sgm.poly, cum, sgm.from,
                          sgm.to};
      idx.byPoly[sgm.poly].push_back(item);
      // Does the segment run along a polygon edge?
      int n = S.edge_count(sgm.poly);
      for (int e = 0; e < n; ++e) {
        if (S.vertex(sgm.poly, e) == sgm.from &&
            S.vertex(sgm.poly, (e + 1) % n) == sgm.to) {
          idx.byEdge[{sgm.poly, e}] = item;
          EdgeRef f = S.paired(EdgeRef{sgm.poly, e});
          idx.byEdge[{f.poly, f.edge}] = item;
        }
      }
      cum += (sgm.to.x - sgm.from.x) / theta.x;
    }
  }
  return idx;
}

inline FieldElement conn_coeff(const TracedConnection& c, const Vec2& theta) {
  return c.holonomy.x / theta.x;
}

// Locate the point at theta-coefficient u along a connection.
inline void locate_on_connection(const TracedConnection& c, const Vec2& theta,
                                 const FieldElement& u, int& poly, Vec2& P) {
  FieldElement cum(0);
  for (const TraceSegment& sgm : c.segments) {
    FieldElement len = (sgm.to.x - sgm.from.x) / theta.x;
    FieldElement local = u - cum;
    if (local.sign() >= 0 && (local - len).sign() < 0) {
      poly = sgm.poly;
      P = sgm.from + local * theta;
      return;
    }
    cum += len;
  }
  throw std::logic_error("coefficient outside the connection");
}

inline CrossShot cross_cylinder(const TranslationSurface& S,
                                const std::vector<TracedConnection>& conns,
                                const SegIndex& idx, const Vec2& theta,
                                int baseConn, const Rational& lambda) {
  const Vec2 n(-theta.y, theta.x);  // left of theta: points into the cylinder
  CrossShot shot;
  shot.baseCoeff = Rational(lambda) * conn_coeff(conns[baseConn], theta);
  int p;
  Vec2 P;
  locate_on_connection(conns[baseConn], theta, shot.baseCoeff, p, P);
  // If the base point sits on a polygon vertex, move the base.
  for (int v = 0; v < S.edge_count(p); ++v)
    if (S.vertex(p, v) == P) throw ShotRetry{};

  Vec2 crossVec;
  int guard = 0;
  while (true) {
    if (++guard > (1 << 20))
      throw std::logic_error("transverse crossing does not terminate");
    RayExit ex = ray_exit(S, p, P, n);
    // First connection hit strictly before the polygon boundary?
    bool haveConn = false;
    FieldElement bestT;
    auto consider = [&](const SegIndex::Item& item) {
      Vec2 seg = item.b - item.a;
      FieldElement det = cross(n, -seg);
      // n is never parallel to theta, so det != 0.
      Vec2 rhs = item.a - P;
      FieldElement t = cross(rhs, -seg) / det;
      FieldElement s = cross(n, rhs) / det;
      if (t.sign() <= 0) return;
      if (s.sign() < 0 || (s - FieldElement(1)).sign() > 0) return;
      if ((t - ex.t).sign() > 0) return;
      if (haveConn && (t - bestT).sign() >= 0) return;
      FieldElement segLen = (item.b.x - item.a.x) / theta.x;
      FieldElement u = item.cum + s * segLen;
      // Hitting an endpoint of the whole connection means hitting a cone
      // point: move the base instead.
      FieldElement total = conn_coeff(conns[item.conn], theta);
      if (u.is_zero() || (u - total).is_zero()) throw ShotRetry{};
      haveConn = true;
      bestT = t;
      shot.hitConn = item.conn;
      shot.hitCoeff = u;
      shot.crossVec = crossVec + t * n;
    };
    auto it = idx.byPoly.find(p);
    if (it != idx.byPoly.end())
      for (const SegIndex::Item& item : it->second) consider(item);
    if (haveConn) return shot;
    if (ex.atVertex) throw ShotRetry{};
    // Crossing an edge that itself carries a connection counts as a hit.
    auto onEdge = idx.byEdge.find({p, ex.edge});
    if (onEdge != idx.byEdge.end()) {
      const SegIndex::Item& item = onEdge->second;
      // Express the crossing point in the chart of the stored segment.
      Vec2 local = ex.point;
      if (item.poly != p)
        local = ex.point + S.crossing_translation(EdgeRef{p, ex.edge});
      FieldElement u = item.cum + (local.x - item.a.x) / theta.x;
      FieldElement total = conn_coeff(conns[item.conn], theta);
      if (u.is_zero() || (u - total).is_zero()) throw ShotRetry{};
      shot.hitConn = item.conn;
      shot.hitCoeff = u;
      shot.crossVec = crossVec + (ex.point - P);
      return shot;
    }
    crossVec += ex.point - P;
    EdgeRef f = S.paired(EdgeRef{p, ex.edge});
    P = ex.point + S.crossing_translation(EdgeRef{p, ex.edge});
    p = f.poly;
  }
}

inline CrossShot cross_cylinder_robust(
    const TranslationSurface& S, const std::vector<TracedConnection>& conns,
    const SegIndex& idx, const Vec2& theta, int baseConn) {
  for (int den = 2; den <= 64; ++den) {
    for (int num = 1; num < den; ++num) {
      if (std::gcd(num, den) != 1) continue;
      try {
        return cross_cylinder(S, conns, idx, theta, baseConn,
                              Rational(num, den));
      } catch (const ShotRetry&) {
        continue;
      }
    }
  }
  throw std::logic_error("no transverse base point avoided the vertices");
}

inline long to_long(const Integer& n) {
  if (!n.fits_slong_p()) throw std::logic_error("twist integer overflows");
  return n.get_si();
}

}  // namespace detail

// Full description of the cylinder decomposition in direction theta.
// The direction is sign-normalized to theta.x > 0 (theta.x == 0 is rejected:
// heights and twists are bookkept against the vertical axis).
inline PeriodicDirectionData decompose(const TranslationSurface& S,
                                       const Vec2& thetaIn,
                                       const DecomposeOptions& opt = {}) {
  if (thetaIn.is_zero()) throw DegenerateDirection("direction is zero");
  if (thetaIn.x.is_zero())
    throw DegenerateDirection(
        "vertical direction: heights/twists are measured against the "
        "vertical axis");
  Vec2 theta = thetaIn.x.sign() > 0 ? thetaIn : -thetaIn;

  detail::DirectionTrace tr = detail::trace_direction(S, theta, opt.maxSteps);
  if (tr.unfinished > 0)
    throw NotDetectedPeriodic(
        std::to_string(tr.unfinished) +
            " separatrix trace(s) exceeded the step budget",
        detail::public_connections(tr, true));

  const int k = static_cast<int>(tr.conns.size());

  // Optional relabeling of the canonical labels.
  std::vector<int> label(k);  // connection index -> final label
  if (opt.relabel.empty()) {
    for (int i = 0; i < k; ++i) label[i] = i + 1;
  } else {
    if (static_cast<int>(opt.relabel.size()) != k)
      throw InvalidMarking("relabel has wrong size");
    std::vector<bool> seen(k + 1, false);
    for (int x : opt.relabel) {
      if (x < 1 || x > k || seen[x])
        throw InvalidMarking("relabel is not a permutation");
      seen[x] = true;
    }
    for (int i = 0; i < k; ++i) label[i] = opt.relabel[i];
  }

  // Boundary successor permutations from the germ order around each cone:
  // the next CW germ continues the boundary of the cylinder above, the next
  // CCW germ the boundary of the cylinder below.
  std::vector<int> succBottom(k, -1), succTop(k, -1);
  for (const auto& lst : tr.germs) {
    int m = static_cast<int>(lst.size());
    for (int i = 0; i < m; ++i) {
      if (lst[i].outgoing) continue;
      int arriving = lst[i].conn;
      succBottom[arriving] = lst[(i + m - 1) % m].conn;
      succTop[arriving] = lst[(i + 1) % m].conn;
    }
  }
  for (int i = 0; i < k; ++i)
    if (succBottom[i] < 0 || succTop[i] < 0)
      throw std::logic_error("boundary successor missing");

  auto cycles_of = [&](const std::vector<int>& succ) {
    std::vector<std::vector<int>> cyc;
    std::vector<bool> used(k, false);
    for (int i = 0; i < k; ++i) {
      if (used[i]) continue;
      std::vector<int> c;
      int cur = i;
      do {
        used[cur] = true;
        c.push_back(cur);
        cur = succ[cur];
      } while (cur != i);
      cyc.push_back(std::move(c));
    }
    return cyc;
  };
  std::vector<std::vector<int>> botCycles = cycles_of(succBottom);
  std::vector<std::vector<int>> topCycles = cycles_of(succTop);
  if (botCycles.size() != topCycles.size())
    throw std::logic_error("bottom/top cycle counts disagree");

  auto cycle_containing = [](const std::vector<std::vector<int>>& cyc,
                             int conn) {
    for (std::size_t i = 0; i < cyc.size(); ++i)
      for (int x : cyc[i])
        if (x == conn) return static_cast<int>(i);
    throw std::logic_error("connection missing from the cycles");
  };

  // Pair bottom and top cycles with a transverse shot per cylinder.
  detail::SegIndex segIdx = detail::index_segments(S, tr.conns, theta);
  struct Cyl {
    std::vector<int> bottom, top;  // connection indices, canonical order
    FieldElement widthCoeff, heightY;
  };
  std::vector<Cyl> cyls;
  std::vector<bool> topUsed(topCycles.size(), false);
  for (const std::vector<int>& bc : botCycles) {
    Cyl cyl;
    cyl.bottom = bc;
    detail::CrossShot shot =
        detail::cross_cylinder_robust(S, tr.conns, segIdx, theta, bc.front());
    int ti = cycle_containing(topCycles, shot.hitConn);
    if (topUsed[ti])
      throw std::logic_error("two bottom cycles hit the same top cycle");
    topUsed[ti] = true;
    cyl.top = topCycles[ti];
    FieldElement wb(0), wt(0);
    for (int c : cyl.bottom) wb += detail::conn_coeff(tr.conns[c], theta);
    for (int c : cyl.top) wt += detail::conn_coeff(tr.conns[c], theta);
    if (!(wb == wt))
      throw std::logic_error("cylinder boundary widths disagree");
    cyl.widthCoeff = wb;
    cyl.heightY = cross(theta, shot.crossVec) / theta.x;
    if (cyl.heightY.sign() <= 0)
      throw std::logic_error("nonpositive cylinder height");
    cyls.push_back(std::move(cyl));
  }

  // Order the cylinders by decreasing vertical height (the naming order of
  // the reference tables), then by decreasing width, then by smallest label.
  auto min_label = [&](const std::vector<int>& conns) {
    int best = label[conns.front()];
    for (int c : conns) best = std::min(best, label[c]);
    return best;
  };
  std::sort(cyls.begin(), cyls.end(), [&](const Cyl& a, const Cyl& b) {
    int s = (a.heightY - b.heightY).sign();
    if (s != 0) return s > 0;
    s = (a.widthCoeff - b.widthCoeff).sign();
    if (s != 0) return s > 0;
    return min_label(a.bottom) < min_label(b.bottom);
  });
  const int p = static_cast<int>(cyls.size());

  // Markings.
  auto pick_mark = [&](const std::vector<int>& cyc, const std::vector<int>& ask,
                       int i, const char* side) {
    int want = 0;
    if (!ask.empty()) {
      if (static_cast<int>(ask.size()) != p)
        throw InvalidMarking(std::string("marking size mismatch on ") + side);
      want = ask[i];
    } else {
      want = label[cyc.front()];
      for (int c : cyc) want = std::min(want, label[c]);
    }
    for (std::size_t j = 0; j < cyc.size(); ++j)
      if (label[cyc[j]] == want) return static_cast<int>(j);
    throw InvalidMarking(std::string("marked label not on the ") + side +
                         " boundary of its cylinder");
  };

  PeriodicDirectionData data;
  data.direction = theta;
  data.n0 = opt.n0;
  data.saddles = detail::public_connections(tr, false);
  for (SaddleConnection& sc : data.saddles) sc.label = label[sc.label - 1];
  std::sort(data.saddles.begin(), data.saddles.end(),
            [](const SaddleConnection& a, const SaddleConnection& b) {
              return a.label < b.label;
            });
  data.L2.reserve(k);
  for (const SaddleConnection& sc : data.saddles)
    data.L2.push_back(dot(sc.holonomy, sc.holonomy));

  data.combinatorics.piB.assign(k + 1, 0);
  data.combinatorics.piT.assign(k + 1, 0);
  for (int i = 0; i < k; ++i) {
    data.combinatorics.piB[label[i]] = label[succBottom[i]];
    data.combinatorics.piT[label[i]] = label[succTop[i]];
  }

  FieldElement areaSum(0);
  FieldElement h1, v1plus;  // first cylinder's data for the twist formula
  for (int i = 0; i < p; ++i) {
    const Cyl& cy = cyls[i];
    int mbPos = pick_mark(cy.bottom, opt.marking.bottom, i, "bottom");
    int mtPos = pick_mark(cy.top, opt.marking.top, i, "top");

    std::vector<int> bCycle, tCycle;
    for (std::size_t j = 0; j < cy.bottom.size(); ++j)
      bCycle.push_back(label[cy.bottom[(mbPos + j) % cy.bottom.size()]]);
    for (std::size_t j = 0; j < cy.top.size(); ++j)
      tCycle.push_back(label[cy.top[(mtPos + j) % cy.top.size()]]);
    data.combinatorics.bottomCycles.push_back(bCycle);
    data.combinatorics.topCycles.push_back(tCycle);
    data.combinatorics.bottomMark.push_back(bCycle.front());
    data.combinatorics.topMark.push_back(tCycle.front());

    // Cross the cylinder from the marked bottom connection and develop the
    // top boundary to the origin of the marked top connection.
    int mb = cy.bottom[mbPos];
    int mt = cy.top[mtPos];
    detail::CrossShot shot =
        detail::cross_cylinder_robust(S, tr.conns, segIdx, theta, mb);
    bool hitInTop = false;
    for (int c : cy.top) hitInTop = hitInTop || (c == shot.hitConn);
    if (!hitInTop)
      throw std::logic_error("transverse shot left its cylinder");
    // Developed positions relative to origin(mb) at the origin of the plane.
    Vec2 devHit = shot.baseCoeff * theta + shot.crossVec;
    Vec2 devTopOrigin = devHit - shot.hitCoeff * theta;
    int cur = shot.hitConn;
    int guard = 0;
    while (cur != mt) {
      devTopOrigin += tr.conns[cur].holonomy;
      cur = succTop[cur];
      if (++guard > k + 1)
        throw std::logic_error("marked top connection not on the boundary");
    }
    FieldElement heightY = cross(theta, devTopOrigin) / theta.x;
    if (!(heightY == cy.heightY))
      throw std::logic_error("inconsistent cylinder height");
    FieldElement cCoeff = devTopOrigin.x / theta.x;
    Integer q = (cCoeff / cy.widthCoeff).floor();
    FieldElement vCoeff = cCoeff - FieldElement(Rational(q)) * cy.widthCoeff;

    CylinderGeom g;
    g.width = cy.widthCoeff * theta;
    g.widthCoeff = cy.widthCoeff;
    g.heightY = heightY;
    g.v = vCoeff * theta;
    g.vCoeff = vCoeff;
    g.area = g.width.x * heightY;
    areaSum += g.area;

    if (i == 0) {
      h1 = heightY;
      v1plus = vCoeff + Rational(opt.n0) * cy.widthCoeff;
      g.twistRatio = FieldElement(0);
      g.twistSquare = FieldElement(0);
      g.normalizedTwistSquare = FieldElement(0);
      g.twistFloor = 0;
    } else {
      FieldElement tCoeff = vCoeff - (heightY / h1) * v1plus;
      g.twist = tCoeff * theta;
      g.twistRatio = tCoeff / cy.widthCoeff;
      g.twistSquare = g.twistRatio * g.twistRatio;
      Integer fl = g.twistRatio.floor();
      g.twistFloor = detail::to_long(fl);
      FieldElement frac = g.twistRatio - FieldElement(Rational(fl));
      g.normalizedTwistSquare = frac * frac;
      if (frac.sign() < 0 || (frac - FieldElement(1)).sign() >= 0)
        throw std::logic_error("normalized twist outside [0,1)");
      data.twistSquares.push_back(g.twistSquare);
      data.normalizedTwistSquares.push_back(g.normalizedTwistSquare);
      data.twistIntegers.push_back(g.twistFloor);
    }
    data.H.push_back(heightY);
    data.cylinders.push_back(std::move(g));
  }
  if (!(areaSum == S.area()))
    throw std::logic_error("cylinder areas do not sum to the surface area");
  return data;
}

// Named decomposition conventions for the two reference periodic
// directions of the genus-3 Arnoux-Yoccoz surface.  decompose() labels
// saddle connections in trace order anchored at each cone class's
// lexicographically smallest corner; the conventional big/medium/small
// tables for these two directions use a fixed relabeling of that order
// plus specific boundary markings and n0.  Running decompose() with a
// preset's options reproduces those tables verbatim.
struct DirectionPreset {
  std::string name;
  Vec2 direction;
  DecomposeOptions options;
};

inline std::vector<DirectionPreset> ay_direction_presets() {
  auto fe = [](long a, long b, long c) {
    return FieldElement(Rational(a), Rational(b), Rational(c));
  };
  std::vector<DirectionPreset> ps(2);
  ps[0].name = "ay1";
  ps[0].direction = Vec2(fe(1, 0, 0), fe(1, 0, -1));
  ps[0].options.n0 = 0;
  ps[0].options.relabel = {1, 2, 3, 5, 6, 4};
  ps[0].options.marking.bottom = {3, 4, 1};
  ps[0].options.marking.top = {2, 6, 3};
  ps[1].name = "ay2";
  ps[1].direction = Vec2(fe(1, 0, 0), fe(3, 0, 1));
  ps[1].options.n0 = -1;
  ps[1].options.relabel = {1, 2, 3, 5, 6, 4};
  ps[1].options.marking.bottom = {5, 3, 6};
  ps[1].options.marking.top = {4, 2, 5};
  return ps;
}

inline std::optional<DirectionPreset> find_preset(const std::string& name) {
  for (DirectionPreset& p : ay_direction_presets())
    if (p.name == name) return p;
  return std::nullopt;
}

// Preset whose direction is parallel (up to sign) to theta, if any.
inline std::optional<DirectionPreset> find_preset_for_direction(
    const Vec2& theta) {
  for (DirectionPreset& p : ay_direction_presets())
    if (cross(p.direction, theta).is_zero()) return p;
  return std::nullopt;
}

// M with M*w1 = (1,0)^T and M*tau1 = (0,1)^T, where w1 is the first
// cylinder's width vector and tau1 = h1 + v1 + n0*w1 its twist vector.
inline NormalizingMatrix normalizing_matrix(const PeriodicDirectionData& d) {
  if (d.cylinders.empty())
    throw SingularFrame("no cylinder to normalize against");
  const CylinderGeom& c1 = d.cylinders.front();
  Vec2 w1 = c1.width;
  Vec2 tau1 = Vec2(FieldElement(0), c1.heightY) + c1.v +
              FieldElement(Rational(d.n0)) * c1.width;
  Mat2 F = Mat2::from_columns(w1, tau1);
  if (F.det().is_zero()) throw SingularFrame("degenerate direction frame");
  NormalizingMatrix nm;
  nm.M = F.inverse();
  nm.theta = d.direction;
  nm.thetaPerp = tau1;
  return nm;
}

}  // namespace ayoz
