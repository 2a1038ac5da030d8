#pragma once

// Consistent R-charges (exact LP and from zigzag directions), isoradial
// embeddings, perfect matchings and the algebraic-consistency criterion.

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "qpoly/grading.hpp"
#include "qpoly/homology.hpp"
#include "qpoly/lp.hpp"
#include "qpoly/parallel.hpp"
#include "qpoly/polyhedron.hpp"
#include "qpoly/rewriting.hpp"
#include "qpoly/zigzag.hpp"

namespace qpoly {

// ---------------------------------------------------------------------------
// R-charges

// Number of arrow ends at each vertex (loops count twice).
inline std::vector<long long> vertex_valence(const QuiverPolyhedron& qp) {
  std::vector<long long> deg(qp.vertices.size(), 0);
  for (const auto& a : qp.arrows) {
    ++deg[a.head];
    ++deg[a.tail];
  }
  return deg;
}

inline std::vector<lp::Constraint> rcharge_constraints(const QuiverPolyhedron& qp) {
  auto rows = face_degree_constraints(qp, 2);
  // sum over ends of (1 - R_a) == 2  <=>  sum over ends of R_a == valence - 2
  auto deg = vertex_valence(qp);
  for (std::size_t v = 0; v < qp.vertices.size(); ++v) {
    std::map<std::size_t, Rational> coef;
    for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
      if (qp.arrows[a].head == v) coef[a] += 1;
      if (qp.arrows[a].tail == v) coef[a] += 1;
    }
    lp::Constraint c;
    for (auto& [a, k] : coef) c.terms.emplace_back(a, k);
    c.relation = lp::Relation::eq;
    c.rhs = deg[v] - 2;
    rows.push_back(std::move(c));
  }
  return rows;
}

inline bool is_consistent_rcharge(const QuiverPolyhedron& qp, const std::vector<Rational>& r) {
  Rational k;
  if (!is_grading(qp, r, &k) || k != 2) return false;
  for (const auto& c : rcharge_constraints(qp)) {
    Rational sum = 0;
    for (const auto& [a, coef] : c.terms) sum += coef * r[a];
    if (sum != c.rhs) return false;
  }
  return true;
}

// Leximin solution of the face and vertex conditions with all charges > 0.
inline std::optional<std::vector<Rational>> find_consistent_rcharge(const QuiverPolyhedron& qp) {
  require_valid(qp);
  return lp::leximin_positive(qp.arrows.size(), rcharge_constraints(qp));
}

// Exact clockwise-angle bookkeeping on integer direction vectors.
namespace angles {

// Counterclockwise order of v around reference u: half-plane then cross product.
inline int half(const IntVec& u, const IntVec& v) {
  long long c = detail::cross(u, v);
  long long d = u[0] * v[0] + u[1] * v[1];
  return (c > 0 || (c == 0 && d > 0)) ? 0 : 1;
}

inline bool same_direction(const IntVec& u, const IntVec& v) {
  return detail::cross(u, v) == 0 && u[0] * v[0] + u[1] * v[1] > 0;
}

// ccw angle from u to a is smaller than from u to b (angles in [0, 2pi))
inline bool ccw_less(const IntVec& u, const IntVec& a, const IntVec& b) {
  int ha = half(u, a), hb = half(u, b);
  if (ha != hb) return ha < hb;
  return detail::cross(a, b) > 0;
}

// Does the clockwise sweep from u to v (angle in (0, 2pi]) reach direction r?
inline bool cw_sweep_reaches(const IntVec& u, const IntVec& v, const IntVec& r) {
  if (same_direction(u, r)) return same_direction(u, v);  // only a full turn returns to u
  if (same_direction(u, v)) return true;
  // cw(u, x) = 2pi - ccw(u, x), so cw(u, r) <= cw(u, v) iff ccw(u, v) <= ccw(u, r)
  return !ccw_less(u, r, v);
}

// Number of full clockwise turns made by the closed chain u0 -> u1 -> ... -> u0.
inline long long winding(const std::vector<IntVec>& chain) {
  const IntVec& ref = chain.front();
  long long turns = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const IntVec& u = chain[i];
    const IntVec& v = chain[(i + 1) % chain.size()];
    if (cw_sweep_reaches(u, v, ref)) ++turns;
  }
  return turns;
}

}  // namespace angles

struct ZigzagRCharge {
  std::vector<IntVec> zig;       // e of Z+_a, per arrow
  std::vector<IntVec> zag;       // e of Z-_a, per arrow
  std::vector<double> charge;    // angle / pi, measured in the whitened metric
  bool faces_close = false;      // every face chain winds exactly once
  bool vertices_close = false;   // every vertex chain of 2n ends winds n - 1 times
  bool mirrored = false;         // frame orientation flipped to make positive faces anticlockwise
};

// Linear map taking the zigzag directions to an isotropic frame, so that
// symmetric configurations get symmetric angles.
inline std::array<double, 4> whitening(const std::vector<IntVec>& dirs) {
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& d : dirs) {
    sxx += static_cast<double>(d[0] * d[0]);
    sxy += static_cast<double>(d[0] * d[1]);
    syy += static_cast<double>(d[1] * d[1]);
  }
  // inverse square root of [[sxx, sxy], [sxy, syy]]
  double tr = sxx + syy, det = sxx * syy - sxy * sxy;
  double s = std::sqrt(det), t = std::sqrt(tr + 2 * s);
  // sqrt(M) = (M + s I) / t ; inverse via 2x2 formula
  double a = (sxx + s) / t, b = sxy / t, d = (syy + s) / t;
  double idet = 1.0 / (a * d - b * b);
  return {d * idet, -b * idet, -b * idet, a * idet};
}

inline double cw_angle(const std::array<double, 4>& w, const IntVec& from, const IntVec& to) {
  auto apply = [&](const IntVec& v) {
    return std::pair{w[0] * static_cast<double>(v[0]) + w[1] * static_cast<double>(v[1]),
                     w[2] * static_cast<double>(v[0]) + w[3] * static_cast<double>(v[1])};
  };
  auto [fx, fy] = apply(from);
  auto [tx, ty] = apply(to);
  double ang = std::atan2(fy, fx) - std::atan2(ty, tx);
  const double two_pi = 2 * std::numbers::pi;
  while (ang <= 0) ang += two_pi;
  while (ang > two_pi) ang -= two_pi;
  return ang;
}

inline ZigzagRCharge rcharge_from_zigzag(const QuiverPolyhedron& qp) {
  auto z = condition_z(qp);
  if (!z.passes)
    throw ConsistencyViolation("condition Z fails at arrow '" + qp.arrows[z.certificate->arrow].id +
                               "'; no consistent R-charge exists");
  auto idx = zigzag_index(qp);
  auto inc = build_incidence(qp);
  ZigzagRCharge r;
  for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
    r.zig.push_back(idx.paths[idx.plus[a].path].homology);
    r.zag.push_back(idx.paths[idx.minus[a].path].homology);
    if (is_zero(r.zig[a]) || is_zero(r.zag[a]))
      throw ConsistencyViolation("zigzag path through arrow '" + qp.arrows[a].id + "' has zero homology");
    if (angles::same_direction(r.zig[a], r.zag[a]))
      throw ConsistencyViolation("zig and zag directions coincide at arrow '" + qp.arrows[a].id + "'");
  }

  // Face chains: consecutive arrows c_i, c_{i+1} of a positive face share
  // e-(c_i) == e+(c_{i+1}); in a negative face e+(d_i) == e-(d_{i+1}).
  // Each chain must wind once.
  std::vector<std::pair<std::vector<IntVec>, long long>> chains;  // chain, required winding
  for (Sign s : {Sign::plus, Sign::minus})
    for (const auto& f : qp.faces(s)) {
      std::vector<IntVec> chain;
      const std::size_t k = f.cycle.size();
      for (std::size_t step = 0; step < k; ++step) {
        // positive faces are walked against the written order
        std::size_t a = s == Sign::plus ? f.cycle[(k - step) % k] : f.cycle[step];
        std::size_t next = s == Sign::plus ? f.cycle[(2 * k - step - 1) % k] : f.cycle[(step + 1) % k];
        chain.push_back(r.zag[a]);
        if (r.zig[a] != r.zag[next]) throw std::logic_error("zigzag directions do not chain around a face");
      }
      chains.emplace_back(std::move(chain), 1);
    }
  const std::size_t face_chains = chains.size();

  // Vertex chains: in-arrow b -> out-arrow a at a positive corner, then
  // a -> in-arrow b' at a negative corner. 2n ends must wind n - 1 times.
  bool all_ends = true;
  auto valence = vertex_valence(qp);
  for (std::size_t v = 0; v < qp.vertices.size(); ++v) {
    std::optional<std::size_t> start;
    for (std::size_t a = 0; a < qp.arrows.size() && !start; ++a)
      if (qp.arrows[a].head == v) start = a;
    if (!start) continue;
    std::vector<IntVec> chain;
    std::size_t b = *start;
    long long ends = 0;
    do {
      chain.push_back(r.zag[b]);
      std::size_t a = face_predecessor(qp, inc, Sign::plus, b);  // out-arrow at v
      if (r.zig[b] != r.zag[a]) throw std::logic_error("zigzag directions do not chain around a vertex");
      chain.push_back(r.zag[a]);
      std::size_t next = face_successor(qp, inc, Sign::minus, a);  // in-arrow at v
      if (r.zig[a] != r.zag[next]) throw std::logic_error("zigzag directions do not chain around a vertex");
      ends += 2;
      b = next;
    } while (b != *start);
    if (ends != valence[v]) all_ends = false;
    chains.emplace_back(std::move(chain), ends / 2 - 1);
  }

  // The homology frame carries no orientation of its own; use the one in
  // which positive faces are anticlockwise, i.e. face chains wind once.
  auto mirror = [](IntVec v) { return IntVec{v[0], -v[1]}; };
  auto evaluate = [&](bool mirrored) {
    std::pair<bool, bool> ok{true, all_ends};
    for (std::size_t c = 0; c < chains.size(); ++c) {
      auto chain = chains[c].first;
      if (mirrored)
        for (auto& v : chain) v = mirror(v);
      if (angles::winding(chain) != chains[c].second) (c < face_chains ? ok.first : ok.second) = false;
    }
    return ok;
  };
  auto as_is = evaluate(false);
  if (!as_is.first) {
    auto flipped = evaluate(true);
    if (flipped.first) {
      r.mirrored = true;
      as_is = flipped;
    }
  }
  r.faces_close = as_is.first;
  r.vertices_close = as_is.second;

  auto frame = [&](const IntVec& v) { return r.mirrored ? IntVec{v[0], -v[1]} : v; };
  std::vector<IntVec> dirs;
  for (const auto& p : idx.paths) dirs.push_back(frame(p.homology));
  auto w = whitening(dirs);
  for (std::size_t a = 0; a < qp.arrows.size(); ++a)
    r.charge.push_back(cw_angle(w, frame(r.zag[a]), frame(r.zig[a])) / std::numbers::pi);
  return r;
}

// ---------------------------------------------------------------------------
// Isoradial embeddings

struct Point {
  double x = 0, y = 0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double k, Point a) { return {k * a.x, k * a.y}; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

struct FacePlacement {
  FaceRef face;
  IntVec anchor;               // offset of head(cycle[0])
  Point center;
  std::vector<Point> head;     // position of head(cycle[i])
};

struct IsoradialEmbedding {
  std::map<std::pair<std::size_t, IntVec>, Point> positions;  // lifted vertex -> point
  std::vector<FacePlacement> faces;
  double tolerance = 1e-9;
  double residual = 0;         // worst position disagreement or closure error
  std::string worst;           // description of where the residual occurred

  // Placement of the base face nearest the origin (first placed lift).
  const FacePlacement& base_face(FaceRef f) const {
    for (const auto& p : faces)
      if (p.face == f) return p;
    throw GeometryError("face not placed in the embedding window");
  }

  Point translation(const QuiverPolyhedron& qp, const IntVec& h) const {
    (void)qp;
    for (const auto& [key, p] : positions) {
      auto it = positions.find({key.first, add(key.second, h)});
      if (it != positions.end()) return it->second - p;
    }
    throw GeometryError("window too small to measure a translation");
  }
};

namespace detail {

inline Point unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Places a face given the positions of head and tail of cycle[pos].
inline FacePlacement place_face(const QuiverPolyhedron& qp, const HomologyData& h, const std::vector<double>& r,
                                FaceRef ref, const IntVec& anchor, std::size_t pos, Point head_pt, Point tail_pt,
                                double& closure) {
  const Face& f = qp.face(ref);
  const std::size_t k = f.cycle.size();
  const double pi = std::numbers::pi;
  const double sgn = ref.sign == Sign::plus ? 1.0 : -1.0;
  Point chord = head_pt - tail_pt;
  double len = norm(chord);
  Point u{chord.x / len, chord.y / len};
  Point left{-u.y, u.x};
  double ra = r[f.cycle[pos]];
  Point mid = 0.5 * (head_pt + tail_pt);
  FacePlacement p;
  p.face = ref;
  p.anchor = anchor;
  p.center = mid + (sgn * std::cos(pi * ra / 2)) * left;
  p.head.assign(k, Point{});
  // angle of head(cycle[i]) on the circle; positive faces turn anticlockwise in traversal
  Point hv = head_pt - p.center;
  double phi = std::atan2(hv.y, hv.x);
  p.head[pos] = head_pt;
  for (std::size_t step = 1; step < k; ++step) {
    std::size_t i = (pos + step) % k;
    std::size_t prev = (pos + step - 1) % k;
    phi -= sgn * pi * r[f.cycle[prev]];
    p.head[i] = p.center + unit(phi);
  }
  // closing back onto cycle[pos]
  phi -= sgn * pi * r[f.cycle[(pos + k - 1) % k]];
  closure = std::max({closure, norm(p.center + unit(phi) - head_pt), std::abs(norm(tail_pt - p.center) - 1.0),
                      std::abs(len - 2 * std::sin(pi * ra / 2))});
  (void)h;
  return p;
}

}  // namespace detail

// Breadth-first placement of lifted faces whose anchor lies in the window.
inline IsoradialEmbedding isoradial_embedding(const QuiverPolyhedron& qp, const std::vector<double>& r, int radius,
                                              double tolerance = 1e-9, bool throw_on_failure = true) {
  require_valid(qp);
  detail::require_unweighted(qp, "isoradial embedding");
  auto h = detail::require_torus(qp, "isoradial embedding");
  for (std::size_t a = 0; a < r.size(); ++a)
    if (!(r[a] > 0 && r[a] < 2)) throw ArgumentError("charges must lie strictly between 0 and 2");
  auto inc = build_incidence(qp);

  IsoradialEmbedding emb;
  emb.tolerance = tolerance;
  auto inside = [&](const IntVec& o) { return std::llabs(o[0]) <= radius && std::llabs(o[1]) <= radius; };

  // offset of head(cycle[i]) given the anchor
  auto head_offset = [&](const Face& f, const IntVec& anchor, std::size_t i) {
    IntVec o = anchor;
    for (std::size_t j = 0; j < i; ++j) o = sub(o, h.arrow_class[f.cycle[j]]);
    return o;
  };

  std::set<std::tuple<int, std::size_t, IntVec>> placed;
  std::queue<std::size_t> todo;
  auto record = [&](FacePlacement p) {
    const Face& f = qp.face(p.face);
    for (std::size_t i = 0; i < f.cycle.size(); ++i) {
      auto key = std::pair{qp.arrows[f.cycle[i]].head, head_offset(f, p.anchor, i)};
      auto [it, fresh] = emb.positions.emplace(key, p.head[i]);
      if (!fresh) {
        double d = norm(it->second - p.head[i]);
        if (d > emb.residual) {
          emb.residual = d;
          emb.worst = "vertex " + qp.vertices[key.first] + " placed inconsistently by " + face_label(qp, p.face);
        }
      }
    }
    placed.insert({static_cast<int>(p.face.sign), p.face.index, p.anchor});
    emb.faces.push_back(std::move(p));
    todo.push(emb.faces.size() - 1);
  };

  // seed: positive face 0 anchored at the origin, head(cycle[0]) at angle pi/2
  {
    FaceRef seed{Sign::plus, 0};
    const Face& f = qp.face(seed);
    IntVec zero{0, 0};
    double phi = std::numbers::pi / 2;
    Point head_pt = detail::unit(phi);
    Point tail_pt = detail::unit(phi - std::numbers::pi * r[f.cycle[0]]);
    double closure = 0;
    auto p = detail::place_face(qp, h, r, seed, zero, 0, head_pt, tail_pt, closure);
    if (closure > emb.residual) {
      emb.residual = closure;
      emb.worst = "face " + face_label(qp, seed) + " does not close";
    }
    record(std::move(p));
  }

  while (!todo.empty()) {
    auto idx = todo.front();
    todo.pop();
    FacePlacement cur = emb.faces[idx];
    const Face& f = qp.face(cur.face);
    for (std::size_t i = 0; i < f.cycle.size(); ++i) {
      std::size_t a = f.cycle[i];
      Sign other = opposite(cur.face.sign);
      auto slot = inc.slot(other, a);
      FaceRef nref{other, slot.face};
      const Face& g = qp.face(nref);
      // anchor of the neighbour: head(a) offset minus classes before a in g
      IntVec head_a = head_offset(f, cur.anchor, i);
      IntVec anchor = head_a;
      for (std::size_t j = 0; j < slot.pos; ++j) anchor = add(anchor, h.arrow_class[g.cycle[j]]);
      if (!inside(anchor) || placed.count({static_cast<int>(other), slot.face, anchor})) continue;
      Point head_pt = cur.head[i];
      Point tail_pt = cur.head[(i + 1) % f.cycle.size()];
      double closure = 0;
      auto p = detail::place_face(qp, h, r, nref, anchor, slot.pos, head_pt, tail_pt, closure);
      if (closure > emb.residual) {
        emb.residual = closure;
        emb.worst = "face " + face_label(qp, nref) + " does not close";
      }
      record(std::move(p));
    }
  }

  if (throw_on_failure && emb.residual > tolerance) {
    std::ostringstream msg;
    msg << "isoradial embedding fails: residual " << emb.residual << " at " << emb.worst;
    throw GeometryError(msg.str());
  }
  return emb;
}

inline std::vector<double> to_doubles(const std::vector<Rational>& r) {
  std::vector<double> out;
  for (const auto& x : r) out.push_back(to_double(x));
  return out;
}

// ---------------------------------------------------------------------------
// Perfect matchings

struct PerfectMatching {
  std::vector<std::size_t> arrows;  // sorted arrow indices
  IntVec homology;                  // relative to the reference matching (genus 1 only)

  bool contains(std::size_t a) const { return std::binary_search(arrows.begin(), arrows.end(), a); }
};

inline bool is_perfect_matching(const QuiverPolyhedron& qp, const std::vector<std::size_t>& arrows) {
  std::set<std::size_t> m(arrows.begin(), arrows.end());
  for (Sign s : {Sign::plus, Sign::minus})
    for (const auto& f : qp.faces(s)) {
      int hits = 0;
      for (auto a : f.cycle) hits += static_cast<int>(m.count(a));
      if (hits != 1) return false;
    }
  return true;
}

inline std::vector<PerfectMatching> enumerate_perfect_matchings(const QuiverPolyhedron& qp) {
  require_valid(qp);
  auto inc = build_incidence(qp);
  std::vector<char> plus_used(qp.faces_plus.size(), 0), minus_used(qp.faces_minus.size(), 0);
  std::vector<std::size_t> chosen;
  std::vector<std::vector<std::size_t>> found;
  std::function<void(std::size_t)> rec = [&](std::size_t f) {
    while (f < qp.faces_plus.size() && plus_used[f]) ++f;
    if (f == qp.faces_plus.size()) {
      if (std::all_of(minus_used.begin(), minus_used.end(), [](char c) { return c != 0; })) {
        auto m = chosen;
        std::sort(m.begin(), m.end());
        found.push_back(std::move(m));
      }
      return;
    }
    std::vector<std::size_t> cand = qp.faces_plus[f].cycle;
    std::sort(cand.begin(), cand.end());
    for (auto a : cand) {
      auto g = inc.minus[a].face;
      if (minus_used[g]) continue;
      plus_used[f] = minus_used[g] = 1;
      chosen.push_back(a);
      rec(f + 1);
      chosen.pop_back();
      plus_used[f] = minus_used[g] = 0;
    }
  };
  if (qp.faces_plus.size() == qp.faces_minus.size()) rec(0);
  std::sort(found.begin(), found.end());

  std::vector<PerfectMatching> out;
  std::optional<HomologyData> h;
  if (auto hd = homology(qp); hd.genus == 1) h = std::move(hd);
  for (const auto& m : found) {
    PerfectMatching pm{m, {}};
    if (h) {
      std::vector<long long> f(qp.arrows.size(), 0);
      for (auto a : pm.arrows) f[a] += 1;
      for (auto a : found.front()) f[a] -= 1;
      pm.homology = cocycle_class(qp, *h, f);
    }
    out.push_back(std::move(pm));
  }
  return out;
}

inline std::size_t matching_degree(const Path& p, const PerfectMatching& m) {
  std::size_t d = 0;
  for (auto a : p.arrows) d += m.contains(a) ? 1 : 0;
  return d;
}

struct MatchingPolygon {
  std::map<IntVec, std::size_t> points;  // class -> multiplicity
  std::vector<IntVec> hull;              // counterclockwise, no collinear points
  long long twice_area = 0;
};

inline std::vector<IntVec> convex_hull(std::vector<IntVec> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto turn = [](const IntVec& o, const IntVec& a, const IntVec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<IntVec> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline MatchingPolygon matching_polygon(const QuiverPolyhedron& qp) {
  detail::require_torus(qp, "matching polygon");
  MatchingPolygon poly;
  std::vector<IntVec> pts;
  for (const auto& m : enumerate_perfect_matchings(qp)) {
    ++poly.points[m.homology];
    pts.push_back(m.homology);
  }
  poly.hull = convex_hull(pts);
  for (std::size_t i = 0; i < poly.hull.size() && poly.hull.size() >= 3; ++i) {
    const auto& a = poly.hull[i];
    const auto& b = poly.hull[(i + 1) % poly.hull.size()];
    poly.twice_area += a[0] * b[1] - a[1] * b[0];
  }
  return poly;
}

// ---------------------------------------------------------------------------
// Boundary matchings P_theta^+ and P_theta^-

struct BoundaryMatchings {
  PerfectMatching plus, minus;
};

namespace detail {

inline double wrap(double a) {
  const double two_pi = 2 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0) a += two_pi;
  return a;
}

}  // namespace detail

// Arrows whose arc on a face of the given sign contains direction theta, seen
// from the face center. Positive arcs run anticlockwise from tail to head,
// negative ones clockwise.
inline std::vector<std::size_t> arcs_hit(const QuiverPolyhedron& qp, const IsoradialEmbedding& emb, Sign s,
                                         double theta, double angular_tolerance) {
  std::vector<std::size_t> out;
  const double two_pi = 2 * std::numbers::pi;
  for (std::size_t fi = 0; fi < qp.faces(s).size(); ++fi) {
    const auto& p = emb.base_face({s, fi});
    const auto& cycle = qp.faces(s)[fi].cycle;
    const std::size_t k = cycle.size();
    for (std::size_t i = 0; i < k; ++i) {
      Point head = p.head[i] - p.center, tail = p.head[(i + 1) % k] - p.center;
      double th = std::atan2(head.y, head.x), tt = std::atan2(tail.y, tail.x);
      double dt = detail::wrap(theta - tt);
      if (dt < angular_tolerance || dt > two_pi - angular_tolerance)
        throw GeometryError("direction is degenerate: it passes through a vertex of " + face_label(qp, {s, fi}));
      bool hit = s == Sign::plus ? dt < detail::wrap(th - tt) : detail::wrap(tt - theta) < detail::wrap(tt - th);
      if (hit) out.push_back(cycle[i]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// P+ excludes the head endpoint and P- the tail endpoint of each arc; for a
// non-degenerate direction the two coincide, so degenerate directions are
// rejected and callers perturb theta to the side they need.
inline BoundaryMatchings boundary_matching(const QuiverPolyhedron& qp, const IsoradialEmbedding& emb, double theta,
                                           double angular_tolerance = 1e-9) {
  BoundaryMatchings b;
  b.plus.arrows = arcs_hit(qp, emb, Sign::plus, theta, angular_tolerance);
  b.minus.arrows = b.plus.arrows;
  if (!is_perfect_matching(qp, b.plus.arrows)) throw std::logic_error("boundary matching is not a perfect matching");
  return b;
}

// The same matching read off from negative faces in the opposite direction.
inline PerfectMatching negative_face_selection(const QuiverPolyhedron& qp, const IsoradialEmbedding& emb,
                                               double theta, double angular_tolerance = 1e-9) {
  PerfectMatching m;
  m.arrows = arcs_hit(qp, emb, Sign::minus, theta + std::numbers::pi, angular_tolerance);
  return m;
}

// Direction of h(a) seen from the center of the positive face of a, where
// z = Z+_a (the arrow at position 0 of the period).
inline double zigzag_epsilon(const QuiverPolyhedron& qp, const IsoradialEmbedding& emb, const ZigzagPath& z) {
  auto inc = build_incidence(qp);
  auto a = z.period.front();
  auto slot = inc.plus[a];
  const auto& p = emb.base_face({Sign::plus, slot.face});
  Point d = p.head[slot.pos] - p.center;
  return std::atan2(d.y, d.x);
}

// ---------------------------------------------------------------------------
// Algebraic consistency

struct UnwitnessedPair {
  std::size_t from = 0, to = 0;
  IntVec from_offset, to_offset;
};

struct AlgebraicVerdict {
  bool consistent_evidence = false;
  std::string reason;
  std::optional<CancellationCounterexample> counterexample;
  std::optional<UnwitnessedPair> unwitnessed;
  std::size_t pairs_checked = 0;
};

inline Rational default_cancellation_bound(const QuiverPolyhedron& qp, const std::vector<Rational>& charge) {
  return 3 * max_face_degree(qp, charge);
}

namespace detail {

// Degree of the cheapest lifted path from (v, 0) to (w, target) that avoids
// the matching (if given), or nullopt if none within the scaled limit.
inline std::optional<long long> cheapest_lifted_path(const QuiverPolyhedron& qp, const HomologyData& h,
                                                     const ScaledGrading& g, const PerfectMatching* m, std::size_t v,
                                                     std::size_t w, const IntVec& target, long long limit) {
  using State = std::pair<std::size_t, IntVec>;
  std::map<State, long long> best;
  using Item = std::tuple<long long, std::size_t, IntVec>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.push({0, v, IntVec{0, 0}});
  best[{v, IntVec{0, 0}}] = 0;
  while (!pq.empty()) {
    auto [d, u, off] = pq.top();
    pq.pop();
    if (best[{u, off}] < d) continue;
    if (u == w && off == target) return d;
    for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
      if (qp.arrows[a].tail != u || (m && m->contains(a))) continue;
      long long nd = d + g.weight[a];
      if (nd > limit) continue;
      State next{qp.arrows[a].head, add(off, h.arrow_class[a])};
      auto it = best.find(next);
      if (it != best.end() && it->second <= nd) continue;
      best[next] = nd;
      pq.push({nd, next.first, next.second});
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Without an explicit bound each pair may use paths up to
// max(4K, shortest + K), K the largest face degree: a fixed cap cannot reach
// the far corners of the window once the homology basis is skewed.
inline AlgebraicVerdict algebraic_consistency_check(const QuiverPolyhedron& qp, const std::vector<Rational>& charge,
                                                    int radius = 2, std::optional<Rational> bound = std::nullopt,
                                                    const RewriteOptions& options = {}) {
  require_valid(qp);
  detail::require_unweighted(qp, "algebraic consistency");
  auto h = detail::require_torus(qp, "algebraic consistency");
  if (radius < 0) throw ArgumentError("radius must be nonnegative");
  AlgebraicVerdict verdict;
  auto cancel = cancellation_check(qp, charge, default_cancellation_bound(qp, charge), options);
  if (!cancel.holds) {
    verdict.reason = "cancellation fails";
    verdict.counterexample = cancel.counterexample;
    return verdict;
  }
  ScaledGrading g(charge);
  const Rational face = max_face_degree(qp, charge);
  const long long face_scaled = g.scaled_bound(face);
  const long long fixed = bound ? g.scaled_bound(*bound) : g.scaled_bound(4 * face);
  auto matchings = enumerate_perfect_matchings(qp);

  // by periodicity only the offset difference matters
  struct Job {
    std::size_t v, w;
    IntVec diff;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < qp.vertices.size(); ++v)
    for (std::size_t w = 0; w < qp.vertices.size(); ++w)
      for (long long i = -2 * radius; i <= 2 * radius; ++i)
        for (long long j = -2 * radius; j <= 2 * radius; ++j) jobs.push_back({v, w, IntVec{i, j}});
  std::vector<char> ok(jobs.size(), 0);
  std::vector<long long> cap(jobs.size(), fixed);
  parallel_for(jobs.size(), [&](std::size_t k) {
    const auto& job = jobs[k];
    if (!bound) {
      auto shortest = detail::cheapest_lifted_path(qp, h, g, nullptr, job.v, job.w, job.diff,
                                                   fixed + face_scaled * (8 * radius + 8));
      if (shortest) cap[k] = std::max(fixed, *shortest + face_scaled);
    }
    for (const auto& m : matchings)
      if (detail::cheapest_lifted_path(qp, h, g, &m, job.v, job.w, job.diff, cap[k])) {
        ok[k] = 1;
        return;
      }
  });
  std::size_t window = static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1));
  verdict.pairs_checked = qp.vertices.size() * qp.vertices.size() * window * window;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (ok[k]) continue;
    const auto& job = jobs[k];
    IntVec from{std::max<long long>(-radius, -radius - job.diff[0]), std::max<long long>(-radius, -radius - job.diff[1])};
    verdict.unwitnessed = UnwitnessedPair{job.v, job.w, from, add(from, job.diff)};
    verdict.reason = "no matching-avoiding path from " + qp.vertices[job.v] + " to " + qp.vertices[job.w] +
                     " shifted by (" + std::to_string(job.diff[0]) + "," + std::to_string(job.diff[1]) +
                     ") within degree " + to_string(g.unscale(cap[k]));
    return verdict;
  }
  verdict.consistent_evidence = true;
  verdict.reason = "all lifted vertex pairs witnessed";
  return verdict;
}

}  // namespace qpoly
