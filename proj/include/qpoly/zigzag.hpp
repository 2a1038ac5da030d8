#pragma once

// Zigzag paths and condition Z on genus-1 unweighted polyhedra.
//
// Step convention: a zigzag path is a sequence Z[0], Z[1], ... with
// Z[i+1] = face_predecessor(+, Z[i]) for even i and face_predecessor(-, Z[i])
// for odd i, so each consecutive pair forms a length-2 arc of a face and the
// sequence runs in application order (tail(Z[i+1]) == head(Z[i])).
// On hex1 (+xyz, -xzy) this gives the period-2 paths [x,z], [y,x], [z,y].

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "qpoly/covers.hpp"
#include "qpoly/homology.hpp"
#include "qpoly/parallel.hpp"
#include "qpoly/polyhedron.hpp"

namespace qpoly {

struct ZigzagPath {
  std::vector<std::size_t> period;  // period[0] sits at an even position
  IntVec homology;                  // empty unless genus 1
};

namespace detail {

inline std::size_t zigzag_step(const QuiverPolyhedron& qp, const Incidence& inc, std::size_t arrow, bool even) {
  return face_predecessor(qp, inc, even ? Sign::plus : Sign::minus, arrow);
}

inline void require_unweighted(const QuiverPolyhedron& qp, const char* what) {
  if (!qp.unweighted())
    throw UnsupportedTopology(std::string(what) + " needs an unweighted polyhedron; lift to an unweighted cover first");
}

inline HomologyData require_torus(const QuiverPolyhedron& qp, const char* what) {
  auto h = homology(qp);
  if (h.genus != 1)
    throw UnsupportedTopology(std::string(what) + " is only available for genus 1 (got genus " +
                              std::to_string(h.genus) + ")");
  return h;
}

// One period of the ray starting at `arrow` with the given parity.
inline std::vector<std::size_t> zigzag_cycle(const QuiverPolyhedron& qp, const Incidence& inc, std::size_t arrow,
                                             bool even) {
  std::vector<std::size_t> seq{arrow};
  bool parity = even;
  std::size_t cur = arrow;
  while (true) {
    cur = zigzag_step(qp, inc, cur, parity);
    parity = !parity;
    if (cur == arrow && parity == even) break;
    seq.push_back(cur);
  }
  return seq;
}

}  // namespace detail

inline std::vector<ZigzagPath> zigzag_paths(const QuiverPolyhedron& qp) {
  require_valid(qp);
  detail::require_unweighted(qp, "zigzag paths");
  auto inc = build_incidence(qp);
  std::optional<HomologyData> h;
  if (auto hd = homology(qp); hd.genus == 1) h = std::move(hd);
  std::vector<char> covered(qp.arrows.size(), 0);
  std::vector<ZigzagPath> out;
  for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
    if (covered[a]) continue;
    ZigzagPath z;
    z.period = detail::zigzag_cycle(qp, inc, a, true);
    for (std::size_t i = 0; i < z.period.size(); i += 2) covered[z.period[i]] = 1;
    if (h) {
      z.homology.assign(2, 0);
      for (auto b : z.period) z.homology = add(z.homology, h->arrow_class[b]);
    }
    out.push_back(std::move(z));
  }
  return out;
}

inline IntVec zigzag_homology(const QuiverPolyhedron& qp, const ZigzagPath& z) {
  auto h = detail::require_torus(qp, "zigzag homology");
  IntVec sum(2, 0);
  for (auto b : z.period) sum = add(sum, h.arrow_class[b]);
  return sum;
}

// The zigzag path containing `arrow` at an even (zig, +) or odd (zag, -) position.
struct ZigzagSlot {
  std::size_t path = 0;
  std::size_t position = 0;
};

struct ZigzagIndex {
  std::vector<ZigzagPath> paths;
  std::vector<ZigzagSlot> plus, minus;  // per arrow
};

inline ZigzagIndex zigzag_index(const QuiverPolyhedron& qp) {
  ZigzagIndex idx;
  idx.paths = zigzag_paths(qp);
  idx.plus.resize(qp.arrows.size());
  idx.minus.resize(qp.arrows.size());
  for (std::size_t p = 0; p < idx.paths.size(); ++p)
    for (std::size_t i = 0; i < idx.paths[p].period.size(); ++i)
      (i % 2 == 0 ? idx.plus : idx.minus)[idx.paths[p].period[i]] = {p, i};
  return idx;
}

struct RayIntersectionCertificate {
  std::size_t arrow = 0;     // the ray origin a
  std::size_t i = 0, j = 0;  // Z+_a[i] == Z-_a[j], both > 0
  std::size_t meeting_arrow = 0;
  IntVec offset;             // tail offset of the common lifted arrow
};

struct ConditionZResult {
  bool passes = true;
  std::optional<RayIntersectionCertificate> certificate;
};

namespace detail {

// A ray in lifted coordinates: one period of base arrows with tail offsets
// relative to the start, plus the per-period translation.
struct Ray {
  std::vector<std::size_t> arrows;
  std::vector<IntVec> offset;
  IntVec shift;
};

inline Ray make_ray(const QuiverPolyhedron& qp, const Incidence& inc, const HomologyData& h, std::size_t a, bool plus) {
  Ray r;
  r.arrows = zigzag_cycle(qp, inc, a, plus);
  IntVec o(2, 0);
  for (auto b : r.arrows) {
    r.offset.push_back(o);
    o = add(o, h.arrow_class[b]);
  }
  r.shift = o;
  return r;
}

inline long long cross(const IntVec& u, const IntVec& v) { return u[0] * v[1] - u[1] * v[0]; }

// Integer t with v == t * g, for g primitive and nonzero.
inline std::optional<long long> multiple_of(const IntVec& v, const IntVec& g) {
  if (cross(v, g) != 0) return std::nullopt;
  if (g[0] != 0) {
    if (v[0] % g[0]) return std::nullopt;
    return v[0] / g[0];
  }
  if (v[1] % g[1]) return std::nullopt;
  return v[1] / g[1];
}

inline IntVec primitive(const IntVec& v) {
  long long g = std::gcd(std::llabs(v[0]), std::llabs(v[1]));
  return {v[0] / g, v[1] / g};
}

// Smallest (k, l) >= 0 (by k, then l) with k*h - l*hp == d and k >= kmin, l >= lmin.
inline std::optional<std::pair<long long, long long>> solve_ray_meeting(const IntVec& h, const IntVec& hp,
                                                                         const IntVec& d, long long kmin,
                                                                         long long lmin) {
  long long det = cross(h, IntVec{-hp[0], -hp[1]});
  if (det != 0) {
    // k*h + l*(-hp) = d by Cramer's rule
    long long kn = cross(d, IntVec{-hp[0], -hp[1]});
    long long ln = cross(h, d);
    if (kn % det || ln % det) return std::nullopt;
    long long k = kn / det, l = ln / det;
    if (k < kmin || l < lmin) return std::nullopt;
    return std::pair{k, l};
  }
  bool hz = is_zero(h), hpz = is_zero(hp);
  if (hz && hpz) {
    if (!is_zero(d)) return std::nullopt;
    return std::pair{kmin, lmin};
  }
  if (hz) {
    // -l*hp == d
    auto g = primitive(hp);
    auto m = multiple_of(d, g);
    auto beta = *multiple_of(hp, g);
    if (!m || (-*m) % beta) return std::nullopt;
    long long l = -*m / beta;
    if (l < lmin) return std::nullopt;
    return std::pair{kmin, l};
  }
  if (hpz) {
    auto g = primitive(h);
    auto m = multiple_of(d, g);
    auto alpha = *multiple_of(h, g);
    if (!m || *m % alpha) return std::nullopt;
    long long k = *m / alpha;
    if (k < kmin) return std::nullopt;
    return std::pair{k, lmin};
  }
  // parallel: h = alpha g, hp = beta g, d = m g; need k alpha - l beta = m
  auto g = primitive(h);
  auto m = multiple_of(d, g);
  if (!m) return std::nullopt;
  long long alpha = *multiple_of(h, g), beta = *multiple_of(hp, g);
  long long kmax = kmin + std::llabs(beta) + std::llabs(*m) / std::llabs(alpha) + std::llabs(lmin * beta) + 2;
  for (long long k = kmin; k <= kmax; ++k) {
    long long rest = k * alpha - *m;
    if (rest % beta) continue;
    long long l = rest / beta;
    if (l >= lmin) return std::pair{k, l};
  }
  return std::nullopt;
}

inline std::optional<RayIntersectionCertificate> check_arrow(const QuiverPolyhedron& qp, const Incidence& inc,
                                                             const HomologyData& h, std::size_t a) {
  Ray zig = make_ray(qp, inc, h, a, true), zag = make_ray(qp, inc, h, a, false);
  std::optional<RayIntersectionCertificate> best;
  const long long P = static_cast<long long>(zig.arrows.size()), Q = static_cast<long long>(zag.arrows.size());
  for (std::size_t i0 = 0; i0 < zig.arrows.size(); ++i0)
    for (std::size_t j0 = 0; j0 < zag.arrows.size(); ++j0) {
      if (zig.arrows[i0] != zag.arrows[j0]) continue;
      IntVec d = sub(zag.offset[j0], zig.offset[i0]);
      auto kl = solve_ray_meeting(zig.shift, zag.shift, d, i0 == 0 ? 1 : 0, j0 == 0 ? 1 : 0);
      if (!kl) continue;
      RayIntersectionCertificate c;
      c.arrow = a;
      c.i = static_cast<std::size_t>(static_cast<long long>(i0) + kl->first * P);
      c.j = static_cast<std::size_t>(static_cast<long long>(j0) + kl->second * Q);
      c.meeting_arrow = zig.arrows[i0];
      c.offset = add(zig.offset[i0], scale(zig.shift, kl->first));
      if (!best || std::pair{c.i, c.j} < std::pair{best->i, best->j}) best = std::move(c);
    }
  return best;
}

}  // namespace detail

inline ConditionZResult condition_z(const QuiverPolyhedron& qp) {
  require_valid(qp);
  detail::require_unweighted(qp, "condition Z");
  auto h = detail::require_torus(qp, "condition Z");
  auto inc = build_incidence(qp);
  std::vector<std::optional<RayIntersectionCertificate>> found(qp.arrows.size());
  parallel_for(qp.arrows.size(), [&](std::size_t a) { found[a] = detail::check_arrow(qp, inc, h, a); });
  ConditionZResult r;
  for (auto& c : found)
    if (c) {
      r.passes = false;
      r.certificate = std::move(c);
      break;
    }
  return r;
}

// Does the lift of z to the universal cover revisit a lifted arrow?
inline bool zigzag_self_intersects(const QuiverPolyhedron& qp, const ZigzagPath& z) {
  detail::require_unweighted(qp, "zigzag self-intersection");
  auto h = detail::require_torus(qp, "zigzag self-intersection");
  IntVec shift(2, 0);
  std::vector<IntVec> offset;
  for (auto b : z.period) {
    offset.push_back(shift);
    shift = add(shift, h.arrow_class[b]);
  }
  if (is_zero(shift)) return true;  // the lift closes up and repeats itself
  auto g = detail::primitive(shift);
  long long alpha = *detail::multiple_of(shift, g);
  for (std::size_t i = 0; i < z.period.size(); ++i)
    for (std::size_t j = i + 1; j < z.period.size(); ++j) {
      if (z.period[i] != z.period[j]) continue;
      auto m = detail::multiple_of(sub(offset[j], offset[i]), g);
      if (m && *m % alpha == 0) return true;
    }
  return false;
}

struct CoverConditionZ {
  ConditionZResult result;
  std::optional<CoverMap> cover;  // set when the check ran on an unweighted cover
};

// Condition Z for unweighted tori directly, and for weighted polyhedra with
// orbifold Euler characteristic zero via an unweighted cyclic cover.
inline CoverConditionZ condition_z_any(const QuiverPolyhedron& qp) {
  CoverConditionZ out;
  if (qp.unweighted()) {
    out.result = condition_z(qp);
    return out;
  }
  if (euler_characteristic(qp) != 0)
    throw UnsupportedTopology("condition Z needs orbifold Euler characteristic 0");
  auto cover = unweighted_cyclic_cover(qp);
  if (!cover) throw UnsupportedTopology("no unweighted cyclic cover found");
  out.result = condition_z(cover->cover);
  out.cover = std::move(cover);
  return out;
}

}  // namespace qpoly
