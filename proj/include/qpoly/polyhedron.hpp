#pragma once

// Weighted quiver polyhedra: data model, axiom checks, topological invariants,
// superpotential and Jacobi relations.
//
// Paths are written right-to-left: the path [a0, a1, ..., ak] applies ak first
// and a0 last, so tail(a_i) == head(a_{i+1}). Face cycles are stored in the
// same written order.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qpoly/errors.hpp"
#include "qpoly/rational.hpp"

namespace qpoly {

enum class Sign { plus, minus };

inline int sign_value(Sign s) { return s == Sign::plus ? 1 : -1; }
inline Sign opposite(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }

struct Arrow {
  std::string id;
  std::size_t tail = 0;
  std::size_t head = 0;
};

struct Face {
  std::vector<std::size_t> cycle;  // arrow indices, written order
  int weight = 1;
};

struct FaceRef {
  Sign sign = Sign::plus;
  std::size_t index = 0;
  auto operator<=>(const FaceRef&) const = default;
};

struct QuiverPolyhedron {
  std::string name;
  std::vector<std::string> vertices;
  std::vector<Arrow> arrows;
  std::vector<Face> faces_plus;
  std::vector<Face> faces_minus;

  const std::vector<Face>& faces(Sign s) const { return s == Sign::plus ? faces_plus : faces_minus; }
  std::vector<Face>& faces(Sign s) { return s == Sign::plus ? faces_plus : faces_minus; }
  const Face& face(FaceRef r) const { return faces(r.sign).at(r.index); }

  std::size_t face_count() const { return faces_plus.size() + faces_minus.size(); }

  // Global face numbering: positive faces first, then negative ones.
  FaceRef face_ref(std::size_t global) const {
    if (global < faces_plus.size()) return {Sign::plus, global};
    return {Sign::minus, global - faces_plus.size()};
  }
  std::size_t global_index(FaceRef r) const {
    return r.sign == Sign::plus ? r.index : faces_plus.size() + r.index;
  }

  bool unweighted() const {
    auto one = [](const Face& f) { return f.weight == 1; };
    return std::all_of(faces_plus.begin(), faces_plus.end(), one) &&
           std::all_of(faces_minus.begin(), faces_minus.end(), one);
  }

  std::optional<std::size_t> find_arrow(std::string_view id) const {
    for (std::size_t i = 0; i < arrows.size(); ++i)
      if (arrows[i].id == id) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> find_vertex(std::string_view id) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == id) return i;
    return std::nullopt;
  }
};

// ---------------------------------------------------------------------------
// Paths

struct Path {
  std::vector<std::size_t> arrows;  // written order, leftmost applied last
  std::size_t base_vertex = 0;      // only meaningful for the trivial path

  bool trivial() const { return arrows.empty(); }
  std::size_t length() const { return arrows.size(); }
  bool operator==(const Path& o) const {
    return arrows == o.arrows && (!arrows.empty() || base_vertex == o.base_vertex);
  }
};

inline std::size_t head(const QuiverPolyhedron& qp, const Path& p) {
  return p.arrows.empty() ? p.base_vertex : qp.arrows[p.arrows.front()].head;
}
inline std::size_t tail(const QuiverPolyhedron& qp, const Path& p) {
  return p.arrows.empty() ? p.base_vertex : qp.arrows[p.arrows.back()].tail;
}

inline bool composes(const QuiverPolyhedron& qp, const std::vector<std::size_t>& arrows) {
  for (std::size_t i = 0; i + 1 < arrows.size(); ++i)
    if (qp.arrows[arrows[i]].tail != qp.arrows[arrows[i + 1]].head) return false;
  return true;
}

inline Path make_path(const QuiverPolyhedron& qp, std::vector<std::size_t> arrows) {
  if (!composes(qp, arrows)) throw ArgumentError("arrows do not compose into a path");
  Path p;
  p.arrows = std::move(arrows);
  if (!p.arrows.empty()) p.base_vertex = qp.arrows[p.arrows.front()].head;
  return p;
}

inline Path trivial_path(std::size_t vertex) { return Path{{}, vertex}; }

// p * q: q is applied first, so tail(p) must equal head(q).
inline Path concat(const QuiverPolyhedron& qp, const Path& p, const Path& q) {
  if (tail(qp, p) != head(qp, q)) throw ArgumentError("paths do not compose: tail(p) != head(q)");
  Path r;
  r.arrows = p.arrows;
  r.arrows.insert(r.arrows.end(), q.arrows.begin(), q.arrows.end());
  r.base_vertex = head(qp, p);
  return r;
}

// Parses "x*y*z" (or "1" / "e_v" style trivial paths are not supported here).
inline Path parse_path(const QuiverPolyhedron& qp, std::string_view text) {
  std::vector<std::size_t> ids;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto stop = text.find('*', start);
    if (stop == std::string_view::npos) stop = text.size();
    auto token = text.substr(start, stop - start);
    auto id = qp.find_arrow(token);
    if (!id) throw InputError("unknown arrow '" + std::string(token) + "' in path");
    ids.push_back(*id);
    start = stop + 1;
  }
  return make_path(qp, std::move(ids));
}

inline std::string format_path(const QuiverPolyhedron& qp, const Path& p) {
  if (p.arrows.empty()) return "e_" + qp.vertices.at(p.base_vertex);
  std::string out;
  for (std::size_t i = 0; i < p.arrows.size(); ++i) {
    if (i) out += '*';
    out += qp.arrows[p.arrows[i]].id;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural checks

inline void check_references(const QuiverPolyhedron& qp) {
  for (const auto& a : qp.arrows) {
    if (a.tail >= qp.vertices.size() || a.head >= qp.vertices.size())
      throw InputError("arrow '" + a.id + "' references a missing vertex");
  }
  for (Sign s : {Sign::plus, Sign::minus}) {
    for (std::size_t f = 0; f < qp.faces(s).size(); ++f) {
      for (auto a : qp.faces(s)[f].cycle)
        if (a >= qp.arrows.size())
          throw InputError(std::string(s == Sign::plus ? "positive" : "negative") + " face " +
                           std::to_string(f) + " references a missing arrow");
    }
  }
}

enum class Axiom { composability, orientability, manifold, connectivity, weighting };

inline std::string_view axiom_name(Axiom a) {
  switch (a) {
    case Axiom::composability: return "composability";
    case Axiom::orientability: return "PO";
    case Axiom::manifold: return "PM";
    case Axiom::connectivity: return "connectivity";
    case Axiom::weighting: return "weighting";
  }
  return "?";
}

struct Violation {
  Axiom axiom;
  std::string element;
  std::string detail;
};

using ValidationReport = std::vector<Violation>;

inline std::string face_label(const QuiverPolyhedron& qp, FaceRef r) {
  std::string s = r.sign == Sign::plus ? "+" : "-";
  const auto& f = qp.face(r);
  for (std::size_t i = 0; i < f.cycle.size(); ++i) s += (i ? "*" : "") + qp.arrows[f.cycle[i]].id;
  return s;
}

namespace detail {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a < b) std::swap(a, b);
    parent[a] = b;  // smaller index becomes the root
    return true;
  }
};

inline bool strongly_connected(const QuiverPolyhedron& qp) {
  const std::size_t n = qp.vertices.size();
  if (n == 0) return false;
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (const auto& a : qp.arrows) {
        std::size_t from = forward ? a.tail : a.head, to = forward ? a.head : a.tail;
        if (from == v && !seen[to]) {
          seen[to] = 1;
          stack.push_back(to);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reach(true) && reach(false);
}

}  // namespace detail

// Lists every violated axiom; an empty report means qp is a weighted quiver
// polyhedron. Dangling references throw InputError instead.
inline ValidationReport validate_polyhedron(const QuiverPolyhedron& qp) {
  check_references(qp);
  ValidationReport report;

  for (Sign s : {Sign::plus, Sign::minus}) {
    for (std::size_t f = 0; f < qp.faces(s).size(); ++f) {
      const Face& face = qp.faces(s)[f];
      FaceRef ref{s, f};
      if (face.cycle.empty()) {
        report.push_back({Axiom::composability, face_label(qp, ref), "empty face cycle"});
        continue;
      }
      bool ok = composes(qp, face.cycle) &&
                qp.arrows[face.cycle.back()].tail == qp.arrows[face.cycle.front()].head;
      if (!ok) report.push_back({Axiom::composability, face_label(qp, ref), "face arrows do not form a cycle"});
      if (face.weight < 1)
        report.push_back({Axiom::weighting, face_label(qp, ref), "weight must be a positive integer"});
      else if (static_cast<long long>(face.weight) * static_cast<long long>(face.cycle.size()) <= 2)
        report.push_back({Axiom::weighting, face_label(qp, ref), "weight times length must exceed 2"});
    }
  }

  for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
    for (Sign s : {Sign::plus, Sign::minus}) {
      std::size_t count = 0;
      for (const auto& face : qp.faces(s)) count += std::count(face.cycle.begin(), face.cycle.end(), a);
      if (count != 1) {
        std::ostringstream msg;
        msg << "arrow lies " << count << " times in " << (s == Sign::plus ? "positive" : "negative")
            << " faces (expected exactly once)";
        report.push_back({Axiom::orientability, qp.arrows[a].id, msg.str()});
      }
    }
  }

  // Manifold condition: at every vertex, the arrow ends meeting it must be
  // linked into one component by the face corners there. A loop contributes
  // both its head end and its tail end.
  {
    const std::size_t m = qp.arrows.size();
    detail::DisjointSets ends(2 * m);  // 2a = head end, 2a+1 = tail end
    for (Sign s : {Sign::plus, Sign::minus}) {
      for (const auto& face : qp.faces(s)) {
        const auto& c = face.cycle;
        for (std::size_t i = 0; i < c.size(); ++i) {
          std::size_t out = c[i], in = c[(i + 1) % c.size()];
          if (qp.arrows[out].tail == qp.arrows[in].head) ends.unite(2 * out + 1, 2 * in);
        }
      }
    }
    for (std::size_t v = 0; v < qp.vertices.size(); ++v) {
      std::set<std::size_t> roots;
      for (std::size_t a = 0; a < m; ++a) {
        if (qp.arrows[a].head == v) roots.insert(ends.find(2 * a));
        if (qp.arrows[a].tail == v) roots.insert(ends.find(2 * a + 1));
      }
      if (roots.empty())
        report.push_back({Axiom::manifold, qp.vertices[v], "no arrows meet this vertex"});
      else if (roots.size() > 1)
        report.push_back({Axiom::manifold, qp.vertices[v],
                          "incidence graph at vertex splits into " + std::to_string(roots.size()) + " components"});
    }
  }

  if (!detail::strongly_connected(qp))
    report.push_back({Axiom::connectivity, qp.name, "quiver is not strongly connected"});
  return report;
}

inline std::string format_violation(const Violation& v) {
  return std::string(axiom_name(v.axiom)) + " " + v.element + ": " + v.detail;
}

inline void require_valid(const QuiverPolyhedron& qp) {
  auto report = validate_polyhedron(qp);
  if (!report.empty()) throw ArgumentError("not a quiver polyhedron: " + format_violation(report.front()));
}

// ---------------------------------------------------------------------------
// Arrow/face incidence (requires PO)

struct Incidence {
  struct Slot {
    std::size_t face = 0;  // index within its sign family
    std::size_t pos = 0;   // position in the face cycle
  };
  std::vector<Slot> plus;
  std::vector<Slot> minus;

  const Slot& slot(Sign s, std::size_t arrow) const { return s == Sign::plus ? plus[arrow] : minus[arrow]; }
};

inline Incidence build_incidence(const QuiverPolyhedron& qp) {
  Incidence inc;
  inc.plus.assign(qp.arrows.size(), {});
  inc.minus.assign(qp.arrows.size(), {});
  std::vector<int> seen_plus(qp.arrows.size(), 0), seen_minus(qp.arrows.size(), 0);
  for (Sign s : {Sign::plus, Sign::minus}) {
    auto& slots = s == Sign::plus ? inc.plus : inc.minus;
    auto& seen = s == Sign::plus ? seen_plus : seen_minus;
    for (std::size_t f = 0; f < qp.faces(s).size(); ++f) {
      const auto& c = qp.faces(s)[f].cycle;
      for (std::size_t i = 0; i < c.size(); ++i) {
        slots.at(c[i]) = {f, i};
        ++seen.at(c[i]);
      }
    }
  }
  for (std::size_t a = 0; a < qp.arrows.size(); ++a)
    if (seen_plus[a] != 1 || seen_minus[a] != 1)
      throw ArgumentError("orientability condition fails at arrow '" + qp.arrows[a].id + "'");
  return inc;
}

// The arrow written immediately before `arrow` in its face of the given sign;
// it is applied right after `arrow`.
inline std::size_t face_predecessor(const QuiverPolyhedron& qp, const Incidence& inc, Sign s, std::size_t arrow) {
  const auto& slot = inc.slot(s, arrow);
  const auto& c = qp.faces(s)[slot.face].cycle;
  return c[(slot.pos + c.size() - 1) % c.size()];
}

// The arrow written immediately after `arrow`; it is applied right before it.
inline std::size_t face_successor(const QuiverPolyhedron& qp, const Incidence& inc, Sign s, std::size_t arrow) {
  const auto& slot = inc.slot(s, arrow);
  const auto& c = qp.faces(s)[slot.face].cycle;
  return c[(slot.pos + 1) % c.size()];
}

// Lexicographically least rotation of a face cycle, comparing arrow ids.
inline std::vector<std::size_t> canonical_rotation(const QuiverPolyhedron& qp, const std::vector<std::size_t>& cycle) {
  std::vector<std::size_t> best = cycle;
  auto key = [&](const std::vector<std::size_t>& c) {
    std::vector<std::string> k;
    for (auto a : c) k.push_back(qp.arrows[a].id);
    return k;
  };
  auto best_key = key(best);
  for (std::size_t r = 1; r < cycle.size(); ++r) {
    std::vector<std::size_t> rot(cycle.begin() + r, cycle.end());
    rot.insert(rot.end(), cycle.begin(), cycle.begin() + r);
    auto k = key(rot);
    if (k < best_key) {
      best_key = std::move(k);
      best = std::move(rot);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Invariants

inline Rational euler_characteristic(const QuiverPolyhedron& qp) {
  Rational chi = Rational(static_cast<long long>(qp.vertices.size())) - static_cast<long long>(qp.arrows.size());
  for (Sign s : {Sign::plus, Sign::minus})
    for (const auto& f : qp.faces(s)) chi += Rational(1, f.weight);
  return chi;
}

struct SurfaceTopology {
  int genus = 0;
  std::vector<int> orbifold_points;  // face weights > 1, ascending
};

inline SurfaceTopology surface_topology(const QuiverPolyhedron& qp) {
  long long chi = static_cast<long long>(qp.vertices.size()) - static_cast<long long>(qp.arrows.size()) +
                  static_cast<long long>(qp.face_count());
  if (chi > 2 || (2 - chi) % 2 != 0) throw ArgumentError("face data does not describe a closed orientable surface");
  SurfaceTopology t;
  t.genus = static_cast<int>((2 - chi) / 2);
  for (Sign s : {Sign::plus, Sign::minus})
    for (const auto& f : qp.faces(s))
      if (f.weight > 1) t.orbifold_points.push_back(f.weight);
  std::sort(t.orbifold_points.begin(), t.orbifold_points.end());
  return t;
}

// ---------------------------------------------------------------------------
// Superpotential and Jacobi relations

struct SuperpotentialTerm {
  FaceRef face;
  int sign = 1;
  Rational coefficient;  // 1 / weight
};

struct Superpotential {
  std::vector<SuperpotentialTerm> terms;
};

inline Superpotential superpotential(const QuiverPolyhedron& qp) {
  Superpotential w;
  for (Sign s : {Sign::plus, Sign::minus})
    for (std::size_t f = 0; f < qp.faces(s).size(); ++f)
      w.terms.push_back({FaceRef{s, f}, sign_value(s), Rational(1, qp.faces(s)[f].weight)});
  return w;
}

inline std::string format_superpotential(const QuiverPolyhedron& qp, const Superpotential& w) {
  std::string out;
  for (const auto& t : w.terms) {
    const Face& f = qp.face(t.face);
    out += t.sign > 0 ? (out.empty() ? "+" : " + ") : (out.empty() ? "-" : " - ");
    if (t.coefficient != 1) out += to_string(t.coefficient) + "*";
    std::string cyc;
    for (std::size_t i = 0; i < f.cycle.size(); ++i) cyc += (i ? "*" : "") + qp.arrows[f.cycle[i]].id;
    if (f.weight == 1)
      out += cyc;
    else if (f.cycle.size() == 1)
      out += cyc + "^" + std::to_string(f.weight);
    else
      out += "(" + cyc + ")^" + std::to_string(f.weight);
  }
  return out;
}

struct Relation {
  std::size_t arrow = 0;
  Path lhs;  // from the positive face
  Path rhs;  // from the negative face
};

// Cyclic derivative of c^weight with respect to the arrow at position `pos`:
// rotate so that the arrow leads, then delete it.
inline Path face_derivative(const QuiverPolyhedron& qp, const Face& face, std::size_t pos) {
  const auto& c = face.cycle;
  std::vector<std::size_t> out;
  out.reserve(c.size() * face.weight - 1);
  for (int r = 0; r < face.weight; ++r)
    for (std::size_t k = 0; k < c.size(); ++k) out.push_back(c[(pos + 1 + k) % c.size()]);
  out.pop_back();  // the final entry is the arrow itself
  return make_path(qp, std::move(out));
}

inline std::vector<Relation> jacobi_relations(const QuiverPolyhedron& qp) {
  auto inc = build_incidence(qp);
  std::vector<Relation> rels;
  rels.reserve(qp.arrows.size());
  for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
    const auto& p = inc.plus[a];
    const auto& m = inc.minus[a];
    rels.push_back({a, face_derivative(qp, qp.faces_plus[p.face], p.pos),
                    face_derivative(qp, qp.faces_minus[m.face], m.pos)});
  }
  return rels;
}

}  // namespace qpoly
