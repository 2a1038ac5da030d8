#pragma once

// Galois quotients, finite covers, path lifting and grading transfer.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qpoly/action.hpp"
#include "qpoly/grading.hpp"
#include "qpoly/homology.hpp"
#include "qpoly/polyhedron.hpp"
#include "qpoly/rewriting.hpp"

namespace qpoly {

// ---------------------------------------------------------------------------
// Group actions

namespace detail {

// Image of a face cycle under an arrow permutation; returns the face it lands on.
inline std::optional<std::size_t> face_image(const QuiverPolyhedron& qp, Sign s, const std::vector<std::size_t>& cycle,
                                             const std::vector<std::size_t>& arrow_map, const Incidence& inc) {
  std::vector<std::size_t> img;
  for (auto a : cycle) img.push_back(arrow_map[a]);
  std::size_t target = inc.slot(s, img.front()).face;
  const auto& t = qp.faces(s)[target].cycle;
  if (t.size() != img.size()) return std::nullopt;
  std::size_t start = inc.slot(s, img.front()).pos;
  for (std::size_t i = 0; i < img.size(); ++i)
    if (t[(start + i) % t.size()] != img[i]) return std::nullopt;
  return target;
}

}  // namespace detail

// All group elements generated by the action (identity first), as joint
// permutations of vertices followed by arrows.
inline std::vector<std::vector<std::size_t>> group_elements(const QuiverPolyhedron& qp, const GroupAction& action,
                                                            std::size_t limit = 100000) {
  const std::size_t nv = qp.vertices.size(), na = qp.arrows.size();
  std::vector<std::size_t> id(nv + na);
  std::iota(id.begin(), id.end(), 0);
  std::vector<std::vector<std::size_t>> gens;
  for (const auto& g : action.generators) {
    if (g.vertex.size() != nv || g.arrow.size() != na) throw ArgumentError("generator size mismatch");
    std::vector<std::size_t> p(nv + na);
    for (std::size_t v = 0; v < nv; ++v) p[v] = g.vertex[v];
    for (std::size_t a = 0; a < na; ++a) p[nv + a] = nv + g.arrow[a];
    gens.push_back(std::move(p));
  }
  std::set<std::vector<std::size_t>> seen{id};
  std::vector<std::vector<std::size_t>> out{id};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& g : gens) {
      std::vector<std::size_t> prod(nv + na);
      for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = g[out[i][k]];
      if (seen.insert(prod).second) {
        if (out.size() >= limit) throw ResourceLimit("group generated by the action is too large");
        out.push_back(std::move(prod));
      }
    }
  }
  return out;
}

// Checks the action: generators respect head/tail and faces (with signs), and
// no nontrivial element fixes a vertex. Throws ArgumentError on failure.
inline void check_action(const QuiverPolyhedron& qp, const GroupAction& action) {
  require_valid(qp);
  auto inc = build_incidence(qp);
  for (std::size_t k = 0; k < action.generators.size(); ++k) {
    const auto& g = action.generators[k];
    if (g.vertex.size() != qp.vertices.size() || g.arrow.size() != qp.arrows.size())
      throw ArgumentError("generator " + std::to_string(k) + " has the wrong size");
    for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
      const auto& src = qp.arrows[a];
      const auto& dst = qp.arrows[g.arrow[a]];
      if (g.vertex[src.tail] != dst.tail || g.vertex[src.head] != dst.head)
        throw ArgumentError("generator " + std::to_string(k) + " does not commute with head/tail at arrow '" +
                            src.id + "'");
    }
    for (Sign s : {Sign::plus, Sign::minus})
      for (const auto& f : qp.faces(s)) {
        auto img = detail::face_image(qp, s, f.cycle, g.arrow, inc);
        if (!img || qp.faces(s)[*img].weight != f.weight)
          throw ArgumentError("generator " + std::to_string(k) + " does not map faces to faces");
      }
  }
  const std::size_t nv = qp.vertices.size();
  for (const auto& e : group_elements(qp, action)) {
    bool identity = true;
    for (std::size_t i = 0; i < e.size(); ++i) identity = identity && e[i] == i;
    if (identity) continue;
    for (std::size_t v = 0; v < nv; ++v)
      if (e[v] == v) throw ArgumentError("action is not free: a nontrivial element fixes vertex '" + qp.vertices[v] + "'");
  }
}

// ---------------------------------------------------------------------------
// Quotients

struct QuotientMap {
  QuiverPolyhedron qp;                     // the quotient
  std::vector<std::size_t> vertex_orbit;  // cover vertex -> quotient vertex
  std::vector<std::size_t> arrow_orbit;   // cover arrow -> quotient arrow
  std::size_t group_order = 1;
};

// Smallest p dividing n with seq rotated by p equal to seq.
inline std::size_t rotation_period(const std::vector<std::size_t>& seq) {
  const std::size_t n = seq.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = seq[i] == seq[(i + p) % n];
    if (ok) return p;
  }
  return n;
}

inline QuotientMap quotient(const QuiverPolyhedron& qp, const GroupAction& action) {
  check_action(qp, action);
  auto elements = group_elements(qp, action);
  const std::size_t nv = qp.vertices.size(), na = qp.arrows.size();
  QuotientMap q;
  q.group_order = elements.size();
  q.qp.name = qp.name + "/" + action.name;

  auto orbits = [&](std::size_t offset, std::size_t count, std::vector<std::size_t>& label) {
    label.assign(count, SIZE_MAX);
    std::vector<std::size_t> first;
    for (std::size_t i = 0; i < count; ++i) {
      if (label[i] != SIZE_MAX) continue;
      for (const auto& e : elements) label[e[offset + i] - offset] = first.size();
      first.push_back(i);
    }
    return first;
  };
  for (auto v : orbits(0, nv, q.vertex_orbit)) q.qp.vertices.push_back(qp.vertices[v]);
  for (auto a : orbits(nv, na, q.arrow_orbit)) {
    const auto& arr = qp.arrows[a];
    q.qp.arrows.push_back({arr.id, q.vertex_orbit[arr.tail], q.vertex_orbit[arr.head]});
  }

  auto inc = build_incidence(qp);
  for (Sign s : {Sign::plus, Sign::minus}) {
    std::vector<char> done(qp.faces(s).size(), 0);
    for (std::size_t f = 0; f < qp.faces(s).size(); ++f) {
      if (done[f]) continue;
      const auto& face = qp.faces(s)[f];
      for (const auto& e : elements) {
        std::vector<std::size_t> amap(na);
        for (std::size_t a = 0; a < na; ++a) amap[a] = e[nv + a] - nv;
        done[*detail::face_image(qp, s, face.cycle, amap, inc)] = 1;
      }
      std::vector<std::size_t> proj;
      for (auto a : face.cycle) proj.push_back(q.arrow_orbit[a]);
      auto period = rotation_period(proj);
      Face d;
      d.cycle.assign(proj.begin(), proj.begin() + static_cast<std::ptrdiff_t>(period));
      d.weight = face.weight * static_cast<int>(proj.size() / period);
      q.qp.faces(s).push_back(std::move(d));
    }
  }
  if (auto report = validate_polyhedron(q.qp); !report.empty())
    throw ArgumentError("quotient is not a quiver polyhedron: " + format_violation(report.front()));
  return q;
}

// ---------------------------------------------------------------------------
// Finite covers

struct CoverMap {
  QuiverPolyhedron cover;
  QuiverPolyhedron base;
  std::vector<std::size_t> vertex_proj;  // cover vertex -> base vertex
  std::vector<std::size_t> arrow_proj;   // cover arrow -> base arrow
  GroupAction deck;                      // deck transformations of the cover
};

// Lift of q anchored at cover vertex v, which must project to head(q).
inline Path lift_path(const CoverMap& map, const Path& q, std::size_t v) {
  if (v >= map.cover.vertices.size() || map.vertex_proj[v] != head(map.base, q))
    throw ArgumentError("lift anchor does not project to the head of the path");
  if (q.arrows.empty()) return trivial_path(v);
  Path out;
  out.base_vertex = v;
  std::size_t cur = v;
  for (auto a : q.arrows) {
    std::optional<std::size_t> hit;
    for (std::size_t b = 0; b < map.cover.arrows.size(); ++b)
      if (map.arrow_proj[b] == a && map.cover.arrows[b].head == cur) {
        hit = b;
        break;
      }
    if (!hit) throw ArgumentError("cover map has no lift of arrow '" + map.base.arrows[a].id + "'");
    out.arrows.push_back(*hit);
    cur = map.cover.arrows[*hit].tail;
  }
  return out;
}

inline Path project_path(const CoverMap& map, const Path& p) {
  Path out;
  for (auto a : p.arrows) out.arrows.push_back(map.arrow_proj[a]);
  out.base_vertex = map.vertex_proj[p.base_vertex];
  return out;
}

namespace detail {

// Builds a cover from a voltage assignment in a finite abelian group given by
// its elements, an addition table and a per-arrow voltage. Faces lift by
// walking the face power until the lift closes.
struct VoltageGroup {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> add;  // add[g][h]
};

inline CoverMap voltage_cover(const QuiverPolyhedron& qp, const VoltageGroup& group,
                              const std::vector<std::size_t>& voltage, const std::vector<std::size_t>& deck_shifts,
                              bool unweight) {
  const std::size_t n = group.labels.size();
  CoverMap m;
  m.base = qp;
  m.cover.name = qp.name + "~" + std::to_string(n);
  for (std::size_t v = 0; v < qp.vertices.size(); ++v)
    for (std::size_t g = 0; g < n; ++g) {
      m.cover.vertices.push_back(qp.vertices[v] + group.labels[g]);
      m.vertex_proj.push_back(v);
    }
  auto cv = [&](std::size_t v, std::size_t g) { return v * n + g; };
  for (std::size_t a = 0; a < qp.arrows.size(); ++a)
    for (std::size_t g = 0; g < n; ++g) {
      const auto& arr = qp.arrows[a];
      m.cover.arrows.push_back({arr.id + group.labels[g], cv(arr.tail, g), cv(arr.head, group.add[g][voltage[a]])});
      m.arrow_proj.push_back(a);
    }
  auto ca = [&](std::size_t a, std::size_t g) { return a * n + g; };
  // arrow lift with given head group element: tail element t with t + volt = head
  auto lift_with_head = [&](std::size_t a, std::size_t head_g) {
    for (std::size_t t = 0; t < n; ++t)
      if (group.add[t][voltage[a]] == head_g) return t;
    throw std::logic_error("voltage group is not a group");
  };
  for (Sign s : {Sign::plus, Sign::minus}) {
    for (const auto& f : qp.faces(s)) {
      std::vector<char> used(n, 0);
      for (std::size_t g0 = 0; g0 < n; ++g0) {
        // g0 labels the head of the first arrow of the lifted face
        if (used[g0]) continue;
        Face lifted;
        std::size_t g = g0;
        std::size_t laps = 0;
        do {
          for (auto a : f.cycle) {
            auto t = lift_with_head(a, g);
            lifted.cycle.push_back(ca(a, t));
            g = t;
          }
          ++laps;
          if (laps > n) throw std::logic_error("lifted face does not close");
          used[g] = 1;
        } while (g != g0);
        used[g0] = 1;
        if (unweight) {
          if (static_cast<int>(laps) != f.weight)
            throw ArgumentError("voltage does not unwrap face weights");
          lifted.weight = 1;
        } else {
          if (laps != 1) throw ArgumentError("translation cover: face lift does not close in one lap");
          lifted.weight = f.weight;
        }
        m.cover.faces(s).push_back(std::move(lifted));
      }
    }
  }
  for (auto shift : deck_shifts) {
    Symmetry sym;
    for (std::size_t v = 0; v < qp.vertices.size(); ++v)
      for (std::size_t g = 0; g < n; ++g) sym.vertex.push_back(cv(v, group.add[g][shift]));
    for (std::size_t a = 0; a < qp.arrows.size(); ++a)
      for (std::size_t g = 0; g < n; ++g) sym.arrow.push_back(ca(a, group.add[g][shift]));
    m.deck.generators.push_back(std::move(sym));
  }
  m.deck.name = "deck";
  return m;
}

}  // namespace detail

// Finite translation cover of a genus-1 polyhedron for the sublattice of Z^2
// spanned by the rows of `lattice`. Cover vertices are labelled v[i,j].
inline CoverMap translation_cover(const QuiverPolyhedron& qp, IntMatrix lattice) {
  auto h = homology(qp);
  if (h.genus != 1) throw UnsupportedTopology("translation covers need genus 1");
  if (lattice.size() != 2 || lattice[0].size() != 2 || lattice[1].size() != 2)
    throw ArgumentError("lattice must be a 2x2 integer matrix");
  detail::hermite_rows(lattice);
  long long a = lattice[0][0], b = lattice[0][1], d = lattice[1].size() > 1 ? lattice[1][1] : 0;
  if (lattice[1][0] != 0 || a <= 0 || d <= 0) throw ArgumentError("lattice must have full rank");
  // coset representatives (i, j) with 0 <= i < a, 0 <= j < d
  auto reduce = [&](long long x, long long y) {
    long long q = detail::floor_div(x, a);
    x -= q * a;
    y -= q * b;
    y -= detail::floor_div(y, d) * d;
    return std::pair{x, y};
  };
  detail::VoltageGroup group;
  std::vector<std::pair<long long, long long>> reps;
  for (long long i = 0; i < a; ++i)
    for (long long j = 0; j < d; ++j) {
      reps.emplace_back(i, j);
      group.labels.push_back("[" + std::to_string(i) + "," + std::to_string(j) + "]");
    }
  auto index_of = [&](std::pair<long long, long long> p) {
    return static_cast<std::size_t>(p.first * d + p.second);
  };
  const std::size_t n = reps.size();
  group.add.assign(n, std::vector<std::size_t>(n));
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t k = 0; k < n; ++k)
      group.add[g][k] = index_of(reduce(reps[g].first + reps[k].first, reps[g].second + reps[k].second));
  std::vector<std::size_t> voltage;
  for (const auto& cls : h.arrow_class) voltage.push_back(index_of(reduce(cls[0], cls[1])));
  std::vector<std::size_t> shifts{index_of(reduce(1, 0)), index_of(reduce(0, 1))};
  auto m = detail::voltage_cover(qp, group, voltage, shifts, false);
  m.cover.name = qp.name + "~" + std::to_string(n);
  return m;
}

// Searches Z/n voltages (n = lcm of the weights) for a cover on which every
// face power unwraps to a weight-one face. Returns nullopt if none exists.
inline std::optional<CoverMap> unweighted_cyclic_cover(const QuiverPolyhedron& qp, std::size_t max_candidates = 2'000'000) {
  require_valid(qp);
  if (qp.unweighted()) return std::nullopt;
  long long n = 1;
  for (Sign s : {Sign::plus, Sign::minus})
    for (const auto& f : qp.faces(s)) n = std::lcm(n, static_cast<long long>(f.weight));
  const std::size_t na = qp.arrows.size();
  double combos = std::pow(static_cast<double>(n), static_cast<double>(na));
  if (combos > static_cast<double>(max_candidates))
    throw ResourceLimit("unweighted cover search space too large");
  detail::VoltageGroup group;
  for (long long i = 0; i < n; ++i) group.labels.push_back("#" + std::to_string(i));
  group.add.assign(n, std::vector<std::size_t>(n));
  for (long long i = 0; i < n; ++i)
    for (long long j = 0; j < n; ++j) group.add[i][j] = static_cast<std::size_t>((i + j) % n);

  std::vector<std::size_t> voltage(na, 0);
  auto face_ok = [&]() {
    for (Sign s : {Sign::plus, Sign::minus})
      for (const auto& f : qp.faces(s)) {
        long long sum = 0;
        for (auto a : f.cycle) sum += static_cast<long long>(voltage[a]);
        long long order = n / std::gcd(sum % n, n);
        if (order != f.weight) return false;
      }
    return true;
  };
  while (true) {
    if (face_ok()) {
      auto m = detail::voltage_cover(qp, group, voltage, {1 % static_cast<std::size_t>(n)}, true);
      if (validate_polyhedron(m.cover).empty()) return m;
    }
    std::size_t k = 0;
    while (k < na && ++voltage[k] == static_cast<std::size_t>(n)) voltage[k++] = 0;
    if (k == na) break;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Universal cover windows (genus 1)

struct LiftedArrow {
  std::size_t arrow;
  IntVec tail_offset;
  IntVec head_offset;
  bool internal;  // head also inside the window
};

struct LiftedWindow {
  std::vector<std::pair<std::size_t, IntVec>> vertices;  // (base vertex, offset)
  std::vector<LiftedArrow> arrows;                        // every lifted arrow leaving a window vertex

  std::size_t internal_arrow_count() const {
    return static_cast<std::size_t>(std::count_if(arrows.begin(), arrows.end(), [](const auto& a) { return a.internal; }));
  }
};

inline LiftedWindow abelian_cover_window(const QuiverPolyhedron& qp, int radius) {
  auto h = homology(qp);
  if (h.genus != 1) throw UnsupportedTopology("abelian cover windows need genus 1");
  if (radius < 0) throw ArgumentError("radius must be nonnegative");
  auto inside = [&](const IntVec& o) { return std::llabs(o[0]) <= radius && std::llabs(o[1]) <= radius; };
  LiftedWindow w;
  for (std::size_t v = 0; v < qp.vertices.size(); ++v)
    for (long long i = -radius; i <= radius; ++i)
      for (long long j = -radius; j <= radius; ++j) w.vertices.push_back({v, IntVec{i, j}});
  for (const auto& [v, off] : w.vertices)
    for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
      if (qp.arrows[a].tail != v) continue;
      IntVec head_off = add(off, h.arrow_class[a]);
      w.arrows.push_back({a, off, head_off, inside(head_off)});
    }
  return w;
}

// ---------------------------------------------------------------------------
// Isomorphism of labelled structures (orientation and signs preserved)

namespace detail {

inline std::vector<long long> encode_from(const QuiverPolyhedron& qp, const Incidence& inc, std::size_t start) {
  const std::size_t na = qp.arrows.size();
  std::vector<long long> label(na, -1), vlabel(qp.vertices.size(), -1);
  std::vector<std::size_t> order{start};
  label[start] = 0;
  long long next_vertex = 0;
  std::vector<long long> code;
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto a = order[i];
    for (auto v : {qp.arrows[a].head, qp.arrows[a].tail}) {
      if (vlabel[v] < 0) vlabel[v] = next_vertex++;
      code.push_back(vlabel[v]);
    }
    for (Sign s : {Sign::plus, Sign::minus}) {
      auto b = face_successor(qp, inc, s, a);
      if (label[b] < 0) {
        label[b] = static_cast<long long>(order.size());
        order.push_back(b);
      }
      code.push_back(label[b]);
      code.push_back(qp.faces(s)[inc.slot(s, a).face].weight);
    }
  }
  if (order.size() != na) code.push_back(-1);  // disconnected
  return code;
}

}  // namespace detail

inline std::vector<long long> canonical_code(const QuiverPolyhedron& qp) {
  auto inc = build_incidence(qp);
  std::vector<long long> best;
  for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
    auto code = detail::encode_from(qp, inc, a);
    if (best.empty() || code < best) best = std::move(code);
  }
  best.insert(best.begin(), {static_cast<long long>(qp.vertices.size()), static_cast<long long>(qp.arrows.size())});
  return best;
}

inline bool isomorphic(const QuiverPolyhedron& a, const QuiverPolyhedron& b) {
  if (a.vertices.size() != b.vertices.size() || a.arrows.size() != b.arrows.size() ||
      a.faces_plus.size() != b.faces_plus.size() || a.faces_minus.size() != b.faces_minus.size())
    return false;
  return canonical_code(a) == canonical_code(b);
}

// ---------------------------------------------------------------------------
// Grading transfer between a cover and its quotient

// Pushes a cover grading down by averaging over each orbit.
inline std::vector<Rational> push_grading(const QuotientMap& q, const std::vector<Rational>& cover_charge) {
  std::vector<Rational> sum(q.qp.arrows.size(), 0);
  std::vector<long long> count(q.qp.arrows.size(), 0);
  for (std::size_t a = 0; a < cover_charge.size(); ++a) {
    sum[q.arrow_orbit[a]] += cover_charge[a];
    ++count[q.arrow_orbit[a]];
  }
  for (std::size_t a = 0; a < sum.size(); ++a) sum[a] /= count[a];
  return sum;
}

inline std::vector<Rational> pull_grading(const std::vector<std::size_t>& arrow_proj, const std::vector<Rational>& base_charge) {
  std::vector<Rational> out;
  for (auto b : arrow_proj) out.push_back(base_charge.at(b));
  return out;
}

struct TransferVerdict {
  bool agree = false;
  CancellationVerdict cover;
  CancellationVerdict quotient;
};

// Cancellation verdicts on qp and on its quotient by the action, with the
// grading pushed forward.
inline TransferVerdict cancellation_transfer_check(const QuiverPolyhedron& qp, const GroupAction& action,
                                                   const std::vector<Rational>& charge, const Rational& bound,
                                                   const RewriteOptions& options = {}) {
  auto q = quotient(qp, action);
  auto qcharge = push_grading(q, charge);
  TransferVerdict v;
  v.cover = cancellation_check(qp, charge, bound, options);
  v.quotient = cancellation_check(q.qp, qcharge, bound, options);
  v.agree = v.cover.holds == v.quotient.holds;
  return v;
}

}  // namespace qpoly
