#pragma once

#include <optional>
#include <vector>

#include "qpoly/lp.hpp"
#include "qpoly/polyhedron.hpp"

namespace qpoly {

struct Grading {
  std::vector<Rational> charge;  // per arrow, strictly positive
  Rational face_degree;          // weight(c) * sum of charges over c, common to all faces
};

// weight(c) * sum_{a in c} R_a == degree, one row per face
inline std::vector<lp::Constraint> face_degree_constraints(const QuiverPolyhedron& qp, const Rational& degree) {
  std::vector<lp::Constraint> rows;
  for (Sign s : {Sign::plus, Sign::minus}) {
    for (const auto& f : qp.faces(s)) {
      lp::Constraint c;
      for (auto a : f.cycle) c.terms.emplace_back(a, Rational(f.weight));
      c.relation = lp::Relation::eq;
      c.rhs = degree;
      rows.push_back(std::move(c));
    }
  }
  return rows;
}

inline bool is_grading(const QuiverPolyhedron& qp, const std::vector<Rational>& charge, Rational* degree = nullptr) {
  if (charge.size() != qp.arrows.size()) return false;
  for (const auto& r : charge)
    if (r <= 0) return false;
  std::optional<Rational> k;
  for (Sign s : {Sign::plus, Sign::minus}) {
    for (const auto& f : qp.faces(s)) {
      Rational sum = 0;
      for (auto a : f.cycle) sum += charge[a];
      sum *= f.weight;
      if (k && *k != sum) return false;
      k = sum;
    }
  }
  if (degree && k) *degree = *k;
  return true;
}

// Canonical grading normalized to face degree 2: the leximin point of the
// grading polytope. Absent when no strictly positive grading exists.
inline std::optional<Grading> find_grading(const QuiverPolyhedron& qp) {
  require_valid(qp);
  auto x = lp::leximin_positive(qp.arrows.size(), face_degree_constraints(qp, 2));
  if (!x) return std::nullopt;
  return Grading{std::move(*x), Rational(2)};
}

// ---------------------------------------------------------------------------
// Hall-type criterion on the face/arrow bipartite graph

struct HallResult {
  bool holds = false;
  std::vector<std::size_t> witness_plus;   // S+ (positive face indices)
  std::vector<std::size_t> witness_minus;  // its neighbourhood S-
};

namespace detail {

// Kuhn augmenting-path matching from positive to negative faces, skipping
// one positive and one negative face. Returns the unmatched positive face
// (if any) and the final matching.
struct FaceMatcher {
  const std::vector<std::vector<std::size_t>>& adj;  // positive face -> negative faces
  std::size_t n_minus;
  std::optional<std::size_t> skip_plus, skip_minus;
  std::vector<std::optional<std::size_t>> match_minus;
  std::vector<char> visited;

  bool augment(std::size_t u) {
    for (auto w : adj[u]) {
      if (skip_minus && w == *skip_minus) continue;
      if (visited[w]) continue;
      visited[w] = 1;
      if (!match_minus[w] || augment(*match_minus[w])) {
        match_minus[w] = u;
        return true;
      }
    }
    return false;
  }

  // Returns a Hall violator (positive faces reachable by alternating paths
  // from a free positive face) or nullopt if a perfect matching exists.
  std::optional<std::vector<std::size_t>> run() {
    match_minus.assign(n_minus, std::nullopt);
    for (std::size_t u = 0; u < adj.size(); ++u) {
      if (skip_plus && u == *skip_plus) continue;
      visited.assign(n_minus, 0);
      if (augment(u)) continue;
      // alternating reachability from u
      std::vector<char> in_set(adj.size(), 0), seen_minus(n_minus, 0);
      std::vector<std::size_t> stack{u};
      in_set[u] = 1;
      while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        for (auto w : adj[x]) {
          if ((skip_minus && w == *skip_minus) || seen_minus[w]) continue;
          seen_minus[w] = 1;
          if (match_minus[w] && !in_set[*match_minus[w]]) {
            in_set[*match_minus[w]] = 1;
            stack.push_back(*match_minus[w]);
          }
        }
      }
      std::vector<std::size_t> s;
      for (std::size_t k = 0; k < adj.size(); ++k)
        if (in_set[k]) s.push_back(k);
      return s;
    }
    return std::nullopt;
  }
};

}  // namespace detail

// True iff |Q2+| == |Q2-| and every nonempty proper subset S+ of positive
// faces touches strictly more negative faces than it has members. Checked by
// deficiency: for each pair (u, w) the graph minus u and w must still have a
// perfect matching.
inline HallResult hall_condition(const QuiverPolyhedron& qp) {
  require_valid(qp);
  if (!qp.unweighted()) throw ArgumentError("hall_condition expects an unweighted polyhedron");
  auto inc = build_incidence(qp);
  const std::size_t np = qp.faces_plus.size(), nm = qp.faces_minus.size();
  std::vector<std::vector<std::size_t>> adj(np);
  for (std::size_t u = 0; u < np; ++u) {
    std::set<std::size_t> ws;
    for (auto a : qp.faces_plus[u].cycle) ws.insert(inc.minus[a].face);
    adj[u].assign(ws.begin(), ws.end());
  }
  auto neighbours = [&](const std::vector<std::size_t>& s) {
    std::set<std::size_t> ws;
    for (auto u : s) ws.insert(adj[u].begin(), adj[u].end());
    return std::vector<std::size_t>(ws.begin(), ws.end());
  };

  HallResult res;
  if (np != nm) {
    std::vector<std::size_t> all(np);
    std::iota(all.begin(), all.end(), 0);
    // either S+ = Q2+ has too few neighbours, or (np < nm) the full set is
    // reported as the count mismatch witness
    res.witness_plus = all;
    res.witness_minus = neighbours(all);
    return res;
  }
  for (std::size_t u = 0; u < np; ++u) {
    for (std::size_t w = 0; w < nm; ++w) {
      detail::FaceMatcher m{adj, nm, u, w, {}, {}};
      if (auto bad = m.run()) {
        res.witness_plus = *bad;
        res.witness_minus = neighbours(*bad);
        return res;
      }
    }
  }
  res.holds = true;
  return res;
}

}  // namespace qpoly
