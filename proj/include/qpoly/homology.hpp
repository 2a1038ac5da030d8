#pragma once

// First homology of the surface |Q| (weights ignored) and per-arrow classes.
//
// A BFS spanning tree of the underlying graph gauges tree arrows to zero; the
// remaining arrows generate the cycle space, and face boundaries are factored
// out with a diagonal reduction. The resulting basis of Z^{2g} is fixed by a
// Hermite normal form of the arrow-class matrix.

#include <cstdint>
#include <cstdlib>
#include <deque>
#include <utility>
#include <vector>

#include "qpoly/polyhedron.hpp"

namespace qpoly {

using IntVec = std::vector<long long>;
using IntMatrix = std::vector<IntVec>;

namespace detail {

inline long long checked_mul_sub(long long a, long long q, long long b) {
  __int128 r = static_cast<__int128>(a) - static_cast<__int128>(q) * b;
  if (r > INT64_MAX || r < INT64_MIN) throw ResourceLimit("integer overflow in lattice reduction");
  return static_cast<long long>(r);
}

inline long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Row Hermite normal form of `a` (rows x cols): returns the unimodular W with
// W * a == hnf, and overwrites `a` with the HNF. Pivots are positive and
// entries above each pivot lie in [0, pivot).
inline IntMatrix hermite_rows(IntMatrix& a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  IntMatrix w(rows, IntVec(rows, 0));
  for (std::size_t i = 0; i < rows; ++i) w[i][i] = 1;
  auto row_sub = [&](std::size_t dst, std::size_t src, long long q) {
    if (q == 0) return;
    for (std::size_t j = 0; j < cols; ++j) a[dst][j] = checked_mul_sub(a[dst][j], q, a[src][j]);
    for (std::size_t j = 0; j < rows; ++j) w[dst][j] = checked_mul_sub(w[dst][j], q, w[src][j]);
  };
  auto row_neg = [&](std::size_t r) {
    for (auto& v : a[r]) v = -v;
    for (auto& v : w[r]) v = -v;
  };
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < cols && pivot_row < rows; ++c) {
    for (;;) {
      std::optional<std::size_t> best;
      for (std::size_t r = pivot_row; r < rows; ++r)
        if (a[r][c] != 0 && (!best || std::llabs(a[r][c]) < std::llabs(a[*best][c]))) best = r;
      if (!best) break;
      std::swap(a[pivot_row], a[*best]);
      std::swap(w[pivot_row], w[*best]);
      bool clean = true;
      for (std::size_t r = pivot_row + 1; r < rows; ++r) {
        if (a[r][c] == 0) continue;
        row_sub(r, pivot_row, a[r][c] / a[pivot_row][c]);
        if (a[r][c] != 0) clean = false;
      }
      if (clean) break;
    }
    if (a[pivot_row][c] == 0) continue;
    if (a[pivot_row][c] < 0) row_neg(pivot_row);
    for (std::size_t r = 0; r < pivot_row; ++r) row_sub(r, pivot_row, floor_div(a[r][c], a[pivot_row][c]));
    ++pivot_row;
  }
  return w;
}

// Diagonalizes b (m x k) with unimodular row ops U and column ops; returns U
// and the diagonal entries (rank r = diag.size()).
inline std::pair<IntMatrix, IntVec> diagonalize_left(IntMatrix b) {
  const std::size_t m = b.size();
  const std::size_t k = m ? b[0].size() : 0;
  IntMatrix u(m, IntVec(m, 0));
  for (std::size_t i = 0; i < m; ++i) u[i][i] = 1;
  IntVec diag;
  for (std::size_t t = 0; t < std::min(m, k); ++t) {
    for (;;) {
      std::optional<std::pair<std::size_t, std::size_t>> best;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < k; ++j)
          if (b[i][j] != 0 && (!best || std::llabs(b[i][j]) < std::llabs(b[best->first][best->second])))
            best = std::make_pair(i, j);
      if (!best) return {u, diag};
      std::swap(b[t], b[best->first]);
      std::swap(u[t], u[best->first]);
      for (auto& row : b) std::swap(row[t], row[best->second]);
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (b[i][t] == 0) continue;
        long long q = b[i][t] / b[t][t];
        for (std::size_t j = 0; j < k; ++j) b[i][j] = checked_mul_sub(b[i][j], q, b[t][j]);
        for (std::size_t j = 0; j < m; ++j) u[i][j] = checked_mul_sub(u[i][j], q, u[t][j]);
        if (b[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < k; ++j) {
        if (b[t][j] == 0) continue;
        long long q = b[t][j] / b[t][t];
        for (std::size_t i = 0; i < m; ++i) b[i][j] = checked_mul_sub(b[i][j], q, b[i][t]);
        if (b[t][j] != 0) clean = false;
      }
      if (clean) break;
    }
    diag.push_back(b[t][t]);
  }
  return {u, diag};
}

}  // namespace detail

struct SpanningTree {
  std::vector<char> in_tree;                           // per arrow
  std::vector<std::optional<std::size_t>> parent_arrow;  // per vertex
};

inline SpanningTree spanning_tree(const QuiverPolyhedron& qp) {
  SpanningTree t;
  t.in_tree.assign(qp.arrows.size(), 0);
  t.parent_arrow.assign(qp.vertices.size(), std::nullopt);
  if (qp.vertices.empty()) return t;
  std::vector<char> seen(qp.vertices.size(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
      const auto& arr = qp.arrows[a];
      std::size_t other;
      if (arr.tail == v)
        other = arr.head;
      else if (arr.head == v)
        other = arr.tail;
      else
        continue;
      if (seen[other]) continue;
      seen[other] = 1;
      t.in_tree[a] = 1;
      t.parent_arrow[other] = a;
      queue.push_back(other);
    }
  }
  return t;
}

struct HomologyData {
  int genus = 0;
  std::size_t basis_rank = 0;   // 2 * genus
  IntMatrix arrow_class;        // per arrow, length basis_rank
  SpanningTree tree;
};

inline IntVec add(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}
inline IntVec sub(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
inline IntVec scale(const IntVec& a, long long k) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * k;
  return r;
}
inline bool is_zero(const IntVec& a) {
  return std::all_of(a.begin(), a.end(), [](long long v) { return v == 0; });
}

inline HomologyData homology(const QuiverPolyhedron& qp) {
  require_valid(qp);
  HomologyData h;
  h.tree = spanning_tree(qp);
  std::vector<std::size_t> cotree;  // non-tree arrows; coordinates of the cycle space
  std::vector<std::optional<std::size_t>> coord(qp.arrows.size());
  for (std::size_t a = 0; a < qp.arrows.size(); ++a)
    if (!h.tree.in_tree[a]) {
      coord[a] = cotree.size();
      cotree.push_back(a);
    }
  const std::size_t m = cotree.size();

  // face boundary vectors as columns
  IntMatrix b(m, IntVec(qp.face_count(), 0));
  for (std::size_t f = 0; f < qp.face_count(); ++f)
    for (auto a : qp.face(qp.face_ref(f)).cycle)
      if (coord[a]) b[*coord[a]][f] += 1;

  auto [u, diag] = detail::diagonalize_left(b);
  for (auto d : diag)
    if (std::llabs(d) != 1) throw ArgumentError("surface homology has torsion; face data is not a closed orientable surface");
  const std::size_t r = diag.size();
  h.basis_rank = m - r;
  h.genus = static_cast<int>(h.basis_rank / 2);
  if (h.basis_rank % 2 != 0) throw ArgumentError("odd first Betti number");

  // raw classes: rows r..m-1 of U applied to unit vectors
  IntMatrix classes(h.basis_rank, IntVec(qp.arrows.size(), 0));  // basis_rank x arrows
  for (std::size_t a = 0; a < qp.arrows.size(); ++a)
    if (coord[a])
      for (std::size_t i = 0; i < h.basis_rank; ++i) classes[i][a] = u[r + i][*coord[a]];
  detail::hermite_rows(classes);

  h.arrow_class.assign(qp.arrows.size(), IntVec(h.basis_rank, 0));
  for (std::size_t a = 0; a < qp.arrows.size(); ++a)
    for (std::size_t i = 0; i < h.basis_rank; ++i) h.arrow_class[a][i] = classes[i][a];

  for (std::size_t f = 0; f < qp.face_count(); ++f) {
    IntVec sum(h.basis_rank, 0);
    for (auto a : qp.face(qp.face_ref(f)).cycle) sum = add(sum, h.arrow_class[a]);
    if (!is_zero(sum)) throw std::logic_error("face boundary has nonzero homology class");
  }
  return h;
}

inline IntVec path_class(const HomologyData& h, const Path& p) {
  IntVec sum(h.basis_rank, 0);
  for (auto a : p.arrows) sum = add(sum, h.arrow_class[a]);
  return sum;
}

// Evaluates a closed integer 1-cochain (a per-arrow function summing to zero
// around every face) on the homology basis, returning its cohomology class.
inline IntVec cocycle_class(const QuiverPolyhedron& qp, const HomologyData& h, const std::vector<long long>& f) {
  // potential along the tree from vertex 0
  std::vector<long long> pot(qp.vertices.size(), 0);
  std::vector<char> done(qp.vertices.size(), 0);
  done[0] = 1;
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t v = 0; v < qp.vertices.size(); ++v) {
      if (done[v] || !h.tree.parent_arrow[v]) continue;
      auto a = *h.tree.parent_arrow[v];
      const auto& arr = qp.arrows[a];
      if (arr.head == v && done[arr.tail]) {
        pot[v] = pot[arr.tail] + f[a];
      } else if (arr.tail == v && done[arr.head]) {
        pot[v] = pot[arr.head] - f[a];
      } else {
        continue;
      }
      done[v] = 1;
      progress = true;
    }
  }
  // value on the fundamental cycle of each non-tree arrow, paired with its class
  std::vector<std::pair<IntVec, long long>> samples;
  for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
    if (h.tree.in_tree[a]) continue;
    const auto& arr = qp.arrows[a];
    samples.emplace_back(h.arrow_class[a], f[a] + pot[arr.tail] - pot[arr.head]);
  }
  // Solve phi . class = value exactly.
  const std::size_t n = h.basis_rank;
  std::vector<std::vector<Rational>> rows;
  for (const auto& [cls, val] : samples) {
    std::vector<Rational> row(n + 1);
    for (std::size_t i = 0; i < n; ++i) row[i] = cls[i];
    row[n] = val;
    rows.push_back(std::move(row));
  }
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
  for (std::size_t c = 0; c < n; ++c) {
    std::optional<std::size_t> p;
    for (std::size_t r = rank; r < rows.size(); ++r)
      if (rows[r][c] != 0) {
        p = r;
        break;
      }
    if (!p) continue;
    std::swap(rows[rank], rows[*p]);
    Rational inv = 1 / rows[rank][c];
    for (auto& v : rows[rank]) v *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      Rational q = rows[r][c];
      for (std::size_t j = 0; j <= n; ++j) rows[r][j] -= q * rows[rank][j];
    }
    pivots.push_back(c);
    ++rank;
  }
  for (std::size_t r = rank; r < rows.size(); ++r)
    if (rows[r][n] != 0) throw ArgumentError("cochain is not closed on faces");
  IntVec phi(n, 0);
  for (std::size_t k = 0; k < rank; ++k) {
    const Rational& v = rows[k][n];
    if (denominator(v) != 1) throw std::logic_error("non-integral cohomology class");
    phi[pivots[k]] = to_int64(numerator(v));
  }
  return phi;
}

}  // namespace qpoly
