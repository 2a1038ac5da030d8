#pragma once

// Exact rational linear programming: dense two-phase simplex with Bland's
// rule, plus a leximin driver used to pick a canonical strictly positive
// point of a polytope.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qpoly/rational.hpp"

namespace qpoly::lp {

enum class Relation { le, eq, ge };

struct Constraint {
  std::vector<std::pair<std::size_t, Rational>> terms;
  Relation relation = Relation::eq;
  Rational rhs;
};

// maximize objective . x subject to constraints, x >= 0
struct Problem {
  std::size_t num_vars = 0;
  std::vector<Constraint> constraints;
  std::vector<Rational> objective;
};

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  Rational value;
  std::vector<Rational> x;
};

namespace detail {

class Tableau {
 public:
  // rows_: m constraint rows, each of width cols_+1 (last entry = rhs)
  std::vector<std::vector<Rational>> rows;
  std::vector<std::size_t> basis;
  std::size_t cols = 0;

  void pivot(std::size_t r, std::size_t c) {
    Rational inv = 1 / rows[r][c];
    for (auto& v : rows[r]) v *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rational f = rows[i][c];
      for (std::size_t j = 0; j <= cols; ++j)
        if (rows[r][j] != 0) rows[i][j] -= f * rows[r][j];
    }
    basis[r] = c;
  }

  // Maximizes cost . x over columns in `allowed`; returns false when unbounded.
  bool optimize(const std::vector<Rational>& cost, const std::vector<char>& allowed) {
    for (;;) {
      // reduced cost of column j: cost_j - sum_i cost_{basis_i} rows[i][j]
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < cols && !entering; ++j) {
        if (!allowed[j]) continue;
        Rational rc = cost[j];
        for (std::size_t i = 0; i < rows.size(); ++i)
          if (rows[i][j] != 0) rc -= cost[basis[i]] * rows[i][j];
        if (rc > 0) entering = j;
      }
      if (!entering) return true;
      std::optional<std::size_t> leaving;
      Rational best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][*entering] <= 0) continue;
        Rational ratio = rows[i][cols] / rows[i][*entering];
        if (!leaving || ratio < best || (ratio == best && basis[i] < basis[*leaving])) {
          leaving = i;
          best = ratio;
        }
      }
      if (!leaving) return false;
      pivot(*leaving, *entering);
    }
  }
};

}  // namespace detail

inline Result solve(const Problem& problem) {
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.constraints.size();

  // Normalize to nonnegative rhs; count slack and artificial columns.
  struct Row {
    std::vector<Rational> coeff;
    Relation rel;
    Rational rhs;
  };
  std::vector<Row> rows;
  rows.reserve(m);
  for (const auto& c : problem.constraints) {
    Row r{std::vector<Rational>(n), c.relation, c.rhs};
    for (const auto& [j, v] : c.terms) r.coeff.at(j) += v;
    if (r.rhs < 0) {
      for (auto& v : r.coeff) v = -v;
      r.rhs = -r.rhs;
      if (r.rel == Relation::le)
        r.rel = Relation::ge;
      else if (r.rel == Relation::ge)
        r.rel = Relation::le;
    }
    rows.push_back(std::move(r));
  }
  std::size_t slack = 0, artificial = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::eq) ++slack;
    if (r.rel != Relation::le) ++artificial;
  }
  const std::size_t cols = n + slack + artificial;
  detail::Tableau t;
  t.cols = cols;
  t.rows.assign(m, std::vector<Rational>(cols + 1));
  t.basis.assign(m, 0);
  std::size_t s_col = n, a_col = n + slack;
  std::vector<char> is_artificial(cols, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = rows[i].coeff[j];
    t.rows[i][cols] = rows[i].rhs;
    if (rows[i].rel == Relation::le) {
      t.rows[i][s_col] = 1;
      t.basis[i] = s_col++;
    } else {
      if (rows[i].rel == Relation::ge) t.rows[i][s_col++] = -1;
      t.rows[i][a_col] = 1;
      is_artificial[a_col] = 1;
      t.basis[i] = a_col++;
    }
  }

  std::vector<char> all(cols, 1);
  if (artificial > 0) {
    std::vector<Rational> phase1(cols);
    for (std::size_t j = 0; j < cols; ++j)
      if (is_artificial[j]) phase1[j] = -1;
    t.optimize(phase1, all);
    Rational infeas = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (is_artificial[t.basis[i]]) infeas += t.rows[i][cols];
    if (infeas != 0) return {Status::infeasible, 0, {}};
    // Drive remaining (zero-valued) artificials out of the basis.
    for (std::size_t i = 0; i < t.rows.size();) {
      if (!is_artificial[t.basis[i]]) {
        ++i;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < cols && !col; ++j)
        if (!is_artificial[j] && t.rows[i][j] != 0) col = j;
      if (col) {
        t.pivot(i, *col);
        ++i;
      } else {  // redundant row
        t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
        t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
  }

  std::vector<Rational> cost(cols);
  for (std::size_t j = 0; j < n && j < problem.objective.size(); ++j) cost[j] = problem.objective[j];
  std::vector<char> allowed(cols, 1);
  for (std::size_t j = 0; j < cols; ++j)
    if (is_artificial[j]) allowed[j] = 0;
  if (!t.optimize(cost, allowed)) return {Status::unbounded, 0, {}};

  Result res;
  res.status = Status::optimal;
  res.x.assign(n, 0);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.basis[i] < n) res.x[t.basis[i]] = t.rows[i][cols];
  res.value = 0;
  for (std::size_t j = 0; j < n && j < problem.objective.size(); ++j) res.value += problem.objective[j] * res.x[j];
  return res;
}

// Leximin point of {x : constraints, x >= 0}: first maximizes the smallest
// coordinate, then the next smallest, and so on. The result is unique, so it
// is invariant under every symmetry of the constraint system. Returns nullopt
// if no point with all coordinates strictly positive exists.
inline std::optional<std::vector<Rational>> leximin_positive(std::size_t num_vars,
                                                             const std::vector<Constraint>& constraints) {
  std::vector<std::optional<Rational>> fixed(num_vars);
  std::size_t remaining = num_vars;
  bool first = true;
  while (remaining > 0) {
    // variables 0..n-1 are x, variable n is the margin t
    Problem p;
    p.num_vars = num_vars + 1;
    p.constraints = constraints;
    for (std::size_t j = 0; j < num_vars; ++j) {
      if (fixed[j]) {
        p.constraints.push_back({{{j, 1}}, Relation::eq, *fixed[j]});
      } else {
        p.constraints.push_back({{{num_vars, 1}, {j, -1}}, Relation::le, 0});
      }
    }
    p.objective.assign(num_vars + 1, 0);
    p.objective[num_vars] = 1;
    auto r = solve(p);
    if (r.status == Status::infeasible) return std::nullopt;
    if (r.status == Status::unbounded) return std::nullopt;  // cannot happen for bounded polytopes
    Rational level = r.value;
    if (first && level <= 0) return std::nullopt;
    first = false;

    // Fix every free coordinate that cannot rise above `level`.
    std::vector<Constraint> base = constraints;
    for (std::size_t j = 0; j < num_vars; ++j) {
      if (fixed[j])
        base.push_back({{{j, 1}}, Relation::eq, *fixed[j]});
      else
        base.push_back({{{j, 1}}, Relation::ge, level});
    }
    std::vector<std::size_t> to_fix;
    for (std::size_t j = 0; j < num_vars; ++j) {
      if (fixed[j]) continue;
      Problem q;
      q.num_vars = num_vars;
      q.constraints = base;
      q.objective.assign(num_vars, 0);
      q.objective[j] = 1;
      auto s = solve(q);
      if (s.status == Status::optimal && s.value <= level) to_fix.push_back(j);
    }
    if (to_fix.empty()) {
      // Numerically impossible in exact arithmetic; keep the optimum found.
      for (std::size_t j = 0; j < num_vars; ++j)
        if (!fixed[j]) fixed[j] = r.x[j];
      break;
    }
    for (auto j : to_fix) {
      fixed[j] = level;
      --remaining;
    }
  }
  std::vector<Rational> x(num_vars);
  for (std::size_t j = 0; j < num_vars; ++j) x[j] = *fixed[j];
  return x;
}

}  // namespace qpoly::lp
