#pragma once

// Word problem for Jacobi relations at bounded R-degree.
//
// All paths up to the degree bound are enumerated; every one-step rewrite
// u*lhs*v -> u*rhs*v between enumerated paths is applied and the resulting
// pairs are merged with union-find. Rewrites preserve (head, tail, degree), so
// the partition is exact for every degree up to the bound.

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "qpoly/grading.hpp"
#include "qpoly/polyhedron.hpp"

namespace qpoly {

struct RewriteOptions {
  std::size_t max_paths = 1'500'000;
  std::optional<std::uint64_t> shuffle_seed;  // permute rewrite order (result must not change)
};

// Charges scaled to a common denominator so degrees are integers.
struct ScaledGrading {
  std::vector<long long> weight;  // per arrow, >= 1
  long long scale = 1;            // charge = weight / scale

  explicit ScaledGrading(const std::vector<Rational>& charge) {
    BigInt den = 1;
    for (const auto& r : charge) {
      if (r <= 0) throw ArgumentError("grading charges must be strictly positive");
      den = lcm(den, denominator(r));
    }
    scale = to_int64(den);
    for (const auto& r : charge) weight.push_back(to_int64(numerator(r) * (den / denominator(r))));
  }
  long long scaled_bound(const Rational& bound) const {
    Rational b = bound * scale;
    BigInt f = numerator(b) / denominator(b);  // floor for nonnegative bounds
    return to_int64(f);
  }
  Rational unscale(long long d) const { return Rational(d, scale); }
};

class EquivClasses {
 public:
  EquivClasses(const QuiverPolyhedron& qp, const std::vector<Rational>& charge, const Rational& bound,
               const RewriteOptions& options = {})
      : degree_bound(bound), qp_(&qp), grading_(charge) {
    if (bound < 0) throw ArgumentError("degree bound must be nonnegative");
    enumerate(options.max_paths);
    saturate(options);
  }

  Rational degree_bound;

  std::size_t path_count() const { return words_.size(); }
  std::size_t class_count() const { return class_count_; }

  std::optional<std::size_t> find(const Path& p) const {
    if (p.arrows.empty()) return p.base_vertex < trivial_.size() ? std::optional<std::size_t>(trivial_[p.base_vertex]) : std::nullopt;
    auto it = index_.find(encode(p.arrows));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Class id of a path; throws if the path exceeds the degree bound.
  std::size_t class_of(const Path& p) const {
    auto id = find(p);
    if (!id) throw ArgumentError("path " + format_path(*qp_, p) + " lies beyond the degree bound");
    return class_id_[*id];
  }

  Rational degree(const Path& p) const {
    long long d = 0;
    for (auto a : p.arrows) d += grading_.weight[a];
    return grading_.unscale(d);
  }

  Path path(std::size_t id) const { return decode(id); }
  Path representative(std::size_t cls) const { return decode(class_rep_[cls]); }
  Rational class_degree(std::size_t cls) const { return grading_.unscale(degree_[class_rep_[cls]]); }
  std::size_t class_head(std::size_t cls) const { return head_[class_rep_[cls]]; }
  std::size_t class_tail(std::size_t cls) const { return tail_[class_rep_[cls]]; }

  // Number of classes of paths head <- tail with exactly this degree.
  std::size_t count_classes(std::size_t head, std::size_t tail, const Rational& degree) const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < class_count_; ++c)
      if (class_head(c) == head && class_tail(c) == tail && class_degree(c) == degree) ++n;
    return n;
  }

  std::size_t count_paths(std::size_t head, std::size_t tail, const Rational& degree) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (head_[i] == head && tail_[i] == tail && grading_.unscale(degree_[i]) == degree) ++n;
    return n;
  }

  // Partition as sorted lists of path ids, for order-independence checks.
  std::vector<std::vector<std::size_t>> partition() const {
    std::vector<std::vector<std::size_t>> out(class_count_);
    for (std::size_t i = 0; i < words_.size(); ++i) out[class_id_[i]].push_back(i);
    return out;
  }

  const ScaledGrading& grading() const { return grading_; }
  const QuiverPolyhedron& polyhedron() const { return *qp_; }

 private:
  static std::u16string encode(const std::vector<std::size_t>& arrows) {
    std::u16string s;
    s.reserve(arrows.size());
    for (auto a : arrows) s.push_back(static_cast<char16_t>(a));
    return s;
  }

  Path decode(std::size_t id) const {
    Path p;
    for (auto c : words_[id]) p.arrows.push_back(static_cast<std::size_t>(c));
    p.base_vertex = head_[id];
    return p;
  }

  std::size_t add(std::u16string word, std::size_t head, std::size_t tail, long long degree) {
    auto id = words_.size();
    if (!word.empty()) index_.emplace(word, id);
    words_.push_back(std::move(word));
    head_.push_back(head);
    tail_.push_back(tail);
    degree_.push_back(degree);
    return id;
  }

  void enumerate(std::size_t max_paths) {
    const auto& qp = *qp_;
    if (qp.arrows.size() > 65535) throw ResourceLimit("too many arrows for path enumeration");
    const long long limit = grading_.scaled_bound(degree_bound);
    // arrows grouped by head: appending a to p needs head(a) == tail(p)
    std::vector<std::vector<std::size_t>> by_head(qp.vertices.size());
    for (std::size_t a = 0; a < qp.arrows.size(); ++a) by_head[qp.arrows[a].head].push_back(a);

    for (std::size_t v = 0; v < qp.vertices.size(); ++v) trivial_.push_back(add({}, v, v, 0));
    std::size_t frontier_begin = 0, frontier_end = words_.size();
    while (frontier_begin < frontier_end) {
      for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
        for (auto a : by_head[tail_[i]]) {
          long long d = degree_[i] + grading_.weight[a];
          if (d > limit) continue;
          if (words_.size() >= max_paths)
            throw ResourceLimit("path enumeration exceeded " + std::to_string(max_paths) +
                                " paths; lower the degree bound");
          std::u16string w = words_[i];
          w.push_back(static_cast<char16_t>(a));
          add(std::move(w), head_[i], qp.arrows[a].tail, d);
        }
      }
      frontier_begin = frontier_end;
      frontier_end = words_.size();
    }
  }

  void saturate(const RewriteOptions& options) {
    const auto& qp = *qp_;
    auto rels = jacobi_relations(qp);
    struct Side {
      std::u16string from, to;
    };
    std::vector<std::vector<Side>> by_first(qp.arrows.size());
    for (const auto& r : rels) {
      auto l = encode(r.lhs.arrows), rr = encode(r.rhs.arrows);
      if (l == rr) continue;
      by_first[r.lhs.arrows.front()].push_back({l, rr});
      by_first[r.rhs.arrows.front()].push_back({rr, l});
    }
    std::vector<std::size_t> order(words_.size());
    std::iota(order.begin(), order.end(), 0);
    if (options.shuffle_seed) {
      std::mt19937_64 rng(*options.shuffle_seed);
      std::shuffle(order.begin(), order.end(), rng);
      for (auto& sides : by_first) std::shuffle(sides.begin(), sides.end(), rng);
    }

    detail::DisjointSets sets(words_.size());
    std::u16string scratch;
    for (auto id : order) {
      const auto& w = words_[id];
      for (std::size_t pos = 0; pos < w.size(); ++pos) {
        for (const auto& side : by_first[static_cast<std::size_t>(w[pos])]) {
          if (pos + side.from.size() > w.size()) continue;
          if (w.compare(pos, side.from.size(), side.from) != 0) continue;
          scratch.assign(w, 0, pos);
          scratch += side.to;
          scratch.append(w, pos + side.from.size(), std::u16string::npos);
          auto it = index_.find(scratch);
          if (it == index_.end()) throw std::logic_error("rewrite left the enumerated path set");
          auto other = it->second;
          if (head_[other] != head_[id] || tail_[other] != tail_[id] || degree_[other] != degree_[id])
            throw std::logic_error("rewrite changed head, tail or degree");
          sets.unite(id, other);
        }
      }
    }

    class_id_.assign(words_.size(), 0);
    std::vector<std::optional<std::size_t>> root_class(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      auto root = sets.find(i);
      if (!root_class[root]) {
        root_class[root] = class_count_++;
        class_rep_.push_back(i);
      }
      class_id_[i] = *root_class[root];
    }
  }

  const QuiverPolyhedron* qp_;
  ScaledGrading grading_;
  std::vector<std::u16string> words_;
  std::vector<std::size_t> head_, tail_;
  std::vector<long long> degree_;
  std::unordered_map<std::u16string, std::size_t> index_;
  std::vector<std::size_t> trivial_;
  std::vector<std::size_t> class_id_;
  std::vector<std::size_t> class_rep_;
  std::size_t class_count_ = 0;
};

inline std::vector<Path> enumerate_paths(const QuiverPolyhedron& qp, const std::vector<Rational>& charge,
                                         const Rational& bound, const RewriteOptions& options = {}) {
  require_valid(qp);
  EquivClasses classes(qp, charge, bound, RewriteOptions{options.max_paths, std::nullopt});
  std::vector<Path> out;
  out.reserve(classes.path_count());
  for (std::size_t i = 0; i < classes.path_count(); ++i) out.push_back(classes.path(i));
  std::stable_sort(out.begin(), out.end(), [&](const Path& a, const Path& b) {
    auto ka = std::make_tuple(head(qp, a), tail(qp, a), a.arrows.size());
    auto kb = std::make_tuple(head(qp, b), tail(qp, b), b.arrows.size());
    if (ka != kb) return ka < kb;
    return a.arrows < b.arrows;
  });
  return out;
}

inline EquivClasses equivalence_classes(const QuiverPolyhedron& qp, const std::vector<Rational>& charge,
                                        const Rational& bound, const RewriteOptions& options = {}) {
  require_valid(qp);
  return EquivClasses(qp, charge, bound, options);
}

enum class PathComparison { equal, distinct, bound_too_small };

inline std::string_view to_string(PathComparison c) {
  switch (c) {
    case PathComparison::equal: return "equal";
    case PathComparison::distinct: return "distinct-within-bound";
    case PathComparison::bound_too_small: return "bound-too-small";
  }
  return "?";
}

// Paths of different degree are never equal (relations are homogeneous);
// equal-degree paths resolve exactly once the bound covers their degree.
inline PathComparison paths_equal(const QuiverPolyhedron& qp, const std::vector<Rational>& charge, const Path& p,
                                  const Path& q, const Rational& bound, const RewriteOptions& options = {}) {
  if (head(qp, p) != head(qp, q) || tail(qp, p) != tail(qp, q))
    throw ArgumentError("paths_equal: endpoints differ");
  auto deg = [&](const Path& x) {
    Rational d = 0;
    for (auto a : x.arrows) d += charge.at(a);
    return d;
  };
  Rational dp = deg(p), dq = deg(q);
  if (dp != dq) return PathComparison::distinct;
  if (dp > bound) return PathComparison::bound_too_small;
  EquivClasses classes(qp, charge, dp, options);
  return classes.class_of(p) == classes.class_of(q) ? PathComparison::equal : PathComparison::distinct;
}

// ---------------------------------------------------------------------------
// The central element

struct EllData {
  std::vector<Path> representatives;  // per vertex: a face power c^E based there
  std::vector<std::size_t> face;      // global face index used for each vertex
};

inline EllData ell(const QuiverPolyhedron& qp) {
  require_valid(qp);
  EllData d;
  for (std::size_t v = 0; v < qp.vertices.size(); ++v) {
    bool found = false;
    for (std::size_t g = 0; g < qp.face_count() && !found; ++g) {
      const Face& f = qp.face(qp.face_ref(g));
      for (std::size_t i = 0; i < f.cycle.size(); ++i) {
        if (qp.arrows[f.cycle[i]].head != v) continue;
        std::vector<std::size_t> w;
        for (int r = 0; r < f.weight; ++r)
          for (std::size_t k = 0; k < f.cycle.size(); ++k) w.push_back(f.cycle[(i + k) % f.cycle.size()]);
        d.representatives.push_back(make_path(qp, std::move(w)));
        d.face.push_back(g);
        found = true;
        break;
      }
    }
    if (!found) throw ArgumentError("no face passes through vertex " + qp.vertices[v]);
  }
  return d;
}

inline Rational max_charge(const std::vector<Rational>& charge) {
  Rational m = 0;
  for (const auto& r : charge) m = std::max(m, r);
  return m;
}

inline Rational max_face_degree(const QuiverPolyhedron& qp, const std::vector<Rational>& charge) {
  Rational m = 0;
  for (std::size_t g = 0; g < qp.face_count(); ++g) {
    const Face& f = qp.face(qp.face_ref(g));
    Rational s = 0;
    for (auto a : f.cycle) s += charge[a];
    m = std::max(m, Rational(s * f.weight));
  }
  return m;
}

// Checks a * ell_{t(a)} ~ ell_{h(a)} * a for every arrow.
inline bool verify_central(const QuiverPolyhedron& qp, const std::vector<Rational>& charge,
                           std::optional<Rational> bound = std::nullopt, const RewriteOptions& options = {}) {
  auto e = ell(qp);
  Rational needed = max_face_degree(qp, charge) + max_charge(charge);
  Rational b = bound.value_or(needed);
  if (b < needed) throw ArgumentError("verify_central needs a degree bound of at least " + to_string(needed));
  EquivClasses classes(qp, charge, b, options);
  for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
    Path arrow = make_path(qp, {a});
    Path left = concat(qp, arrow, e.representatives[qp.arrows[a].tail]);
    Path right = concat(qp, e.representatives[qp.arrows[a].head], arrow);
    if (classes.class_of(left) != classes.class_of(right)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Bounded cancellation oracle

struct CancellationCounterexample {
  Path p, q;
  std::size_t arrow = 0;
  enum class Side { right, left } side = Side::right;  // right: p*a ~ q*a, left: a*p ~ a*q
  Rational degree;
};

struct CancellationVerdict {
  bool holds = true;  // "holds up to bound"; a counterexample is definitive
  Rational bound;
  std::optional<CancellationCounterexample> counterexample;
};

namespace detail {

inline CancellationVerdict cancellation_pass(const QuiverPolyhedron& qp, const std::vector<Rational>& charge,
                                             const Rational& bound, const RewriteOptions& options) {
  EquivClasses classes(qp, charge, bound + max_charge(charge), options);
  const auto& g = classes.grading();
  const long long limit = g.scaled_bound(bound);

  std::map<long long, std::vector<std::size_t>> by_degree;
  for (std::size_t c = 0; c < classes.class_count(); ++c) {
    long long d = to_int64(numerator(classes.class_degree(c) * g.scale));
    if (d <= limit) by_degree[d].push_back(c);
  }

  using Side = CancellationCounterexample::Side;
  CancellationVerdict verdict;
  verdict.bound = bound;
  for (const auto& [deg, cls] : by_degree) {
    using Key = std::tuple<std::size_t, std::size_t, std::size_t>;  // P, Q, arrow
    std::optional<std::pair<Key, Side>> best;
    for (auto side : {Side::right, Side::left}) {
      for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
        std::map<std::size_t, std::size_t> first_source;  // product class -> smallest P
        Path arrow = make_path(qp, {a});
        for (auto c : cls) {
          bool fits = side == Side::right ? classes.class_tail(c) == qp.arrows[a].head
                                          : classes.class_head(c) == qp.arrows[a].tail;
          if (!fits) continue;
          Path rep = classes.representative(c);
          Path prod = side == Side::right ? concat(qp, rep, arrow) : concat(qp, arrow, rep);
          auto [it, inserted] = first_source.emplace(classes.class_of(prod), c);
          if (inserted) continue;
          Key k{it->second, c, a};
          if (!best || k < best->first || (k == best->first && side < best->second)) best = {{k, side}};
        }
      }
    }
    if (best) {
      auto [k, side] = *best;
      verdict.holds = false;
      verdict.counterexample = CancellationCounterexample{classes.representative(std::get<0>(k)),
                                                          classes.representative(std::get<1>(k)), std::get<2>(k),
                                                          side, g.unscale(deg)};
      return verdict;
    }
  }
  return verdict;
}

}  // namespace detail

// Searches class pairs P != Q (equal endpoints and degree) and arrows a with
// P*a ~ Q*a or a*P ~ a*Q. The first counterexample in order (degree, P, Q,
// arrow, side) is reported. Bounds are tried in increasing steps so that
// cheap low-degree failures are found without enumerating up to the full
// bound; the result is the same as a single pass at the full bound.
inline CancellationVerdict cancellation_check(const QuiverPolyhedron& qp, const std::vector<Rational>& charge,
                                              const Rational& bound, const RewriteOptions& options = {}) {
  require_valid(qp);
  if (bound < 0) throw ArgumentError("degree bound must be nonnegative");
  Rational step = max_face_degree(qp, charge) / 2;
  for (Rational b = step; b < bound; b *= 2) {
    auto v = detail::cancellation_pass(qp, charge, b, options);
    if (!v.holds) {
      v.bound = bound;
      return v;
    }
  }
  return detail::cancellation_pass(qp, charge, bound, options);
}

}  // namespace qpoly
