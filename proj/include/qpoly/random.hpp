#pragma once

// Random unweighted quiver polyhedra built from two face permutations.
//
// Arrows are 0..n-1; sigma_plus(a) is the arrow written after a in its
// positive face, sigma_minus(a) likewise for the negative face. Heads are the
// orbits of sigma_minus o sigma_plus^-1, which makes every vertex link a
// single cycle (condition PM) by construction.

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "qpoly/polyhedron.hpp"

namespace qpoly {

struct RandomPolyhedronOptions {
  std::size_t min_arrows = 3;
  std::size_t max_arrows = 10;
  std::size_t max_vertices = 4;
  std::optional<int> genus;  // required genus, if any
  std::size_t max_attempts = 200000;
};

namespace detail {

// Random permutation whose cycles all have length >= 3; nullopt if n < 3.
inline std::optional<std::vector<std::size_t>> random_face_permutation(std::size_t n, std::mt19937_64& rng) {
  if (n < 3) return std::nullopt;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> sizes;
  std::size_t left = n;
  while (left > 0) {
    if (left < 6) {
      sizes.push_back(left);
      break;
    }
    std::uniform_int_distribution<std::size_t> pick(3, left - 3);
    // bias towards a single remaining cycle now and then
    std::size_t s = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? left : pick(rng);
    sizes.push_back(s);
    left -= s;
  }
  std::vector<std::size_t> perm(n);
  std::size_t pos = 0;
  for (auto s : sizes) {
    for (std::size_t i = 0; i < s; ++i) perm[order[pos + i]] = order[pos + (i + 1) % s];
    pos += s;
  }
  return perm;
}

inline std::vector<std::vector<std::size_t>> cycles_of(const std::vector<std::size_t>& perm) {
  std::vector<char> seen(perm.size(), 0);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t a = 0; a < perm.size(); ++a) {
    if (seen[a]) continue;
    std::vector<std::size_t> c;
    for (std::size_t b = a; !seen[b]; b = perm[b]) {
      seen[b] = 1;
      c.push_back(b);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

inline QuiverPolyhedron polyhedron_from_permutations(const std::vector<std::size_t>& sigma_plus,
                                                     const std::vector<std::size_t>& sigma_minus,
                                                     const std::string& name = "random") {
  const std::size_t n = sigma_plus.size();
  std::vector<std::size_t> inv_plus(n);
  for (std::size_t a = 0; a < n; ++a) inv_plus[sigma_plus[a]] = a;
  std::vector<std::size_t> rho(n);
  for (std::size_t a = 0; a < n; ++a) rho[a] = sigma_minus[inv_plus[a]];
  auto vcycles = detail::cycles_of(rho);
  std::vector<std::size_t> head(n);
  for (std::size_t v = 0; v < vcycles.size(); ++v)
    for (auto a : vcycles[v]) head[a] = v;
  QuiverPolyhedron qp;
  qp.name = name;
  for (std::size_t v = 0; v < vcycles.size(); ++v) qp.vertices.push_back(std::to_string(v));
  for (std::size_t a = 0; a < n; ++a) qp.arrows.push_back({"a" + std::to_string(a), head[sigma_plus[a]], head[a]});
  for (const auto& c : detail::cycles_of(sigma_plus)) qp.faces_plus.push_back({c, 1});
  for (const auto& c : detail::cycles_of(sigma_minus)) qp.faces_minus.push_back({c, 1});
  return qp;
}

inline std::optional<QuiverPolyhedron> random_polyhedron(std::mt19937_64& rng, const RandomPolyhedronOptions& opt = {}) {
  std::uniform_int_distribution<std::size_t> pick_n(opt.min_arrows, opt.max_arrows);
  for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
    std::size_t n = pick_n(rng);
    auto p = detail::random_face_permutation(n, rng);
    auto m = detail::random_face_permutation(n, rng);
    if (!p || !m) continue;
    auto qp = polyhedron_from_permutations(*p, *m);
    if (qp.vertices.size() > opt.max_vertices) continue;
    long long chi = static_cast<long long>(qp.vertices.size()) - static_cast<long long>(n) +
                    static_cast<long long>(qp.face_count());
    if (opt.genus && chi != 2 - 2 * *opt.genus) continue;
    if (!validate_polyhedron(qp).empty()) continue;  // disconnected
    return qp;
  }
  return std::nullopt;
}

}  // namespace qpoly
