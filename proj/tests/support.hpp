#pragma once

#include <array>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "qpoly/homology.hpp"
#include "qpoly/io.hpp"
#include "qpoly/polyhedron.hpp"

namespace testing_support {

using namespace qpoly;

inline std::string fixture_path(const std::string& name) { return std::string(QPOLY_FIXTURE_DIR) + "/" + name + ".qp"; }

inline PolyhedronDocument load(const std::string& name) { return load_document(fixture_path(name)); }

inline std::vector<Rational> uniform(const QuiverPolyhedron& qp, Rational r) {
  return std::vector<Rational>(qp.arrows.size(), r);
}

inline std::size_t arrow(const QuiverPolyhedron& qp, const std::string& id) { return qp.find_arrow(id).value(); }

// ---------------------------------------------------------------------------
// Oracles written independently of the library algorithms.

// Classes of loop words of a fixed length on a one-vertex quiver with
// single-letter arrows, under the two-sided closure of the given binomial
// relations (each pair of equal-length strings). Naive union-find over all
// words.
inline std::size_t word_classes(const std::string& letters, std::size_t length,
                                const std::vector<std::pair<std::string, std::string>>& relations) {
  std::vector<std::string> words{""};
  for (std::size_t k = 0; k < length; ++k) {
    std::vector<std::string> next;
    for (const auto& w : words)
      for (char c : letters) next.push_back(w + c);
    words = std::move(next);
  }
  std::map<std::string, std::size_t> id;
  for (std::size_t i = 0; i < words.size(); ++i) id[words[i]] = i;
  std::vector<std::size_t> parent(words.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& w : words)
    for (const auto& [l, r] : relations)
      for (std::size_t pos = 0; pos + l.size() <= w.size(); ++pos)
        if (w.compare(pos, l.size(), l) == 0) {
          std::string v = w;
          v.replace(pos, l.size(), r);
          parent[find(id[w])] = find(id[v]);
        }
  std::size_t n = 0;
  for (std::size_t i = 0; i < words.size(); ++i) n += find(i) == i;
  return n;
}

// All arrow subsets meeting every face exactly once, by brute force.
inline std::set<std::set<std::string>> matchings_by_subsets(const QuiverPolyhedron& qp) {
  std::set<std::set<std::string>> out;
  const std::size_t m = qp.arrows.size();
  for (unsigned long mask = 0; mask < (1ul << m); ++mask) {
    bool ok = true;
    for (Sign s : {Sign::plus, Sign::minus})
      for (const auto& f : qp.faces(s)) {
        int hits = 0;
        for (auto a : f.cycle) hits += (mask >> a) & 1;
        ok = ok && hits == 1;
      }
    if (!ok) continue;
    std::set<std::string> ids;
    for (std::size_t a = 0; a < m; ++a)
      if ((mask >> a) & 1) ids.insert(qp.arrows[a].id);
    out.insert(ids);
  }
  return out;
}

// Hall-type condition by enumerating every subset of positive faces.
inline bool hall_by_subsets(const QuiverPolyhedron& qp) {
  const std::size_t np = qp.faces_plus.size(), nm = qp.faces_minus.size();
  if (np != nm) return false;
  std::map<std::size_t, std::size_t> minus_of;
  for (std::size_t f = 0; f < nm; ++f)
    for (auto a : qp.faces_minus[f].cycle) minus_of[a] = f;
  for (unsigned long mask = 1; mask < (1ul << np); ++mask) {
    std::set<std::size_t> nb;
    std::size_t size = 0;
    for (std::size_t f = 0; f < np; ++f)
      if ((mask >> f) & 1) {
        ++size;
        for (auto a : qp.faces_plus[f].cycle) nb.insert(minus_of[a]);
      }
    bool full = size == np;
    if (nb.size() < size || (nb.size() == size && !full)) return false;
  }
  return true;
}

// Lifted ray walk for a bounded number of steps. Zig rays start with the
// positive face, zag rays with the negative one; the next arrow is the one
// written just before the current one in the face, and offsets are tail
// offsets relative to the start.
struct RayStep {
  std::size_t arrow;
  IntVec offset;
};

inline std::vector<RayStep> walk_ray(const QuiverPolyhedron& qp, const HomologyData& h, std::size_t a, bool zig,
                                     std::size_t steps) {
  auto before = [&](Sign s, std::size_t x) {
    for (const auto& f : qp.faces(s))
      for (std::size_t i = 0; i < f.cycle.size(); ++i)
        if (f.cycle[i] == x) return f.cycle[(i + f.cycle.size() - 1) % f.cycle.size()];
    throw std::logic_error("arrow not in a face");
  };
  std::vector<RayStep> out{{a, IntVec{0, 0}}};
  bool positive = zig;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto& cur = out.back();
    IntVec next_off = add(cur.offset, h.arrow_class[cur.arrow]);
    out.push_back({before(positive ? Sign::plus : Sign::minus, cur.arrow), next_off});
    positive = !positive;
  }
  return out;
}

// True if some zig ray meets its zag ray again within the step budget.
inline bool rays_collide(const QuiverPolyhedron& qp, std::size_t steps) {
  auto h = homology(qp);
  for (std::size_t a = 0; a < qp.arrows.size(); ++a) {
    auto zig = walk_ray(qp, h, a, true, steps), zag = walk_ray(qp, h, a, false, steps);
    std::set<std::pair<std::size_t, IntVec>> seen;
    for (std::size_t i = 1; i < zig.size(); ++i) seen.insert({zig[i].arrow, zig[i].offset});
    for (std::size_t j = 1; j < zag.size(); ++j)
      if (seen.count({zag[j].arrow, zag[j].offset})) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Command line runner

struct CliResult {
  int exit_code = -1;
  std::string out;
};

inline CliResult run_cli(const std::string& args) {
  CliResult r;
  std::string cmd = std::string(QPOLY_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace testing_support
