// Exhaustive search for the smallest genus-1 polyhedron violating condition Z.
//
// Enumerates pairs of face permutations on n <= max_arrows arrows (all cycles
// of length >= 3), keeps connected genus-1 results with at most max_vertices
// vertices, and prints the first one, in order of (arrows, vertices,
// canonical code), whose zigzag rays meet twice.
//
//   find_bad_torus [max_arrows=6] [max_vertices=2] > fixtures/badTorus.qp

#include <algorithm>
#include <iostream>
#include <numeric>
#include <optional>
#include <vector>

#include "qpoly/covers.hpp"
#include "qpoly/io.hpp"
#include "qpoly/random.hpp"
#include "qpoly/zigzag.hpp"

using namespace qpoly;

namespace {

bool cycles_at_least_three(const std::vector<std::size_t>& perm) {
  for (const auto& c : detail::cycles_of(perm))
    if (c.size() < 3) return false;
  return true;
}

std::vector<std::vector<std::size_t>> face_permutations(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do {
    if (cycles_at_least_three(p)) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t max_arrows = argc > 1 ? std::stoul(argv[1]) : 6;
  std::size_t max_vertices = argc > 2 ? std::stoul(argv[2]) : 2;
  for (std::size_t n = 3; n <= max_arrows; ++n) {
    auto perms = face_permutations(n);
    std::optional<std::pair<std::vector<long long>, QuiverPolyhedron>> best;
    std::size_t tori = 0;
    for (const auto& plus : perms)
      for (const auto& minus : perms) {
        auto qp = polyhedron_from_permutations(plus, minus, "badTorus");
        if (qp.vertices.size() > max_vertices) continue;
        long long chi = static_cast<long long>(qp.vertices.size()) - static_cast<long long>(n) +
                        static_cast<long long>(qp.face_count());
        if (chi != 0 || !validate_polyhedron(qp).empty()) continue;
        ++tori;
        if (condition_z(qp).passes) continue;
        auto code = canonical_code(qp);
        code.insert(code.begin(), static_cast<long long>(qp.vertices.size()));
        if (!best || code < best->first) best = {code, qp};
      }
    std::cerr << "n=" << n << ": " << tori << " labelled tori, "
              << (best ? "found a condition-Z failure" : "all satisfy condition Z") << "\n";
    if (best) {
      std::cout << serialize_document(make_document(best->second));
      return 0;
    }
  }
  std::cerr << "no failing torus within the search bounds\n";
  return 1;
}
