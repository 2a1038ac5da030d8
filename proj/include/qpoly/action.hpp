#pragma once

#include <string>
#include <vector>

namespace qpoly {

// A permutation of vertices and arrows; faces map to faces implicitly.
struct Symmetry {
  std::vector<std::size_t> vertex;
  std::vector<std::size_t> arrow;
};

// Group given by generators; the group itself is their closure.
struct GroupAction {
  std::string name;
  std::vector<Symmetry> generators;
};

}  // namespace qpoly
