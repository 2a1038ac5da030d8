#pragma once

#include <stdexcept>
#include <string>

namespace qpoly {

// Malformed or structurally invalid input (dangling ids, schema violations).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates an operation's precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The operation is only defined for a different topology or for unweighted input.
class UnsupportedTopology : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configurable size ceiling was hit (path enumeration, cover search).
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry failed to close within tolerance, or a direction is degenerate.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qpoly

namespace qpoly {

// The input is well formed but violates a consistency condition that an
// operation requires (e.g. coincident zigzag directions).
class ConsistencyViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qpoly
