#pragma once

#include <stdexcept>
#include <string>

namespace polysplit {

// Programmer / data errors that make the requested computation meaningless.
// Data-dependent outcomes that callers are expected to branch on (an empty
// polyhedron, an infeasible QP, a non-converged solve) are reported through
// status enums instead and never throw.

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotSymmetric : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotPositiveDefinite : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RankDeficient : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// xi below the admissible threshold for the operator build.  min_admissible
// carries the rejection boundary so callers can report a usable bound.
struct XiTooSmall : std::invalid_argument {
  double xi;
  double min_admissible;
  XiTooSmall(double xi_, double min_admissible_, const std::string& what_)
      : std::invalid_argument(what_), xi(xi_), min_admissible(min_admissible_) {}
};

// Numerical rank of the operator does not match the expected n - m split.
struct RankMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pivot-count / row-count / combination-count safety caps.
struct MaxPivots : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BlowUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CombinatorialCap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooManyCombinations : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Simulated plant state falls outside every region of the piecewise model.
struct NoActiveRegion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace polysplit
