#pragma once

#include <vector>

#include "polysplit/problem.hpp"

namespace polysplit {

// Offline regularity check for a staged union of parametric polyhedra.
// For every realizable combination of touched components and their active
// inequality rows, the directions orthogonal to the common regular normal
// cone must stay inside the union locally; otherwise moving along such a
// direction exits the set while no first-order certificate can see it.
// The check is parameter-free: active-structure geometry does not depend
// on where the structure is realized.

// one combination: which components are touched, and which of their
// inequality rows hold with equality
struct ActiveStructure {
  std::vector<int> comps;               // touched components, ascending
  std::vector<std::vector<int>> rows;   // active row sets, aligned with comps
};

struct A3Violation {
  int stage = 0;
  ActiveStructure structure;
  VectorXd w;      // unit direction orthogonal to the normal cone that
                   // leaves every touched component
  VectorXd z;      // point realizing the structure
  VectorXd theta;  // parameter realizing the structure
};

struct A3Report {
  bool satisfied = true;
  std::vector<A3Violation> violations;
};

struct A3Config {
  long max_structures = 100000;  // per-stage enumeration budget
  double strict_slack = 1e-7;    // inactive rows must clear at least this
  double step = 1e-3;            // witness verification step length
  int fm_row_cap = 20000;        // Fourier-Motzkin working-row budget
  double box = 1e3;              // realizer search box for (z, theta)
};

// Stages are checked independently (the product structure separates), so a
// report lists violations per stage.  Witnesses are verified before being
// reported: z + step*w must escape every component at theta.
A3Report check_a3(const std::vector<StageSet>& stages, const A3Config& cfg = A3Config());
A3Report check_a3(const ConsensusProblem& prob, const A3Config& cfg = A3Config());

// True iff {v : D v <= 0} contains only the origin.  Decided by the
// lineality space plus one bounded support LP per signed coordinate.
bool cone_zero_test(const MatrixXd& D);

// cone {v : Geq v = 0, F v <= 0}
struct ConeHRep {
  MatrixXd Geq;
  MatrixXd F;
};

struct CoverResult {
  bool covered = true;
  VectorXd witness;  // point of span(S) outside every cone when not covered
};

// Exact decision of span(S) subseteq union of cones by recursive splitting:
// a work cone inside some member is discarded, otherwise it is split along
// the rows of one member and the children recurse without that member.
// Witnesses are relative-interior points, so they clear every removed
// member strictly.
CoverResult subspace_in_cone_union(const MatrixXd& S, const std::vector<ConeHRep>& cones);

}  // namespace polysplit
