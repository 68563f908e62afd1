#pragma once

#include <vector>

#include "polysplit/polyhedron.hpp"

namespace polysplit {

// One block of the Cartesian constraint structure: the stage variable of
// dimension nk must lie in the union of the listed components.
struct StageSet {
  Eigen::Index nk = 0;
  std::vector<Polyhedron> components;
};

// min 1/2 z'Hz + h'z  over  {A z = b}  intersected with the per-stage
// unions.  validate() checks the structural requirements and caches the
// affine parameterization {V t + v_bar} of the equality set.
struct ConsensusProblem {
  Eigen::Index n = 0;
  Eigen::Index p = 0;  // parameter dimension
  MatrixXd H;
  VectorXd h;
  MatrixXd A;
  VectorXd b;
  std::vector<StageSet> stages;

  // filled by validate()
  bool validated = false;
  MatrixXd V;
  VectorXd v_bar;
  std::vector<Eigen::Index> offsets;  // stage start indices, size stages+1
  double h_eig_min = 0.0;
  double h_eig_max = 0.0;
  bool built_from_pwa = false;  // set by the rollout builder; tightens the
                                // step-parameter guidance in error messages
};

// Structural checks: H symmetric positive definite, A full row rank (or
// empty), stage dimensions summing to n, component blocks consistent with
// nk and p.  Caches V, v_bar, offsets and the extreme eigenvalues of H.
void validate(ConsensusProblem& prob);

// All stage components instantiated at a fixed parameter.  Reused across
// iterations so the per-component reductions are paid once per solve.
struct FixedStages {
  std::vector<std::vector<FixedPolyhedron>> comps;
};

FixedStages instantiate_stages(const ConsensusProblem& prob, const VectorXd& theta);

struct ProjectZResult {
  bool ok = true;
  int infeasible_stage = -1;  // stage whose entire component list is empty
  VectorXd y;
  std::vector<int> active;  // chosen component per stage, lowest index on ties
};

// Blockwise projection onto the union structure: per stage, project onto
// every non-empty component and keep the closest, breaking ties toward the
// lowest component index.
ProjectZResult project_Z(const ConsensusProblem& prob, const FixedStages& fs, const VectorXd& s);
ProjectZResult project_Z(const ConsensusProblem& prob, const VectorXd& theta, const VectorXd& s);

bool contains_Z(const ConsensusProblem& prob, const FixedStages& fs, const VectorXd& z,
                double tol = 1e-7);
bool contains_Z(const ConsensusProblem& prob, const VectorXd& theta, const VectorXd& z,
                double tol = 1e-7);

double objective(const ConsensusProblem& prob, const VectorXd& z);

}  // namespace polysplit
