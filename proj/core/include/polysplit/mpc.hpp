#pragma once

#include <vector>

#include "polysplit/problem.hpp"

namespace polysplit {

// One piece of the piecewise-affine dynamics: x+ = A x + B u + c while the
// stacked (x, u) lies in the validity set C.
struct PwaRegion {
  MatrixXd A;
  MatrixXd B;
  VectorXd c;
  FixedPolyhedron C;  // over (x, u); must be non-empty
};

struct PwaSystem {
  Eigen::Index n_x = 0;
  Eigen::Index n_u = 0;
  int N = 0;  // default horizon
  // regions per step: one inner list shared by all steps, or exactly N lists
  std::vector<std::vector<PwaRegion>> regions;
  std::vector<MatrixXd> Q;      // size 1 or N; quadratic form without the 1/2
  std::vector<MatrixXd> R;      // size 1 or N
  std::vector<double> alpha;    // size 1 or N, strictly inside (0, 1)
  std::vector<VectorXd> x_ref;  // optional targets for x_{k+1}, k = 1..N
  std::vector<VectorXd> u_ref;  // optional targets for u_k
};

// Rollout reformulation over z = (u1, w1 | x2, u2, w2 | ... | x_{N+1}) with
// a copy variable w_k for each successor state and coupling rows
// x_{k+1} = w_k.  The initial state enters as the parameter, so the first
// stage keeps only (u1, w1) and absorbs x1 = th into the component maps.
// The stage cost splits as a q(x_{k+1}) + (1-a) q(w_k) + r(u_k); on the
// coupling subspace this reproduces the original objective for any a.
ConsensusProblem build_consensus(const PwaSystem& sys, int horizon = 0);

// New linear cost for fresh reference trajectories; H is unchanged.
// Empty vectors mean regulation to the origin.
VectorXd update_reference(const ConsensusProblem& prob, const PwaSystem& sys,
                          const std::vector<VectorXd>& x_ref,
                          const std::vector<VectorXd>& u_ref);

// Region list applying at 1-based step k.
const std::vector<PwaRegion>& regions_at_step(const PwaSystem& sys, int k);

}  // namespace polysplit
