#pragma once

#include "polysplit/solver.hpp"

namespace polysplit {

// Alternating-direction baseline on the same consensus split, scaled dual
// form.  No convergence guarantee exists for this problem class; the method
// is here as a comparison point and reuses project_Z, so both methods face
// identical tie-breaking.
struct AdmmConfig {
  double rho = 10.0;      // penalty, > 0
  double eps_tol = 1e-3;  // both residual thresholds
  int max_iter = 10000;
  VectorXd y0;            // empty means the origin
  VectorXd lambda0;       // scaled dual start, empty means the origin
  bool record_residuals = false;
};

// z-update: equality-constrained QP with a factorization of
// [[H + rho I, A'], [A, 0]] cached across iterations; y-update: projection
// of z + u onto Z; dual update u+ = u + z - y.  Stops when the primal
// residual |z - y| and the dual residual rho |y+ - y| both fall below
// eps_tol.  The returned multiplier is lambda = rho (z - s) with
// s = z + u, matching the fixed-point solver's certificate convention.
SolveResult solve_admm(const ConsensusProblem& prob, const FixedStages& fs,
                       const AdmmConfig& cfg);
SolveResult solve_admm(const ConsensusProblem& prob, const VectorXd& theta, const AdmmConfig& cfg);

}  // namespace polysplit
