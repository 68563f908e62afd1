#pragma once

#include <vector>

#include "polysplit/operator.hpp"

namespace polysplit {

enum class SolveStatus {
  Converged,        // residual |z - y| fell below eps_tol
  TrivialGlobal,    // equality-set minimizer already lies in Z
  MaxIterations,    // budget exhausted; iterates returned as-is
  Diverged,         // residual blew past the divergence guard
  StageInfeasible,  // some stage union is empty at this parameter
};

const char* to_string(SolveStatus s);

struct SolverConfig {
  double gamma = 0.5;              // relaxation step, in (0, 1)
  double eps_tol = 1e-3;           // stop once |z - y| <= eps_tol
  int max_iter = 50000;
  double divergence_factor = 1e6;  // declare divergence past this residual
  VectorXd s0;                     // empty means the origin
  bool record_residuals = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIterations;
  VectorXd z;       // quadratic-side iterate, exactly on the equality set
  VectorXd y;       // projection-side iterate, exactly in Z; the solution
  VectorXd s;       // driver sequence value that produced (z, y)
  VectorXd lambda;  // multiplier estimate xi (z - s)
  std::vector<int> active;  // component chosen per stage at the last projection
  int iterations = 0;
  double residual = 0.0;  // final |z - y|
  std::vector<double> residual_trace;
  double objective = 0.0;  // cost at y (at z for the trivial exit)
  int infeasible_stage = -1;
};

// Relaxed fixed-point iteration on s:
//   z = M s + c,  y = proj_Z(s),  s+ = s - gamma W (z - y).
// The returned s is the pre-update value, so lambda = xi (z - s) satisfies
// the stationarity identity exactly and |z - proj_Z(z - lambda/xi)| equals
// the final residual.
SolveResult solve(const ConsensusProblem& prob, const FixedStages& fs, const OperatorData& op,
                  const SolverConfig& cfg);
SolveResult solve(const ConsensusProblem& prob, const VectorXd& theta, const OperatorData& op,
                  const SolverConfig& cfg);

struct KktResidual {
  double stationarity;  // |V'(H z + h - lambda)| + |A z - b|
  double projection;    // |z - proj_Z(z - lambda / xi)|
};

// Certificate check for a candidate pair; independent of the iteration.
KktResidual verify_proximal_kkt(const ConsensusProblem& prob, const FixedStages& fs,
                                const VectorXd& z, const VectorXd& lambda, double xi);

}  // namespace polysplit
