#pragma once

#include <vector>

#include "polysplit/admm.hpp"
#include "polysplit/mpc.hpp"
#include "polysplit/solver.hpp"

namespace polysplit {

// Exhaustive global solver: one convex QP per region assignment.  Exact but
// exponential; intended as the ground truth at desk scale.
struct OracleResult {
  bool feasible = false;
  VectorXd z;
  double objective = 0.0;
  std::vector<int> assignment;  // chosen component per stage; lexicographically
                                // smallest among optimal assignments
  long solved = 0;              // QPs actually solved after the empty pre-filter
};

// Enumerates every combination of one component per stage, skipping
// components that are empty at this parameter, and keeps the best feasible
// QP solution.  Throws TooManyCombinations when the assignment count
// exceeds cap.
OracleResult global_solve(const ConsensusProblem& prob, const FixedStages& fs,
                          long cap = 1000000);
OracleResult global_solve(const ConsensusProblem& prob, const VectorXd& theta,
                          long cap = 1000000);

enum class Controller { FixedPoint, Admm, Oracle };

const char* to_string(Controller c);

struct ClosedLoopConfig {
  int steps = 10;
  double xi = 10.0;        // operator build for the fixed-point controller
  SolverConfig solver;     // fixed-point controller settings
  AdmmConfig admm;         // alternating-direction controller settings
  long oracle_cap = 1000000;
  double region_tol = 1e-7;  // plant-side region membership tolerance
};

struct Trajectory {
  std::vector<VectorXd> x;  // steps+1 states, x[0] = theta0
  std::vector<VectorXd> u;  // applied first inputs
  std::vector<int> region;  // plant region chosen at each step, lowest index on ties
  std::vector<double> objective;     // per-step plan cost
  std::vector<SolveStatus> status;   // per-step solve status
  std::vector<int> iterations;       // 0 for oracle steps
  bool completed = true;  // false when a step could not produce an input
  int stop_step = -1;     // first step that failed, when not completed
};

// Receding horizon: at each step the stage sets are re-instantiated at the
// current state, the chosen method plans, the first input is applied, and
// the plant advances with the region whose validity set contains (x, u)
// (lowest index on boundary ties).  Throws NoActiveRegion when no region
// applies; returns early with completed = false when a solve fails to
// produce an input.
Trajectory closed_loop(const PwaSystem& sys, const ConsensusProblem& prob, Controller ctl,
                       const VectorXd& theta0, const ClosedLoopConfig& cfg);

}  // namespace polysplit
