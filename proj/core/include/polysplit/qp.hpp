#pragma once

#include <vector>

#include "polysplit/linalg.hpp"

namespace polysplit {

enum class QpStatus { Optimal, Infeasible, MaxPivots, Unbounded };

const char* to_string(QpStatus s);

struct QpResult {
  QpStatus status = QpStatus::Optimal;
  VectorXd z;               // minimizer (valid when status == Optimal)
  VectorXd nu;              // equality multipliers, minimum-norm
  VectorXd mu;              // inequality multipliers, >= 0
  std::vector<int> active;  // working set of inequality rows at the optimum
  int pivots = 0;
  double kkt_residual = 0.0;  // scaled sup-norm KKT residual at the optimum
};

// Minimize 1/2 z'Pz + q'z subject to Geq z = geq and F z <= f.
//
// P must be positive definite on the equality nullspace.  Dependent but
// consistent equality rows are tolerated; inconsistent ones yield
// Infeasible.  The method is a dense primal active-set iteration on the
// equality-reduced problem with lowest-index (Bland) tie-breaking;
// feasibility is decided by a phase-1 subproblem at tolerance 1e-8.
// max_pivots == 0 picks a cap proportional to the problem size.
QpResult solve_convex_qp(const MatrixXd& P, const VectorXd& q, const MatrixXd& Geq,
                         const VectorXd& geq, const MatrixXd& F, const VectorXd& f,
                         int max_pivots = 0);

struct LpResult {
  QpStatus status = QpStatus::Optimal;
  VectorXd x;
  double value = 0.0;  // c'x at the returned point
};

// Maximize c'x over {F x <= f} starting from a feasible point, via a
// proximal sequence of strictly convex quadratic subproblems.  Used for the
// small bounded linear programs inside redundancy pruning and the cone
// tests; the caller must supply a feasible x0.
LpResult maximize_linear(const VectorXd& c, const MatrixXd& F, const VectorXd& f,
                         const VectorXd& x0);

namespace detail {

// Minimize 1/2 |t - target|^2 over {F t <= f} from a feasible start.
// Rows of F must be unit-norm or zero.  Hot path for staged projections:
// the caller has already eliminated equalities and caches the reduced rows.
struct LeastDistance {
  QpStatus status = QpStatus::Optimal;
  VectorXd t;
};

LeastDistance least_distance(const VectorXd& target, const MatrixXd& F, const VectorXd& f,
                             const VectorXd& t0, int max_pivots = 0);

// Decide feasibility of {F t <= f} (unit-norm rows) by minimizing the worst
// slack; fills anchor with a point whose violation is at most 1e-8 scaled.
bool feasible_point(const MatrixXd& F, const VectorXd& f, VectorXd& anchor);

}  // namespace detail

}  // namespace polysplit
