#pragma once

#include "polysplit/problem.hpp"

namespace polysplit {

// Data of the fixed-point map  K(s) = { M s + c } - proj_Z(s)  together
// with the step metric W.  Everything is assembled from one symmetric
// eigendecomposition of R = V (V' H V)^{-1} V', so the spectral guarantees
// (M PSD with positive part strictly above 1, rank n - rows(A)) hold by
// construction whenever xi is admissible.
struct OperatorData {
  double xi = 0.0;
  Eigen::Index rank = 0;        // dim of the equality manifold
  double min_admissible = 0.0;  // 1 / smallest positive eigenvalue of R

  MatrixXd R;  // V (V' H V)^{-1} V'
  MatrixXd M;  // xi (xi R - I)^{-1} R
  VectorXd c;  // (xi R - I)^{-1} (R (h + H v_bar) - v_bar)
  MatrixXd W;  // 1/(2 mu) on each eigendirection of M with eigenvalue mu,
               // -1 on the null space of M
  MatrixXd K;  // (xi R - I)^{-1}, kept so a new linear cost is a cheap refresh
};

// Throws XiTooSmall when xi fails the admissibility bound and RankMismatch
// when the numerical rank of R disagrees with the manifold dimension.
// Requires a validated problem.
OperatorData build_operator(const ConsensusProblem& prob, double xi);

// Rebuild c for a fresh linear cost without touching the spectral data.
void update_linear_cost(OperatorData& op, const ConsensusProblem& prob, const VectorXd& h_new);

// Minimizer of the quadratic over the equality set alone.  When this point
// already lies in Z it is the global optimum and no iteration is needed.
VectorXd trivial_solution(const ConsensusProblem& prob);

}  // namespace polysplit
