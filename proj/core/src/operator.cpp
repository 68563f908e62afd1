#include "polysplit/operator.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "polysplit/errors.hpp"

namespace polysplit {

namespace {

MatrixXd range_inverse(const ConsensusProblem& prob) {
  // R = V (V' H V)^{-1} V'; V has orthonormal columns, V' H V is SPD
  const MatrixXd VtHV = prob.V.transpose() * prob.H * prob.V;
  Eigen::LLT<MatrixXd> llt(VtHV);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("build_operator: reduced cost matrix is not positive definite");
  MatrixXd R = prob.V * llt.solve(prob.V.transpose());
  return 0.5 * (R + R.transpose());
}

}  // namespace

OperatorData build_operator(const ConsensusProblem& prob, double xi) {
  if (!prob.validated) throw DimensionMismatch("build_operator: problem not validated");
  if (!(xi > 0.0) || !std::isfinite(xi))
    throw XiTooSmall(xi, 0.0, "build_operator: xi must be positive and finite");

  OperatorData op;
  op.xi = xi;
  op.R = range_inverse(prob);

  const Eigen::Index n = prob.n;
  const Eigen::Index r_expect = prob.V.cols();
  SymEig eig = sym_eigendecomposition(op.R);  // descending eigenvalues

  const double scale = std::max(std::abs(eig.lambda(0)), 1.0);
  const double tol = 1e-9 * scale;
  Eigen::Index r = 0;
  while (r < n && eig.lambda(r) > tol) ++r;
  for (Eigen::Index i = r; i < n; ++i)
    if (std::abs(eig.lambda(i)) > tol)
      throw RankMismatch("build_operator: eigenvalues of R do not split at the expected rank");
  if (r != r_expect)
    throw RankMismatch("build_operator: rank of R is " + std::to_string(r) + ", expected " +
                       std::to_string(r_expect));
  op.rank = r;

  const double d_min = eig.lambda(r - 1);  // smallest positive eigenvalue
  op.min_admissible = 1.0 / d_min;
  if (xi * d_min <= 1.0 + 1e-9) {
    std::string msg = "xi = " + std::to_string(xi) + " is not admissible; need xi > " +
                      std::to_string(op.min_admissible);
    if (prob.built_from_pwa)
      msg += " (any value above the largest cost eigenvalue " +
             std::to_string(prob.h_eig_max) + " works)";
    throw XiTooSmall(xi, op.min_admissible, msg);
  }

  // All derived matrices share the eigenbasis of R, so they are symmetric
  // by construction and the spectral split is exact.
  VectorXd m_diag(n), k_diag(n), w_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i < r) {
      const double denom = xi * eig.lambda(i) - 1.0;  // > 0 by admissibility
      m_diag(i) = xi * eig.lambda(i) / denom;
      k_diag(i) = 1.0 / denom;
      w_diag(i) = 0.5 / m_diag(i);
    } else {
      m_diag(i) = 0.0;
      k_diag(i) = -1.0;
      w_diag(i) = -1.0;
    }
  }
  op.M = eig.Q * m_diag.asDiagonal() * eig.Q.transpose();
  op.K = eig.Q * k_diag.asDiagonal() * eig.Q.transpose();
  op.W = eig.Q * w_diag.asDiagonal() * eig.Q.transpose();
  op.M = 0.5 * (op.M + op.M.transpose());
  op.K = 0.5 * (op.K + op.K.transpose());
  op.W = 0.5 * (op.W + op.W.transpose());
  op.c = op.K * (op.R * (prob.h + prob.H * prob.v_bar) - prob.v_bar);
  return op;
}

void update_linear_cost(OperatorData& op, const ConsensusProblem& prob, const VectorXd& h_new) {
  if (h_new.size() != prob.n) throw DimensionMismatch("update_linear_cost: h size");
  if (op.K.rows() != prob.n) throw DimensionMismatch("update_linear_cost: operator size");
  op.c = op.K * (op.R * (h_new + prob.H * prob.v_bar) - prob.v_bar);
}

VectorXd trivial_solution(const ConsensusProblem& prob) {
  if (!prob.validated) throw DimensionMismatch("trivial_solution: problem not validated");
  const MatrixXd VtHV = prob.V.transpose() * prob.H * prob.V;
  Eigen::LLT<MatrixXd> llt(VtHV);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("trivial_solution: reduced cost matrix is not positive definite");
  const VectorXd grad = prob.V.transpose() * (prob.h + prob.H * prob.v_bar);
  return prob.v_bar - prob.V * llt.solve(grad);
}

}  // namespace polysplit
