#pragma once

#include <Eigen/Dense>

namespace polysplit {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Orthonormal nullspace basis V of A (n x (n-m)) together with the
// minimum-norm particular solution v_bar of A v = b.
struct AffineParam {
  MatrixXd V;
  VectorXd v_bar;
};

// Parameterizes {v : A v = b} as {V t + v_bar}.  A must have full row rank;
// singular values below 1e-10 * sigma_max are treated as zero and a rank
// short of the row count throws RankDeficient.  An empty A (0 x n) yields
// V = I and v_bar = 0.
AffineParam nullspace_and_particular(const MatrixXd& A, const VectorXd& b);

// General solution set of G z = g as {N t + particular}, tolerant of
// dependent rows.  N has orthonormal columns spanning null(G).  consistent
// is false when the system has no solution (least-squares residual above
// 1e-8 * (1 + |g|_inf)); N and particular are still filled from the
// least-squares fit in that case.
struct AffineSolution {
  bool consistent = true;
  Eigen::Index rank = 0;
  MatrixXd N;
  VectorXd particular;
};

AffineSolution affine_solution_set(const MatrixXd& G, const VectorXd& g);

// Eigendecomposition S = Q diag(lambda) Q^T of a symmetric matrix, computed
// with cyclic Jacobi rotations.  Eigenvalues are returned in descending
// order with matching Q columns.  Throws NotSymmetric if
// max|S - S^T| > 1e-12 * max(1, max|S|).
struct SymEig {
  VectorXd lambda;
  MatrixXd Q;
};

SymEig sym_eigendecomposition(const MatrixXd& S);

}  // namespace polysplit
