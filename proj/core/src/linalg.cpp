#include "polysplit/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <vector>

#include "polysplit/errors.hpp"

namespace polysplit {

AffineParam nullspace_and_particular(const MatrixXd& A, const VectorXd& b) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m)
    throw DimensionMismatch("nullspace_and_particular: b size does not match rows of A");

  if (m == 0) {
    AffineParam out;
    out.V = MatrixXd::Identity(n, n);
    out.v_bar = VectorXd::Zero(n);
    return out;
  }
  if (m > n) throw RankDeficient("nullspace_and_particular: more rows than columns");

  Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const VectorXd& sig = svd.singularValues();
  const double tol = 1e-10 * sig(0);
  Eigen::Index rank = 0;
  while (rank < sig.size() && sig(rank) > tol) ++rank;
  if (rank < m) throw RankDeficient("nullspace_and_particular: A is row rank deficient");

  AffineParam out;
  out.V = svd.matrixV().rightCols(n - m);
  // Minimum-norm solution: V_r Sigma^-1 U^T b.
  out.v_bar = svd.matrixV().leftCols(m) *
              (sig.head(m).cwiseInverse().asDiagonal() * (svd.matrixU().transpose() * b));
  return out;
}

AffineSolution affine_solution_set(const MatrixXd& G, const VectorXd& g) {
  const Eigen::Index m = G.rows();
  const Eigen::Index n = G.cols();
  if (g.size() != m) throw DimensionMismatch("affine_solution_set: g size does not match rows of G");

  AffineSolution out;
  if (m == 0) {
    out.N = MatrixXd::Identity(n, n);
    out.particular = VectorXd::Zero(n);
    return out;
  }

  Eigen::JacobiSVD<MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const VectorXd& sig = svd.singularValues();
  const double tol = sig.size() > 0 ? 1e-10 * sig(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < sig.size() && sig(rank) > tol) ++rank;
  out.rank = rank;
  out.N = svd.matrixV().rightCols(n - rank);
  if (rank == 0) {
    out.particular = VectorXd::Zero(n);
    out.consistent = g.cwiseAbs().maxCoeff() <= 1e-8;
    return out;
  }
  out.particular = svd.matrixV().leftCols(rank) *
                   (sig.head(rank).cwiseInverse().asDiagonal() *
                    (svd.matrixU().leftCols(rank).transpose() * g));
  const double res = (G * out.particular - g).cwiseAbs().maxCoeff();
  out.consistent = res <= 1e-8 * (1.0 + g.cwiseAbs().maxCoeff());
  return out;
}

SymEig sym_eigendecomposition(const MatrixXd& S) {
  const Eigen::Index n = S.rows();
  if (S.cols() != n) throw DimensionMismatch("sym_eigendecomposition: matrix is not square");
  const double scale = n > 0 ? std::max(1.0, S.cwiseAbs().maxCoeff()) : 1.0;
  if (n > 0 && (S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw NotSymmetric("sym_eigendecomposition: matrix is not symmetric");

  MatrixXd a = 0.5 * (S + S.transpose());
  MatrixXd q = MatrixXd::Identity(n, n);

  // Cyclic Jacobi: sweep the strict upper triangle, rotating away each
  // off-diagonal entry, until the largest one falls below tolerance.
  const double off_tol = 1e-14 * scale;
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p + 1 < n; ++p)
      for (Eigen::Index r = p + 1; r < n; ++r) off = std::max(off, std::abs(a(p, r)));
    if (off <= off_tol) break;

    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index r = p + 1; r < n; ++r) {
        const double apr = a(p, r);
        if (std::abs(apr) <= 0.25 * off_tol) continue;
        const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
        // Smaller-angle root of t^2 + 2 t theta - 1 = 0, for stability.
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a(p, p) -= t * apr;
        a(r, r) += t * apr;
        a(p, r) = 0.0;
        a(r, p) = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (i != p && i != r) {
            const double aip = a(i, p), air = a(i, r);
            a(i, p) = c * aip - s * air;
            a(i, r) = s * aip + c * air;
            a(p, i) = a(i, p);
            a(r, i) = a(i, r);
          }
          const double qip = q(i, p), qir = q(i, r);
          q(i, p) = c * qip - s * qir;
          q(i, r) = s * qip + c * qir;
        }
      }
    }
  }

  SymEig out;
  out.lambda = a.diagonal();

  // Sort descending, permuting eigenvector columns along.
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return out.lambda(i) > out.lambda(j); });
  SymEig sorted;
  sorted.lambda.resize(n);
  sorted.Q.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted.lambda(i) = out.lambda(idx[static_cast<size_t>(i)]);
    sorted.Q.col(i) = q.col(idx[static_cast<size_t>(i)]);
  }
  return sorted;
}

}  // namespace polysplit
