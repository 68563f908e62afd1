#include "polysplit/polyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "polysplit/errors.hpp"
#include "polysplit/qp.hpp"

namespace polysplit {

FixedPolyhedron fix_polyhedron(MatrixXd G, VectorXd g, MatrixXd F, VectorXd f) {
  if (G.rows() != g.size()) throw DimensionMismatch("fix_polyhedron: G/g row mismatch");
  if (F.rows() != f.size()) throw DimensionMismatch("fix_polyhedron: F/f row mismatch");
  if (G.rows() > 0 && F.rows() > 0 && G.cols() != F.cols())
    throw DimensionMismatch("fix_polyhedron: G/F column mismatch");

  FixedPolyhedron P;
  P.G = std::move(G);
  P.g = std::move(g);
  P.F = std::move(F);
  P.f = std::move(f);
  const Eigen::Index n = P.G.rows() > 0 ? P.G.cols() : P.F.cols();
  const Eigen::Index mi = P.F.rows();

  AffineSolution eq = affine_solution_set(P.G.rows() > 0 ? P.G : MatrixXd::Zero(0, n), P.g);
  if (!eq.consistent) {
    P.empty = true;
    return P;
  }
  P.N = eq.N;
  P.zp = eq.particular;
  const Eigen::Index d = P.N.cols();

  // Inequalities restricted to the manifold, unit-norm rows.  Rows whose
  // normal vanishes there are either vacuous or decide emptiness outright.
  std::vector<Eigen::Index> keep;
  MatrixXd Fr0(mi, d);
  VectorXd fr0(mi);
  for (Eigen::Index j = 0; j < mi; ++j) {
    Eigen::RowVectorXd row = P.F.row(j) * P.N;
    const double rhs = P.f(j) - P.F.row(j) * P.zp;
    const double nrm = row.norm();
    if (nrm <= 1e-12 * std::max(1.0, P.F.row(j).norm())) {
      if (rhs < -1e-8 * (1.0 + std::abs(P.f(j)))) {
        P.empty = true;
        return P;
      }
      continue;
    }
    Fr0.row(static_cast<Eigen::Index>(keep.size())) = row / nrm;
    fr0(static_cast<Eigen::Index>(keep.size())) = rhs / nrm;
    keep.push_back(j);
  }
  P.Fr = Fr0.topRows(static_cast<Eigen::Index>(keep.size()));
  P.fr = fr0.head(static_cast<Eigen::Index>(keep.size()));

  if (d == 0) {
    P.anchor = VectorXd::Zero(0);
    return P;
  }
  if (!detail::feasible_point(P.Fr, P.fr, P.anchor)) P.empty = true;
  return P;
}

FixedPolyhedron instantiate(const Polyhedron& poly, const VectorXd& theta) {
  VectorXd g = poly.g0;
  if (poly.Gtheta.rows() > 0) {
    if (poly.Gtheta.cols() != theta.size())
      throw DimensionMismatch("instantiate: Gtheta/theta mismatch");
    g += poly.Gtheta * theta;
  }
  VectorXd f = poly.f0;
  if (poly.Ftheta.rows() > 0) {
    if (poly.Ftheta.cols() != theta.size())
      throw DimensionMismatch("instantiate: Ftheta/theta mismatch");
    f += poly.Ftheta * theta;
  }
  return fix_polyhedron(poly.G, g, poly.F, f);
}

Projection project_onto(const FixedPolyhedron& P, const VectorXd& s) {
  Projection out;
  if (P.empty) {
    out.status = ProjStatus::Empty;
    return out;
  }
  const Eigen::Index d = P.N.cols();
  if (d == 0) {
    out.y = P.zp;
    out.dist = (s - P.zp).norm();
    return out;
  }
  const VectorXd target = P.N.transpose() * (s - P.zp);

  VectorXd t;
  if (P.Fr.rows() == 0 || (P.Fr * target - P.fr).maxCoeff() <= 1e-9) {
    t = target;  // already feasible: projection onto the manifold suffices
  } else {
    detail::LeastDistance ld = detail::least_distance(target, P.Fr, P.fr, P.anchor);
    if (ld.status != QpStatus::Optimal)
      throw MaxPivots("project_onto: active-set iteration exceeded its pivot cap");
    t = std::move(ld.t);
  }
  out.y = P.zp + P.N * t;
  out.dist = (s - out.y).norm();
  return out;
}

bool contains(const FixedPolyhedron& P, const VectorXd& z, double tol) {
  if (P.G.rows() > 0 && (P.G * z - P.g).cwiseAbs().maxCoeff() > tol) return false;
  if (P.F.rows() > 0 && (P.F * z - P.f).maxCoeff() > tol) return false;
  return true;
}

namespace {

// Working system over x = (v, aux): equality rows E x = 0 and inequality
// rows D x <= 0, all homogeneous.
struct ConeSystem {
  MatrixXd E;
  MatrixXd D;
};

void normalize_and_dedup(MatrixXd& D) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    const double nrm = D.row(i).norm();
    if (nrm <= 1e-12) continue;
    D.row(i) /= nrm;
    bool dup = false;
    for (Eigen::Index k : keep)
      if ((D.row(i) - D.row(k)).lpNorm<Eigen::Infinity>() <= 1e-10) {
        dup = true;
        break;
      }
    if (!dup) keep.push_back(i);
  }
  MatrixXd out(static_cast<Eigen::Index>(keep.size()), D.cols());
  for (size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = D.row(keep[i]);
  D = std::move(out);
}

// Drop rows implied by the rest, deciding with a bounded homogeneous LP:
// row d is redundant iff max d'x over {others <= 0, |x|_inf <= 1} is 0.
void lp_prune(MatrixXd& D) {
  const Eigen::Index n = D.cols();
  std::vector<char> alive(static_cast<size_t>(D.rows()), 1);
  for (Eigen::Index j = 0; j < D.rows(); ++j) {
    Eigen::Index others = 0;
    for (Eigen::Index i = 0; i < D.rows(); ++i)
      if (alive[static_cast<size_t>(i)] && i != j) ++others;
    if (others == 0) continue;
    MatrixXd F(others + 2 * n, n);
    VectorXd f = VectorXd::Zero(others + 2 * n);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < D.rows(); ++i)
      if (alive[static_cast<size_t>(i)] && i != j) F.row(r++) = D.row(i);
    F.middleRows(others, n) = MatrixXd::Identity(n, n);
    F.bottomRows(n) = -MatrixXd::Identity(n, n);
    f.tail(2 * n).setOnes();
    LpResult lp = maximize_linear(D.row(j).transpose(), F, f, VectorXd::Zero(n));
    if (lp.status == QpStatus::Optimal && lp.value <= 1e-9) alive[static_cast<size_t>(j)] = 0;
  }
  Eigen::Index cnt = 0;
  for (char a : alive) cnt += a;
  MatrixXd out(cnt, D.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    if (alive[static_cast<size_t>(i)]) out.row(r++) = D.row(i);
  D = std::move(out);
}

// Eliminate variable `var` from the system in place.
void eliminate_var(ConeSystem& sys, Eigen::Index var, int row_cap) {
  // Prefer a Gaussian pivot on an equality row.
  Eigen::Index pivot = -1;
  double best = 1e-11;
  for (Eigen::Index i = 0; i < sys.E.rows(); ++i) {
    const double c = std::abs(sys.E(i, var));
    const double scale = std::max(1.0, sys.E.row(i).cwiseAbs().maxCoeff());
    if (c / scale > best) {
      best = c / scale;
      pivot = i;
    }
  }
  if (pivot >= 0) {
    Eigen::RowVectorXd prow = sys.E.row(pivot) / sys.E(pivot, var);
    for (Eigen::Index i = 0; i < sys.E.rows(); ++i) {
      if (i == pivot) continue;
      sys.E.row(i) -= sys.E(i, var) * prow;
      sys.E(i, var) = 0.0;
    }
    for (Eigen::Index i = 0; i < sys.D.rows(); ++i) {
      sys.D.row(i) -= sys.D(i, var) * prow;
      sys.D(i, var) = 0.0;
    }
    // Remove the pivot row.
    MatrixXd E2(sys.E.rows() - 1, sys.E.cols());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sys.E.rows(); ++i)
      if (i != pivot) E2.row(r++) = sys.E.row(i);
    sys.E = std::move(E2);
    return;
  }

  // Fourier-Motzkin on the inequalities.
  std::vector<Eigen::Index> pos, neg, zer;
  for (Eigen::Index i = 0; i < sys.D.rows(); ++i) {
    const double c = sys.D(i, var);
    const double scale = std::max(1.0, sys.D.row(i).cwiseAbs().maxCoeff());
    if (c > 1e-11 * scale)
      pos.push_back(i);
    else if (c < -1e-11 * scale)
      neg.push_back(i);
    else
      zer.push_back(i);
  }
  const Eigen::Index new_rows =
      static_cast<Eigen::Index>(zer.size()) +
      static_cast<Eigen::Index>(pos.size()) * static_cast<Eigen::Index>(neg.size());
  if (new_rows > row_cap)
    throw BlowUp("fm_project_cone: row count exceeded the elimination cap");
  MatrixXd D2(new_rows, sys.D.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i : zer) {
    D2.row(r) = sys.D.row(i);
    D2(r, var) = 0.0;
    ++r;
  }
  for (Eigen::Index ip : pos)
    for (Eigen::Index in : neg) {
      D2.row(r) = sys.D.row(ip) / sys.D(ip, var) - sys.D.row(in) / sys.D(in, var);
      D2(r, var) = 0.0;
      ++r;
    }
  sys.D = std::move(D2);
  normalize_and_dedup(sys.D);
  lp_prune(sys.D);
  if (sys.D.rows() > row_cap)
    throw BlowUp("fm_project_cone: row count exceeded the elimination cap");
}

}  // namespace

MatrixXd fm_project_cone(const MatrixXd& G, const MatrixXd& Fa, int row_cap) {
  const Eigen::Index p = G.rows();
  const Eigen::Index q = Fa.rows();
  const Eigen::Index n = p > 0 ? G.cols() : Fa.cols();
  if (q > 0 && Fa.cols() != n) throw DimensionMismatch("fm_project_cone: G/Fa column mismatch");

  // x = (v, nu, mu): equalities v - G'nu - Fa'mu = 0, inequalities -mu <= 0.
  const Eigen::Index total = n + p + q;
  ConeSystem sys;
  sys.E = MatrixXd::Zero(n, total);
  sys.E.leftCols(n) = MatrixXd::Identity(n, n);
  if (p > 0) sys.E.middleCols(n, p) = -G.transpose();
  if (q > 0) sys.E.rightCols(q) = -Fa.transpose();
  sys.D = MatrixXd::Zero(q, total);
  for (Eigen::Index j = 0; j < q; ++j) sys.D(j, n + p + j) = -1.0;

  for (Eigen::Index var = total - 1; var >= n; --var) eliminate_var(sys, var, row_cap);

  // Remaining rows act on v only.  Surviving equalities become +/- pairs.
  const Eigen::Index ne = sys.E.rows();
  const Eigen::Index ni = sys.D.rows();
  MatrixXd out(2 * ne + ni, n);
  for (Eigen::Index i = 0; i < ne; ++i) {
    out.row(2 * i) = sys.E.row(i).head(n);
    out.row(2 * i + 1) = -sys.E.row(i).head(n);
  }
  for (Eigen::Index i = 0; i < ni; ++i) out.row(2 * ne + i) = sys.D.row(i).head(n);
  normalize_and_dedup(out);
  return out;
}

}  // namespace polysplit
