#include "polysplit/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include "polysplit/errors.hpp"

namespace polysplit {

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "Optimal";
    case QpStatus::Infeasible: return "Infeasible";
    case QpStatus::MaxPivots: return "MaxPivots";
    case QpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

namespace {

struct CoreOut {
  QpStatus status = QpStatus::Optimal;
  VectorXd t;
  VectorXd mu;         // size mi, scattered
  std::vector<int> W;  // ascending working set at exit
  int pivots = 0;
};

// Primal active-set loop for min 1/2 t'Pt + q't s.t. F t <= f with P
// positive definite and a feasible start.  Rows of F are expected to be
// unit-norm or identically zero (zero rows are never active).  All
// tie-breaking picks the lowest row index, which is what rules out cycling.
CoreOut active_set_core(const MatrixXd& P, const VectorXd& q, const MatrixXd& F,
                        const VectorXd& f, VectorXd t, std::vector<int> W, int max_pivots) {
  const Eigen::Index d = P.rows();
  const Eigen::Index mi = F.rows();

  Eigen::LLT<MatrixXd> llt(P);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("active_set_core: quadratic term is not positive definite");

  MatrixXd X;      // P^-1 F'
  MatrixXd Gram;   // F P^-1 F'
  if (mi > 0) {
    X = llt.solve(F.transpose());
    Gram = F * X;
  }

  std::vector<char> in_W(static_cast<size_t>(mi), 0);
  for (int j : W) in_W[static_cast<size_t>(j)] = 1;

  CoreOut out;
  VectorXd grad(d), u(d), p(d), muW;

  for (int pivot = 0; pivot < max_pivots; ++pivot) {
    out.pivots = pivot;
    grad = P * t + q;
    u = llt.solve(grad);

    const int w = static_cast<int>(W.size());
    bool singular = false;
    if (w == 0) {
      p = -u;
    } else {
      MatrixXd S(w, w);
      VectorXd r(w);
      for (int a = 0; a < w; ++a) {
        r(a) = F.row(W[static_cast<size_t>(a)]) * u;
        for (int bcol = 0; bcol < w; ++bcol)
          S(a, bcol) = Gram(W[static_cast<size_t>(a)], W[static_cast<size_t>(bcol)]);
      }
      Eigen::LDLT<MatrixXd> sol(S);
      const VectorXd dvec = sol.vectorD();
      if (sol.info() != Eigen::Success ||
          dvec.minCoeff() <= 1e-13 * std::max(1.0, dvec.maxCoeff())) {
        singular = true;
      } else {
        muW = sol.solve(-r);
        p = -u;
        for (int a = 0; a < w; ++a) p -= X.col(W[static_cast<size_t>(a)]) * muW(a);
      }
    }

    if (singular) {
      // Dependent working set (degenerate geometry): drop the highest row
      // index and retry.
      const int j = W.back();
      W.pop_back();
      in_W[static_cast<size_t>(j)] = 0;
      continue;
    }

    const double pnorm = p.lpNorm<Eigen::Infinity>();
    if (pnorm <= 1e-11 * (1.0 + t.lpNorm<Eigen::Infinity>())) {
      // Stationary on the working set; check multiplier signs.
      const double mu_tol = 1e-10 * (1.0 + grad.lpNorm<Eigen::Infinity>());
      int drop = -1;
      for (int a = 0; a < w; ++a) {
        if (muW(a) < -mu_tol && (drop < 0 || W[static_cast<size_t>(a)] < W[static_cast<size_t>(drop)]))
          drop = a;
      }
      if (drop < 0) {
        out.status = QpStatus::Optimal;
        out.t = t;
        out.mu = VectorXd::Zero(mi);
        for (int a = 0; a < w; ++a)
          out.mu(W[static_cast<size_t>(a)]) = std::max(0.0, muW(a));
        out.W = W;
        return out;
      }
      in_W[static_cast<size_t>(W[static_cast<size_t>(drop)])] = 0;
      W.erase(W.begin() + drop);
      continue;
    }

    // Ratio test toward the full step.
    double alpha = 1.0;
    int blocker = -1;
    for (int j = 0; j < mi; ++j) {
      if (in_W[static_cast<size_t>(j)]) continue;
      const double dj = F.row(j) * p;
      if (dj <= 1e-12 * (1.0 + pnorm)) continue;
      double rj = f(j) - F.row(j) * t;
      if (rj < 0.0) rj = 0.0;
      const double aj = rj / dj;
      if (aj < alpha * (1.0 - 1e-14)) {
        alpha = aj;
        blocker = j;
      }
    }
    t += alpha * p;
    if (blocker >= 0) {
      auto it = std::lower_bound(W.begin(), W.end(), blocker);
      W.insert(it, blocker);
      in_W[static_cast<size_t>(blocker)] = 1;
    }
  }

  out.status = QpStatus::MaxPivots;
  out.t = t;
  out.mu = VectorXd::Zero(mi);
  out.W = W;
  out.pivots = max_pivots;
  return out;
}

int default_cap(Eigen::Index d, Eigen::Index mi) {
  return static_cast<int>(100 * (d + mi + 1) + 1000);
}

// Row normalization; vacuous rows (zero normal, non-negative offset) get a
// zero row and +1 offset so they can never block or activate.  Returns
// false if some zero row is plainly infeasible.
bool normalize_rows(MatrixXd& F, VectorXd& f, VectorXd& scale) {
  scale.resize(F.rows());
  for (Eigen::Index j = 0; j < F.rows(); ++j) {
    const double nrm = F.row(j).norm();
    scale(j) = nrm;
    if (nrm <= 1e-14) {
      if (f(j) < -1e-8 * (1.0 + std::abs(f(j)))) return false;
      F.row(j).setZero();
      f(j) = 1.0;
      scale(j) = 0.0;
      continue;
    }
    F.row(j) /= nrm;
    f(j) /= nrm;
  }
  return true;
}

}  // namespace

LpResult maximize_linear(const VectorXd& c, const MatrixXd& F, const VectorXd& f,
                         const VectorXd& x0) {
  const Eigen::Index d = c.size();
  if (F.cols() != d || F.rows() != f.size() || x0.size() != d)
    throw DimensionMismatch("maximize_linear: inconsistent dimensions");

  MatrixXd Fn = F;
  VectorXd fn = f;
  VectorXd rownorm;
  if (!normalize_rows(Fn, fn, rownorm)) {
    LpResult bad;
    bad.status = QpStatus::Infeasible;
    bad.x = x0;
    bad.value = c.dot(x0);
    return bad;
  }

  const double cnorm = c.norm();
  LpResult out;
  out.x = x0;
  if (cnorm <= 1e-15) {
    out.value = 0.0;
    return out;
  }

  // Proximal iteration on the linear objective: each step solves a strictly
  // convex quadratic damped toward the previous point.  A fixed point at
  // any damping level is a true linear-program optimum.  The damping floor
  // keeps single-step travel below 1e6 so the arithmetic stays well scaled.
  const double sigma_floor = cnorm / 1e6;
  double sigma = std::max(1e-2 * cnorm, sigma_floor);
  const int cap = default_cap(d, F.rows());
  VectorXd x = x0;
  std::vector<int> W;
  MatrixXd P = MatrixXd::Identity(d, d);

  for (int iter = 0; iter < 80; ++iter) {
    P.setIdentity();
    P *= sigma;
    CoreOut step = active_set_core(P, -c - sigma * x, Fn, fn, x, W, cap);
    if (step.status == QpStatus::MaxPivots) {
      out.status = QpStatus::MaxPivots;
      out.x = step.t;
      out.value = c.dot(step.t);
      return out;
    }
    const double move = (step.t - x).lpNorm<Eigen::Infinity>();
    x = step.t;
    W = step.W;
    if (move <= 1e-11 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      out.x = x;
      out.value = c.dot(x);
      return out;
    }
    if (x.lpNorm<Eigen::Infinity>() > 1e8 * (1.0 + x0.lpNorm<Eigen::Infinity>())) {
      out.status = QpStatus::Unbounded;
      out.x = x;
      out.value = c.dot(x);
      return out;
    }
    sigma = std::max(sigma / 8.0, sigma_floor);
  }
  out.status = QpStatus::MaxPivots;
  out.x = x;
  out.value = c.dot(x);
  return out;
}

namespace detail {

LeastDistance least_distance(const VectorXd& target, const MatrixXd& F, const VectorXd& f,
                             const VectorXd& t0, int max_pivots) {
  const Eigen::Index d = target.size();
  const int cap = max_pivots > 0 ? max_pivots : default_cap(d, F.rows());
  CoreOut core = active_set_core(MatrixXd::Identity(d, d), -target, F, f, t0, {}, cap);
  LeastDistance out;
  out.status = core.status;
  out.t = std::move(core.t);
  return out;
}

bool feasible_point(const MatrixXd& F, const VectorXd& f, VectorXd& anchor) {
  const Eigen::Index d = F.cols();
  const Eigen::Index mi = F.rows();
  double viol0 = 0.0;
  for (Eigen::Index j = 0; j < mi; ++j) viol0 = std::max(viol0, -f(j));
  if (viol0 <= 1e-9) {
    anchor = VectorXd::Zero(d);
    return true;
  }
  MatrixXd Fa(mi + 1, d + 1);
  VectorXd fa(mi + 1);
  Fa.setZero();
  Fa.topLeftCorner(mi, d) = F;
  for (Eigen::Index j = 0; j < mi; ++j) Fa(j, d) = F.row(j).squaredNorm() > 0.0 ? -1.0 : 0.0;
  fa.head(mi) = f;
  Fa(mi, d) = -1.0;
  fa(mi) = 1.0;
  VectorXd start = VectorXd::Zero(d + 1);
  start(d) = viol0 + 1e-6 * (1.0 + viol0);
  VectorXd cdir = VectorXd::Zero(d + 1);
  cdir(d) = -1.0;
  LpResult ph1 = maximize_linear(cdir, Fa, fa, start);
  anchor = ph1.x.head(d);
  const double fscale = mi > 0 ? f.cwiseAbs().maxCoeff() : 0.0;
  return ph1.status == QpStatus::Optimal && ph1.x(d) <= 1e-8 * (1.0 + fscale);
}

}  // namespace detail

QpResult solve_convex_qp(const MatrixXd& P, const VectorXd& q, const MatrixXd& Geq,
                         const VectorXd& geq, const MatrixXd& F, const VectorXd& f,
                         int max_pivots) {
  const Eigen::Index n = P.rows();
  if (P.cols() != n || q.size() != n) throw DimensionMismatch("solve_convex_qp: bad P or q");
  if (Geq.rows() != geq.size() || (Geq.rows() > 0 && Geq.cols() != n))
    throw DimensionMismatch("solve_convex_qp: bad equality system");
  if (F.rows() != f.size() || (F.rows() > 0 && F.cols() != n))
    throw DimensionMismatch("solve_convex_qp: bad inequality system");

  const Eigen::Index me = Geq.rows();
  const Eigen::Index mi = F.rows();
  const MatrixXd Ps = 0.5 * (P + P.transpose());

  QpResult out;

  // Row-normalize the inequalities; vacuous rows are neutralized.
  MatrixXd Fn = F;
  VectorXd fn = f;
  VectorXd rownorm;
  if (mi > 0 && !normalize_rows(Fn, fn, rownorm)) {
    out.status = QpStatus::Infeasible;
    out.z = VectorXd::Zero(n);
    return out;
  }

  // Eliminate the equalities: z = zp + N t with N orthonormal.
  MatrixXd Geq2d = me > 0 ? Geq : MatrixXd::Zero(0, n);
  AffineSolution eq = affine_solution_set(Geq2d, geq);
  if (!eq.consistent) {
    out.status = QpStatus::Infeasible;
    out.z = eq.particular;
    return out;
  }
  const MatrixXd& N = eq.N;
  const VectorXd& zp = eq.particular;
  const Eigen::Index d = N.cols();

  // Reduced inequalities, with a second normalization pass.  Rows that lose
  // their normal on the equality manifold become pure consistency checks.
  MatrixXd Fr(mi, d);
  VectorXd fr(mi);
  VectorXd zeta = VectorXd::Zero(mi);
  for (Eigen::Index j = 0; j < mi; ++j) {
    Eigen::RowVectorXd row = Fn.row(j) * N;
    double rhs = fn(j) - Fn.row(j) * zp;
    const double nrm = row.norm();
    if (nrm <= 1e-12) {
      if (rownorm(j) > 0.0 && rhs < -1e-8 * (1.0 + std::abs(fn(j)))) {
        out.status = QpStatus::Infeasible;
        out.z = zp;
        return out;
      }
      Fr.row(j).setZero();
      fr(j) = 1.0;
      continue;
    }
    Fr.row(j) = row / nrm;
    fr(j) = rhs / nrm;
    zeta(j) = nrm;
  }

  const int cap = max_pivots > 0 ? max_pivots : default_cap(d, mi);

  if (d == 0) {
    // Fully determined by the equalities; every inequality row was screened
    // against zp during the reduction above.
    out.z = zp;
  } else {
    const MatrixXd Pr = N.transpose() * Ps * N;
    const VectorXd qr = N.transpose() * (Ps * zp + q);

    // Phase 1 when the minimum-norm equality point violates something.
    VectorXd t0;
    if (!detail::feasible_point(Fr, fr, t0)) {
      out.status = QpStatus::Infeasible;
      out.z = zp + N * t0;
      return out;
    }

    CoreOut core = active_set_core(Pr, qr, Fr, fr, t0, {}, cap);
    out.pivots = core.pivots;
    out.z = zp + N * core.t;
    if (core.status != QpStatus::Optimal) {
      out.status = core.status;
      return out;
    }
    out.mu = VectorXd::Zero(mi);
    for (int j : core.W) {
      const double denom = rownorm(j) * zeta(j);
      if (denom > 0.0) out.mu(j) = core.mu(j) / denom;
      out.active.push_back(j);
    }
  }

  if (out.mu.size() == 0) out.mu = VectorXd::Zero(mi);

  // Minimum-norm equality multipliers from the stationarity residual.
  VectorXd res = Ps * out.z + q;
  if (mi > 0) res += F.transpose() * out.mu;
  if (me > 0) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(Geq.transpose());
    out.nu = cod.solve(-res);
    res += Geq.transpose() * out.nu;
  } else {
    out.nu = VectorXd::Zero(0);
  }

  double kkt = res.lpNorm<Eigen::Infinity>() / (1.0 + q.lpNorm<Eigen::Infinity>());
  if (me > 0)
    kkt = std::max(kkt, (Geq * out.z - geq).lpNorm<Eigen::Infinity>() /
                            (1.0 + geq.lpNorm<Eigen::Infinity>()));
  if (mi > 0) {
    const VectorXd slall = f - F * out.z;
    kkt = std::max(kkt, std::max(0.0, -slall.minCoeff()) / (1.0 + f.lpNorm<Eigen::Infinity>()));
    for (Eigen::Index j = 0; j < mi; ++j)
      kkt = std::max(kkt, std::abs(out.mu(j) * slall(j)) /
                              (1.0 + std::abs(f(j)) + q.lpNorm<Eigen::Infinity>()));
  }
  out.kkt_residual = kkt;
  return out;
}

}  // namespace polysplit
