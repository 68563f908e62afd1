#include "polysplit/admm.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "polysplit/errors.hpp"

namespace polysplit {

SolveResult solve_admm(const ConsensusProblem& prob, const FixedStages& fs,
                       const AdmmConfig& cfg) {
  if (!prob.validated) throw DimensionMismatch("solve_admm: problem not validated");
  if (!(cfg.rho > 0.0) || !std::isfinite(cfg.rho))
    throw std::invalid_argument("solve_admm: rho must be positive");
  if (!(cfg.eps_tol > 0.0)) throw std::invalid_argument("solve_admm: eps_tol must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("solve_admm: max_iter must be at least 1");
  if (cfg.y0.size() != 0 && cfg.y0.size() != prob.n)
    throw DimensionMismatch("solve_admm: y0 size");
  if (cfg.lambda0.size() != 0 && cfg.lambda0.size() != prob.n)
    throw DimensionMismatch("solve_admm: lambda0 size");

  const Eigen::Index n = prob.n;
  const Eigen::Index m = prob.A.rows();

  // the z-update repeats with a fresh right-hand side only; factorize once
  MatrixXd kkt = MatrixXd::Zero(n + m, n + m);
  kkt.topLeftCorner(n, n) = prob.H + cfg.rho * MatrixXd::Identity(n, n);
  if (m > 0) {
    kkt.topRightCorner(n, m) = prob.A.transpose();
    kkt.bottomLeftCorner(m, n) = prob.A;
  }
  Eigen::PartialPivLU<MatrixXd> lu(kkt);

  VectorXd y = cfg.y0.size() == n ? cfg.y0 : VectorXd::Zero(n);
  VectorXd u = cfg.lambda0.size() == n ? cfg.lambda0 : VectorXd::Zero(n);
  VectorXd rhs(n + m);
  if (m > 0) rhs.tail(m) = prob.b;

  SolveResult out;
  for (int j = 0; j < cfg.max_iter; ++j) {
    rhs.head(n) = -prob.h + cfg.rho * (y - u);
    const VectorXd sol = lu.solve(rhs);
    const VectorXd z = sol.head(n);

    ProjectZResult proj = project_Z(prob, fs, z + u);
    if (!proj.ok) {
      out.status = SolveStatus::StageInfeasible;
      out.infeasible_stage = proj.infeasible_stage;
      out.iterations = j;
      out.objective = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    const double primal = (z - proj.y).norm();
    const double dual = cfg.rho * (proj.y - y).norm();
    if (cfg.record_residuals) out.residual_trace.push_back(primal);

    y = std::move(proj.y);
    u += z - y;

    out.z = z;
    out.y = y;
    out.s = z + u;
    out.lambda = cfg.rho * (z - out.s);  // = -rho u
    out.active = std::move(proj.active);
    out.iterations = j + 1;
    out.residual = primal;

    if (!std::isfinite(primal) || !std::isfinite(dual)) {
      out.status = SolveStatus::Diverged;
      out.objective = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    if (primal <= cfg.eps_tol && dual <= cfg.eps_tol) {
      out.status = SolveStatus::Converged;
      out.objective = objective(prob, y);
      return out;
    }
    out.status = SolveStatus::MaxIterations;
  }
  out.objective = objective(prob, out.y);
  return out;
}

SolveResult solve_admm(const ConsensusProblem& prob, const VectorXd& theta,
                       const AdmmConfig& cfg) {
  const FixedStages fs = instantiate_stages(prob, theta);
  return solve_admm(prob, fs, cfg);
}

}  // namespace polysplit
