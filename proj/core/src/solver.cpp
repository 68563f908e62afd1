#include "polysplit/solver.hpp"

#include <cmath>
#include <limits>

#include "polysplit/errors.hpp"

namespace polysplit {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::TrivialGlobal: return "TrivialGlobal";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::Diverged: return "Diverged";
    case SolveStatus::StageInfeasible: return "StageInfeasible";
  }
  return "?";
}

SolveResult solve(const ConsensusProblem& prob, const FixedStages& fs, const OperatorData& op,
                  const SolverConfig& cfg) {
  if (!prob.validated) throw DimensionMismatch("solve: problem not validated");
  if (op.M.rows() != prob.n) throw DimensionMismatch("solve: operator does not match problem");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw std::invalid_argument("solve: gamma must lie in (0, 1)");
  if (!(cfg.eps_tol > 0.0)) throw std::invalid_argument("solve: eps_tol must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("solve: max_iter must be at least 1");
  if (cfg.s0.size() != 0 && cfg.s0.size() != prob.n)
    throw DimensionMismatch("solve: s0 size");

  SolveResult out;

  // The equality-set minimizer decides the easy case outright: if it lies
  // in Z it is feasible and attains the unconstrained-over-E lower bound.
  const VectorXd z_triv = trivial_solution(prob);
  if (contains_Z(prob, fs, z_triv)) {
    out.status = SolveStatus::TrivialGlobal;
    out.z = z_triv;
    out.y = z_triv;
    out.s = z_triv;
    out.lambda = VectorXd::Zero(prob.n);
    out.active.assign(prob.stages.size(), -1);
    out.residual = 0.0;
    out.objective = objective(prob, z_triv);
    return out;
  }

  VectorXd s = cfg.s0.size() == prob.n ? cfg.s0 : VectorXd::Zero(prob.n);
  if (cfg.record_residuals) out.residual_trace.reserve(256);

  for (int j = 0; j < cfg.max_iter; ++j) {
    const VectorXd z = op.M * s + op.c;
    ProjectZResult proj = project_Z(prob, fs, s);
    if (!proj.ok) {
      out.status = SolveStatus::StageInfeasible;
      out.infeasible_stage = proj.infeasible_stage;
      out.iterations = j;
      out.objective = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    const double res = (z - proj.y).norm();
    if (cfg.record_residuals) out.residual_trace.push_back(res);

    out.z = z;
    out.y = std::move(proj.y);
    out.s = s;
    out.active = std::move(proj.active);
    out.iterations = j + 1;
    out.residual = res;

    if (res <= cfg.eps_tol) {
      out.status = SolveStatus::Converged;
      break;
    }
    if (!std::isfinite(res) || res > cfg.divergence_factor) {
      out.status = SolveStatus::Diverged;
      out.objective = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    out.status = SolveStatus::MaxIterations;
    s -= cfg.gamma * (op.W * (z - out.y));
  }

  out.lambda = op.xi * (out.z - out.s);
  out.objective = objective(prob, out.y);
  return out;
}

SolveResult solve(const ConsensusProblem& prob, const VectorXd& theta, const OperatorData& op,
                  const SolverConfig& cfg) {
  const FixedStages fs = instantiate_stages(prob, theta);
  return solve(prob, fs, op, cfg);
}

KktResidual verify_proximal_kkt(const ConsensusProblem& prob, const FixedStages& fs,
                                const VectorXd& z, const VectorXd& lambda, double xi) {
  if (z.size() != prob.n || lambda.size() != prob.n)
    throw DimensionMismatch("verify_proximal_kkt: vector size");
  if (!(xi > 0.0)) throw std::invalid_argument("verify_proximal_kkt: xi must be positive");
  KktResidual r;
  const VectorXd grad = prob.H * z + prob.h - lambda;
  double stat = (prob.V.transpose() * grad).norm();
  if (prob.A.rows() > 0) stat += (prob.A * z - prob.b).norm();
  r.stationarity = stat;

  ProjectZResult proj = project_Z(prob, fs, z - lambda / xi);
  r.projection = proj.ok ? (z - proj.y).norm() : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace polysplit
