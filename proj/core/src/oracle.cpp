#include "polysplit/oracle.hpp"

#include <limits>
#include <string>

#include "polysplit/errors.hpp"
#include "polysplit/operator.hpp"
#include "polysplit/qp.hpp"

namespace polysplit {

OracleResult global_solve(const ConsensusProblem& prob, const FixedStages& fs, long cap) {
  if (!prob.validated) throw DimensionMismatch("global_solve: problem not validated");
  const size_t K = fs.comps.size();

  // pre-filter: only components that are non-empty at this parameter
  std::vector<std::vector<int>> live(K);
  long total = 1;
  for (size_t k = 0; k < K; ++k) {
    for (size_t i = 0; i < fs.comps[k].size(); ++i)
      if (!fs.comps[k][i].empty) live[k].push_back(static_cast<int>(i));
    if (live[k].empty()) return OracleResult{};  // stage union empty: infeasible
    if (total > cap / static_cast<long>(live[k].size()))
      throw TooManyCombinations("global_solve: assignment count exceeds the cap of " +
                                std::to_string(cap));
    total *= static_cast<long>(live[k].size());
  }

  // gather per-assignment constraint blocks once per stage component
  OracleResult best;
  std::vector<size_t> idx(K, 0);
  std::vector<int> assignment(K);
  while (true) {
    Eigen::Index ge_rows = prob.A.rows();
    Eigen::Index f_rows = 0;
    for (size_t k = 0; k < K; ++k) {
      const FixedPolyhedron& c = fs.comps[k][static_cast<size_t>(live[k][idx[k]])];
      ge_rows += c.G.rows();
      f_rows += c.F.rows();
    }
    MatrixXd Geq = MatrixXd::Zero(ge_rows, prob.n);
    VectorXd geq(ge_rows);
    MatrixXd F = MatrixXd::Zero(f_rows, prob.n);
    VectorXd f(f_rows);
    Geq.topRows(prob.A.rows()) = prob.A;
    geq.head(prob.A.rows()) = prob.b;
    Eigen::Index go = prob.A.rows(), fo = 0;
    for (size_t k = 0; k < K; ++k) {
      const FixedPolyhedron& c = fs.comps[k][static_cast<size_t>(live[k][idx[k]])];
      const Eigen::Index off = prob.offsets[k];
      const Eigen::Index nk = prob.stages[k].nk;
      if (c.G.rows() > 0) {
        Geq.block(go, off, c.G.rows(), nk) = c.G;
        geq.segment(go, c.G.rows()) = c.g;
        go += c.G.rows();
      }
      if (c.F.rows() > 0) {
        F.block(fo, off, c.F.rows(), nk) = c.F;
        f.segment(fo, c.F.rows()) = c.f;
        fo += c.F.rows();
      }
      assignment[k] = live[k][idx[k]];
    }

    QpResult qr = solve_convex_qp(prob.H, prob.h, Geq, geq, F, f);
    if (qr.status == QpStatus::MaxPivots)
      throw MaxPivots("global_solve: active-set pivot budget exhausted");
    ++best.solved;
    if (qr.status == QpStatus::Optimal) {
      const double val = objective(prob, qr.z);
      // strict improvement keeps the lexicographically smallest assignment
      if (!best.feasible || val < best.objective) {
        best.feasible = true;
        best.objective = val;
        best.z = qr.z;
        best.assignment = assignment;
      }
    }

    size_t k = K;
    bool done = false;
    while (k > 0) {
      --k;
      if (++idx[k] < live[k].size()) break;
      idx[k] = 0;
      if (k == 0) done = true;
    }
    if (done) break;
  }
  return best;
}

OracleResult global_solve(const ConsensusProblem& prob, const VectorXd& theta, long cap) {
  const FixedStages fs = instantiate_stages(prob, theta);
  return global_solve(prob, fs, cap);
}

const char* to_string(Controller c) {
  switch (c) {
    case Controller::FixedPoint: return "fixed_point";
    case Controller::Admm: return "admm";
    case Controller::Oracle: return "oracle";
  }
  return "?";
}

Trajectory closed_loop(const PwaSystem& sys, const ConsensusProblem& prob, Controller ctl,
                       const VectorXd& theta0, const ClosedLoopConfig& cfg) {
  if (theta0.size() != sys.n_x) throw DimensionMismatch("closed_loop: theta0 size");
  if (cfg.steps < 1) throw std::invalid_argument("closed_loop: steps must be at least 1");

  OperatorData op;
  if (ctl == Controller::FixedPoint) op = build_operator(prob, cfg.xi);

  const std::vector<PwaRegion>& plant = regions_at_step(sys, 1);
  Trajectory traj;
  traj.x.push_back(theta0);

  for (int t = 0; t < cfg.steps; ++t) {
    const VectorXd& xt = traj.x.back();
    const FixedStages fs = instantiate_stages(prob, xt);

    VectorXd ut;
    if (ctl == Controller::Oracle) {
      OracleResult res = global_solve(prob, fs, cfg.oracle_cap);
      traj.status.push_back(res.feasible ? SolveStatus::Converged
                                         : SolveStatus::StageInfeasible);
      traj.iterations.push_back(0);
      traj.objective.push_back(res.feasible ? res.objective
                                            : std::numeric_limits<double>::quiet_NaN());
      if (!res.feasible) {
        traj.completed = false;
        traj.stop_step = t;
        return traj;
      }
      ut = res.z.head(sys.n_u);
    } else {
      SolveResult res = ctl == Controller::FixedPoint ? solve(prob, fs, op, cfg.solver)
                                                      : solve_admm(prob, fs, cfg.admm);
      traj.status.push_back(res.status);
      traj.iterations.push_back(res.iterations);
      traj.objective.push_back(res.objective);
      const bool has_input = res.status == SolveStatus::Converged ||
                             res.status == SolveStatus::TrivialGlobal ||
                             res.status == SolveStatus::MaxIterations;
      if (!has_input) {
        traj.completed = false;
        traj.stop_step = t;
        return traj;
      }
      ut = res.y.head(sys.n_u);
    }
    traj.u.push_back(ut);

    // plant: lowest-index region whose validity set holds (x, u)
    VectorXd xu(sys.n_x + sys.n_u);
    xu << xt, ut;
    int reg = -1;
    for (size_t i = 0; i < plant.size(); ++i) {
      if (contains(plant[i].C, xu, cfg.region_tol)) {
        reg = static_cast<int>(i);
        break;
      }
    }
    if (reg < 0)
      throw NoActiveRegion("closed_loop: state-input pair outside every region at step " +
                           std::to_string(t + 1));
    traj.region.push_back(reg);
    traj.x.push_back(plant[static_cast<size_t>(reg)].A * xt +
                     plant[static_cast<size_t>(reg)].B * ut + plant[static_cast<size_t>(reg)].c);
  }
  return traj;
}

}  // namespace polysplit
