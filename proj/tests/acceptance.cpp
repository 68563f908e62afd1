// Acceptance gate: ten scripted checks against the bundled two-region
// problem and randomized instance families.  Prints one [PASS]/[FAIL] line
// per criterion; the exit code is the number of failures.  Run without
// arguments for the whole gate or with a criterion number for one line.
// Expensive artifacts (multistart sweep, closed loops) are built lazily and
// shared between criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "polysplit/a3check.hpp"
#include "polysplit/admm.hpp"
#include "polysplit/errors.hpp"
#include "polysplit/json_io.hpp"
#include "polysplit/mpc.hpp"
#include "polysplit/operator.hpp"
#include "polysplit/oracle.hpp"
#include "polysplit/problem.hpp"
#include "polysplit/solver.hpp"

#include "test_util.hpp"

using namespace polysplit;
using testutil::random_matrix;
using testutil::random_spd;
using testutil::uniform;

namespace {

// pinned tolerances and targets
constexpr double kOptimum = 0.4189;           // bundled-problem global objective
constexpr double kOptimumTol = 5e-4;
constexpr double kCluster[4][2] = {
    {0.4189, 0.4225}, {0.5072, 0.5078}, {0.9411, 0.9748}, {1.5488, 1.5572}};
constexpr double kClusterPad = 1e-2;          // criterion 3 histogram margin
constexpr double kKktTol = 1e-6;              // certificate scale
constexpr double kProjEquivTol = 1e-9;        // criterion 5 agreement
constexpr double kMethodAgreeTol = 1e-6;      // criteria 6 and 10
constexpr double kTrajGapMax = 0.05;          // criterion 4 relative distance

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

bool converged(SolveStatus s) {
  return s == SolveStatus::Converged || s == SolveStatus::TrivialGlobal;
}

bool in_cluster_union(double v, double pad) {
  for (const auto& iv : kCluster)
    if (v >= iv[0] - pad && v <= iv[1] + pad) return true;
  return false;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

Polyhedron plain_component(MatrixXd G, VectorXd g, MatrixXd F, VectorXd f) {
  Polyhedron c;
  c.G = std::move(G);
  c.g0 = std::move(g);
  c.Gtheta = MatrixXd::Zero(c.G.rows(), 0);
  c.F = std::move(F);
  c.f0 = std::move(f);
  c.Ftheta = MatrixXd::Zero(c.F.rows(), 0);
  return c;
}

// two affine sheets in R^3 crossing along a bounded segment of the x-axis;
// the segment endpoints carry a nonzero common normal ray while directions
// off both sheets stay orthogonal to it
StageSet two_plane_stage() {
  StageSet st;
  st.nk = 3;
  MatrixXd F(4, 3);
  F << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0;
  {
    MatrixXd G(1, 3);
    G << 0, 0, 1;
    VectorXd f(4);
    f << 0, 4, 1.4, 1.4;
    st.components.push_back(plain_component(G, VectorXd::Zero(1), F, f));
  }
  {
    MatrixXd G(1, 3);
    G << 0, -1, 1;
    VectorXd f(4);
    f << 0, 4, 1, 1;
    st.components.push_back(plain_component(G, VectorXd::Zero(1), F, f));
  }
  return st;
}

struct Gate {
  PwaSystem sys;
  ConsensusProblem prob10;
  ConsensusProblem prob40;
  FixedStages fs10;
  OperatorData op100;
  VectorXd th11;

  // optimality certificates accumulated by criteria 2-4 for criterion 8
  struct Cert {
    const ConsensusProblem* prob = nullptr;
    const FixedStages* fs = nullptr;
    VectorXd z;
    VectorXd lambda;
    double weight = 0.0;   // proximal weight the multiplier was formed with
    double eps_tol = 0.0;  // termination tolerance of the producing solve
  };
  std::deque<FixedStages> fs_store;  // stable addresses for per-step stages
  std::vector<Cert> certs;

  Gate() {
    sys = load_pwa_json(EX51_JSON_PATH);
    prob10 = build_consensus(sys, 10);
    prob40 = build_consensus(sys, 40);
    th11 = VectorXd::Ones(prob10.p);
    fs10 = instantiate_stages(prob10, th11);
    op100 = build_operator(prob10, 100.0);
  }

  // ---- criterion 2 artifact ----
  struct Crit2 {
    SolveResult r;
    double ms = 0.0;
  };
  std::optional<Crit2> c2;
  const Crit2& ensure_c2() {
    if (!c2) {
      SolverConfig cfg;
      cfg.gamma = 0.5;
      cfg.eps_tol = 1e-8;
      cfg.max_iter = 50000;
      Timer t;
      Crit2 out;
      out.r = solve(prob10, fs10, op100, cfg);
      out.ms = t.ms();
      if (converged(out.r.status))
        certs.push_back({&prob10, &fs10, out.r.z, out.r.lambda, 100.0, 1e-8});
      c2 = std::move(out);
    }
    return *c2;
  }

  // ---- criterion 3 artifact ----
  struct Crit3 {
    int runs = 0;
    int conv = 0;
    int kkt_ok = 0;
    int clustered = 0;
    double ms = 0.0;
  };
  std::optional<Crit3> c3;
  const Crit3& ensure_c3() {
    if (!c3) {
      Crit3 out;
      out.runs = 1000;
      const Eigen::Index n = prob10.n;
      const double st_tol = kKktTol * (1.0 + prob10.h.norm());
      std::mt19937_64 gen(1);
      Timer t;
      for (int i = 0; i < out.runs; ++i) {
        VectorXd z0(n), l0(n);
        for (Eigen::Index j = 0; j < n; ++j) z0(j) = uniform(gen, -1.0, 1.0);
        for (Eigen::Index j = 0; j < n; ++j) l0(j) = uniform(gen, -10.0, 10.0);
        SolverConfig cfg;
        cfg.gamma = 0.5;
        cfg.eps_tol = 1e-8;
        cfg.max_iter = 50000;
        cfg.s0 = z0 - l0 / 100.0;
        SolveResult r = solve(prob10, fs10, op100, cfg);
        if (!converged(r.status)) continue;
        ++out.conv;
        KktResidual kkt = verify_proximal_kkt(prob10, fs10, r.z, r.lambda, 100.0);
        if (kkt.stationarity <= st_tol && kkt.projection <= kKktTol) ++out.kkt_ok;
        if (in_cluster_union(r.objective, kClusterPad)) ++out.clustered;
        certs.push_back({&prob10, &fs10, r.z, r.lambda, 100.0, 1e-8});
      }
      out.ms = t.ms();
      c3 = std::move(out);
    }
    return *c3;
  }

  // ---- criterion 4 artifact ----
  struct Crit4 {
    Trajectory fp;
    Trajectory oracle;
    double rel_gap = 0.0;
    bool fp_all_converged = false;
    double ms = 0.0;
  };
  std::optional<Crit4> c4;
  const Crit4& ensure_c4() {
    if (!c4) {
      Crit4 out;
      Timer t;
      ClosedLoopConfig cfp;
      cfp.steps = 10;
      cfp.xi = 10.0;
      cfp.solver.gamma = 0.5;
      cfp.solver.eps_tol = 1e-3;
      cfp.solver.max_iter = 50000;
      out.fp = closed_loop(sys, prob40, Controller::FixedPoint, th11, cfp);

      ClosedLoopConfig cor;
      cor.steps = 10;
      cor.oracle_cap = 1000000;
      out.oracle = closed_loop(sys, prob10, Controller::Oracle, th11, cor);
      out.ms = t.ms();

      out.fp_all_converged = out.fp.completed;
      for (SolveStatus s : out.fp.status)
        out.fp_all_converged = out.fp_all_converged && converged(s);

      double num = 0.0, den = 0.0;
      const std::size_t steps = std::min(out.fp.x.size(), out.oracle.x.size());
      for (std::size_t k = 0; k < steps; ++k) {
        num += (out.fp.x[k] - out.oracle.x[k]).squaredNorm();
        den += out.oracle.x[k].squaredNorm();
      }
      out.rel_gap = den > 0 ? std::sqrt(num / den) : 0.0;

      // re-derive each step's certificate pair by replaying the planner
      OperatorData op10 = build_operator(prob40, 10.0);
      for (std::size_t k = 0; k < out.fp.u.size(); ++k) {
        fs_store.push_back(instantiate_stages(prob40, out.fp.x[k]));
        SolverConfig cfg = cfp.solver;
        SolveResult r = solve(prob40, fs_store.back(), op10, cfg);
        if (converged(r.status))
          certs.push_back({&prob40, &fs_store.back(), r.z, r.lambda, 10.0, 1e-3});
      }
      c4 = std::move(out);
    }
    return *c4;
  }

  // ---- convex instance family shared by criteria 6 and 10 ----
  struct ConvexCase {
    bool fp_agrees = false;
    bool admm_agrees = false;
    bool trivial_consistent = false;
    bool trivial_fired = false;
  };
  std::optional<std::vector<ConvexCase>> convex;
  const std::vector<ConvexCase>& ensure_convex() {
    if (!convex) {
      std::vector<ConvexCase> out;
      std::mt19937_64 gen(6);
      for (int t = 0; t < 50; ++t) {
        const Eigen::Index n = 4 + static_cast<Eigen::Index>(gen() % 5);
        const int nstages = 1 + t % 2;
        const double box = t % 2 == 0 ? 8.0 : 0.35;

        ConsensusProblem prob;
        prob.n = n;
        prob.p = 0;
        prob.H = random_spd(gen, n);
        prob.h = VectorXd::Zero(n);
        for (Eigen::Index j = 0; j < n; ++j) prob.h(j) = uniform(gen, -1.0, 1.0);
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(t % 2);
        prob.A = random_matrix(gen, m, n);
        VectorXd z0(n);
        for (Eigen::Index j = 0; j < n; ++j) z0(j) = uniform(gen, -0.2, 0.2);
        prob.b = prob.A * z0;

        Eigen::Index used = 0;
        for (int s = 0; s < nstages; ++s) {
          const Eigen::Index nk = s + 1 == nstages ? n - used : n / 2;
          used += nk;
          StageSet st;
          st.nk = nk;
          MatrixXd F(2 * nk, nk);
          F << MatrixXd::Identity(nk, nk), -MatrixXd::Identity(nk, nk);
          st.components.push_back(plain_component(MatrixXd::Zero(0, nk), VectorXd::Zero(0), F,
                                                  VectorXd::Constant(2 * nk, box)));
          prob.stages.push_back(std::move(st));
        }
        validate(prob);
        FixedStages fs = instantiate_stages(prob, VectorXd(0));

        OperatorData op = build_operator(prob, 1.2 * prob.h_eig_max);
        SolverConfig scfg;
        scfg.gamma = 0.5;
        scfg.eps_tol = 1e-8;
        scfg.max_iter = 50000;
        SolveResult fp = solve(prob, fs, op, scfg);
        AdmmConfig acfg;
        acfg.rho = 10.0;
        acfg.eps_tol = 1e-8;
        acfg.max_iter = 20000;
        SolveResult ad = solve_admm(prob, fs, acfg);
        OracleResult oc = global_solve(prob, fs);

        ConvexCase cc;
        cc.fp_agrees = oc.feasible && converged(fp.status) &&
                       (fp.y - oc.z).lpNorm<Eigen::Infinity>() <= kMethodAgreeTol;
        cc.admm_agrees = oc.feasible && converged(ad.status) &&
                         (ad.y - oc.z).lpNorm<Eigen::Infinity>() <= kMethodAgreeTol;
        const VectorXd zt = trivial_solution(prob);
        const bool member = contains_Z(prob, fs, zt, 1e-7);
        cc.trivial_fired = fp.status == SolveStatus::TrivialGlobal;
        cc.trivial_consistent = member == cc.trivial_fired;
        out.push_back(cc);
      }
      convex = std::move(out);
    }
    return *convex;
  }

  // ---- criteria ----
  bool crit1(std::string& note) {
    Timer t;
    OracleResult r = global_solve(prob10, fs10, 1000000);
    const double ms = t.ms();
    const bool ok =
        r.feasible && std::abs(r.objective - kOptimum) <= kOptimumTol && ms <= 10000.0;
    note = "objective=" + fmt("%.6f", r.objective) + " qps=" + std::to_string(r.solved) +
           " runtime=" + fmt("%.0f", ms) + "ms";
    return ok;
  }

  bool crit2(std::string& note) {
    const Crit2& r = ensure_c2();
    const bool ok = converged(r.r.status) && r.r.objective >= kCluster[0][0] &&
                    r.r.objective <= kCluster[0][1] && r.ms <= 1000.0;
    note = std::string("status=") + to_string(r.r.status) +
           " objective=" + fmt("%.6f", r.r.objective) +
           " iterations=" + std::to_string(r.r.iterations) + " runtime=" + fmt("%.0f", r.ms) +
           "ms";
    return ok;
  }

  bool crit3(std::string& note) {
    const Crit3& s = ensure_c3();
    const double rate = static_cast<double>(s.conv) / s.runs;
    const double cluster_frac = s.conv > 0 ? static_cast<double>(s.clustered) / s.conv : 0.0;
    const bool ok = rate >= 0.95 && s.kkt_ok == s.conv && cluster_frac >= 0.99 &&
                    s.ms <= 600000.0;
    note = "rate=" + fmt("%.3f", rate) + " kkt=" + std::to_string(s.kkt_ok) + "/" +
           std::to_string(s.conv) + " clustered=" + fmt("%.4f", cluster_frac) +
           " runtime=" + fmt("%.0f", s.ms / 1000.0) + "s";
    return ok;
  }

  bool crit4(std::string& note) {
    const Crit4& s = ensure_c4();
    const bool ok = s.fp_all_converged && s.oracle.completed && s.rel_gap <= kTrajGapMax &&
                    s.ms <= 120000.0;
    note = "state_gap=" + fmt("%.4f", s.rel_gap) + " steps=" + std::to_string(s.fp.u.size()) +
           " runtime=" + fmt("%.0f", s.ms) + "ms";
    return ok;
  }

  bool crit5(std::string& note) {
    std::mt19937_64 gen(5);
    double worst = 0.0;
    int points = 0;
    for (int t = 0; t < 500; ++t) {
      const int nstages = 1 + t % 3;
      ConsensusProblem prob;
      prob.p = 0;
      for (int s = 0; s < nstages; ++s) {
        StageSet st;
        st.nk = 1 + static_cast<Eigen::Index>(gen() % 4);
        const int mcomp = 1 + static_cast<int>(gen() % 3);
        for (int c = 0; c < mcomp; ++c) {
          VectorXd p0(st.nk);
          for (Eigen::Index j = 0; j < st.nk; ++j) p0(j) = uniform(gen, -1.0, 1.0);
          const Eigen::Index q = 1 + static_cast<Eigen::Index>(gen() % 3);
          MatrixXd F = random_matrix(gen, q, st.nk);
          for (Eigen::Index r = 0; r < q; ++r) F.row(r).normalize();
          VectorXd f = F * p0;
          for (Eigen::Index r = 0; r < q; ++r) f(r) += uniform(gen, 0.1, 1.0);
          MatrixXd G(0, st.nk);
          VectorXd g(0);
          if (c % 3 == 2 && st.nk > 1) {
            G = random_matrix(gen, 1, st.nk);
            g = G * p0;
          }
          st.components.push_back(plain_component(G, g, F, f));
        }
        prob.n += st.nk;
        prob.stages.push_back(std::move(st));
      }
      prob.H = MatrixXd::Identity(prob.n, prob.n);
      prob.h = VectorXd::Zero(prob.n);
      prob.A = MatrixXd::Zero(0, prob.n);
      prob.b = VectorXd::Zero(0);
      validate(prob);
      FixedStages fs = instantiate_stages(prob, VectorXd(0));

      for (int pt = 0; pt < 5; ++pt) {
        VectorXd s(prob.n);
        for (Eigen::Index j = 0; j < prob.n; ++j) s(j) = uniform(gen, -2.0, 2.0);
        ProjectZResult staged = project_Z(prob, fs, s);
        if (!staged.ok) return false;

        // exhaustive reference: every component combination, summed
        // squared distances, first strict improvement wins
        std::vector<std::vector<Projection>> per(prob.stages.size());
        for (std::size_t k = 0; k < prob.stages.size(); ++k) {
          const VectorXd sk = s.segment(prob.offsets[k], prob.stages[k].nk);
          for (const FixedPolyhedron& P : fs.comps[k]) per[k].push_back(project_onto(P, sk));
        }
        std::vector<std::size_t> pick(prob.stages.size(), 0);
        double best = -1.0;
        VectorXd best_y(prob.n);
        while (true) {
          double d2 = 0.0;
          VectorXd y(prob.n);
          bool usable = true;
          for (std::size_t k = 0; k < pick.size() && usable; ++k) {
            const Projection& pr = per[k][pick[k]];
            usable = pr.status == ProjStatus::Ok;
            if (!usable) break;
            d2 += pr.dist * pr.dist;
            y.segment(prob.offsets[k], prob.stages[k].nk) = pr.y;
          }
          if (usable && (best < 0.0 || d2 < best)) {
            best = d2;
            best_y = y;
          }
          std::size_t k = 0;
          for (; k < pick.size(); ++k) {
            if (++pick[k] < per[k].size()) break;
            pick[k] = 0;
          }
          if (k == pick.size()) break;
        }
        worst = std::max(worst, (staged.y - best_y).lpNorm<Eigen::Infinity>());
        ++points;
      }
    }
    note = "points=" + std::to_string(points) + " worst_gap=" + fmt("%.2e", worst);
    return worst <= kProjEquivTol;
  }

  bool crit6(std::string& note) {
    const auto& cases = ensure_convex();
    int fired = 0;
    bool ok = true;
    for (const ConvexCase& cc : cases) {
      ok = ok && cc.fp_agrees && cc.admm_agrees && cc.trivial_consistent;
      fired += cc.trivial_fired ? 1 : 0;
    }
    note = "instances=" + std::to_string(cases.size()) +
           " trivial_fired=" + std::to_string(fired);
    return ok && fired > 0 && fired < static_cast<int>(cases.size());
  }

  bool crit7(std::string& note) {
    std::mt19937_64 gen(7);
    double worst_neg = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Eigen::Index n = 5 + static_cast<Eigen::Index>(gen() % 8);
      const Eigen::Index m = 1 + static_cast<Eigen::Index>(gen() % (n - 3));
      ConsensusProblem prob;
      prob.n = n;
      prob.p = 0;
      prob.H = random_spd(gen, n);
      prob.h = VectorXd::Zero(n);
      prob.A = random_matrix(gen, m, n);
      VectorXd z0(n);
      for (Eigen::Index j = 0; j < n; ++j) z0(j) = uniform(gen, -1.0, 1.0);
      prob.b = prob.A * z0;
      StageSet st;
      st.nk = n;
      MatrixXd F(2 * n, n);
      F << MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n);
      st.components.push_back(plain_component(MatrixXd::Zero(0, n), VectorXd::Zero(0), F,
                                              VectorXd::Constant(2 * n, 1e3)));
      prob.stages.push_back(std::move(st));
      validate(prob);

      OperatorData probe = build_operator(prob, 1.2 * prob.h_eig_max);
      const double min_adm = probe.min_admissible;
      const double xi = (1.05 + 0.6 * uniform(gen, 0.0, 1.0)) * min_adm;
      OperatorData op = build_operator(prob, xi);

      Eigen::SelfAdjointEigenSolver<MatrixXd> es(op.M);
      const VectorXd ev = es.eigenvalues();
      worst_neg = std::min(worst_neg, ev.minCoeff());
      if (ev.minCoeff() < -1e-9) return false;
      Eigen::Index positive = 0;
      double min_pos = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j)
        if (ev(j) > 0.5) {
          ++positive;
          min_pos = std::min(min_pos, ev(j));
        }
      if (positive != n - m || !(min_pos > 1.0)) return false;

      Eigen::SelfAdjointEigenSolver<MatrixXd> ew(op.W);
      if (ew.eigenvalues().cwiseAbs().minCoeff() <= 1e-12) return false;

      bool rejected = false;
      try {
        build_operator(prob, 0.99 * min_adm);
      } catch (const XiTooSmall&) {
        rejected = true;
      }
      if (!rejected) return false;
    }
    note = "instances=100 min_eigenvalue=" + fmt("%.1e", worst_neg);
    return true;
  }

  bool crit8(std::string& note) {
    ensure_c2();
    ensure_c3();
    ensure_c4();
    double worst_st = 0.0, worst_pr = 0.0;
    bool ok = !certs.empty();
    for (const Cert& c : certs) {
      KktResidual kkt = verify_proximal_kkt(*c.prob, *c.fs, c.z, c.lambda, c.weight);
      const double st_rel = kkt.stationarity / (1.0 + c.prob->h.norm());
      const double pr_rel = kkt.projection / (10.0 * c.eps_tol);
      worst_st = std::max(worst_st, st_rel);
      worst_pr = std::max(worst_pr, pr_rel);
      ok = ok && st_rel <= kKktTol && pr_rel <= 1.0;
    }
    note = "certificates=" + std::to_string(certs.size()) +
           " worst_stationarity=" + fmt("%.1e", worst_st) +
           " worst_projection_frac=" + fmt("%.2f", worst_pr);
    return ok;
  }

  bool crit9(std::string& note) {
    Timer t;
    A3Report ex = check_a3(prob10);
    const bool ex_ok = ex.satisfied;

    std::vector<StageSet> tp{two_plane_stage()};
    A3Report rep = check_a3(tp);
    bool tp_ok = !rep.satisfied && !rep.violations.empty();
    bool endpoint_seen = false;
    for (const A3Violation& v : rep.violations) {
      const VectorXd zt = v.z + 1e-3 * v.w;
      for (const Polyhedron& comp : tp[0].components) {
        FixedPolyhedron P = instantiate(comp, v.theta);
        tp_ok = tp_ok && !contains(P, zt, 1e-7);
      }
      if (v.structure.comps == std::vector<int>{0, 1} &&
          v.structure.rows == std::vector<std::vector<int>>{{0}, {0}}) {
        endpoint_seen = true;
        tp_ok = tp_ok && std::abs(v.w(0)) <= 1e-8;  // orthogonal to the wall ray
      }
    }
    tp_ok = tp_ok && endpoint_seen;
    const double ms = t.ms();

    note = std::string("two_region_verdict=") + (ex.satisfied ? "satisfied" : "violated") +
           " (" + std::to_string(ex.violations.size()) +
           " verified crossing witnesses; expected satisfied)" +
           " two_plane_verdict=" + (rep.satisfied ? "satisfied" : "violated") +
           " runtime=" + fmt("%.0f", ms) + "ms";
    return ex_ok && tp_ok && ms <= 30000.0;
  }

  bool crit10(std::string& note) {
    AdmmConfig cfg;
    cfg.rho = 10.0;
    cfg.eps_tol = 1e-3;
    cfg.max_iter = 10000;
    SolveResult r = solve_admm(prob10, fs10, cfg);
    bool ok = converged(r.status) && r.iterations <= 10000 &&
              in_cluster_union(r.objective, 0.0);
    const auto& cases = ensure_convex();
    int agree = 0;
    for (const ConvexCase& cc : cases) agree += cc.admm_agrees ? 1 : 0;
    ok = ok && agree == static_cast<int>(cases.size());
    note = std::string("status=") + to_string(r.status) +
           " iterations=" + std::to_string(r.iterations) +
           " objective=" + fmt("%.6f", r.objective) + " convex_agree=" + std::to_string(agree) +
           "/" + std::to_string(cases.size());
    return ok;
  }
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  struct Item {
    int id;
    const char* label;
    bool (Gate::*fn)(std::string&);
  };
  const std::vector<Item> items{
      {1, "exhaustive global optimum on the bundled two-region problem", &Gate::crit1},
      {2, "fixed-point solve lands in the optimal cluster", &Gate::crit2},
      {3, "multistart convergence, certificates, and cluster statistics", &Gate::crit3},
      {4, "closed-loop tracking against the exhaustive controller", &Gate::crit4},
      {5, "staged projection equals exhaustive-combination projection", &Gate::crit5},
      {6, "convex agreement of fixed-point, admm, and oracle", &Gate::crit6},
      {7, "operator spectral certificates and admissibility rejection", &Gate::crit7},
      {8, "optimality certificates for every converged solve", &Gate::crit8},
      {9, "union-geometry regularity verdicts", &Gate::crit9},
      {10, "admm baseline quality on the bundled problem", &Gate::crit10},
  };

  Gate gate;
  int failed = 0;
  for (const Item& it : items) {
    if (only != 0 && it.id != only) continue;
    bool ok = false;
    std::string note;
    try {
      ok = (gate.*it.fn)(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %2d %s%s%s\n", ok ? "PASS" : "FAIL", it.id, it.label,
                note.empty() ? "" : " | ", note.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  return failed;
}
