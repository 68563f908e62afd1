#include "polysplit/mpc.hpp"

#include "polysplit/errors.hpp"

namespace polysplit {

namespace {

template <class T>
const T& at_step(const std::vector<T>& v, int k, const char* what) {
  if (v.size() == 1) return v[0];
  if (k >= 1 && static_cast<size_t>(k) <= v.size()) return v[static_cast<size_t>(k - 1)];
  throw DimensionMismatch(std::string("build_consensus: bad per-step list for ") + what);
}

void check_region(const PwaSystem& sys, const PwaRegion& r) {
  if (r.A.rows() != sys.n_x || r.A.cols() != sys.n_x || r.B.rows() != sys.n_x ||
      r.B.cols() != sys.n_u || r.c.size() != sys.n_x)
    throw DimensionMismatch("build_consensus: region dynamics shape");
  const Eigen::Index nxu = sys.n_x + sys.n_u;
  if ((r.C.F.rows() > 0 && r.C.F.cols() != nxu) || (r.C.G.rows() > 0 && r.C.G.cols() != nxu))
    throw DimensionMismatch("build_consensus: region validity set must be over (x, u)");
  if (r.C.empty) throw DimensionMismatch("build_consensus: region validity set is empty");
}

}  // namespace

const std::vector<PwaRegion>& regions_at_step(const PwaSystem& sys, int k) {
  return at_step(sys.regions, k, "regions");
}

ConsensusProblem build_consensus(const PwaSystem& sys, int horizon) {
  const int N = horizon > 0 ? horizon : sys.N;
  if (N < 1) throw DimensionMismatch("build_consensus: horizon must be at least 1");
  if (sys.n_x < 1 || sys.n_u < 1) throw DimensionMismatch("build_consensus: state or input empty");
  if (sys.regions.empty() || (sys.regions.size() != 1 && sys.regions.size() != static_cast<size_t>(N)))
    throw DimensionMismatch("build_consensus: regions must be one shared list or one per step");

  const Eigen::Index nx = sys.n_x;
  const Eigen::Index nu = sys.n_u;
  const Eigen::Index n = N * nu + 2 * N * nx;
  const Eigen::Index m = N * nx;

  ConsensusProblem prob;
  prob.n = n;
  prob.p = nx;
  prob.built_from_pwa = true;
  prob.H = MatrixXd::Zero(n, n);
  prob.h = VectorXd::Zero(n);
  prob.A = MatrixXd::Zero(m, n);
  prob.b = VectorXd::Zero(m);

  // Stage offsets: stage 1 is (u1, w1); stages 2..N are (x_k, u_k, w_k);
  // the trailing stage holds x_{N+1} alone.
  std::vector<Eigen::Index> off(static_cast<size_t>(N) + 2);
  off[1] = 0;
  for (int k = 2; k <= N; ++k)
    off[static_cast<size_t>(k)] = off[static_cast<size_t>(k - 1)] + (k == 2 ? nu + nx : nx + nu + nx);
  off[static_cast<size_t>(N) + 1] = off[static_cast<size_t>(N)] + (N == 1 ? nu + nx : nx + nu + nx);

  auto u_off = [&](int k) { return off[static_cast<size_t>(k)] + (k == 1 ? 0 : nx); };
  auto w_off = [&](int k) { return u_off(k) + nu; };
  auto x_off = [&](int k) {  // valid for k = 2..N+1
    return off[static_cast<size_t>(k)];
  };

  // Cost blocks. The alpha-split weights enter H directly, so the solver
  // objective 0.5 z'Hz + h'z scores the stage sum at half scale; every
  // objective value this library reports for MPC builds uses that scale.
  for (int k = 1; k <= N; ++k) {
    const MatrixXd& Qk = at_step(sys.Q, k, "Q");
    const MatrixXd& Rk = at_step(sys.R, k, "R");
    const double a = at_step(sys.alpha, k, "alpha");
    if (Qk.rows() != nx || Qk.cols() != nx || Rk.rows() != nu || Rk.cols() != nu)
      throw DimensionMismatch("build_consensus: Q or R shape");
    if (!(a > 0.0 && a < 1.0))
      throw DimensionMismatch("build_consensus: alpha must lie strictly inside (0, 1)");
    prob.H.block(u_off(k), u_off(k), nu, nu) = Rk;
    prob.H.block(w_off(k), w_off(k), nx, nx) = (1.0 - a) * Qk;
    prob.H.block(x_off(k + 1), x_off(k + 1), nx, nx) = a * Qk;
  }

  // Coupling rows x_{k+1} = w_k.
  for (int k = 1; k <= N; ++k) {
    prob.A.block((k - 1) * nx, x_off(k + 1), nx, nx) = MatrixXd::Identity(nx, nx);
    prob.A.block((k - 1) * nx, w_off(k), nx, nx) = -MatrixXd::Identity(nx, nx);
  }

  // Stage sets.
  prob.stages.resize(static_cast<size_t>(N) + 1);
  for (int k = 1; k <= N; ++k) {
    StageSet& st = prob.stages[static_cast<size_t>(k - 1)];
    st.nk = k == 1 ? nu + nx : nx + nu + nx;
    const std::vector<PwaRegion>& regs = regions_at_step(sys, k);
    if (regs.empty()) throw DimensionMismatch("build_consensus: empty region list");
    for (const PwaRegion& r : regs) {
      check_region(sys, r);
      Polyhedron c;
      const Eigen::Index meq = nx + r.C.G.rows();
      const Eigen::Index mineq = r.C.F.rows();
      c.G = MatrixXd::Zero(meq, st.nk);
      c.g0 = VectorXd::Zero(meq);
      c.F = MatrixXd::Zero(mineq, st.nk);
      c.f0 = r.C.f;
      if (k == 1) {
        // w1 - B u1 = A th + c;  validity rows split into u and th parts
        c.G.block(0, 0, nx, nu) = -r.B;
        c.G.block(0, nu, nx, nx) = MatrixXd::Identity(nx, nx);
        c.g0.head(nx) = r.c;
        c.Gtheta = MatrixXd::Zero(meq, nx);
        c.Gtheta.topRows(nx) = r.A;
        if (r.C.G.rows() > 0) {
          c.G.block(nx, 0, r.C.G.rows(), nu) = r.C.G.rightCols(nu);
          c.g0.tail(r.C.G.rows()) = r.C.g;
          c.Gtheta.bottomRows(r.C.G.rows()) = -r.C.G.leftCols(nx);
        }
        if (mineq > 0) {
          c.F.leftCols(nu) = r.C.F.rightCols(nu);
          c.Ftheta = -r.C.F.leftCols(nx);
        } else {
          c.Ftheta = MatrixXd::Zero(0, nx);
        }
      } else {
        // w_k - A x_k - B u_k = c;  validity rows act on (x_k, u_k)
        c.G.block(0, 0, nx, nx) = -r.A;
        c.G.block(0, nx, nx, nu) = -r.B;
        c.G.block(0, nx + nu, nx, nx) = MatrixXd::Identity(nx, nx);
        c.g0.head(nx) = r.c;
        c.Gtheta = MatrixXd::Zero(0, nx);
        if (r.C.G.rows() > 0) {
          c.G.block(nx, 0, r.C.G.rows(), nx + nu) = r.C.G;
          c.g0.tail(r.C.G.rows()) = r.C.g;
        }
        if (mineq > 0) c.F.leftCols(nx + nu) = r.C.F;
        c.Ftheta = MatrixXd::Zero(0, nx);
      }
      st.components.push_back(std::move(c));
    }
  }
  StageSet& last = prob.stages[static_cast<size_t>(N)];
  last.nk = nx;
  Polyhedron free_comp;
  free_comp.G = MatrixXd::Zero(0, nx);
  free_comp.g0 = VectorXd::Zero(0);
  free_comp.Gtheta = MatrixXd::Zero(0, nx);
  free_comp.F = MatrixXd::Zero(0, nx);
  free_comp.f0 = VectorXd::Zero(0);
  free_comp.Ftheta = MatrixXd::Zero(0, nx);
  last.components.push_back(std::move(free_comp));

  validate(prob);
  prob.built_from_pwa = true;
  prob.h = update_reference(prob, sys, sys.x_ref, sys.u_ref);
  return prob;
}

VectorXd update_reference(const ConsensusProblem& prob, const PwaSystem& sys,
                          const std::vector<VectorXd>& x_ref,
                          const std::vector<VectorXd>& u_ref) {
  const Eigen::Index nx = sys.n_x;
  const Eigen::Index nu = sys.n_u;
  if (!prob.validated) throw DimensionMismatch("update_reference: problem not validated");
  const int N = static_cast<int>(prob.n / (nu + 2 * nx));
  if (static_cast<Eigen::Index>(N) * (nu + 2 * nx) != prob.n)
    throw DimensionMismatch("update_reference: problem does not match the system layout");
  if (!x_ref.empty() && x_ref.size() != static_cast<size_t>(N))
    throw DimensionMismatch("update_reference: x_ref must have one entry per step");
  if (!u_ref.empty() && u_ref.size() != static_cast<size_t>(N))
    throw DimensionMismatch("update_reference: u_ref must have one entry per step");

  VectorXd h = VectorXd::Zero(prob.n);
  for (int k = 1; k <= N; ++k) {
    const Eigen::Index uo = prob.offsets[static_cast<size_t>(k - 1)] + (k == 1 ? 0 : nx);
    const Eigen::Index wo = uo + nu;
    const Eigen::Index xo = prob.offsets[static_cast<size_t>(k)];
    const MatrixXd& Qk = at_step(sys.Q, k, "Q");
    const MatrixXd& Rk = at_step(sys.R, k, "R");
    const double a = at_step(sys.alpha, k, "alpha");
    if (!u_ref.empty()) {
      const VectorXd& ur = u_ref[static_cast<size_t>(k - 1)];
      if (ur.size() != nu) throw DimensionMismatch("update_reference: u_ref entry size");
      h.segment(uo, nu) = -Rk * ur;
    }
    if (!x_ref.empty()) {
      const VectorXd& xr = x_ref[static_cast<size_t>(k - 1)];
      if (xr.size() != nx) throw DimensionMismatch("update_reference: x_ref entry size");
      h.segment(wo, nx) = -(1.0 - a) * Qk * xr;
      h.segment(xo, nx) = -a * Qk * xr;
    }
  }
  return h;
}

}  // namespace polysplit
