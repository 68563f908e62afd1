#include "polysplit/problem.hpp"

#include <cmath>
#include <limits>

#include "polysplit/errors.hpp"

namespace polysplit {

void validate(ConsensusProblem& prob) {
  const Eigen::Index n = prob.n;
  if (prob.H.rows() != n || prob.H.cols() != n || prob.h.size() != n)
    throw DimensionMismatch("validate: H or h does not match n");
  if (prob.A.rows() != prob.b.size() || (prob.A.rows() > 0 && prob.A.cols() != n))
    throw DimensionMismatch("validate: A or b shape is wrong");

  Eigen::Index sum = 0;
  prob.offsets.assign(1, 0);
  for (const StageSet& st : prob.stages) {
    if (st.nk <= 0) throw DimensionMismatch("validate: non-positive stage dimension");
    if (st.components.empty()) throw DimensionMismatch("validate: stage with no components");
    for (const Polyhedron& c : st.components) {
      if (c.G.rows() != c.g0.size() || c.F.rows() != c.f0.size())
        throw DimensionMismatch("validate: component row mismatch");
      if ((c.G.rows() > 0 && c.G.cols() != st.nk) || (c.F.rows() > 0 && c.F.cols() != st.nk))
        throw DimensionMismatch("validate: component column mismatch with stage dimension");
      if (c.Gtheta.rows() > 0 && (c.Gtheta.rows() != c.G.rows() || c.Gtheta.cols() != prob.p))
        throw DimensionMismatch("validate: Gtheta shape");
      if (c.Ftheta.rows() > 0 && (c.Ftheta.rows() != c.F.rows() || c.Ftheta.cols() != prob.p))
        throw DimensionMismatch("validate: Ftheta shape");
    }
    sum += st.nk;
    prob.offsets.push_back(sum);
  }
  if (sum != n) throw DimensionMismatch("validate: stage dimensions do not sum to n");

  SymEig eh = sym_eigendecomposition(prob.H);
  prob.h_eig_max = eh.lambda(0);
  prob.h_eig_min = eh.lambda(n - 1);
  if (prob.h_eig_min <= 0.0)
    throw NotPositiveDefinite("validate: H must be positive definite");

  AffineParam ap = nullspace_and_particular(prob.A.rows() > 0 ? prob.A : MatrixXd::Zero(0, n),
                                            prob.b);
  prob.V = std::move(ap.V);
  prob.v_bar = std::move(ap.v_bar);
  prob.validated = true;
}

FixedStages instantiate_stages(const ConsensusProblem& prob, const VectorXd& theta) {
  if (theta.size() != prob.p) throw DimensionMismatch("instantiate_stages: theta size");
  FixedStages fs;
  fs.comps.resize(prob.stages.size());
  for (size_t k = 0; k < prob.stages.size(); ++k) {
    fs.comps[k].reserve(prob.stages[k].components.size());
    for (const Polyhedron& c : prob.stages[k].components)
      fs.comps[k].push_back(instantiate(c, theta));
  }
  return fs;
}

ProjectZResult project_Z(const ConsensusProblem& prob, const FixedStages& fs, const VectorXd& s) {
  if (s.size() != prob.n) throw DimensionMismatch("project_Z: s size");
  ProjectZResult out;
  out.y.resize(prob.n);
  out.active.resize(prob.stages.size(), -1);
  for (size_t k = 0; k < prob.stages.size(); ++k) {
    const Eigen::Index off = prob.offsets[k];
    const Eigen::Index nk = prob.stages[k].nk;
    const VectorXd sk = s.segment(off, nk);
    double best = std::numeric_limits<double>::infinity();
    int best_i = -1;
    VectorXd best_y;
    for (size_t i = 0; i < fs.comps[k].size(); ++i) {
      const FixedPolyhedron& c = fs.comps[k][i];
      if (c.empty) continue;
      Projection pr = project_onto(c, sk);
      if (pr.dist < best) {  // strict: ties keep the lowest index
        best = pr.dist;
        best_i = static_cast<int>(i);
        best_y = std::move(pr.y);
      }
    }
    if (best_i < 0) {
      out.ok = false;
      out.infeasible_stage = static_cast<int>(k);
      return out;
    }
    out.y.segment(off, nk) = best_y;
    out.active[k] = best_i;
  }
  return out;
}

ProjectZResult project_Z(const ConsensusProblem& prob, const VectorXd& theta, const VectorXd& s) {
  const FixedStages fs = instantiate_stages(prob, theta);
  return project_Z(prob, fs, s);
}

bool contains_Z(const ConsensusProblem& prob, const FixedStages& fs, const VectorXd& z,
                double tol) {
  if (z.size() != prob.n) throw DimensionMismatch("contains_Z: z size");
  for (size_t k = 0; k < prob.stages.size(); ++k) {
    const VectorXd zk = z.segment(prob.offsets[k], prob.stages[k].nk);
    bool inside = false;
    for (const FixedPolyhedron& c : fs.comps[k]) {
      if (!c.empty && contains(c, zk, tol)) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

bool contains_Z(const ConsensusProblem& prob, const VectorXd& theta, const VectorXd& z,
                double tol) {
  const FixedStages fs = instantiate_stages(prob, theta);
  return contains_Z(prob, fs, z, tol);
}

double objective(const ConsensusProblem& prob, const VectorXd& z) {
  if (z.size() != prob.n) throw DimensionMismatch("objective: z size");
  return 0.5 * z.dot(prob.H * z) + prob.h.dot(z);
}

}  // namespace polysplit
