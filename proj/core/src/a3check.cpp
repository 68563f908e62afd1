#include "polysplit/a3check.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polysplit/errors.hpp"
#include "polysplit/qp.hpp"

namespace polysplit {

namespace {

constexpr double kSupportTol = 1e-7;   // support values below this count as zero
constexpr double kInteriorTol = 1e-6;  // minimum relative-interior slack kept
constexpr long kCoverNodeCap = 200000;

// Growable inequality system a'x <= b with unit-norm rows.  Zero rows are
// dropped; a zero row with negative rhs marks the system infeasible.
struct RowSystem {
  Eigen::Index dim = 0;
  std::vector<VectorXd> a;
  std::vector<double> b;
  bool infeasible_row = false;

  explicit RowSystem(Eigen::Index d) : dim(d) {}

  void add(const VectorXd& row, double rhs) {
    const double nrm = row.norm();
    if (nrm <= 1e-14) {
      if (rhs < -1e-12) infeasible_row = true;
      return;
    }
    a.push_back(row / nrm);
    b.push_back(rhs / nrm);
  }

  Eigen::Index rows() const { return static_cast<Eigen::Index>(a.size()); }
};

void assemble(const RowSystem& sys, double box, MatrixXd& F, VectorXd& f) {
  const Eigen::Index m = sys.rows() + 2 * sys.dim;
  F.setZero(m, sys.dim);
  f.resize(m);
  for (Eigen::Index i = 0; i < sys.rows(); ++i) {
    F.row(i) = sys.a[static_cast<size_t>(i)].transpose();
    f(i) = sys.b[static_cast<size_t>(i)];
  }
  for (Eigen::Index j = 0; j < sys.dim; ++j) {
    F(sys.rows() + 2 * j, j) = 1.0;
    f(sys.rows() + 2 * j) = box;
    F(sys.rows() + 2 * j + 1, j) = -1.0;
    f(sys.rows() + 2 * j + 1) = box;
  }
}

struct Support {
  bool feasible = false;
  double value = 0.0;
  VectorXd x;
};

// max c'x over the system intersected with |x|_inf <= box.  Cone systems
// (all rhs >= 0) start from the origin, anything else runs phase 1 first.
Support support_max(const VectorXd& c, const RowSystem& sys, double box) {
  Support out;
  if (sys.infeasible_row) return out;
  MatrixXd F;
  VectorXd f;
  assemble(sys, box, F, f);
  VectorXd x0 = VectorXd::Zero(sys.dim);
  if (f.size() > 0 && (F * x0 - f).maxCoeff() > 1e-9) {
    if (!detail::feasible_point(F, f, x0)) return out;
  }
  LpResult r = maximize_linear(c, F, f, x0);
  out.feasible = true;
  out.value = r.value;
  out.x = r.x;
  return out;
}

struct Interior {
  bool feasible = false;
  double slack = 0.0;
  VectorXd x;
};

// Chebyshev-style relative-interior point: maximize t subject to
// a'x + t <= b for every slack row, the plain rows verbatim, |x|_inf <= box
// and 0 <= t <= tmax.
Interior max_slack(const RowSystem& slack_rows, const RowSystem& plain_rows, double box,
                   double tmax) {
  Interior out;
  if (slack_rows.infeasible_row || plain_rows.infeasible_row) return out;
  const Eigen::Index d = slack_rows.dim;
  RowSystem lifted(d + 1);
  VectorXd row(d + 1);
  for (Eigen::Index i = 0; i < slack_rows.rows(); ++i) {
    row.head(d) = slack_rows.a[static_cast<size_t>(i)];
    row(d) = 1.0;
    lifted.add(row, slack_rows.b[static_cast<size_t>(i)]);
  }
  for (Eigen::Index i = 0; i < plain_rows.rows(); ++i) {
    row.head(d) = plain_rows.a[static_cast<size_t>(i)];
    row(d) = 0.0;
    lifted.add(row, plain_rows.b[static_cast<size_t>(i)]);
  }
  row.setZero();
  row(d) = -1.0;
  lifted.add(row, 0.0);
  row(d) = 1.0;
  lifted.add(row, tmax);
  VectorXd c = VectorXd::Zero(d + 1);
  c(d) = 1.0;
  Support s = support_max(c, lifted, box);
  if (!s.feasible) return out;
  out.feasible = true;
  out.slack = s.value;
  out.x = s.x.head(d);
  return out;
}

MatrixXd complement_of(const MatrixXd& S, Eigen::Index n) {
  if (S.cols() == 0) return MatrixXd::Identity(n, n);
  if (S.cols() >= n) return MatrixXd(n, 0);
  Eigen::HouseholderQR<MatrixXd> qr(S);
  MatrixXd Q = qr.householderQ();
  return Q.rightCols(n - S.cols());
}

struct SpanPair {
  MatrixXd span;
  MatrixXd comp;
};

// Orthonormal basis of span{v : cone rows <= 0} and of its orthogonal
// complement.  Probes signed complement directions with support LPs and
// grows the basis until no probe escapes the current span.
SpanPair cone_span(const RowSystem& cone) {
  const Eigen::Index n = cone.dim;
  MatrixXd S(n, 0);
  while (S.cols() < n) {
    MatrixXd U = complement_of(S, n);
    bool grew = false;
    for (Eigen::Index j = 0; j < U.cols() && !grew; ++j) {
      for (int sgn : {1, -1}) {
        VectorXd c = static_cast<double>(sgn) * U.col(j);
        Support s = support_max(c, cone, 1.0);
        if (!s.feasible || s.value <= kSupportTol) continue;
        VectorXd w = s.x;
        if (S.cols() > 0) w -= S * (S.transpose() * w);
        const double nrm = w.norm();
        if (nrm > 1e-9) {
          S.conservativeResize(Eigen::NoChange, S.cols() + 1);
          S.col(S.cols() - 1) = w / nrm;
          grew = true;
          break;
        }
      }
    }
    if (!grew) break;
  }
  return {S, complement_of(S, n)};
}

// Covering recursion state for subspace_in_cone_union.
struct Cover {
  std::vector<RowSystem> members;  // cones restricted to span coordinates
  long nodes = 0;

  bool member_contains(int idx, const VectorXd& x) const {
    const RowSystem& m = members[static_cast<size_t>(idx)];
    for (size_t i = 0; i < m.a.size(); ++i)
      if (m.a[i].dot(x) > kSupportTol) return false;
    return true;
  }

  std::optional<VectorXd> run(const RowSystem& P, std::vector<int> rem) {
    if (++nodes > kCoverNodeCap)
      throw CombinatorialCap("subspace_in_cone_union: covering work list exceeded the node budget");
    RowSystem none(P.dim);
    Interior cheb = max_slack(P, none, 1.0, 1.0);
    // Slivers without relative interior cannot host a witness: the uncovered
    // part of the subspace, if any, is open and shows up in a sibling.
    if (!cheb.feasible || cheb.slack < kInteriorTol) return std::nullopt;
    if (rem.empty()) return cheb.x;
    for (int idx : rem) {
      const RowSystem& m = members[static_cast<size_t>(idx)];
      bool inside = true;
      for (size_t i = 0; i < m.a.size() && inside; ++i) {
        Support s = support_max(m.a[i], P, 1.0);
        if (!s.feasible || s.value > kSupportTol) inside = false;
      }
      if (inside) return std::nullopt;  // P sits inside this member
    }
    // Split along a member that meets P with relative interior; fall back to
    // one that touches the Chebyshev point, otherwise that point is clear of
    // every member and witnesses non-coverage.
    int split = -1;
    for (int idx : rem) {
      RowSystem both = P;
      const RowSystem& m = members[static_cast<size_t>(idx)];
      for (size_t i = 0; i < m.a.size(); ++i) both.add(m.a[i], 0.0);
      Interior it = max_slack(both, none, 1.0, 1.0);
      if (it.feasible && it.slack >= kInteriorTol) {
        split = idx;
        break;
      }
    }
    if (split < 0) {
      for (int idx : rem)
        if (member_contains(idx, cheb.x)) {
          split = idx;
          break;
        }
    }
    if (split < 0) return cheb.x;
    std::vector<int> rem2;
    for (int idx : rem)
      if (idx != split) rem2.push_back(idx);
    const RowSystem& m = members[static_cast<size_t>(split)];
    for (size_t t = 0; t < m.a.size(); ++t) {
      RowSystem child = P;
      for (size_t u = 0; u < t; ++u) child.add(m.a[u], 0.0);
      child.add(-m.a[t], 0.0);
      auto wit = run(child, rem2);
      if (wit) return wit;
    }
    return std::nullopt;
  }
};

// H-rep of the cone generated by the rows of G (free sign) and Fa
// (nonnegative sign); the degenerate no-generator case pins the origin.
MatrixXd generated_cone_hrep(const MatrixXd& G, const MatrixXd& Fa, Eigen::Index n, int row_cap) {
  if (G.rows() == 0 && Fa.rows() == 0) {
    MatrixXd D(2 * n, n);
    D.topRows(n) = MatrixXd::Identity(n, n);
    D.bottomRows(n) = -MatrixXd::Identity(n, n);
    return D;
  }
  return fm_project_cone(G, Fa, row_cap);
}

VectorXd theta_row(const MatrixXd& Mtheta, Eigen::Index r, Eigen::Index p) {
  if (Mtheta.rows() > 0) return Mtheta.row(r).transpose();
  return VectorXd::Zero(p);
}

struct Realizer {
  bool feasible = false;
  VectorXd z;
  VectorXd theta;
};

// Feasibility of the active structure as a joint (z, theta) program:
// equality rows pin the structure, inactive rows must clear a common slack,
// extra rows (exclusion cuts) are taken verbatim.  Maximizing the slack
// keeps the realizer away from the inactive faces.
Realizer realize_structure(const StageSet& set, const ActiveStructure& st, Eigen::Index p,
                           const std::vector<std::pair<VectorXd, double>>& extra,
                           const A3Config& cfg) {
  Realizer out;
  const Eigen::Index nk = set.nk;
  const Eigen::Index ny = nk + p;

  std::vector<std::pair<VectorXd, double>> eq;
  std::vector<std::pair<VectorXd, double>> strict;
  for (size_t ii = 0; ii < st.comps.size(); ++ii) {
    const Polyhedron& comp = set.components[static_cast<size_t>(st.comps[ii])];
    for (Eigen::Index q = 0; q < comp.G.rows(); ++q) {
      VectorXd row(ny);
      row.head(nk) = comp.G.row(q).transpose();
      row.tail(p) = -theta_row(comp.Gtheta, q, p);
      eq.emplace_back(row, comp.g0(q));
    }
    std::vector<char> is_active(static_cast<size_t>(comp.F.rows()), 0);
    for (int r : st.rows[ii]) is_active[static_cast<size_t>(r)] = 1;
    for (Eigen::Index r = 0; r < comp.F.rows(); ++r) {
      VectorXd row(ny);
      row.head(nk) = comp.F.row(r).transpose();
      row.tail(p) = -theta_row(comp.Ftheta, r, p);
      if (is_active[static_cast<size_t>(r)])
        eq.emplace_back(row, comp.f0(r));
      else
        strict.emplace_back(row, comp.f0(r));
    }
  }

  MatrixXd N;
  VectorXd yp;
  if (eq.empty()) {
    N = MatrixXd::Identity(ny, ny);
    yp = VectorXd::Zero(ny);
  } else {
    MatrixXd E(static_cast<Eigen::Index>(eq.size()), ny);
    VectorXd e(static_cast<Eigen::Index>(eq.size()));
    for (size_t i = 0; i < eq.size(); ++i) {
      E.row(static_cast<Eigen::Index>(i)) = eq[i].first.transpose();
      e(static_cast<Eigen::Index>(i)) = eq[i].second;
    }
    AffineSolution aff = affine_solution_set(E, e);
    if (!aff.consistent) return out;
    N = aff.N;
    yp = aff.particular;
  }

  const Eigen::Index d = N.cols();
  if (d == 0) {
    for (const auto& [row, rhs] : strict)
      if (row.dot(yp) > rhs - cfg.strict_slack) return out;
    for (const auto& [row, rhs] : extra)
      if (row.dot(yp) > rhs) return out;
    out.feasible = true;
    out.z = yp.head(nk);
    out.theta = yp.tail(p);
    return out;
  }

  RowSystem slack_rows(d);
  RowSystem plain_rows(d);
  for (const auto& [row, rhs] : strict) {
    VectorXd red = N.transpose() * row;
    const double off = rhs - row.dot(yp);
    // a strict row constant on the equality manifold either always clears
    // or makes the structure unrealizable
    if (red.norm() <= 1e-10 * std::max(1.0, row.norm())) {
      if (off < cfg.strict_slack) return out;
      continue;
    }
    slack_rows.add(red, off);
  }
  for (const auto& [row, rhs] : extra) plain_rows.add(N.transpose() * row, rhs - row.dot(yp));
  Interior it = max_slack(slack_rows, plain_rows, cfg.box, 1.0);
  if (!it.feasible || it.slack < cfg.strict_slack) return out;
  VectorXd y = N * it.x + yp;
  out.feasible = true;
  out.z = y.head(nk);
  out.theta = y.tail(p);
  return out;
}

Eigen::Index stage_theta_dim(const StageSet& set) {
  Eigen::Index p = 0;
  bool seen = false;
  for (const Polyhedron& comp : set.components) {
    for (const MatrixXd* M : {&comp.Gtheta, &comp.Ftheta}) {
      if (M->rows() == 0) continue;
      if (seen && M->cols() != p)
        throw DimensionMismatch("check_a3: inconsistent parameter dimension within a stage");
      p = M->cols();
      seen = true;
    }
  }
  return p;
}

// Exclusion cuts forcing (z, theta) a fixed distance outside one component:
// one candidate per inequality row and per signed equality row.
std::vector<std::pair<VectorXd, double>> exclusion_cuts(const Polyhedron& comp, Eigen::Index nk,
                                                        Eigen::Index p, double dist) {
  std::vector<std::pair<VectorXd, double>> cuts;
  const Eigen::Index ny = nk + p;
  for (Eigen::Index r = 0; r < comp.F.rows(); ++r) {
    const double nrm = comp.F.row(r).norm();
    if (nrm <= 1e-14) continue;
    VectorXd row(ny);
    row.head(nk) = -comp.F.row(r).transpose();
    row.tail(p) = theta_row(comp.Ftheta, r, p);
    cuts.emplace_back(row, -comp.f0(r) - dist * nrm);
  }
  for (Eigen::Index q = 0; q < comp.G.rows(); ++q) {
    const double nrm = comp.G.row(q).norm();
    if (nrm <= 1e-14) continue;
    for (int sgn : {1, -1}) {
      VectorXd row(ny);
      row.head(nk) = -sgn * comp.G.row(q).transpose();
      row.tail(p) = sgn * theta_row(comp.Gtheta, q, p);
      cuts.emplace_back(row, -sgn * comp.g0(q) - dist * nrm);
    }
  }
  return cuts;
}

// Mixed-radix walk over per-component states: 0 is untouched, s >= 1 means
// touched with active row bitmask s - 1.
struct StructureIter {
  std::vector<long> radix;
  std::vector<long> state;

  explicit StructureIter(const std::vector<long>& r) : radix(r), state(r.size(), 0) {}

  bool next() {
    for (size_t i = 0; i < state.size(); ++i) {
      if (++state[i] < radix[i]) return true;
      state[i] = 0;
    }
    return false;
  }

  ActiveStructure structure(const StageSet& set) const {
    ActiveStructure st;
    for (size_t i = 0; i < state.size(); ++i) {
      if (state[i] == 0) continue;
      st.comps.push_back(static_cast<int>(i));
      std::vector<int> rows;
      const long mask = state[i] - 1;
      const Eigen::Index mi = set.components[i].F.rows();
      for (Eigen::Index r = 0; r < mi; ++r)
        if (mask & (1L << r)) rows.push_back(static_cast<int>(r));
      st.rows.push_back(std::move(rows));
    }
    return st;
  }
};

void check_stage(int stage_index, const StageSet& set, const A3Config& cfg, A3Report& rep) {
  const Eigen::Index nk = set.nk;
  const int mcomp = static_cast<int>(set.components.size());
  if (mcomp == 0) throw DimensionMismatch("check_a3: stage without components");
  for (const Polyhedron& comp : set.components) {
    if (comp.G.rows() > 0 && comp.G.cols() != nk)
      throw DimensionMismatch("check_a3: equality block width disagrees with the stage dimension");
    if (comp.F.rows() > 0 && comp.F.cols() != nk)
      throw DimensionMismatch("check_a3: inequality block width disagrees with the stage dimension");
  }
  const Eigen::Index p = stage_theta_dim(set);

  std::vector<long> radix;
  double total = 1.0;
  for (const Polyhedron& comp : set.components) {
    const Eigen::Index mi = comp.F.rows();
    if (mi > 40)
      throw CombinatorialCap("check_a3: a component has too many inequality rows to enumerate");
    radix.push_back((1L << mi) + 1);
    total *= static_cast<double>((1L << mi) + 1);
  }
  total -= 1.0;
  if (total > static_cast<double>(cfg.max_structures))
    throw CombinatorialCap("check_a3: stage " + std::to_string(stage_index) + " has " +
                           std::to_string(static_cast<long long>(total)) +
                           " active structures; the budget is " +
                           std::to_string(cfg.max_structures));

  StructureIter it(radix);
  while (it.next()) {
    const ActiveStructure st = it.structure(set);

    std::vector<std::pair<VectorXd, double>> extra;
    Realizer real = realize_structure(set, st, p, extra, cfg);
    if (!real.feasible) continue;

    // H-rep of the common normal cone: stack the per-component generated
    // cones (intersection of H-reps is row concatenation).
    RowSystem ncone(nk);
    std::vector<ConeHRep> recession;
    for (size_t ii = 0; ii < st.comps.size(); ++ii) {
      const Polyhedron& comp = set.components[static_cast<size_t>(st.comps[ii])];
      MatrixXd G(comp.G.rows(), nk);
      if (comp.G.rows() > 0) G = comp.G;
      MatrixXd Fa(static_cast<Eigen::Index>(st.rows[ii].size()), nk);
      for (size_t r = 0; r < st.rows[ii].size(); ++r)
        Fa.row(static_cast<Eigen::Index>(r)) = comp.F.row(st.rows[ii][r]);
      MatrixXd D = generated_cone_hrep(G, Fa, nk, cfg.fm_row_cap);
      for (Eigen::Index r = 0; r < D.rows(); ++r) ncone.add(D.row(r).transpose(), 0.0);
      recession.push_back(ConeHRep{G, Fa});
    }

    MatrixXd Dall(ncone.rows(), nk);
    for (Eigen::Index r = 0; r < ncone.rows(); ++r)
      Dall.row(r) = ncone.a[static_cast<size_t>(r)].transpose();
    if (cone_zero_test(Dall)) continue;

    SpanPair sp = cone_span(ncone);
    if (sp.comp.cols() == 0) continue;

    CoverResult cov = subspace_in_cone_union(sp.comp, recession);
    if (cov.covered) continue;
    VectorXd w = cov.witness / cov.witness.norm();

    // Verify before reporting: the stepped point must leave every component
    // of the stage.  A component outside the structure that captures it gets
    // pushed away by an exclusion cut and the realizer is recomputed; if no
    // cut is feasible the structure only occurs jointly with that component
    // and the superset structure owns the geometry.
    const double dist = 2.0 * cfg.step + 1e-6;
    const size_t max_rounds = 4 * static_cast<size_t>(mcomp) + 4;
    for (size_t round = 0; round < max_rounds; ++round) {
      VectorXd zt = real.z + cfg.step * w;
      int offending = -1;
      for (int j = 0; j < mcomp; ++j) {
        FixedPolyhedron Pj = instantiate(set.components[static_cast<size_t>(j)], real.theta);
        if (contains(Pj, zt, 1e-7)) {
          offending = j;
          break;
        }
      }
      if (offending < 0) {
        A3Violation v;
        v.stage = stage_index;
        v.structure = st;
        v.w = w;
        v.z = real.z;
        v.theta = real.theta;
        rep.violations.push_back(std::move(v));
        break;
      }
      if (std::find(st.comps.begin(), st.comps.end(), offending) != st.comps.end())
        break;  // witness margin below the membership tolerance; drop it
      bool cut_found = false;
      for (const auto& cut :
           exclusion_cuts(set.components[static_cast<size_t>(offending)], nk, p, dist)) {
        extra.push_back(cut);
        Realizer cand = realize_structure(set, st, p, extra, cfg);
        if (cand.feasible) {
          real = cand;
          cut_found = true;
          break;
        }
        extra.pop_back();
      }
      if (!cut_found) break;  // structure never occurs strictly outside it
    }
  }
}

}  // namespace

bool cone_zero_test(const MatrixXd& D) {
  const Eigen::Index n = D.cols();
  if (n == 0) return true;
  if (D.rows() == 0) return false;
  AffineSolution ns = affine_solution_set(D, VectorXd::Zero(D.rows()));
  if (ns.N.cols() > 0) return false;  // lineality direction
  RowSystem cone(n);
  for (Eigen::Index i = 0; i < D.rows(); ++i) cone.add(D.row(i).transpose(), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int sgn : {1, -1}) {
      VectorXd c = VectorXd::Zero(n);
      c(j) = static_cast<double>(sgn);
      Support s = support_max(c, cone, 1.0);
      if (s.feasible && s.value > kSupportTol) return false;
    }
  }
  return true;
}

CoverResult subspace_in_cone_union(const MatrixXd& S, const std::vector<ConeHRep>& cones) {
  CoverResult out;
  const Eigen::Index d = S.cols();
  if (d == 0) return out;
  Cover cover;
  std::vector<int> rem;
  for (size_t i = 0; i < cones.size(); ++i) {
    RowSystem m(d);
    const ConeHRep& c = cones[i];
    if (c.Geq.rows() > 0) {
      MatrixXd R = c.Geq * S;
      for (Eigen::Index r = 0; r < R.rows(); ++r) {
        m.add(R.row(r).transpose(), 0.0);
        m.add(-R.row(r).transpose(), 0.0);
      }
    }
    if (c.F.rows() > 0) {
      MatrixXd R = c.F * S;
      for (Eigen::Index r = 0; r < R.rows(); ++r) m.add(R.row(r).transpose(), 0.0);
    }
    cover.members.push_back(std::move(m));
    rem.push_back(static_cast<int>(i));
  }
  auto wit = cover.run(RowSystem(d), std::move(rem));
  if (wit) {
    out.covered = false;
    out.witness = S * (*wit);
  }
  return out;
}

A3Report check_a3(const std::vector<StageSet>& stages, const A3Config& cfg) {
  A3Report rep;
  for (size_t k = 0; k < stages.size(); ++k)
    check_stage(static_cast<int>(k), stages[k], cfg, rep);
  rep.satisfied = rep.violations.empty();
  return rep;
}

A3Report check_a3(const ConsensusProblem& prob, const A3Config& cfg) {
  return check_a3(prob.stages, cfg);
}

}  // namespace polysplit
