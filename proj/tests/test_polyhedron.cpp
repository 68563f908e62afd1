#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <polysplit/errors.hpp>
#include <polysplit/polyhedron.hpp>
#include <polysplit/qp.hpp>

#include "test_util.hpp"

using namespace polysplit;
using testutil::enumerate_qp;
using testutil::random_matrix;

namespace {

FixedPolyhedron unit_box(int n) {
  MatrixXd F(2 * n, n);
  F << MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n);
  return fix_polyhedron(MatrixXd::Zero(0, n), VectorXd::Zero(0), F, VectorXd::Ones(2 * n));
}

// Membership in the generator cone {G'nu + Fa'mu, mu >= 0}, decided by an
// independent feasibility solve.
bool in_generator_cone(const MatrixXd& G, const MatrixXd& Fa, const VectorXd& v) {
  const Eigen::Index p = G.rows();
  const Eigen::Index q = Fa.rows();
  const Eigen::Index n = v.size();
  MatrixXd Geq(n, p + q);
  if (p > 0) Geq.leftCols(p) = G.transpose();
  if (q > 0) Geq.rightCols(q) = Fa.transpose();
  MatrixXd F = MatrixXd::Zero(q, p + q);
  F.rightCols(q) = -MatrixXd::Identity(q, q);
  QpResult r = solve_convex_qp(MatrixXd::Identity(p + q, p + q), VectorXd::Zero(p + q), Geq, v,
                               F, VectorXd::Zero(q));
  return r.status == QpStatus::Optimal;
}

}  // namespace

TEST_CASE("instantiate applies the affine parameter maps") {
  Polyhedron poly;
  poly.G = MatrixXd::Zero(1, 2);
  poly.G << 1.0, -1.0;
  poly.Gtheta = MatrixXd::Zero(1, 1);
  poly.Gtheta << 2.0;
  poly.g0 = VectorXd::Zero(1);
  poly.F = MatrixXd::Identity(2, 2);
  poly.Ftheta = MatrixXd::Zero(2, 1);
  poly.Ftheta << 1.0, 0.0;
  poly.f0 = VectorXd::Ones(2);
  VectorXd theta(1);
  theta << 3.0;
  FixedPolyhedron fp = instantiate(poly, theta);
  CHECK(fp.g(0) == doctest::Approx(6.0));
  CHECK(fp.f(0) == doctest::Approx(4.0));
  CHECK(fp.f(1) == doctest::Approx(1.0));
  CHECK_FALSE(fp.empty);
}

TEST_CASE("projection onto the unit box clamps") {
  FixedPolyhedron box = unit_box(3);
  VectorXd s(3);
  s << 2.0, 0.25, -7.0;
  Projection pr = project_onto(box, s);
  REQUIRE(pr.status == ProjStatus::Ok);
  CHECK(pr.y(0) == doctest::Approx(1.0));
  CHECK(pr.y(1) == doctest::Approx(0.25));
  CHECK(pr.y(2) == doctest::Approx(-1.0));
  CHECK(pr.dist == doctest::Approx(std::sqrt(1.0 + 36.0)));
}

TEST_CASE("empty instance reports Empty instead of throwing") {
  // 0 <= f row with negative f: unsatisfiable for every z
  MatrixXd F = MatrixXd::Zero(1, 2);
  VectorXd f(1);
  f << -1.0;
  FixedPolyhedron fp = fix_polyhedron(MatrixXd::Zero(0, 2), VectorXd::Zero(0), F, f);
  CHECK(fp.empty);
  Projection pr = project_onto(fp, VectorXd::Zero(2));
  CHECK(pr.status == ProjStatus::Empty);

  // contradictory halfspaces
  MatrixXd F2(2, 1);
  F2 << 1.0, -1.0;
  VectorXd f2(2);
  f2 << -1.0, -1.0;
  FixedPolyhedron fp2 = fix_polyhedron(MatrixXd::Zero(0, 1), VectorXd::Zero(0), F2, f2);
  CHECK(fp2.empty);
}

TEST_CASE("contains honors its tolerance") {
  FixedPolyhedron box = unit_box(2);
  VectorXd z(2);
  z << 1.0 + 5e-8, 0.0;
  CHECK(contains(box, z));            // inside the default 1e-7 band
  z(0) = 1.0 + 5e-7;
  CHECK_FALSE(contains(box, z));
  CHECK(contains(box, z, 1e-6));
}

TEST_CASE("projection matches the enumeration oracle on random polyhedra") {
  std::mt19937_64 gen(31);
  int nonempty = 0, empty_count = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + trial % 3;
    const int me = trial % 2;
    const int mi = 1 + trial % 3;
    MatrixXd G = me > 0 ? random_matrix(gen, me, n) : MatrixXd::Zero(0, n);
    VectorXd g = me > 0 ? VectorXd(random_matrix(gen, me, 1)) : VectorXd::Zero(0);
    MatrixXd F = random_matrix(gen, mi, n);
    VectorXd f = random_matrix(gen, mi, 1);
    if (trial % 6 == 5) {
      // plant a contradiction so Empty cases get exercised too
      F.conservativeResize(mi + 2, n);
      f.conservativeResize(mi + 2);
      F.row(mi).setZero();
      F.row(mi + 1).setZero();
      F(mi, 0) = 1.0;
      F(mi + 1, 0) = -1.0;
      f(mi) = -1.0;
      f(mi + 1) = -1.0;
    }
    FixedPolyhedron fp = fix_polyhedron(G, g, F, f);

    VectorXd s = random_matrix(gen, n, 1) * 2.0;
    testutil::EnumQp oracle = enumerate_qp(MatrixXd::Identity(n, n), -s, G, g, F, f);
    Projection pr = project_onto(fp, s);
    if (!oracle.feasible) {
      ++empty_count;
      CHECK(fp.empty);
      CHECK(pr.status == ProjStatus::Empty);
      continue;
    }
    ++nonempty;
    REQUIRE(pr.status == ProjStatus::Ok);
    CHECK((pr.y - oracle.z).lpNorm<Eigen::Infinity>() < 1e-7);
    CHECK(pr.dist == doctest::Approx((s - oracle.z).norm()).epsilon(1e-7));
  }
  CHECK(nonempty > 30);
  CHECK(empty_count > 0);
}

TEST_CASE("projections are idempotent and firmly nonexpansive") {
  std::mt19937_64 gen(57);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3;
    MatrixXd F = random_matrix(gen, 3, n);
    VectorXd f = random_matrix(gen, 3, 1).cwiseAbs();  // contains the origin
    FixedPolyhedron fp = fix_polyhedron(MatrixXd::Zero(0, n), VectorXd::Zero(0), F, f);
    REQUIRE_FALSE(fp.empty);

    VectorXd a = random_matrix(gen, n, 1) * 3.0;
    VectorXd b = random_matrix(gen, n, 1) * 3.0;
    Projection pa = project_onto(fp, a);
    Projection pb = project_onto(fp, b);
    Projection paa = project_onto(fp, pa.y);
    CHECK((paa.y - pa.y).lpNorm<Eigen::Infinity>() < 1e-9);
    const double lhs = (pa.y - pb.y).squaredNorm();
    const double rhs = (a - b).dot(pa.y - pb.y);
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("cone H-representation of a quadrant slice, frozen") {
  // {G'nu + Fa'mu} with G = [0 0 1], Fa = [1 0 0]:
  // all (mu, 0, nu) with mu >= 0, i.e. v1 >= 0, v2 = 0.
  MatrixXd G(1, 3);
  G << 0.0, 0.0, 1.0;
  MatrixXd Fa(1, 3);
  Fa << 1.0, 0.0, 0.0;
  MatrixXd D = fm_project_cone(G, Fa);

  VectorXd in1(3), in2(3), out1(3), out2(3);
  in1 << 1.0, 0.0, 5.0;
  in2 << 0.0, 0.0, -2.0;
  out1 << -1.0, 0.0, 0.0;
  out2 << 0.0, 1.0, 0.0;
  CHECK((D * in1).maxCoeff() <= 1e-9);
  CHECK((D * in2).maxCoeff() <= 1e-9);
  CHECK((D * out1).maxCoeff() > 1e-6);
  CHECK((D * out2).maxCoeff() > 1e-6);
}

TEST_CASE("cone H-representation of a single halfspace normal") {
  // Fa = [1 0]: the ray {(mu, 0) : mu >= 0}
  MatrixXd Fa(1, 2);
  Fa << 1.0, 0.0;
  MatrixXd D = fm_project_cone(MatrixXd::Zero(0, 2), Fa);
  VectorXd ray(2), off(2), neg(2);
  ray << 2.0, 0.0;
  off << 0.0, 0.5;
  neg << -1.0, 0.0;
  CHECK((D * ray).maxCoeff() <= 1e-9);
  CHECK((D * off).maxCoeff() > 1e-6);
  CHECK((D * neg).maxCoeff() > 1e-6);
}

TEST_CASE("cone H-representation agrees with a membership oracle") {
  std::mt19937_64 gen(93);
  int checked = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + trial % 3;
    const int p = trial % 2;
    const int q = 1 + trial % 3;
    MatrixXd G = p > 0 ? random_matrix(gen, p, n) : MatrixXd::Zero(0, n);
    MatrixXd Fa = random_matrix(gen, q, n);
    MatrixXd D = fm_project_cone(G, Fa);

    // Points made from the generators must satisfy every row.
    for (int k = 0; k < 5; ++k) {
      VectorXd nu = p > 0 ? VectorXd(random_matrix(gen, p, 1)) : VectorXd::Zero(0);
      VectorXd mu = random_matrix(gen, q, 1).cwiseAbs();
      VectorXd v = Fa.transpose() * mu;
      if (p > 0) v += G.transpose() * nu;
      if (D.rows() > 0 && v.norm() > 1e-9)
        CHECK((D * v).maxCoeff() <= 1e-7 * std::max(1.0, v.norm()));
    }
    // Random probes: the H-rep verdict must match the feasibility oracle
    // away from the boundary band.
    for (int k = 0; k < 6; ++k) {
      VectorXd v = random_matrix(gen, n, 1);
      const double margin = D.rows() > 0 ? (D * v).maxCoeff() : 0.0;
      if (std::abs(margin) < 1e-6) continue;
      ++checked;
      CHECK(in_generator_cone(G, Fa, v) == (margin <= 0.0));
    }
  }
  CHECK(checked > 40);
}

TEST_CASE("elimination cap raises BlowUp") {
  std::mt19937_64 gen(5);
  MatrixXd Fa = random_matrix(gen, 6, 4);
  CHECK_THROWS_AS(fm_project_cone(MatrixXd::Zero(0, 4), Fa, 2), BlowUp);
}
