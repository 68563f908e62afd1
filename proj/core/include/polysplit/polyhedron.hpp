#pragma once

#include "polysplit/linalg.hpp"

namespace polysplit {

// Parameter-dependent polyhedron
//   { z : G z = Gtheta th + g0,  F z <= Ftheta th + f0 }
// with affine dependence on the parameter th.  Any of the blocks may have
// zero rows.
struct Polyhedron {
  MatrixXd G;
  MatrixXd Gtheta;
  VectorXd g0;
  MatrixXd F;
  MatrixXd Ftheta;
  VectorXd f0;

  Eigen::Index dim() const { return G.rows() > 0 ? G.cols() : F.cols(); }
};

// Instance at a fixed parameter, carrying a precomputed reduction used by
// the projection hot path: the equality manifold {N t + zp} with N
// orthonormal, the inequalities restricted to it (unit-norm rows), and a
// feasible anchor in reduced coordinates.  Immutable after construction, so
// concurrent projections are safe.
struct FixedPolyhedron {
  MatrixXd G;
  VectorXd g;
  MatrixXd F;
  VectorXd f;

  bool empty = false;
  MatrixXd N;
  VectorXd zp;
  MatrixXd Fr;
  VectorXd fr;
  VectorXd anchor;
};

FixedPolyhedron fix_polyhedron(MatrixXd G, VectorXd g, MatrixXd F, VectorXd f);

FixedPolyhedron instantiate(const Polyhedron& poly, const VectorXd& theta);

enum class ProjStatus { Ok, Empty };

struct Projection {
  ProjStatus status = ProjStatus::Ok;
  VectorXd y;
  double dist = 0.0;
};

// Euclidean projection of s; Empty is a first-class outcome, not an error.
Projection project_onto(const FixedPolyhedron& P, const VectorXd& s);

// Membership at tolerance: |G z - g|_inf <= tol and max(F z - f) <= tol.
bool contains(const FixedPolyhedron& P, const VectorXd& z, double tol = 1e-7);

// H-representation {v : D v <= 0} of the generator cone
//   { G' nu + Fa' mu : nu free, mu >= 0 },  G is p x n, Fa is q x n,
// by Fourier-Motzkin elimination of (nu, mu) with redundancy removal after
// each elimination step.  Throws BlowUp if the working row count exceeds
// row_cap.  Equality rows surviving the elimination are emitted as
// opposing inequality pairs.
MatrixXd fm_project_cone(const MatrixXd& G, const MatrixXd& Fa, int row_cap = 20000);

}  // namespace polysplit
