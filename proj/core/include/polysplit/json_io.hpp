#pragma once

#include <string>

#include "polysplit/mpc.hpp"
#include "polysplit/problem.hpp"

namespace polysplit {

// File formats.
//
// Problem JSON: { n, p, H, h, A, b, stages: [ { nk, components: [
//   { G, g0, Gtheta, F, f0, Ftheta } ] } ] }
// Matrices are nested arrays in row-major order; [] means zero rows, and an
// omitted parameter block means no parameter dependence.
//
// Piecewise-affine system JSON: { n_x, n_u, N, regions, Q, R, alpha,
//   x_ref?, u_ref? } where regions is either one list of region objects
// (time-invariant, reused at every step) or a list of N such lists.  A
// region object is { A, B, c, Cf: {F, f}, Cg?: {G, g} } with Cf/Cg over the
// stacked (x, u) variables.  Q, R, alpha may be single values (shared) or
// per-step lists.

enum class InputKind { Problem, PwaSystem };

InputKind detect_input_kind(const std::string& text);

ConsensusProblem parse_problem_json(const std::string& text);
ConsensusProblem load_problem_json(const std::string& path);
std::string problem_to_json(const ConsensusProblem& prob, int indent = 2);

PwaSystem parse_pwa_json(const std::string& text);
PwaSystem load_pwa_json(const std::string& path);
std::string pwa_to_json(const PwaSystem& sys, int indent = 2);

}  // namespace polysplit
