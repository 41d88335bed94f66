#pragma once

#include "hypoflow/linalg.hpp"
#include "hypoflow/potential.hpp"
#include "hypoflow/types.hpp"

namespace hypoflow {

// Discrete phase-space operators in the flat (Maxwellian-conjugated) frame.
//
// Velocity: exact Hermite ladders, b psi_m = sqrt(gamma m) psi_{m-1}, with the
// raising output at the top mode dropped. Position: antisymmetric central
// differences under homogeneous Dirichlet truncation, adjoints as transposes.
// Index convention: coefficient (ix, m) lives at ix*nv + m.
struct OperatorSet {
  Discretization disc;
  PotentialTable pot;

  SpMat ax;       // nx x nx, gamma^{1/2}(D_x + V'/2)
  SpMat dx;       // nx x nx, central difference (antisymmetric)
  SpMat bv;       // nv x nv lowering ladder
  SpMat a, a_star, b, b_star;  // full-space
  SpMat x0;       // Hamiltonian transport field, exactly antisymmetric
  SpMat k;        // K = X0 + I (x) b*b
  SpMat k_star;   // transpose of k
  SpMat lambda2;  // Witten Laplacian a*a (x) I + I (x) b*b

  Vec ground;     // sampled flat Maxwellian e^{-V/2} (x) psi_0, flat-norm 1

  int dim() const { return disc.dim(); }
  double mass(const Vec& u) const { return flat_dot(disc, ground, u); }
};

inline constexpr long kMaxOperatorDim = 1 << 22;

OperatorSet assemble(const Discretization& disc, const PotentialTable& pot);
OperatorSet assemble(const Discretization& disc, const Potential& pot);

struct CommutatorReport {
  double exact_residual_rel;   // ||([b,X0]-a) P_low|| relative to ||a||, modes below the top
  double approx_residual;      // r(h) = smooth-probe norm of [a,X0] + V'' b
  double approx_residual_half; // r(h/2)
  double refinement_ratio;     // r(h)/r(h/2)
};

// Exact ladder/difference identity below the Hermite truncation mode plus the
// O(h^2) commutator [a,X0] + V'' b measured on a fixed family of smooth probe
// fields (operator norms do not converge under refinement; smooth probes do).
CommutatorReport check_commutators(const OperatorSet& ops, const Potential& pot);

// ||([b,X0]-a) restricted below the top Hermite mode|| / ||a||, max-entry norm.
double exact_commutator_residual(const OperatorSet& ops);

void dump_operators(const OperatorSet& ops, const std::string& path_prefix);

}  // namespace hypoflow
