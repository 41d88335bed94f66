#pragma once

#include "hypoflow/hypocoercivity.hpp"

namespace hypoflow {

// Even, nonnegative Gaussian mollifier, normalized so grid quadrature is 1.
struct Mollifier {
  double sigma = 0.3;
  Vec samples;        // at nodes
  double norm_const;  // 1/Z with Z the grid quadrature of the raw Gaussian

  static Mollifier gaussian(double sigma, const Discretization& disc);

  double eval(double d) const { return norm_const * std::exp(-d * d / (2.0 * sigma * sigma)); }
  // (zeta * g)(x_i) by direct quadrature; symmetric and mass-preserving for
  // grid functions supported away from the boundary
  Vec convolve(const Vec& g, const Discretization& disc) const;
};

// Dirichlet Green operator of -d^2/dx^2 on [-xmax, xmax], applied by quadrature.
// The trapezoid sum of the piecewise-linear kernel inverts the 3-point Laplacian
// exactly at interior nodes.
Vec green_apply(const Vec& f, const Discretization& disc);

struct EmdenSolution {
  Vec v_inf;
  double residual = 0;
  int iterations = 0;
  double kappa = 0;
  double theta = 0;
};

// Damped fixed point for -V_inf'' = kappa zeta * rho(V_inf),
// rho(V) = e^{-(V_pot+V)} / integral. Residual is the sup-norm defect of the
// Green form V = G[kappa zeta * rho(V)].
EmdenSolution solve_emden(const Potential& pot, const Mollifier& mol, const Discretization& disc,
                          double kappa, double tol = 1e-10, double theta = 0.5, int max_iters = 1000);

struct Equilibrium {
  OperatorSet ops_inf;
  PotentialTable table;
  // flat equilibrium M_inf^{1/2} is ops_inf.ground
};

Equilibrium equilibrium(const Potential& pot, const EmdenSolution& sol, const Discretization& disc);

double gap_inf(const OperatorSet& ops_inf);

}  // namespace hypoflow
