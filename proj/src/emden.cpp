#include "hypoflow/emden.hpp"

#include <algorithm>
#include <cmath>

namespace hypoflow {

Mollifier Mollifier::gaussian(double sigma, const Discretization& disc) {
  if (!(sigma > 0)) throw std::invalid_argument("mollifier sigma must be > 0");
  Mollifier m;
  m.sigma = sigma;
  const Vec x = disc.nodes();
  Vec raw(disc.nx);
  for (int i = 0; i < disc.nx; ++i) raw[i] = std::exp(-x[i] * x[i] / (2.0 * sigma * sigma));
  const double Z = disc.h() * raw.sum();
  m.norm_const = 1.0 / Z;
  m.samples = raw * m.norm_const;
  return m;
}

Vec Mollifier::convolve(const Vec& g, const Discretization& disc) const {
  const Vec x = disc.nodes();
  const double h = disc.h();
  Vec out = Vec::Zero(disc.nx);
  for (int i = 0; i < disc.nx; ++i) {
    double s = 0.0;
    for (int j = 0; j < disc.nx; ++j) s += eval(x[i] - x[j]) * g[j];
    out[i] = h * s;
  }
  return out;
}

Vec green_apply(const Vec& f, const Discretization& disc) {
  const Vec x = disc.nodes();
  const double h = disc.h(), L = disc.xmax;
  Vec out = Vec::Zero(disc.nx);
  for (int i = 0; i < disc.nx; ++i) {
    double s = 0.0;
    for (int j = 0; j < disc.nx; ++j) {
      const double mx = std::max(x[i], x[j]), mn = std::min(x[i], x[j]);
      s += (L - mx) * (mn + L) / (2.0 * L) * f[j];
    }
    out[i] = h * s;
  }
  return out;
}

namespace {

Vec density_of(const Vec& Vtot, double h) {
  Vec rho = (-Vtot.array()).exp();
  rho /= h * rho.sum();
  return rho;
}

}  // namespace

EmdenSolution solve_emden(const Potential& pot, const Mollifier& mol, const Discretization& disc,
                          double kappa, double tol, double theta, int max_iters) {
  if (!(theta > 0) || theta > 1.0) throw std::invalid_argument("emden theta must lie in (0,1]");
  if (!(tol > 0)) throw std::invalid_argument("emden tol must be > 0");

  EmdenSolution sol;
  sol.kappa = kappa;
  sol.theta = theta;
  sol.v_inf = Vec::Zero(disc.nx);
  if (kappa == 0.0) return sol;  // zero charge

  const Vec x = disc.nodes();
  const double h = disc.h();
  Vec Vext(disc.nx);
  for (int i = 0; i < disc.nx; ++i) Vext[i] = pot.value(x[i]);

  auto green_form = [&](const Vec& v) {
    return Vec(green_apply(kappa * mol.convolve(density_of(Vec(Vext + v), h), disc), disc));
  };

  for (int it = 1; it <= max_iters; ++it) {
    const Vec target = green_form(sol.v_inf);
    sol.v_inf = (1.0 - theta) * sol.v_inf + theta * target;
    sol.residual = (sol.v_inf - green_form(sol.v_inf)).cwiseAbs().maxCoeff();
    sol.iterations = it;
    if (sol.residual <= tol) return sol;
  }
  throw std::runtime_error("solve_emden: no convergence after " + std::to_string(max_iters) +
                           " iterations, residual " + std::to_string(sol.residual));
}

Equilibrium equilibrium(const Potential& pot, const EmdenSolution& sol, const Discretization& disc) {
  Equilibrium eq;
  eq.table = PotentialTable::from_correction(pot, sol.v_inf, disc);
  eq.ops_inf = assemble(disc, eq.table);
  return eq;
}

double gap_inf(const OperatorSet& ops_inf) { return spectral_gap(ops_inf).alpha; }

}  // namespace hypoflow
