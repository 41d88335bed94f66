#pragma once

#include "hypoflow/emden.hpp"

namespace hypoflow {

// Smoothed interaction kernel phi = -zeta * (sign/2); for a Gaussian zeta this
// is -erf(x / (sqrt(2) sigma)) / 2. Odd, with ||phi||_inf <= 1/2 (Young).
struct InteractionKernel {
  double sigma = 0.3;
  double norm_inf = 0.5;
  Vec phi_grid;

  static InteractionKernel from_mollifier(const Mollifier& mol, const Discretization& disc);
  double phi(double x) const { return -0.5 * std::erf(x / (std::sqrt(2.0) * sigma)); }
};

// E = kappa (phi * rho) by quadrature convolution.
Vec field_from_density(const Vec& rho, const InteractionKernel& kernel, double kappa,
                       const Discretization& disc);

// integral over v of M^{1/2} u at each node: ground weight times Hermite-0 row
Vec density_from_state(const OperatorSet& ops, const Vec& u);

// One Strang step of du/dt = -K u - gamma^{-1/2} E(x) b* u:
// half Crank-Nicolson, exact nilpotent field exponential, half Crank-Nicolson.
class StrangStepper {
 public:
  StrangStepper(const OperatorSet& ops, double dt);
  void step(Vec& u, const Vec& E) const;       // E at nodes, frozen over the step
  void half(Vec& u) const;                     // expose the linear half-step
  void field(Vec& u, const Vec& E) const;      // exp(-dt gamma^{-1/2} diag(E) (x) b*)
  double dt() const { return dt_; }

 private:
  const OperatorSet* ops_;
  double dt_;
  CrankNicolson half_cn_;
};

// Mild solution of the linear problem with a given per-step field table
// (E_steps[k] used for step k). A zero field collapses to the plain
// Crank-Nicolson path of `evolve`, making the reduction exact.
std::vector<Vec> linear_mild_solve(const OperatorSet& ops, const std::vector<Vec>& E_steps,
                                   const Vec& u0, double dt);

struct VpfpOptions {
  double dt = 0.05;
  double picard_tol = 1e-8;
  int max_picard = 50;
  int gh_nodes = 48;
  int outputs = 40;
  double blowup_factor = 10.0;
};

struct EntropyResult {
  double H = 0;
  double clamped_mass = 0;
  bool reliable = true;  // clamped mass <= 1e-3
};

// Relative entropy H(f | M_inf) on the (x, Gauss-Hermite) collocation grid with
// negative-f nodes clamped to zero and the clamped mass reported.
EntropyResult entropy(const OperatorSet& ops_inf, const Vec& u, int gh_nodes = 48);

struct VpfpRun {
  std::vector<double> times;
  std::vector<double> decay, envelope, entropy_curve, entropy_env, psi, mass, clamped;
  double alpha_inf = 0, a_inf = 0, rate = 0, kappa = 0;
  double g0_norm = 0, f0_norm = 0, psi0 = 0, sup_psi = 0;
  bool envelope_ok = true, entropy_env_ok = true;
  std::vector<double> picard_ratios;
  Vec final_state;
};

// Self-consistent field, one Strang step per dt with E recomputed mid-step from
// the difference density rho - rho_inf.
VpfpRun time_march(const OperatorSet& ops_inf, const InteractionKernel& kernel, double kappa,
                   const Vec& u0, double T, const HypoReport& rep_inf, const VpfpOptions& opts);

// Iterated frozen-field mild solves on windows, advancing after the
// sup-in-time difference of successive iterates drops below picard_tol.
VpfpRun picard_solve(const OperatorSet& ops_inf, const InteractionKernel& kernel, double kappa,
                     const Vec& u0, double T, const HypoReport& rep_inf, const VpfpOptions& opts,
                     double window = 0.25);

struct Threshold {
  double kappa_max = 0;
  double c_inf = 0;
  double c_gron = 0;   // 3 ||phi|| C2 (1/r + sqrt(pi/r)), r = alpha/(2A)
  double c2 = 0;       // measured prefactor of ||e^{-tK} b*||
  double alpha_inf = 0, a_inf = 0;
};

// kappa_max = alpha_inf / (2 C_inf) with C_inf assembled from the measured
// decay constants; kappa <= kappa_max keeps the Gronwall factor <= 1/2.
Threshold smallness_threshold(const HypoReport& rep_inf, const InteractionKernel& kernel, double c2_fit);

// deterministic mass-free smooth perturbation of the equilibrium, flat norm eps
Vec perturbed_initial(const OperatorSet& ops_inf, double eps);

}  // namespace hypoflow
