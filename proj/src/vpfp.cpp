#include "hypoflow/vpfp.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace hypoflow {

InteractionKernel InteractionKernel::from_mollifier(const Mollifier& mol, const Discretization& disc) {
  InteractionKernel k;
  k.sigma = mol.sigma;
  const Vec x = disc.nodes();
  k.phi_grid.resize(disc.nx);
  k.norm_inf = 0.0;
  for (int i = 0; i < disc.nx; ++i) {
    k.phi_grid[i] = k.phi(x[i]);
    k.norm_inf = std::max(k.norm_inf, std::abs(k.phi_grid[i]));
  }
  return k;
}

Vec field_from_density(const Vec& rho, const InteractionKernel& kernel, double kappa,
                       const Discretization& disc) {
  const Vec x = disc.nodes();
  const double h = disc.h();
  Vec E = Vec::Zero(disc.nx);
  if (kappa == 0.0) return E;
  for (int i = 0; i < disc.nx; ++i) {
    double s = 0.0;
    for (int j = 0; j < disc.nx; ++j) s += kernel.phi(x[i] - x[j]) * rho[j];
    E[i] = kappa * h * s;
  }
  return E;
}

Vec density_from_state(const OperatorSet& ops, const Vec& u) {
  // integral of psi_0 psi_m over v is delta_{0m}: only the Hermite-0 row survives
  Vec rho(ops.disc.nx);
  for (int i = 0; i < ops.disc.nx; ++i)
    rho[i] = ops.ground[ops.disc.index(i, 0)] * u[ops.disc.index(i, 0)];
  return rho;
}

StrangStepper::StrangStepper(const OperatorSet& ops, double dt)
    : ops_(&ops), dt_(dt), half_cn_(ops.k, dt / 2.0) {}

void StrangStepper::half(Vec& u) const { half_cn_.step(u); }

void StrangStepper::field(Vec& u, const Vec& E) const {
  // exact exponential of the nilpotent raising term -dt gamma^{-1/2} E(x) b*
  const int nx = ops_->disc.nx, nv = ops_->disc.nv;
  const double g = ops_->disc.gamma;
  const double sg = std::sqrt(g);
  for (int i = 0; i < nx; ++i) {
    const double c = -dt_ * E[i] / sg;
    if (c == 0.0) continue;
    double* blk = u.data() + static_cast<ptrdiff_t>(i) * nv;
    // term_k = (c b*)^k u / k!, accumulated until it vanishes
    static thread_local std::vector<double> term;
    term.assign(blk, blk + nv);
    for (int k = 1; k < nv; ++k) {
      for (int m = nv - 1; m >= 1; --m) term[m] = c * std::sqrt(g * m) * term[m - 1] / k;
      term[0] = 0.0;
      double mag = 0.0;
      for (int m = 0; m < nv; ++m) {
        blk[m] += term[m];
        mag = std::max(mag, std::abs(term[m]));
      }
      if (mag < 1e-300 || mag < 1e-17 * std::abs(c)) break;
    }
  }
}

void StrangStepper::step(Vec& u, const Vec& E) const {
  half(u);
  field(u, E);
  half(u);
}

std::vector<Vec> linear_mild_solve(const OperatorSet& ops, const std::vector<Vec>& E_steps,
                                   const Vec& u0, double dt) {
  bool zero_field = true;
  for (const Vec& e : E_steps)
    if (e.size() && e.cwiseAbs().maxCoeff() != 0.0) {
      zero_field = false;
      break;
    }
  std::vector<Vec> traj;
  traj.reserve(E_steps.size());
  if (zero_field) {
    // zero field: the field map is the identity, adjacent half-steps merge into
    // the plain Crank-Nicolson path used by `evolve`
    CrankNicolson cn(ops.k, dt);
    Vec u = u0;
    for (size_t k = 0; k < E_steps.size(); ++k) {
      cn.step(u);
      traj.push_back(u);
    }
    return traj;
  }
  StrangStepper st(ops, dt);
  Vec u = u0;
  for (const Vec& E : E_steps) {
    st.step(u, E);
    traj.push_back(u);
  }
  return traj;
}

namespace {

void gh_nodes_logweights(int n, Vec& z, Vec& logw) {
  Mat J = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k - 1, k) = J(k, k - 1) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  z = es.eigenvalues();
  logw.resize(n);
  const double logsqrtpi = 0.5 * std::log(M_PI);
  for (int q = 0; q < n; ++q)
    logw[q] = logsqrtpi + 2.0 * std::log(std::abs(es.eigenvectors()(0, q)) + 1e-300);
}

// orthonormal Hermite functions psi_m(v), rows = nodes, cols = modes
Mat hermite_functions(const Vec& v, int nv) {
  Mat psi(v.size(), nv);
  const double c0 = std::pow(2.0 * M_PI, -0.25);
  for (int q = 0; q < v.size(); ++q) {
    psi(q, 0) = c0 * std::exp(-v[q] * v[q] / 4.0);
    if (nv > 1) psi(q, 1) = v[q] * psi(q, 0);
    for (int m = 2; m < nv; ++m)
      psi(q, m) = (v[q] * psi(q, m - 1) - std::sqrt(m - 1.0) * psi(q, m - 2)) / std::sqrt(double(m));
  }
  return psi;
}

}  // namespace

EntropyResult entropy(const OperatorSet& ops_inf, const Vec& u, int gh_nodes) {
  Vec z, logw;
  gh_nodes_logweights(gh_nodes, z, logw);
  Vec v = std::sqrt(2.0) * z;
  Vec W(gh_nodes);
  for (int q = 0; q < gh_nodes; ++q) W[q] = std::sqrt(2.0) * std::exp(logw[q] + z[q] * z[q]);
  const Mat psi = hermite_functions(v, ops_inf.disc.nv);

  const int nx = ops_inf.disc.nx, nv = ops_inf.disc.nv;
  const double h = ops_inf.disc.h();
  EntropyResult res;
  for (int i = 0; i < nx; ++i) {
    const double wi = ops_inf.ground[ops_inf.disc.index(i, 0)];
    if (wi == 0.0) continue;
    for (int q = 0; q < gh_nodes; ++q) {
      double uval = 0.0;
      for (int m = 0; m < nv; ++m) uval += u[ops_inf.disc.index(i, m)] * psi(q, m);
      const double mhalf = wi * psi(q, 0);
      const double f = mhalf * uval;
      const double minf = mhalf * mhalf;
      if (f > 0.0 && minf > 0.0) {
        res.H += h * W[q] * f * std::log(f / minf);
      } else if (f < 0.0) {
        res.clamped_mass += h * W[q] * (-f);
      }
    }
  }
  res.reliable = res.clamped_mass <= 1e-3;
  return res;
}

namespace {

struct RunObserver {
  const OperatorSet* ops;
  const HypoReport* rep;
  VpfpRun* run;
  double g0 = 0, f0n = 0;
  int gh = 48;

  void init(const Vec& u0) {
    run->rate = rep->alpha / (2.0 * rep->a_const);
    run->alpha_inf = rep->alpha;
    run->a_inf = rep->a_const;
    g0 = flat_norm(ops->disc, Vec(u0 - ops->ground));
    f0n = flat_norm(ops->disc, u0);
    run->g0_norm = g0;
    run->f0_norm = f0n;
    run->psi0 = g0;
    run->sup_psi = 0;
  }

  void observe(double t, const Vec& u) {
    const double dec = flat_norm(ops->disc, Vec(u - ops->ground));
    const double env = 6.0 * g0 * std::exp(-run->rate * t);
    const double ps = std::exp(run->rate * t) * dec;
    const EntropyResult ent = entropy(*ops, u, gh);
    const double eenv = 42.0 * f0n * g0 * std::exp(-run->rate * t);
    run->times.push_back(t);
    run->decay.push_back(dec);
    run->envelope.push_back(env);
    run->psi.push_back(ps);
    run->sup_psi = std::max(run->sup_psi, ps);
    run->entropy_curve.push_back(ent.H);
    run->entropy_env.push_back(eenv);
    run->mass.push_back(ops->mass(u));
    run->clamped.push_back(ent.clamped_mass);
    if (t > 0 && dec > env * (1 + 1e-9) + 1e-14) run->envelope_ok = false;
    if (ent.H > eenv * (1 + 1e-9) + ent.clamped_mass + 1e-12) run->entropy_env_ok = false;
  }
};

}  // namespace

VpfpRun time_march(const OperatorSet& ops_inf, const InteractionKernel& kernel, double kappa,
                   const Vec& u0, double T, const HypoReport& rep_inf, const VpfpOptions& opts) {
  VpfpRun run;
  run.kappa = kappa;
  RunObserver obs{&ops_inf, &rep_inf, &run};
  obs.gh = opts.gh_nodes;
  obs.init(u0);

  const int nsteps = std::max(1, static_cast<int>(std::ceil(T / opts.dt - 1e-12)));
  const double dt = T / nsteps;
  const int stride = std::max(1, nsteps / opts.outputs);
  StrangStepper st(ops_inf, dt);
  const Vec rho_inf = density_from_state(ops_inf, ops_inf.ground);
  const double u0n = u0.norm();

  Vec u = u0;
  obs.observe(0.0, u);
  for (int k = 1; k <= nsteps; ++k) {
    st.half(u);
    const Vec rho = density_from_state(ops_inf, u);
    const Vec E = field_from_density(Vec(rho - rho_inf), kernel, kappa, ops_inf.disc);
    st.field(u, E);
    st.half(u);
    if (u.norm() > opts.blowup_factor * u0n) throw std::runtime_error("time_march: blow-up guard hit");
    if (k % stride == 0 || k == nsteps) obs.observe(k * dt, u);
  }
  run.final_state = u;
  return run;
}

VpfpRun picard_solve(const OperatorSet& ops_inf, const InteractionKernel& kernel, double kappa,
                     const Vec& u0, double T, const HypoReport& rep_inf, const VpfpOptions& opts,
                     double window) {
  VpfpRun run;
  run.kappa = kappa;
  RunObserver obs{&ops_inf, &rep_inf, &run};
  obs.gh = opts.gh_nodes;
  obs.init(u0);

  const Vec rho_inf = density_from_state(ops_inf, ops_inf.disc.nx ? ops_inf.ground : u0);
  const double dt = opts.dt;
  double w = std::max(dt, window);
  const int total_windows_cap = static_cast<int>(std::ceil(T / dt)) + 1;
  const int obs_stride = std::max(1, static_cast<int>(std::ceil((T / w) / opts.outputs)));

  Vec u = u0;
  double t = 0.0;
  obs.observe(0.0, u);
  int window_index = 0;
  while (t < T - 1e-12) {
    const double span = std::min(w, T - t);
    const int ks = std::max(1, static_cast<int>(std::round(span / dt)));
    const double dts = span / ks;
    StrangStepper st(ops_inf, dts);

    // iterate frozen-field mild solves on [t, t+span)
    const Vec rho0 = density_from_state(ops_inf, u);
    std::vector<Vec> E_tab(ks, field_from_density(Vec(rho0 - rho_inf), kernel, kappa, ops_inf.disc));
    std::vector<Vec> prev_traj;
    bool converged = false;
    double prev_diff = -1.0;
    for (int it = 0; it < opts.max_picard; ++it) {
      std::vector<Vec> traj;
      traj.reserve(ks);
      std::vector<Vec> E_new;
      E_new.reserve(ks);
      Vec v = u;
      for (int k = 0; k < ks; ++k) {
        st.half(v);
        const Vec rho_mid = density_from_state(ops_inf, v);
        E_new.push_back(field_from_density(Vec(rho_mid - rho_inf), kernel, kappa, ops_inf.disc));
        st.field(v, E_tab[k]);
        st.half(v);
        traj.push_back(v);
      }
      double e_diff = 0.0;
      for (int k = 0; k < ks; ++k) e_diff = std::max(e_diff, (E_new[k] - E_tab[k]).cwiseAbs().maxCoeff());
      double s_diff = 0.0;
      if (!prev_traj.empty())
        for (int k = 0; k < ks; ++k)
          s_diff = std::max(s_diff, flat_norm(ops_inf.disc, Vec(traj[k] - prev_traj[k])));
      if (!prev_traj.empty() && prev_diff > 0 && s_diff > 0)
        run.picard_ratios.push_back(s_diff / prev_diff);
      if ((!prev_traj.empty() && s_diff <= opts.picard_tol) || e_diff == 0.0) {
        prev_traj = std::move(traj);
        converged = true;
        break;
      }
      prev_diff = prev_traj.empty() ? -1.0 : s_diff;
      prev_traj = std::move(traj);
      E_tab = std::move(E_new);
    }
    if (!converged) {
      if (w <= dt * (1 + 1e-9)) throw std::runtime_error("picard_solve: no contraction at minimum window");
      w = std::max(dt, w / 2.0);
      continue;
    }
    u = prev_traj.back();
    t += span;
    ++window_index;
    if (window_index % obs_stride == 0 || t >= T - 1e-12) obs.observe(t, u);
    if (window_index > total_windows_cap) throw std::runtime_error("picard_solve: window loop stuck");
  }
  run.final_state = u;
  return run;
}

Threshold smallness_threshold(const HypoReport& rep_inf, const InteractionKernel& kernel,
                              double c2_fit) {
  Threshold th;
  th.alpha_inf = rep_inf.alpha;
  th.a_inf = rep_inf.a_const;
  th.c2 = c2_fit;
  const double r = rep_inf.alpha / (2.0 * rep_inf.a_const);
  th.c_gron = 3.0 * kernel.norm_inf * c2_fit * (1.0 / r + std::sqrt(M_PI / r));
  th.c_inf = rep_inf.alpha * th.c_gron;
  th.kappa_max = rep_inf.alpha / (2.0 * th.c_inf);
  return th;
}

Vec perturbed_initial(const OperatorSet& ops_inf, double eps) {
  const Vec x = ops_inf.disc.nodes();
  Vec p = Vec::Zero(ops_inf.dim());
  for (int i = 0; i < ops_inf.disc.nx; ++i) {
    const double e = std::exp(-x[i] * x[i] / 2.0);
    p[ops_inf.disc.index(i, 0)] = x[i] * e;
    p[ops_inf.disc.index(i, 1)] = 0.5 * e;
  }
  // mass-free: orthogonalize against the equilibrium direction in the flat product
  p -= flat_dot(ops_inf.disc, ops_inf.ground, p) * ops_inf.ground;
  p *= eps / flat_norm(ops_inf.disc, p);
  return Vec(ops_inf.ground + p);
}

}  // namespace hypoflow
