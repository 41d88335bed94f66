#include "hypoflow/runner.hpp"

#include "hypoflow/csv.hpp"
#include "hypoflow/vpfp.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace hypoflow {

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return t;
}

std::vector<double> lin_spaced(double lo, double hi, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = lo + (hi - lo) * i / (n - 1);
  return t;
}

int run_assemble(const Config& cfg, const RunFlags& flags, std::ostream& log) {
  const Potential pot = cfg.potential();
  const OperatorSet ops = assemble(cfg.disc, pot);
  log << "dim=" << ops.dim() << "\n";
  log << "c_v_hess=" << format_number(ops.pot.c_v_hess) << "\n";
  log << "offset=" << format_number(ops.pot.offset_applied) << "\n";
  log << "ground_defect=" << format_number(flat_norm(cfg.disc, Vec(ops.k * ops.ground))) << "\n";
  log << "exact_commutator_residual=" << format_number(exact_commutator_residual(ops)) << "\n";
  if (!flags.dump_operators.empty()) dump_operators(ops, flags.dump_operators);
  return 0;
}

int run_shorttime(const Config& cfg, const RunFlags& flags, std::ostream& log) {
  const OperatorSet ops = assemble(cfg.disc, cfg.potential());
  ScanOptions opts;
  opts.seed = cfg.seed;
  const bool bscan = flags.which == "b";
  // the a-scan window starts above the resolution-induced saturation time
  const std::vector<double> times = bscan ? log_spaced(1e-3, 1e-1, 9) : log_spaced(1e-2, 1e-1, 8);
  const ScanResult res = opnorm_scan(ops, bscan ? Which::BExp : Which::AExp, times, opts);
  CsvWriter csv(flags.out_path, {"t", "value", "fit_slope"});
  for (size_t i = 0; i < res.curve.times.size(); ++i)
    csv.row({res.curve.times[i], res.curve.values[i], res.slope});
  log << "fit_slope=" << format_number(res.slope) << "\n";
  return 0;
}

int run_lyapunov(const Config& cfg, const RunFlags& flags, std::ostream& log) {
  const OperatorSet ops = assemble(cfg.disc, cfg.potential());
  const LyapunovConstants consts = decide_constants(ops);
  Rng rng(cfg.seed);
  Vec u0 = rng.gaussian(ops.dim());
  u0 /= flat_norm(cfg.disc, u0);
  const std::vector<double> times = lin_spaced(0.02, 1.0, 50);
  const LyapunovTrack track = lyapunov_track(ops, u0, consts, times);
  CsvWriter csv(flags.out_path, {"t", "A", "dA"});
  for (size_t i = 0; i < track.curve.times.size(); ++i)
    csv.row({track.curve.times[i], track.curve.values[i], track.dA[i]});
  log << "E=" << format_number(consts.E) << "\nD=" << format_number(consts.D)
      << "\nC=" << format_number(consts.C) << "\n";
  log << "max_increment_rel=" << format_number(track.max_increment_rel) << "\n";
  return track.max_increment_rel <= 1e-8 ? 0 : 1;
}

int run_gap(const Config& cfg, std::ostream& log) {
  const OperatorSet ops = assemble(cfg.disc, cfg.potential());
  const HypoReport rep = hypo_report(ops, cfg.seed);
  log << "alpha=" << format_number(rep.alpha) << "\n";
  log << "delta=" << format_number(rep.delta) << "\n";
  log << "norm_L=" << format_number(rep.norm_L) << "\n";
  log << "norm_Astar=" << format_number(rep.norm_Astar) << "\n";
  log << "norm_aLb=" << format_number(rep.norm_aLb) << "\n";
  log << "C_V_hat=" << format_number(rep.c_v_hat) << "\n";
  log << "C_V_prime=" << format_number(rep.c_v_prime) << "\n";
  log << "A_const=" << format_number(rep.a_const) << "\n";
  log << "rate=" << format_number(rep.rate) << "\n";
  log << "decay_prefactor=3\n";
  return 0;
}

int run_decay(const Config& cfg, const RunFlags& flags, std::ostream& log) {
  const OperatorSet ops = assemble(cfg.disc, cfg.potential());
  const GapResult gap = spectral_gap(ops);
  const HypoReport rep = hypo_report(ops, cfg.seed);
  ScanOptions opts;
  opts.seed = cfg.seed;
  const std::vector<double> times = log_spaced(0.01, 20.0, 40);
  const LongtimeScan scan = longtime_scan(ops, rep, gap, times, opts);
  CsvWriter csv(flags.out_path,
                {"t", "perp_norm", "envelope", "b_norm", "b_envelope", "a_norm", "a_envelope"});
  for (size_t i = 0; i < times.size(); ++i)
    csv.row({times[i], scan.perp.values[i], scan.envelope[i], scan.bstar.values[i], scan.b_envelope[i],
             scan.astar.values[i], scan.a_envelope[i]});
  log << "fitted_prefactor=" << format_number(scan.fitted_prefactor) << "\n";
  log << "fitted_rate=" << format_number(scan.fitted_rate) << "\n";
  log << "c2_fit=" << format_number(scan.c2_fit) << "\n";
  if (!scan.envelope_ok) {
    log << "envelope_violation_at_t=" << format_number(scan.worst_t)
        << " value=" << format_number(scan.worst_value) << "\n";
    return 1;
  }
  return 0;
}

int run_emden(const Config& cfg, const RunFlags& flags, std::ostream& log) {
  const double kappa = flags.kappa.value_or(0.0);
  const Potential pot = cfg.potential();
  const Mollifier mol = Mollifier::gaussian(cfg.mollifier_sigma, cfg.disc);
  const EmdenSolution sol = solve_emden(pot, mol, cfg.disc, kappa, cfg.emden_tol, cfg.emden_theta);
  const Equilibrium eq = equilibrium(pot, sol, cfg.disc);
  const Vec x = cfg.disc.nodes();
  const Vec rho_inf = density_from_state(eq.ops_inf, eq.ops_inf.ground);
  CsvWriter csv(flags.out_path, {"x", "V", "Vinf", "rho_inf"});
  for (int i = 0; i < cfg.disc.nx; ++i) csv.row({x[i], pot.value(x[i]), sol.v_inf[i], rho_inf[i]});
  log << "iterations=" << sol.iterations << "\n";
  log << "residual=" << format_number(sol.residual) << "\n";
  return 0;
}

int run_threshold(const Config& cfg, const RunFlags& flags, std::ostream& log) {
  const Potential pot = cfg.potential();
  const Mollifier mol = Mollifier::gaussian(cfg.mollifier_sigma, cfg.disc);
  const InteractionKernel kernel = InteractionKernel::from_mollifier(mol, cfg.disc);
  const double kappa_ref = flags.kappa.value_or(0.0);
  const EmdenSolution sol = solve_emden(pot, mol, cfg.disc, kappa_ref, cfg.emden_tol, cfg.emden_theta);
  const Equilibrium eq = equilibrium(pot, sol, cfg.disc);
  const GapResult gap = spectral_gap(eq.ops_inf);
  const HypoReport rep = hypo_report(eq.ops_inf, cfg.seed);
  ScanOptions opts;
  opts.seed = cfg.seed;
  const LongtimeScan scan = longtime_scan(eq.ops_inf, rep, gap, log_spaced(0.05, 8.0, 10), opts);
  const Threshold th = smallness_threshold(rep, kernel, scan.c2_fit);
  log << "kappa_max=" << format_number(th.kappa_max) << "\n";
  log << "C_inf=" << format_number(th.c_inf) << "\n";
  log << "C_gron=" << format_number(th.c_gron) << "\n";
  log << "C2=" << format_number(th.c2) << "\n";
  log << "alpha_inf=" << format_number(th.alpha_inf) << "\n";
  log << "A_inf=" << format_number(th.a_inf) << "\n";
  log << "phi_norm_inf=" << format_number(kernel.norm_inf) << "\n";
  return 0;
}

int run_vpfp(const Config& cfg, const RunFlags& flags, std::ostream& log) {
  const Potential pot = cfg.potential();
  const Mollifier mol = Mollifier::gaussian(cfg.mollifier_sigma, cfg.disc);
  const InteractionKernel kernel = InteractionKernel::from_mollifier(mol, cfg.disc);
  const double kappa = flags.kappa.value_or(0.0);
  const EmdenSolution sol = solve_emden(pot, mol, cfg.disc, kappa, cfg.emden_tol, cfg.emden_theta);
  const Equilibrium eq = equilibrium(pot, sol, cfg.disc);
  const HypoReport rep = hypo_report(eq.ops_inf, cfg.seed);
  const double T = flags.tmax.value_or(10.0 / (rep.alpha / rep.a_const));
  VpfpOptions opts;
  opts.dt = flags.dt.value_or(0.05);
  opts.picard_tol = cfg.tol_picard;
  const Vec u0 = perturbed_initial(eq.ops_inf, 0.005);
  const VpfpRun run = time_march(eq.ops_inf, kernel, kappa, u0, T, rep, opts);
  CsvWriter csv(flags.out_path, {"t", "decay", "envelope", "entropy", "entropy_envelope", "psi",
                                 "mass", "clamped_mass"});
  for (size_t i = 0; i < run.times.size(); ++i)
    csv.row({run.times[i], run.decay[i], run.envelope[i], run.entropy_curve[i], run.entropy_env[i],
             run.psi[i], run.mass[i], run.clamped[i]});
  log << "alpha_inf=" << format_number(run.alpha_inf) << "\n";
  log << "A_inf=" << format_number(run.a_inf) << "\n";
  log << "sup_psi=" << format_number(run.sup_psi) << "\n";
  log << "psi0=" << format_number(run.psi0) << "\n";
  return (run.envelope_ok && run.entropy_env_ok) ? 0 : 1;
}

}  // namespace

int run_subcommand(const std::string& sub, const Config& cfg, const RunFlags& flags, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  int rc = 2;
  if (sub == "assemble") {
    rc = run_assemble(cfg, flags, log);
  } else if (sub == "shorttime") {
    if (flags.which != "b" && flags.which != "a") throw std::invalid_argument("--which must be b or a");
    rc = run_shorttime(cfg, flags, log);
  } else if (sub == "lyapunov") {
    rc = run_lyapunov(cfg, flags, log);
  } else if (sub == "gap") {
    rc = run_gap(cfg, log);
  } else if (sub == "decay") {
    rc = run_decay(cfg, flags, log);
  } else if (sub == "emden") {
    rc = run_emden(cfg, flags, log);
  } else if (sub == "vpfp") {
    rc = run_vpfp(cfg, flags, log);
  } else if (sub == "threshold") {
    rc = run_threshold(cfg, flags, log);
  } else {
    throw std::invalid_argument("unknown subcommand '" + sub + "'");
  }
  if (!flags.out_path.empty()) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(flags.out_path, cfg, sub, wall);
  }
  return rc;
}

}  // namespace hypoflow
