// hypoflow: kinetic Fokker-Planck laboratory CLI.
//
// Subcommands: assemble, shorttime, lyapunov, gap, decay, emden, vpfp, threshold.
// Exit codes: 0 success, 1 verification failure, 2 usage error.

#include "hypoflow/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"hypoflow: numerical laboratory for the kinetic Fokker-Planck equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  double kappa = 0.0;
  double tmax = 0.0;
  double dt = 0.0;
  std::string which = "b";
  std::string dump;
  long seed = -1;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config_path, "key=value config file (defaults if omitted)");
    auto* o = sub->add_option("--out", out_path, "output CSV path");
    if (needs_out) o->required();
    sub->add_option("--seed", seed, "override config seed");
  };

  auto* assemble = app.add_subcommand("assemble", "build operators, print structure summary");
  add_common(assemble, false);
  assemble->add_option("--dump-operators", dump, "write dense text dumps with this path prefix");

  auto* shorttime = app.add_subcommand("shorttime", "short-time operator norm scan");
  add_common(shorttime, true);
  shorttime->add_option("--which", which, "b or a")->check(CLI::IsMember({"b", "a"}));

  auto* lyap = app.add_subcommand("lyapunov", "Lyapunov functional track");
  add_common(lyap, true);

  auto* gap = app.add_subcommand("gap", "spectral gap and decay constants");
  add_common(gap, false);

  auto* decay = app.add_subcommand("decay", "long-time decay envelopes");
  add_common(decay, true);

  auto* emden = app.add_subcommand("emden", "Poisson-Emden equilibrium correction");
  add_common(emden, true);
  emden->add_option("--kappa", kappa, "interaction charge");

  auto* vpfp = app.add_subcommand("vpfp", "nonlinear Vlasov-Poisson-Fokker-Planck run");
  add_common(vpfp, true);
  vpfp->add_option("--kappa", kappa, "interaction charge");
  vpfp->add_option("--tmax", tmax, "final time (default 10 A_inf/alpha_inf)");
  vpfp->add_option("--dt", dt, "time step (default 0.05)");

  auto* threshold = app.add_subcommand("threshold", "smallness threshold kappa_max");
  add_common(threshold, false);
  threshold->add_option("--kappa", kappa, "reference charge for the equilibrium (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    hypoflow::Config cfg =
        config_path.empty() ? hypoflow::Config{} : hypoflow::parse_config(config_path);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.validate();

    hypoflow::RunFlags flags;
    flags.out_path = out_path;
    flags.which = which;
    flags.dump_operators = dump;
    if (emden->parsed() || vpfp->parsed() || threshold->parsed()) flags.kappa = kappa;
    if (vpfp->parsed() && tmax > 0) flags.tmax = tmax;
    if (vpfp->parsed() && dt > 0) flags.dt = dt;

    const std::string sub = app.get_subcommands().front()->get_name();
    return hypoflow::run_subcommand(sub, cfg, flags, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
