#include "hypoflow/hypocoercivity.hpp"

#include <algorithm>
#include <cmath>

namespace hypoflow {

GapResult spectral_gap(const OperatorSet& ops, int dense_cutoff) {
  const double g = ops.disc.gamma;
  SpMat A1 = SpMat(SpMat(ops.ax.transpose()) * ops.ax);
  auto pairs = lowest_eigenpairs(A1, 2, -0.05 * g, dense_cutoff);
  if (pairs.size() < 2) throw std::runtime_error("spectral_gap: position factor eigensolve failed");

  GapResult res;
  res.mu0 = pairs[0].value;
  res.mu1 = pairs[1].value;
  if (std::abs(res.mu0) > 1e-6 * g)
    throw std::runtime_error("spectral_gap: no eigenvalue near 0 (discretization inconsistency)");
  res.alpha = std::min(res.mu1, res.mu0 + g);

  // full-space ground = phi0 (x) e0
  res.ground = Vec::Zero(ops.dim());
  for (int i = 0; i < ops.disc.nx; ++i) res.ground[ops.disc.index(i, 0)] = pairs[0].vector[i];
  res.ground.normalize();
  const Vec r = ops.lambda2 * res.ground - res.mu0 * res.ground;
  res.eigresidual = r.norm() / std::max(1.0, res.alpha);
  if (res.eigresidual > 1e-8)
    throw std::runtime_error("spectral_gap: eigenresidual above tolerance");
  return res;
}

AuxiliaryOps::AuxiliaryOps(const OperatorSet& ops, double delta) : ops_(&ops), delta_(delta) {
  if (!(delta > 0) || delta * delta > ops.disc.gamma * (1 + 1e-12))
    throw std::invalid_argument("build_auxiliary: need 0 < delta^2 <= gamma");
  lambda_delta2_ = ops.lambda2 + (delta * delta) * sp_identity(ops.dim());
  lambda_delta2_.makeCompressed();
  ldlt_.compute(lambda_delta2_);
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("build_auxiliary: Lambda_delta^2 factorization failed");
}

Vec AuxiliaryOps::solve(const Vec& v) const { return ldlt_.solve(v); }
Vec AuxiliaryOps::L(const Vec& v) const { return solve(ops_->a_star * (ops_->b * v)); }
Vec AuxiliaryOps::Lt(const Vec& v) const { return ops_->b_star * (ops_->a * solve(v)); }
Vec AuxiliaryOps::Astar(const Vec& v) const {
  return solve(ops_->a_star * (ops_->x0 * v)) - ops_->x0 * solve(ops_->a_star * v);
}
Vec AuxiliaryOps::AstarT(const Vec& v) const {
  return ops_->a * solve(ops_->x0 * v) - ops_->x0 * (ops_->a * solve(v));
}
Vec AuxiliaryOps::aLb(const Vec& v) const { return ops_->a * solve(ops_->b_star * v); }
Vec AuxiliaryOps::aLbT(const Vec& v) const { return ops_->b * solve(ops_->a_star * v); }

namespace {
double op_norm(const AuxiliaryOps& aux, Vec (AuxiliaryOps::*fwd)(const Vec&) const,
               Vec (AuxiliaryOps::*bwd)(const Vec&) const, Rng& rng, int iters, double tol) {
  LinOp f = [&](const Vec& v) { return (aux.*fwd)(v); };
  LinOp b = [&](const Vec& v) { return (aux.*bwd)(v); };
  return operator_norm(f, b, aux.ops().dim(), rng, iters, tol).value;
}
}  // namespace

double AuxiliaryOps::norm_L(Rng& rng, int iters, double tol) const {
  return op_norm(*this, &AuxiliaryOps::L, &AuxiliaryOps::Lt, rng, iters, tol);
}
double AuxiliaryOps::norm_Astar(Rng& rng, int iters, double tol) const {
  return op_norm(*this, &AuxiliaryOps::Astar, &AuxiliaryOps::AstarT, rng, iters, tol);
}
double AuxiliaryOps::norm_aLb(Rng& rng, int iters, double tol) const {
  return op_norm(*this, &AuxiliaryOps::aLb, &AuxiliaryOps::aLbT, rng, iters, tol);
}

HypoReport decay_constants(HypoReport rep, double gamma) {
  const double t1 = 2.0 + (rep.c_v_hat + 1.0 + gamma) * (rep.c_v_hat + 1.0 + gamma);
  const double t2 = rep.delta * std::sqrt(2.0 * gamma);
  rep.c_v_prime = std::max(t1, t2);  // the max keeps ||Ltilde|| = delta^2 ||L|| / C'_V <= 1
  rep.a_const = 12.0 * rep.c_v_prime;
  rep.rate = rep.alpha / rep.a_const;
  return rep;
}

HypoReport hypo_report(const OperatorSet& ops, std::uint64_t seed) {
  const GapResult gap = spectral_gap(ops);
  HypoReport rep;
  rep.alpha = gap.alpha;
  const double g = ops.disc.gamma;
  rep.delta = std::min(std::sqrt(gap.alpha), std::sqrt(g) * (1.0 - 1e-12));
  AuxiliaryOps aux(ops, rep.delta);
  Rng rng(seed);
  rep.norm_L = aux.norm_L(rng);
  rep.norm_Astar = aux.norm_Astar(rng);
  rep.norm_aLb = aux.norm_aLb(rng);
  rep.c_v_hat = rep.delta * rep.norm_Astar;
  return decay_constants(rep, g);
}

MarginStats verify_core_inequality(const OperatorSet& ops, const AuxiliaryOps& aux,
                                   const GapResult& gap, int trials, std::uint64_t seed) {
  MarginStats stats;
  stats.trials = trials;
  stats.min_margin = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  PerpProjector proj{gap.ground};
  const double g = ops.disc.gamma;
  const double delta = aux.delta();
  for (int t = 0; t < trials; ++t) {
    Vec u = rng.gaussian(ops.dim());
    proj.apply(u);
    u.normalize();
    const Vec Ku = ops.k * u;
    const Vec bu = ops.b * u;
    const Vec Lu = aux.L(u);
    const Vec Lsu = aux.Lt(u);
    const Vec bsbu = ops.b_star * bu;
    const double spectral = delta * delta * u.dot(aux.solve(u));
    const double rhs = Ku.dot(Lu + Lsu) - 2.0 * bsbu.dot(Lu) - aux.Astar(bu).dot(u) +
                       (1.0 + g) / delta * bu.norm() * u.norm() + spectral;
    stats.min_margin = std::min(stats.min_margin, rhs - 1.0);
    stats.max_spectral_step = std::max(stats.max_spectral_step, spectral);
  }
  stats.ok = stats.min_margin >= -1e-6;
  return stats;
}

LemmaResult abstract_lemma_check(const LemmaInputs& in, const std::vector<double>& times,
                                 int probes, std::uint64_t seed) {
  LemmaResult res;
  if (in.C < 1.0) throw std::invalid_argument("abstract_lemma_check: C must be >= 1");
  Rng rng(seed);
  res.min_hypothesis_margin = std::numeric_limits<double>::infinity();
  std::vector<Vec> probe_set;
  for (int p = 0; p < probes; ++p) {
    Vec phi = rng.gaussian(in.dim);
    if (in.project) in.project(phi);
    phi.normalize();
    probe_set.push_back(phi);
    const Vec Kphi = in.apply_K(phi);
    const double lhs = in.alpha;  // alpha ||phi||^2 with unit phi
    const double rhs = Kphi.dot(phi) + Kphi.dot(in.apply_L(phi) + in.apply_Lt(phi));
    const double margin = rhs - lhs;
    if (margin < res.min_hypothesis_margin) {
      res.min_hypothesis_margin = margin;
      if (margin < -1e-8) res.witness = phi;
    }
  }
  res.hypothesis_ok = res.min_hypothesis_margin >= -1e-8;
  if (!res.hypothesis_ok) return res;  // refuse to assert the conclusion

  res.conclusion_ok = true;
  for (const Vec& phi : probe_set) {
    for (double t : times) {
      Vec ut = in.propagate(phi, t);
      if (in.project) in.project(ut);
      const double bound = 3.0 * std::exp(-in.alpha * t / (3.0 * in.C));
      const double excess = ut.norm() / bound - 1.0;
      res.worst_conclusion_excess = std::max(res.worst_conclusion_excess, excess);
      if (excess > 1e-9) res.conclusion_ok = false;
    }
  }
  return res;
}

LongtimeScan longtimescan_impl(const OperatorSet& ops, const HypoReport& rep, const GapResult& gap,
                               const std::vector<double>& times, const ScanOptions& opts) {
  LongtimeScan scan;
  PerpProjector proj{gap.ground};

  CnPropagator fwd(ops.k);
  CnPropagator adj(ops.k_star);
  Rng rng(opts.seed);
  Vec warm;
  scan.perp.label = "perp norm";
  for (double t : times) {
    const double dt = std::min(opts.dt_max, t / opts.substeps);
    LinOp apply = [&](const Vec& v) {
      Vec w = proj.applied(v);
      fwd.advance(w, t, dt);
      proj.apply(w);
      return w;
    };
    LinOp apply_t = [&](const Vec& v) {
      Vec w = proj.applied(v);
      adj.advance(w, t, dt);
      proj.apply(w);
      return w;
    };
    PowerResult pr = operator_norm(apply, apply_t, ops.dim(), rng, opts.max_iters, opts.tol, warm);
    warm = pr.vector;
    scan.perp.push(t, pr.value);
    scan.envelope.push_back(3.0 * std::exp(-rep.rate * t));
    if (pr.value > scan.envelope.back()) {
      scan.envelope_ok = false;
      scan.worst_t = t;
      scan.worst_value = pr.value;
    }
  }

  // range of b* (and a*, up to O(h^2)) is Maxwellian-orthogonal; scan directly
  ScanResult sb = opnorm_scan(ops, Which::ExpBstar, times, opts);
  ScanResult sa = opnorm_scan(ops, Which::ExpAstar, times, opts);
  scan.bstar = sb.curve;
  scan.astar = sa.curve;
  for (size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double eb = (1.0 + 1.0 / std::sqrt(t)) * std::exp(-rep.rate * t);
    const double ea = (1.0 + std::pow(t, -1.5)) * std::exp(-rep.rate * t);
    scan.c2_fit = std::max(scan.c2_fit, scan.bstar.values[i] / eb);
    scan.c2a_fit = std::max(scan.c2a_fit, scan.astar.values[i] / ea);
  }
  for (size_t i = 0; i < times.size(); ++i) {
    scan.b_envelope.push_back(scan.c2_fit * (1.0 + 1.0 / std::sqrt(times[i])) * std::exp(-rep.rate * times[i]));
    scan.a_envelope.push_back(scan.c2a_fit * (1.0 + std::pow(times[i], -1.5)) * std::exp(-rep.rate * times[i]));
  }

  // prefactor from a log-linear fit over the whole curve, rate from the tail
  {
    const int n = static_cast<int>(times.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      const double x = times[i], y = std::log(scan.perp.values[i]);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    scan.fitted_prefactor = std::exp((sy - slope * sx) / n);

    const int tail = std::max(2, n / 3);
    double tx = 0, ty = 0, txx = 0, txy = 0;
    for (int i = n - tail; i < n; ++i) {
      const double x = times[i], y = std::log(std::max(scan.perp.values[i], 1e-300));
      tx += x; ty += y; txx += x * x; txy += x * y;
    }
    scan.fitted_rate = -(tail * txy - tx * ty) / (tail * txx - tx * tx);
  }
  return scan;
}

LongtimeScan longtime_scan(const OperatorSet& ops, const HypoReport& rep, const GapResult& gap,
                           const std::vector<double>& times, const ScanOptions& opts) {
  return longtimescan_impl(ops, rep, gap, times, opts);
}

}  // namespace hypoflow
