#include "hypoflow/semigroup.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace hypoflow {

CrankNicolson::CrankNicolson(const SpMat& K, double dt) : dt_(dt) {
  const SpMat I = sp_identity(static_cast<int>(K.rows()));
  SpMat plus = I + (dt / 2.0) * K;
  minus_ = I - (dt / 2.0) * K;
  plus.makeCompressed();
  lu_.compute(plus);
  if (lu_.info() != Eigen::Success) throw std::runtime_error("Crank-Nicolson factorization failed");
}

void CrankNicolson::step(Vec& u) const { u = lu_.solve(minus_ * u); }

const CrankNicolson& CnPropagator::stepper(double dt) {
  auto it = cache_.find(dt);
  if (it == cache_.end()) it = cache_.emplace(dt, std::make_unique<CrankNicolson>(k_, dt)).first;
  return *it->second;
}

void CnPropagator::advance(Vec& u, double span, double dt_max) {
  if (span <= 0) return;
  const int n = std::max(1, static_cast<int>(std::ceil(span / dt_max - 1e-12)));
  const CrankNicolson& cn = stepper(span / n);
  for (int s = 0; s < n; ++s) cn.step(u);
}

namespace {

std::vector<Vec> run_cn(const SpMat& K, const Vec& u0, const std::vector<double>& times, double dt) {
  CnPropagator prop(K);
  std::vector<Vec> out;
  out.reserve(times.size());
  Vec u = u0;
  double t = 0.0;
  for (double target : times) {
    prop.advance(u, target - t, dt);
    t = target;
    out.push_back(u);
  }
  return out;
}

std::vector<Vec> run_expm(const SpMat& K, const Vec& u0, const std::vector<double>& times) {
  if (K.rows() > 2500) throw std::invalid_argument("dense_expm limited to dimension <= 2500");
  const Mat Kd = Mat(K);
  std::vector<Vec> out;
  out.reserve(times.size());
  Vec u = u0;
  double t = 0.0;
  Mat cached;
  double cached_span = -1.0;
  for (double target : times) {
    const double span = target - t;
    if (span > 0) {
      if (std::abs(span - cached_span) > 1e-12 * span) {
        cached = dense_expm(Mat(-span * Kd));
        cached_span = span;
      }
      u = cached * u;
    }
    t = target;
    out.push_back(u);
  }
  return out;
}

void check_times(const std::vector<double>& times, double t_end) {
  if (times.empty()) throw std::invalid_argument("evolve: empty time list");
  double prev = 0.0;
  for (double t : times) {
    if (t <= prev) throw std::invalid_argument("evolve: times must be strictly increasing and positive");
    prev = t;
  }
  if (times.back() > t_end * (1 + 1e-12)) throw std::invalid_argument("evolve: time beyond t_end");
}

}  // namespace

std::vector<Vec> evolve(const OperatorSet& ops, const Vec& u0, const EvolveParams& p,
                        const std::vector<double>& times) {
  p.validate();
  check_times(times, p.t_end);
  if (!u0.allFinite()) throw std::invalid_argument("evolve: u0 not finite");

  if (p.method == EvolveParams::Method::DenseExpm) return run_expm(ops.k, u0, times);

  double dt = p.dt;
  std::vector<Vec> coarse = run_cn(ops.k, u0, times, dt);
  for (int halving = 0; halving < 12; ++halving) {
    dt /= 2.0;
    std::vector<Vec> fine = run_cn(ops.k, u0, times, dt);
    double diff = 0.0;
    for (size_t i = 0; i < times.size(); ++i)
      diff = std::max(diff, flat_norm(ops.disc, Vec(fine[i] - coarse[i])));
    if (diff < p.substep_tol) return fine;
    coarse = std::move(fine);
  }
  throw std::runtime_error("evolve: step refinement did not converge after 12 halvings");
}

ScanResult opnorm_scan(const OperatorSet& ops, Which which, const std::vector<double>& times,
                       const ScanOptions& opts) {
  for (double t : times)
    if (!(t > 0)) throw std::invalid_argument("opnorm_scan: times must be positive");

  const SpMat& B = (which == Which::BExp) ? ops.b
                   : (which == Which::AExp) ? ops.a
                   : (which == Which::ExpBstar) ? ops.b_star
                                                : ops.a_star;
  const SpMat Bt = SpMat(B.transpose());
  const bool pre = (which == Which::ExpBstar || which == Which::ExpAstar);  // e^{-tK} B form

  CnPropagator fwd(ops.k);
  CnPropagator adj(ops.k_star);

  ScanResult res;
  res.curve.label = pre ? "exp(-tK) B" : "B exp(-tK)";
  Vec warm;
  Rng rng(opts.seed);
  for (double t : times) {
    const double dt = std::min(opts.dt_max, t / opts.substeps);
    LinOp apply, apply_t;
    if (pre) {
      apply = [&](const Vec& v) {
        Vec w = B * v;
        fwd.advance(w, t, dt);
        return w;
      };
      apply_t = [&](const Vec& v) {
        Vec w = v;
        adj.advance(w, t, dt);
        return Vec(Bt * w);
      };
    } else {
      apply = [&](const Vec& v) {
        Vec w = v;
        fwd.advance(w, t, dt);
        return Vec(B * w);
      };
      apply_t = [&](const Vec& v) {
        Vec w = Bt * v;
        adj.advance(w, t, dt);
        return w;
      };
    }
    PowerResult pr = operator_norm(apply, apply_t, ops.dim(), rng, opts.max_iters, opts.tol, warm);
    warm = pr.vector;  // good starting guess for the next (nearby) time
    res.curve.push(t, pr.value);
  }
  res.slope = loglog_slope(res.curve.times, res.curve.values);
  return res;
}

LyapunovConstants decide_constants(const OperatorSet& ops) {
  LyapunovConstants c;
  const double cv = ops.pot.c_v_hess;
  const double g = ops.disc.gamma;
  c.eta = 0.5;
  c.E = 4.0;
  c.eta_prime = 2.0 / c.E;
  c.D = std::max(4.0, c.E / (2.0 * c.eta_prime));
  c.s_bound = 2.0 * c.D + 2.0 * c.E + 2.0 * c.E * cv + c.D * g;
  c.C = 1.25 * 0.5 * (c.D + c.E * cv + c.s_bound * c.s_bound / (4.0 * c.eta));
  return c;
}

std::vector<LyapunovTrack> lyapunov_track_batch(const OperatorSet& ops, const std::vector<Vec>& u0s,
                                                const LyapunovConstants& c,
                                                const std::vector<double>& times, int dense_cutoff) {
  for (double t : times)
    if (!(t > 0) || t > 1.0 + 1e-12) throw std::invalid_argument("lyapunov_track: times must lie in (0,1]");

  EvolveParams p;
  p.t_end = times.back();
  if (ops.dim() <= dense_cutoff) {
    p.method = EvolveParams::Method::DenseExpm;
  } else {
    p.dt = std::min(1e-3, times.front());
    p.substep_tol = 1e-9;
  }

  const double h = ops.disc.h();
  auto a_of = [&](const Vec& u, double t) {
    const Vec au = ops.a * u;
    const Vec bu = ops.b * u;
    return h * (t * t * t * au.squaredNorm() + c.E * t * t * au.dot(bu) + c.D * t * bu.squaredNorm() +
                c.C * u.squaredNorm());
  };

  // share one propagator across all trajectories
  Mat edense;
  std::unique_ptr<CnPropagator> prop;
  double first_gap = times[0];
  bool uniform = true;
  for (size_t i = 1; i < times.size(); ++i)
    if (std::abs((times[i] - times[i - 1]) - first_gap) > 1e-12 * first_gap) uniform = false;
  const bool dense_shared = p.method == EvolveParams::Method::DenseExpm && uniform;
  if (dense_shared)
    edense = dense_expm(Mat(-first_gap * Mat(ops.k)));
  else if (p.method == EvolveParams::Method::CrankNicolson)
    prop = std::make_unique<CnPropagator>(ops.k);

  std::vector<LyapunovTrack> tracks;
  for (const Vec& u0 : u0s) {
    LyapunovTrack track;
    track.a0 = c.C * h * u0.squaredNorm();
    track.curve.label = "A(t)";
    double prev = track.a0;
    std::vector<Vec> traj;
    if (!dense_shared && !prop) traj = evolve(ops, u0, p, times);
    Vec u = u0;
    double t = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
      if (dense_shared) {
        u = edense * u;
      } else if (prop) {
        prop->advance(u, times[i] - t, p.dt);
      } else {
        u = traj[i];
      }
      t = times[i];
      const double val = a_of(u, t);
      track.curve.push(t, val);
      track.dA.push_back(val - prev);
      track.max_increment_rel = std::max(track.max_increment_rel, (val - prev) / track.a0);
      prev = val;
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

LyapunovTrack lyapunov_track(const OperatorSet& ops, const Vec& u0, const LyapunovConstants& c,
                             const std::vector<double>& times, int dense_cutoff) {
  return lyapunov_track_batch(ops, {u0}, c, times, dense_cutoff).front();
}

}  // namespace hypoflow
