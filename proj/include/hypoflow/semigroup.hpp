#pragma once

#include "hypoflow/operators.hpp"

#include <map>
#include <memory>

namespace hypoflow {

// One Crank-Nicolson step: u <- (I + dt/2 K)^{-1} (I - dt/2 K) u.
// A-stable and exactly norm-contractive for accretive K, up to solver residual.
class CrankNicolson {
 public:
  CrankNicolson(const SpMat& K, double dt);
  void step(Vec& u) const;
  double dt() const { return dt_; }

 private:
  double dt_;
  SpMat minus_;
  Eigen::SparseLU<SpMat> lu_;
};

// Shared factorization cache for trajectories that revisit the same step size.
class CnPropagator {
 public:
  explicit CnPropagator(const SpMat& K) : k_(K) {}
  // advance u by `span` using ceil(span/dt_max) equal steps
  void advance(Vec& u, double span, double dt_max);

 private:
  const CrankNicolson& stepper(double dt);
  SpMat k_;
  std::map<double, std::unique_ptr<CrankNicolson>> cache_;
};

struct EvolveParams {
  enum class Method { CrankNicolson, DenseExpm };
  Method method = Method::CrankNicolson;
  double dt = 1e-2;
  double t_end = 1.0;
  double substep_tol = 1e-6;

  void validate() const {
    if (!(dt > 0) || !(t_end > 0) || dt > t_end) throw std::invalid_argument("evolve: need 0 < dt <= t_end");
    if (!(substep_tol > 0)) throw std::invalid_argument("evolve: substep_tol must be > 0");
  }
};

// Trajectory of e^{-tK} u0 sampled at `times` (strictly increasing, in (0, t_end]).
// Crank-Nicolson halves dt until successive refinements agree to substep_tol in
// flat norm; the dense path exponentiates -tK directly (dim <= 2500) as oracle.
std::vector<Vec> evolve(const OperatorSet& ops, const Vec& u0, const EvolveParams& p,
                        const std::vector<double>& times);

enum class Which { BExp, AExp, ExpBstar, ExpAstar };

struct ScanOptions {
  int substeps = 32;      // CN steps per exponential application
  double dt_max = 0.02;   // cap so stiff modes stay damped at large t
  int max_iters = 16;     // power iterations on the Gram operator
  double tol = 1e-5;
  std::uint64_t seed = 42;
};

struct ScanResult {
  DecayCurve curve;
  double slope = 0.0;  // least-squares slope of log value vs log t
};

// Flat operator norm of b e^{-tK}, a e^{-tK}, e^{-tK} b*, or e^{-tK} a* at each
// requested time, by power iteration on the Gram operator with exponentials
// applied through Crank-Nicolson. Consecutive times warm-start each other.
ScanResult opnorm_scan(const OperatorSet& ops, Which which, const std::vector<double>& times,
                       const ScanOptions& opts = {});

struct LyapunovConstants {
  double E = 4.0;
  double D = 4.0;
  double C = 0.0;
  double eta = 0.5;
  double eta_prime = 0.5;
  double s_bound = 0.0;  // cross-term coefficient 2D + 2E + 2E C_V + D gamma
};

// Closed-form sufficient constants for monotonicity of
//   A(t) = t^3 ||au||^2 + E t^2 Re(au,bu) + D t ||bu||^2 + C ||u||^2
// on (0,1]: eta = 1/2, E = 4, eta' = 2/E, D = max(4, E/(2 eta')), and C with a
// fixed 25% headroom over D + E C_V + S^2/(4 eta) absorbed at rate 2C.
LyapunovConstants decide_constants(const OperatorSet& ops);

struct LyapunovTrack {
  DecayCurve curve;              // A(t)
  std::vector<double> dA;        // successive increments
  double max_increment_rel = 0;  // max positive increment / A(0)
  double a0 = 0;                 // A(0) = C ||u0||^2
};

LyapunovTrack lyapunov_track(const OperatorSet& ops, const Vec& u0, const LyapunovConstants& c,
                             const std::vector<double>& times, int dense_cutoff = 2500);

// Batch variant sharing one propagator across many initial states.
std::vector<LyapunovTrack> lyapunov_track_batch(const OperatorSet& ops, const std::vector<Vec>& u0s,
                                                const LyapunovConstants& c,
                                                const std::vector<double>& times,
                                                int dense_cutoff = 2500);

}  // namespace hypoflow
