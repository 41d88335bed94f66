#pragma once

#include "hypoflow/semigroup.hpp"

#include <Eigen/SparseCholesky>

#include <memory>

namespace hypoflow {

struct GapResult {
  double alpha = 0.0;      // first nonzero eigenvalue of Lambda^2
  double mu0 = 0.0;        // ground eigenvalue (near zero)
  double mu1 = 0.0;        // first excited position-factor eigenvalue
  Vec ground;              // numerical Lambda^2 null vector, unit Euclidean norm
  double eigresidual = 0;  // relative residual of the ground pair
};

// Spectral gap of Lambda^2 = a*a (x) I + I (x) b*b. The Kronecker-sum structure
// is exact, so the full spectrum is {mu_j + gamma m}: eigensolve the position
// Witten factor (dense below the cutoff, shift-invert Lanczos above) and
// combine with the exact velocity ladder.
GapResult spectral_gap(const OperatorSet& ops, int dense_cutoff = 2500);

// Deflating projector onto the orthogonal complement of a unit direction.
struct PerpProjector {
  Vec dir;
  void apply(Vec& u) const { u -= dir.dot(u) * dir; }
  Vec applied(Vec u) const {
    apply(u);
    return u;
  }
};

// Auxiliary operators of the decay proof, applied through a factorization of
// Lambda_delta^2 = delta^2 + a*a + b*b (never formed densely):
// L = Lambda_delta^-2 a* b,  Astar = [Lambda_delta^-2 a*, X0],  a Lambda_delta^-2 b*.
class AuxiliaryOps {
 public:
  AuxiliaryOps(const OperatorSet& ops, double delta);

  Vec solve(const Vec& v) const;  // Lambda_delta^-2 v
  Vec L(const Vec& v) const;
  Vec Lt(const Vec& v) const;
  Vec Astar(const Vec& v) const;
  Vec AstarT(const Vec& v) const;
  Vec aLb(const Vec& v) const;
  Vec aLbT(const Vec& v) const;

  double delta() const { return delta_; }
  const OperatorSet& ops() const { return *ops_; }

  double norm_L(Rng& rng, int iters = 24, double tol = 1e-7) const;
  double norm_Astar(Rng& rng, int iters = 24, double tol = 1e-7) const;
  double norm_aLb(Rng& rng, int iters = 24, double tol = 1e-7) const;

 private:
  const OperatorSet* ops_;
  double delta_;
  SpMat lambda_delta2_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

struct HypoReport {
  double alpha = 0;
  double delta = 0;
  double norm_L = 0;
  double norm_Astar = 0;
  double norm_aLb = 0;
  double c_v_hat = 0;    // delta * ||Astar||
  double c_v_prime = 0;  // max(2 + (c_v_hat + 1 + gamma)^2, delta sqrt(2 gamma))
  double a_const = 0;    // A = 12 c_v_prime
  double rate = 0;       // alpha / A
  int decay_prefactor = 3;
};

HypoReport hypo_report(const OperatorSet& ops, std::uint64_t seed = 42);

// decay constants from measured norms; also enforces ||Ltilde|| <= 1
HypoReport decay_constants(HypoReport rep, double gamma);

struct MarginStats {
  double min_margin = 0;        // min over probes of RHS - LHS of the core inequality, unit probes
  double max_spectral_step = 0; // max of delta^2 (Lambda_delta^-2 u, u) on the perp space
  int trials = 0;
  bool ok = true;               // min_margin >= -1e-6
};

MarginStats verify_core_inequality(const OperatorSet& ops, const AuxiliaryOps& aux,
                                   const GapResult& gap, int trials, std::uint64_t seed);

// Abstract Hilbert decay lemma, checked at matrix level: if K generates a
// contraction semigroup, ||L|| <= C with C >= 1, and
//   alpha ||phi||^2 <= Re(K phi, phi) + Re(K phi, (L + L*) phi)
// on a probe set, then ||e^{-tK} phi0|| <= 3 e^{-alpha t/(3C)} ||phi0||.
struct LemmaInputs {
  LinOp apply_K;
  LinOp apply_L;
  LinOp apply_Lt;
  std::function<Vec(const Vec&, double)> propagate;  // e^{-tK} phi
  std::function<void(Vec&)> project;                 // optional subspace restriction
  int dim = 0;
  double alpha = 0;
  double C = 1;
};

struct LemmaResult {
  bool hypothesis_ok = false;
  double min_hypothesis_margin = 0;  // relative to ||phi||^2
  Vec witness;                       // probe violating the hypothesis, if any
  bool conclusion_ok = false;
  double worst_conclusion_excess = 0;
};

LemmaResult abstract_lemma_check(const LemmaInputs& in, const std::vector<double>& times,
                                 int probes, std::uint64_t seed);

struct LongtimeScan {
  DecayCurve perp;      // ||e^{-tK}|| on the perp space
  std::vector<double> envelope;  // 3 e^{-alpha t / A}
  DecayCurve bstar;     // ||e^{-tK} b*||
  std::vector<double> b_envelope;
  DecayCurve astar;     // ||e^{-tK} a*||
  std::vector<double> a_envelope;
  double fitted_prefactor = 0;  // from log-linear fit of the perp curve
  double fitted_rate = 0;       // asymptotic rate from the tail of the perp curve
  double c2_fit = 0;            // sup of bstar/((1+t^-1/2}) e^{-alpha t/A})
  double c2a_fit = 0;           // same for astar with t^{-3/2}
  bool envelope_ok = true;
  double worst_t = 0, worst_value = 0;
};

LongtimeScan longtime_scan(const OperatorSet& ops, const HypoReport& rep, const GapResult& gap,
                           const std::vector<double>& times, const ScanOptions& opts = {});

}  // namespace hypoflow
