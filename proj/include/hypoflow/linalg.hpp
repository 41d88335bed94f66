#pragma once

#include "hypoflow/types.hpp"

#include <functional>

namespace hypoflow {

using LinOp = std::function<Vec(const Vec&)>;

// Kronecker product of two sparse matrices, row factor first:
// (A (x) B)(i*nB + m, j*nB + l) = A(i,j) B(m,l).
SpMat kron(const SpMat& A, const SpMat& B);

SpMat sp_identity(int n);
SpMat sp_diag(const Vec& d);

struct EigPair {
  double value;
  Vec vector;
  double residual;  // ||A v - value v|| / ||A||_est
};

// Lowest `count` eigenpairs of a symmetric PSD sparse matrix by shift-invert
// Lanczos with full reorthogonalization; dense fallback below `dense_cutoff`.
std::vector<EigPair> lowest_eigenpairs(const SpMat& A, int count, double shift,
                                       int dense_cutoff = 1024, int max_steps = 160);

// Largest singular value of an operator given by its action and the action of
// its transpose, via power iteration on the Gram operator. Early exit on
// relative change below tol. `warm` seeds the iteration when nonempty.
struct PowerResult {
  double value = 0.0;
  Vec vector;
  int iterations = 0;
  bool converged = false;
};
PowerResult operator_norm(const LinOp& apply, const LinOp& apply_t, int dim, Rng& rng,
                          int max_iters = 20, double tol = 1e-6, const Vec& warm = Vec());

// Dense matrix exponential (Pade + scaling/squaring).
Mat dense_expm(const Mat& A);

// Least-squares slope of log(values) against log(times).
double loglog_slope(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace hypoflow
