#include "hypoflow/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace hypoflow {

SpMat kron(const SpMat& A, const SpMat& B) {
  SpMat C(A.rows() * B.rows(), A.cols() * B.cols());
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(A.nonZeros()) * B.nonZeros());
  for (int ka = 0; ka < A.outerSize(); ++ka) {
    for (SpMat::InnerIterator ia(A, ka); ia; ++ia) {
      for (int kb = 0; kb < B.outerSize(); ++kb) {
        for (SpMat::InnerIterator ib(B, kb); ib; ++ib) {
          trip.emplace_back(ia.row() * B.rows() + ib.row(), ia.col() * B.cols() + ib.col(),
                            ia.value() * ib.value());
        }
      }
    }
  }
  C.setFromTriplets(trip.begin(), trip.end());
  return C;
}

SpMat sp_identity(int n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

SpMat sp_diag(const Vec& d) {
  SpMat D(d.size(), d.size());
  std::vector<Triplet> trip;
  trip.reserve(d.size());
  for (int i = 0; i < d.size(); ++i) trip.emplace_back(i, i, d[i]);
  D.setFromTriplets(trip.begin(), trip.end());
  return D;
}

namespace {

std::vector<EigPair> dense_lowest(const SpMat& A, int count) {
  Mat Ad = Mat(A);
  Eigen::SelfAdjointEigenSolver<Mat> es(Ad);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolve failed");
  const double scale = std::max(1.0, std::abs(es.eigenvalues()[Ad.rows() - 1]));
  std::vector<EigPair> out;
  for (int k = 0; k < count && k < Ad.rows(); ++k) {
    EigPair p;
    p.value = es.eigenvalues()[k];
    p.vector = es.eigenvectors().col(k);
    p.residual = (Ad * p.vector - p.value * p.vector).norm() / scale;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<EigPair> lowest_eigenpairs(const SpMat& A, int count, double shift, int dense_cutoff,
                                       int max_steps) {
  const int n = static_cast<int>(A.rows());
  if (n <= dense_cutoff) return dense_lowest(A, count);

  // shift-invert Lanczos on (A - shift I)^{-1}, full reorthogonalization
  SpMat M = A - shift * sp_identity(n);
  Eigen::SimplicialLDLT<SpMat> solver(M);
  if (solver.info() != Eigen::Success) throw std::runtime_error("LDLT factorization failed in Lanczos");

  const int m = std::min(max_steps, n);
  std::vector<Vec> q;
  q.reserve(m + 1);
  Rng rng(0x9e3779b97f4a7c15ull);
  Vec v = rng.gaussian(n);
  v.normalize();
  q.push_back(v);
  std::vector<double> alpha, beta;
  Vec w;
  for (int j = 0; j < m; ++j) {
    w = solver.solve(q[j]);
    double a = q[j].dot(w);
    alpha.push_back(a);
    w -= a * q[j];
    if (j > 0) w -= beta.back() * q[j - 1];
    for (const auto& qi : q) w -= qi.dot(w) * qi;  // full reorthogonalization
    for (const auto& qi : q) w -= qi.dot(w) * qi;
    double b = w.norm();
    if (b < 1e-14) break;
    beta.push_back(b);
    q.push_back(w / b);
  }
  const int k = static_cast<int>(alpha.size());
  Mat T = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(T);
  // largest Ritz values of the resolvent = eigenvalues of A closest above shift
  std::vector<EigPair> out;
  double a_scale = 1.0;
  for (int kk = 0; kk < A.outerSize(); ++kk)
    for (SpMat::InnerIterator it(A, kk); it; ++it) a_scale = std::max(a_scale, std::abs(it.value()));
  for (int c = 0; c < count; ++c) {
    const int idx = k - 1 - c;
    if (idx < 0) break;
    const double theta = es.eigenvalues()[idx];
    EigPair p;
    p.value = shift + 1.0 / theta;
    Vec y = Vec::Zero(n);
    for (int i = 0; i < k; ++i) y += es.eigenvectors()(i, idx) * q[i];
    y.normalize();
    // one inverse-iteration polish, deflated against already-extracted pairs
    y = solver.solve(y);
    for (const auto& prev : out) y -= prev.vector.dot(y) * prev.vector;
    y.normalize();
    p.value = y.dot(A * y);
    p.vector = y;
    p.residual = (A * y - p.value * y).norm() / a_scale;
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const EigPair& l, const EigPair& r) { return l.value < r.value; });
  return out;
}

PowerResult operator_norm(const LinOp& apply, const LinOp& apply_t, int dim, Rng& rng,
                          int max_iters, double tol, const Vec& warm) {
  PowerResult res;
  Vec v = warm.size() == dim ? warm : rng.gaussian(dim);
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vec w = apply_t(apply(v));
    const double nrm = w.norm();
    if (nrm == 0.0) return res;
    const double cur = std::sqrt(nrm);
    v = w / nrm;
    res.iterations = it + 1;
    if (it > 1 && std::abs(cur - est) <= tol * cur) {
      res.value = cur;
      res.vector = v;
      res.converged = true;
      return res;
    }
    est = cur;
  }
  res.value = est;
  res.vector = v;
  return res;
}

Mat dense_expm(const Mat& A) { return A.exp(); }

double loglog_slope(const std::vector<double>& times, const std::vector<double>& values) {
  const int n = static_cast<int>(times.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(times[i]);
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace hypoflow
