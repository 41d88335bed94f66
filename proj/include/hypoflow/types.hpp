#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypoflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Phase-space discretization: interior Dirichlet nodes in x, Hermite modes in v.
struct Discretization {
  int nx = 256;
  int nv = 32;
  double xmax = 8.0;
  double gamma = 1.0;

  double h() const { return 2.0 * xmax / (nx + 1); }
  int dim() const { return nx * nv; }
  int index(int ix, int m) const { return ix * nv + m; }

  Vec nodes() const {
    Vec x(nx);
    const double hh = h();
    for (int i = 0; i < nx; ++i) x[i] = -xmax + hh * (i + 1);
    return x;
  }

  void validate() const {
    if (nx < 16) throw std::invalid_argument("disc.nx must be >= 16");
    if (nv < 8) throw std::invalid_argument("disc.nv must be >= 8");
    if (!(xmax > 0)) throw std::invalid_argument("disc.xmax must be > 0");
    if (!(gamma > 0)) throw std::invalid_argument("disc.gamma must be > 0");
  }
};

// Flat L2 norm of a coefficient vector: Euclidean norm times sqrt(h).
inline double flat_norm(const Discretization& d, const Vec& u) { return std::sqrt(d.h()) * u.norm(); }
inline double flat_dot(const Discretization& d, const Vec& u, const Vec& v) { return d.h() * u.dot(v); }

// Time-value curve used by scans and trackers.
struct DecayCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::string label;

  void push(double t, double v) {
    if (!times.empty() && t <= times.back()) throw std::invalid_argument("DecayCurve times must increase");
    times.push_back(t);
    values.push_back(v);
  }
};

// Deterministic RNG for probe vectors. All randomized checks derive from a config seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double normal() { return normal_(gen_); }
  Vec gaussian(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace hypoflow
