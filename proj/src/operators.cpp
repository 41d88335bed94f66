#include "hypoflow/operators.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace hypoflow {

namespace {

SpMat central_difference(int nx, double h) {
  SpMat D(nx, nx);
  std::vector<Triplet> trip;
  trip.reserve(2 * nx);
  const double c = 1.0 / (2.0 * h);
  for (int i = 0; i + 1 < nx; ++i) {
    trip.emplace_back(i, i + 1, c);
    trip.emplace_back(i + 1, i, -c);
  }
  D.setFromTriplets(trip.begin(), trip.end());
  return D;
}

SpMat lowering_ladder(int nv, double gamma) {
  SpMat B(nv, nv);
  std::vector<Triplet> trip;
  trip.reserve(nv);
  for (int m = 1; m < nv; ++m) trip.emplace_back(m - 1, m, std::sqrt(gamma * m));
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

}  // namespace

OperatorSet assemble(const Discretization& disc, const PotentialTable& pot) {
  disc.validate();
  if (static_cast<long>(disc.nx) * disc.nv > kMaxOperatorDim)
    throw std::invalid_argument("nx*nv exceeds maximum operator dimension");

  OperatorSet ops;
  ops.disc = disc;
  ops.pot = pot;

  const int nx = disc.nx, nv = disc.nv;
  const double g = disc.gamma;
  const double sg = std::sqrt(g);

  ops.dx = central_difference(nx, disc.h());
  ops.ax = sg * (ops.dx + sp_diag(pot.dV / 2.0));
  ops.bv = lowering_ladder(nv, g);
  SpMat bvs = SpMat(ops.bv.transpose());

  const SpMat ix = sp_identity(nx);
  const SpMat iv = sp_identity(nv);

  ops.a = kron(ops.ax, iv);
  ops.a_star = SpMat(ops.a.transpose());
  ops.b = kron(ix, ops.bv);
  ops.b_star = SpMat(ops.b.transpose());

  // X0 = D_x (x) v  -  V'(x) (x) d/dv ; v and d/dv in ladder form
  const SpMat vmul = (ops.bv + bvs) / sg;
  const SpMat dv = (ops.bv - bvs) / (2.0 * sg);
  ops.x0 = kron(ops.dx, vmul) - kron(sp_diag(pot.dV), dv);

  const SpMat bsb = kron(ix, SpMat(bvs * ops.bv));
  ops.k = ops.x0 + bsb;
  ops.k_star = SpMat(ops.k.transpose());
  ops.lambda2 = kron(SpMat(SpMat(ops.ax.transpose()) * ops.ax), iv) + bsb;

  ops.ground = Vec::Zero(disc.dim());
  for (int i = 0; i < nx; ++i) ops.ground[disc.index(i, 0)] = std::exp(-pot.V[i] / 2.0);
  ops.ground /= flat_norm(disc, ops.ground);
  return ops;
}

OperatorSet assemble(const Discretization& disc, const Potential& pot) {
  return assemble(disc, PotentialTable::from_potential(pot, disc));
}

double exact_commutator_residual(const OperatorSet& ops) {
  SpMat R = SpMat(ops.b * ops.x0 - ops.x0 * ops.b) - ops.a;
  double worst = 0.0, a_scale = 0.0;
  const int nv = ops.disc.nv;
  for (int kk = 0; kk < R.outerSize(); ++kk)
    for (SpMat::InnerIterator it(R, kk); it; ++it)
      if (it.col() % nv != nv - 1) worst = std::max(worst, std::abs(it.value()));
  for (int kk = 0; kk < ops.a.outerSize(); ++kk)
    for (SpMat::InnerIterator it(ops.a, kk); it; ++it) a_scale = std::max(a_scale, std::abs(it.value()));
  return worst / a_scale;
}

namespace {

// Resolution-independent smooth fields: Gaussian-enveloped polynomials placed on
// low Hermite modes. The approximate commutator residual is measured on these.
std::vector<Vec> smooth_probes(const OperatorSet& ops) {
  const Vec x = ops.disc.nodes();
  const int nx = ops.disc.nx, nv = ops.disc.nv;
  std::vector<Vec> probes;
  for (int m : {0, 1, 2}) {
    for (int fam = 0; fam < 3; ++fam) {
      Vec p = Vec::Zero(ops.dim());
      for (int i = 0; i < nx; ++i) {
        const double e = std::exp(-x[i] * x[i] / 2.0);
        const double val = fam == 0 ? e : (fam == 1 ? x[i] * e : (x[i] * x[i] - 1.0) * e);
        p[ops.disc.index(i, std::min(m, nv - 1))] = val;
      }
      p /= p.norm();
      probes.push_back(std::move(p));
    }
  }
  return probes;
}

double approx_commutator_residual(const OperatorSet& ops) {
  SpMat R = SpMat(ops.a * ops.x0 - ops.x0 * ops.a) + kron(sp_diag(ops.pot.d2V), ops.bv);
  double worst = 0.0;
  for (const Vec& p : smooth_probes(ops)) worst = std::max(worst, (R * p).norm());
  return worst;
}

}  // namespace

CommutatorReport check_commutators(const OperatorSet& ops, const Potential& pot) {
  CommutatorReport rep;
  rep.exact_residual_rel = exact_commutator_residual(ops);
  rep.approx_residual = approx_commutator_residual(ops);

  Discretization fine = ops.disc;
  fine.nx = 2 * ops.disc.nx + 1;  // halves h exactly
  OperatorSet fops = assemble(fine, pot);
  rep.approx_residual_half = approx_commutator_residual(fops);
  rep.refinement_ratio = rep.approx_residual / rep.approx_residual_half;
  return rep;
}

void dump_operators(const OperatorSet& ops, const std::string& prefix) {
  if (ops.dim() > 4096) throw std::invalid_argument("--dump-operators limited to nx*nv <= 4096");
  auto write = [&](const SpMat& M, const std::string& name) {
    std::ofstream out(prefix + "." + name + ".txt");
    if (!out) throw std::runtime_error("cannot open dump file for " + name);
    Mat D = Mat(M);
    char buf[32];
    for (int i = 0; i < D.rows(); ++i) {
      for (int j = 0; j < D.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.12g", D(i, j));
        out << buf << (j + 1 == D.cols() ? "" : " ");
      }
      out << "\n";
    }
  };
  write(ops.a, "a");
  write(ops.b, "b");
  write(ops.x0, "x0");
  write(ops.k, "k");
  write(ops.lambda2, "lambda2");
}

}  // namespace hypoflow
