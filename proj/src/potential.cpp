#include "hypoflow/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hypoflow {

Potential Potential::quadratic(double omega) {
  if (!(omega > 0)) throw std::invalid_argument("quadratic potential requires omega > 0");
  Potential p;
  p.kind_ = PotentialKind::Quadratic;
  p.omega_ = omega;
  return p;
}

Potential Potential::quartic_double_well(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw std::invalid_argument("quartic double well requires a, b > 0");
  Potential p;
  p.kind_ = PotentialKind::QuarticDoubleWell;
  p.qa_ = a;
  p.qb_ = b;
  return p;
}

Potential Potential::polynomial(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() < 3) throw std::invalid_argument("polynomial potential needs degree >= 2");
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (degree % 2 != 0)
    throw std::invalid_argument("non-confining polynomial: odd leading degree " + std::to_string(degree));
  if (coeffs.back() < 0)
    throw std::invalid_argument("non-confining polynomial: negative leading coefficient");
  Potential p;
  p.kind_ = PotentialKind::Polynomial;
  p.coeffs_ = std::move(coeffs);
  return p;
}

double Potential::raw(double x) const {
  switch (kind_) {
    case PotentialKind::Quadratic:
      return 0.5 * omega_ * x * x;
    case PotentialKind::QuarticDoubleWell: {
      const double s = x * x - qb_;
      return 0.25 * qa_ * s * s;
    }
    case PotentialKind::Polynomial: {
      double v = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * x + *it;
      return v;
    }
  }
  return 0.0;
}

double Potential::dV(double x) const {
  switch (kind_) {
    case PotentialKind::Quadratic:
      return omega_ * x;
    case PotentialKind::QuarticDoubleWell:
      return qa_ * x * (x * x - qb_);
    case PotentialKind::Polynomial: {
      double v = 0.0;
      for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 1; --k) v = v * x + k * coeffs_[k];
      return v;
    }
  }
  return 0.0;
}

double Potential::d2V(double x) const {
  switch (kind_) {
    case PotentialKind::Quadratic:
      return omega_;
    case PotentialKind::QuarticDoubleWell:
      return qa_ * (3.0 * x * x - qb_);
    case PotentialKind::Polynomial: {
      double v = 0.0;
      for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 2; --k)
        v = v * x + static_cast<double>(k) * (k - 1) * coeffs_[k];
      return v;
    }
  }
  return 0.0;
}

double Potential::hessian_bound(double xmax, int samples) const {
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = -xmax + 2.0 * xmax * i / (samples - 1);
    m = std::max(m, std::abs(d2V(x)));
  }
  return m;
}

namespace {

double trapz_exp_neg(const Potential& p, double xmax, int n) {
  const double h = 2.0 * xmax / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -xmax + i * h;
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    s += w * std::exp(-(p.value(x) - p.offset()));
  }
  return s * h;
}

}  // namespace

void Potential::normalize(double xmax) {
  offset_ = 0.0;
  double mn = std::numeric_limits<double>::infinity();
  const int samples = 8193;
  for (int i = 0; i < samples; ++i) {
    const double x = -xmax + 2.0 * xmax * i / (samples - 1);
    mn = std::min(mn, raw(x));
  }
  offset_ = -mn;

  // confinement check: integral of e^{-V} must be insensitive to doubling the domain
  const double i1 = trapz_exp_neg(*this, xmax, 4097);
  const double i2 = trapz_exp_neg(*this, 2.0 * xmax, 8193);
  if (!std::isfinite(i1) || !std::isfinite(i2) || std::abs(i2 - i1) > 1e-8 * std::max(1.0, i1)) {
    throw std::invalid_argument("potential fails confinement check: quadrature of e^{-V} not stable");
  }
}

std::string Potential::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case PotentialKind::Quadratic:
      os << "quadratic(omega=" << omega_ << ")";
      break;
    case PotentialKind::QuarticDoubleWell:
      os << "quartic_double_well(a=" << qa_ << ",b=" << qb_ << ")";
      break;
    case PotentialKind::Polynomial:
      os << "polynomial(degree=" << coeffs_.size() - 1 << ")";
      break;
  }
  return os.str();
}

PotentialTable PotentialTable::from_potential(const Potential& pot, const Discretization& disc) {
  PotentialTable t;
  const Vec x = disc.nodes();
  t.V.resize(disc.nx);
  t.dV.resize(disc.nx);
  t.d2V.resize(disc.nx);
  for (int i = 0; i < disc.nx; ++i) {
    t.V[i] = pot.value(x[i]);
    t.dV[i] = pot.dV(x[i]);
    t.d2V[i] = pot.d2V(x[i]);
    if (t.V[i] < 0) throw std::logic_error("potential negative at grid node after offset");
  }
  t.c_v_hess = pot.hessian_bound(disc.xmax);
  t.offset_applied = pot.offset();
  return t;
}

PotentialTable PotentialTable::from_correction(const Potential& base, const Vec& corr,
                                               const Discretization& disc) {
  if (corr.size() != disc.nx) throw std::invalid_argument("correction size mismatch");
  PotentialTable t = from_potential(base, disc);
  const double h = disc.h();
  const int n = disc.nx;
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    t.V[i] += corr[i];
    mn = std::min(mn, t.V[i]);
    const double up = (i + 1 < n) ? corr[i + 1] : 0.0;  // Dirichlet correction
    const double dn = (i - 1 >= 0) ? corr[i - 1] : 0.0;
    t.dV[i] += (up - dn) / (2.0 * h);
    t.d2V[i] += (up - 2.0 * corr[i] + dn) / (h * h);
  }
  // re-offset total so min over nodes is 0; record separately so the Maxwellian
  // normalization downstream is unaffected by the shift
  for (int i = 0; i < n; ++i) t.V[i] -= mn;
  t.offset_applied = base.offset() - mn;
  t.c_v_hess = 0.0;
  for (int i = 0; i < n; ++i) t.c_v_hess = std::max(t.c_v_hess, std::abs(t.d2V[i]));
  t.c_v_hess = std::max(t.c_v_hess, base.hessian_bound(disc.xmax));
  return t;
}

}  // namespace hypoflow
