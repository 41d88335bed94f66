#pragma once

#include "hypoflow/types.hpp"

namespace hypoflow {

enum class PotentialKind { Quadratic, QuarticDoubleWell, Polynomial };

// Confining external potential, offset so min V = 0 on the sampling domain.
class Potential {
 public:
  static Potential quadratic(double omega);
  static Potential quartic_double_well(double a, double b);
  // Rejects non-confining polynomials (odd leading degree or negative leading coefficient).
  static Potential polynomial(std::vector<double> coeffs);

  PotentialKind kind() const { return kind_; }
  double offset() const { return offset_; }

  double value(double x) const { return raw(x) + offset_; }
  double dV(double x) const;
  double d2V(double x) const;

  // sup of |V''| over the closed interval [-xmax, xmax], endpoints included.
  double hessian_bound(double xmax, int samples = 4097) const;

  // Applies the offset so that min over [-xmax, xmax] is zero, and checks
  // confinement: trapezoid quadrature of e^{-V} must be finite and stable
  // under doubling the domain.
  void normalize(double xmax);

  std::string describe() const;

 private:
  double raw(double x) const;

  PotentialKind kind_ = PotentialKind::Quadratic;
  double omega_ = 1.0;
  double qa_ = 1.0, qb_ = 1.0;
  std::vector<double> coeffs_;
  double offset_ = 0.0;
};

// Node-sampled potential data used by the assembler. Either derived from an
// analytic Potential or from a grid correction (total potential V + V_inf).
struct PotentialTable {
  Vec V;    // values at interior nodes, min-offset applied
  Vec dV;   // first derivative at nodes
  Vec d2V;  // second derivative at nodes
  double c_v_hess = 0.0;  // sup |V''|
  double offset_applied = 0.0;

  static PotentialTable from_potential(const Potential& pot, const Discretization& disc);
  // Total potential = analytic base + grid correction; correction derivatives by
  // central differences with zero extension (Dirichlet correction vanishes at the wall).
  static PotentialTable from_correction(const Potential& base, const Vec& correction,
                                        const Discretization& disc);
};

}  // namespace hypoflow
