#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypoflow/potential.hpp"

using namespace hypoflow;

TEST_CASE("harmonic case values") {
  Potential p = Potential::quadratic(1.0);
  p.normalize(8.0);
  CHECK(p.value(0.0) == doctest::Approx(0.0));
  CHECK(p.value(1.0) == doctest::Approx(0.5));
  CHECK(p.dV(1.0) == doctest::Approx(1.0));
  CHECK(p.d2V(1.0) == doctest::Approx(1.0));
  CHECK(p.hessian_bound(8.0) == doctest::Approx(1.0));
}

TEST_CASE("quartic double well hessian bound on [-6,6]") {
  Potential p = Potential::quartic_double_well(1.0, 1.0);
  p.normalize(6.0);
  // max of |3x^2 - 1| at the endpoints x = +-6
  CHECK(p.hessian_bound(6.0) == doctest::Approx(107.0));
  CHECK(p.value(1.0) == doctest::Approx(0.0));   // wells at +-1
  CHECK(p.value(0.0) == doctest::Approx(0.25));  // barrier height
}

TEST_CASE("minimum normalization offsets the grid minimum to zero") {
  Potential p = Potential::polynomial({3.0, 0.0, 1.0});  // 3 + x^2
  p.normalize(8.0);
  CHECK(p.value(0.0) == doctest::Approx(0.0));
  CHECK(p.offset() == doctest::Approx(-3.0));
}

TEST_CASE("non-confining polynomials rejected") {
  CHECK_THROWS_WITH_AS(Potential::polynomial({0.0, 0.0, 0.0, 1.0}),
                       doctest::Contains("odd leading degree"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(Potential::polynomial({0.0, 0.0, 0.0, 0.0, -2.0}),
                       doctest::Contains("negative leading coefficient"), std::invalid_argument);
}

TEST_CASE("confinement check passes for confining potentials") {
  Potential p = Potential::quadratic(0.5);
  CHECK_NOTHROW(p.normalize(10.0));
}

TEST_CASE("potential table on nodes") {
  Discretization disc;
  disc.nx = 32;
  disc.nv = 8;
  disc.xmax = 6.0;
  Potential p = Potential::quadratic(1.0);
  p.normalize(disc.xmax);
  const PotentialTable t = PotentialTable::from_potential(p, disc);
  const Vec x = disc.nodes();
  for (int i = 0; i < disc.nx; ++i) {
    CHECK(t.V[i] == doctest::Approx(0.5 * x[i] * x[i]));
    CHECK(t.dV[i] == doctest::Approx(x[i]));
  }
  CHECK(t.c_v_hess == doctest::Approx(1.0));
}

TEST_CASE("grid correction enters derivatives by differences") {
  Discretization disc;
  disc.nx = 129;
  disc.nv = 8;
  disc.xmax = 6.0;
  Potential p = Potential::quadratic(1.0);
  p.normalize(disc.xmax);
  const Vec x = disc.nodes();
  Vec corr(disc.nx);
  for (int i = 0; i < disc.nx; ++i) corr[i] = 0.1 * std::exp(-x[i] * x[i]);
  const PotentialTable t = PotentialTable::from_correction(p, corr, disc);
  // interior node check against the analytic derivative of the correction
  const int mid = disc.nx / 2;
  const double dcorr = 0.1 * (-2.0 * x[mid]) * std::exp(-x[mid] * x[mid]);
  CHECK(t.dV[mid] == doctest::Approx(x[mid] + dcorr).epsilon(1e-3));
  double mn = t.V.minCoeff();
  CHECK(mn == doctest::Approx(0.0));
}
