#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "doctest.h"
#include "spiked/equilibrium.hpp"
#include "spiked/errors.hpp"
#include "spiked/potential.hpp"

using namespace spiked;

namespace {
const double kRt2 = std::sqrt(2.0);
const double kPi = 3.14159265358979323846;
const std::vector<double> kQuartic = {0.0, 0.11418, 0.37448, -0.16736, 0.02093};
}

TEST_CASE("quadratic potential solves to the semicircle") {
  const Potential V = make_potential({0.0, 0.0, 1.0});
  const EquilibriumMeasure eqm = solve_equilibrium(V);

  CHECK(eqm.b1 == doctest::Approx(-kRt2).epsilon(1e-10));
  CHECK(eqm.b2 == doctest::Approx(kRt2).epsilon(1e-10));
  REQUIRE(!eqm.h_coeffs.empty());
  CHECK(eqm.h_coeffs[0] == doctest::Approx(2.0).epsilon(1e-10));
  for (size_t i = 1; i < eqm.h_coeffs.size(); ++i) CHECK(std::fabs(eqm.h_coeffs[i]) < 1e-10);
  CHECK(eqm.ell == doctest::Approx(-1.0 - std::log(2.0)).epsilon(1e-8));

  CHECK(density(eqm, 0.0) == doctest::Approx(kRt2 / kPi).epsilon(1e-10));
  CHECK(density(eqm, eqm.b2) == doctest::Approx(0.0));
  CHECK(density(eqm, eqm.b2 + 1.0) == 0.0);

  const VariationalReport vr = verify_variational(eqm, 200, 200);
  CHECK(vr.equality_ok);
  CHECK(vr.inequality_ok);
  CHECK(vr.max_interior_residual < 1e-8);
  CHECK(vr.min_exterior_margin > 0.0);
}

TEST_CASE("support solve is insensitive to the starting bracket") {
  const Potential V = make_potential({0.0, 0.0, 1.0});
  const auto a = solve_support(V);
  const auto b = solve_support(V, std::make_pair(-1.4, 1.4));
  CHECK(std::fabs(a.first - b.first) < 1e-12);
  CHECK(std::fabs(a.second - b.second) < 1e-12);
}

TEST_CASE("quadratic rescaling moves the band as the covariance predicts") {
  // V = c x^2 has support [-sqrt(2/c), sqrt(2/c)] and h = 2c.
  const EquilibriumMeasure two = solve_equilibrium(make_potential({0.0, 0.0, 2.0}));
  CHECK(two.b1 == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(two.b2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(two.h_coeffs[0] == doctest::Approx(4.0).epsilon(1e-10));

  const EquilibriumMeasure four = solve_equilibrium(make_potential({0.0, 0.0, 4.0}));
  CHECK(four.b2 == doctest::Approx(1.0 / kRt2).epsilon(1e-10));
  CHECK(four.h_coeffs[0] == doctest::Approx(8.0).epsilon(1e-10));
}

TEST_CASE("the lagrange constant is the same at every interior point") {
  const EquilibriumMeasure eqm = solve_equilibrium(make_potential({0.0, 0.0, 1.0}));
  // Residual of 2 int log|x-s| dmu - V(x) - ell at two unrelated points.
  auto resid = [&](double x) {
    return 2.0 * log_integral_interior(eqm, x) - eval(eqm.V, x, 0) - eqm.ell;
  };
  CHECK(std::fabs(resid(0.0)) < 1e-8);
  CHECK(std::fabs(resid(0.5)) < 1e-8);

  EquilibriumMeasure off = eqm;
  off.ell += 0.1;
  const VariationalReport vr = verify_variational(off, 50, 50);
  CHECK(vr.max_interior_residual == doctest::Approx(0.1).epsilon(1e-6));
  CHECK_FALSE(vr.equality_ok);
}

TEST_CASE("quartic example reproduces its frozen equilibrium data") {
  const EquilibriumMeasure eqm = solve_equilibrium(make_potential(kQuartic));
  CHECK(eqm.b1 == doctest::Approx(-1.4455583017207703).epsilon(1e-8));
  CHECK(eqm.b2 == doctest::Approx(4.9056215954141553).epsilon(1e-8));
  REQUIRE(eqm.h_coeffs.size() == 3);
  CHECK(eqm.h_coeffs[0] == doctest::Approx(0.55305225790270907).epsilon(1e-8));
  CHECK(eqm.h_coeffs[1] == doctest::Approx(-0.35724175052599494).epsilon(1e-8));
  CHECK(eqm.h_coeffs[2] == doctest::Approx(0.08372).epsilon(1e-8));
  CHECK(eqm.ell == doctest::Approx(0.083607488100977734).epsilon(1e-8));

  const ConditionReport cr = check_conditions(eqm);
  CHECK(cr.all());
  CHECK(cr.normalization == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cr.min_exterior_margin > 0.0);

  const auto res = endpoint_residuals(eqm.V, eqm.b1, eqm.b2);
  CHECK(std::fabs(res.first) < 1e-10);
  CHECK(std::fabs(res.second) < 1e-10);
}

TEST_CASE("solution does not move under grid refinement") {
  const Potential V = make_potential(kQuartic);
  const EquilibriumMeasure a = solve_equilibrium(V, 512);
  const EquilibriumMeasure b = solve_equilibrium(V, 1024);
  CHECK(std::fabs(a.b1 - b.b1) < 1e-10);
  CHECK(std::fabs(a.b2 - b.b2) < 1e-10);
  CHECK(std::fabs(a.ell - b.ell) < 1e-10);
}

TEST_CASE("log integrals agree across interior, exterior, complex routes") {
  const EquilibriumMeasure eqm = solve_equilibrium(make_potential({0.0, 0.0, 1.0}));
  // Complex evaluation just off the axis should approach the interior value.
  const double x = 0.37;
  const cplx near = log_integral(eqm, cplx(x, 1e-8));
  CHECK(std::real(near) == doctest::Approx(log_integral_interior(eqm, x)).epsilon(1e-6));
  const double xo = 2.3;
  CHECK(log_integral_exterior(eqm, xo) ==
        doctest::Approx(std::real(log_integral(eqm, cplx(xo, 0.0)))).epsilon(1e-12));
  // Far field: int log|x-s| dmu ~ log|x|.
  CHECK(log_integral_exterior(eqm, 1e6) == doctest::Approx(std::log(1e6)).epsilon(1e-10));
}

TEST_CASE("equilibrium JSON round trip") {
  const EquilibriumMeasure eqm = solve_equilibrium(make_potential(kQuartic));
  const EquilibriumMeasure back = eqm_from_json(eqm_to_json(eqm));
  CHECK(back.b1 == eqm.b1);
  CHECK(back.b2 == eqm.b2);
  CHECK(back.ell == eqm.ell);
  REQUIRE(back.h_coeffs.size() == eqm.h_coeffs.size());
  for (size_t i = 0; i < eqm.h_coeffs.size(); ++i) CHECK(back.h_coeffs[i] == eqm.h_coeffs[i]);
  REQUIRE(back.V.coeffs.size() == eqm.V.coeffs.size());
  for (size_t i = 0; i < eqm.V.coeffs.size(); ++i) CHECK(back.V.coeffs[i] == eqm.V.coeffs[i]);
  CHECK(density(back, 1.0) == doctest::Approx(density(eqm, 1.0)).epsilon(1e-14));
}
