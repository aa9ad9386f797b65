#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "spiked/equilibrium.hpp"
#include "spiked/errors.hpp"
#include "spiked/phase.hpp"
#include "spiked/potential.hpp"

using namespace spiked;

namespace {

const double kRt2 = std::sqrt(2.0);

const EquilibriumMeasure& semicircle() {
  static const EquilibriumMeasure eqm = solve_equilibrium(make_potential({0.0, 0.0, 1.0}));
  return eqm;
}

// V'(x) = 0.2 x ((x-5)^2 + 3): a double-well tilt with a second G branch.
const std::vector<double> kTwoBranch = {0.0, 0.0, 2.8, -2.0 / 3.0, 0.05};

} // namespace

TEST_CASE("log transform derivatives match the quadratic closed forms") {
  const EquilibriumMeasure& eqm = semicircle();
  // g'(x) = x - sqrt(x^2 - 2), g''(x) = 1 - x / sqrt(x^2 - 2).
  CHECK(g_deriv(eqm, 2.0, 1) == doctest::Approx(2.0 - kRt2).epsilon(1e-10));
  CHECK(g_deriv(eqm, 2.0, 2) == doctest::Approx(1.0 - kRt2).epsilon(1e-9));
  CHECK(g_deriv(eqm, 3.0, 1) == doctest::Approx(3.0 - std::sqrt(7.0)).epsilon(1e-10));
  // Near the edge g' tends to V'(e)/2 = sqrt 2 like a square root.
  CHECK(g_deriv(eqm, eqm.b2 + 1e-10, 1) == doctest::Approx(kRt2).epsilon(1e-4));
  // Higher orders fall back to the Cauchy circle; check against the closed
  // third derivative  d/dx (1 - x/sqrt(x^2-2)) = 2 / (x^2-2)^{3/2}.
  CHECK(g_deriv(eqm, 2.0, 3) == doctest::Approx(2.0 / std::pow(2.0, 1.5)).epsilon(1e-8));
  CHECK_THROWS_AS(g_deriv(eqm, eqm.b2, 1), Error);
  CHECK_THROWS_AS(g_deriv(eqm, 0.0, 1), Error);
}

TEST_CASE("complex g agrees with direct quadrature of the log kernel") {
  const EquilibriumMeasure& eqm = semicircle();
  const cplx z(2.0, 0.5);
  const cplx direct = integrate_mu_c(
      eqm.grid, [&](double s) { return std::log(z - s); }, eqm.h_coeffs);
  const cplx got = g_value(eqm, z);
  CHECK(std::abs(got - direct) < 1e-10);
}

TEST_CASE("transition curve of the quadratic ensemble") {
  const EquilibriumMeasure& eqm = semicircle();
  for (double a : {0.5, 1.0, 1.3}) {
    CHECK(c_of_a(eqm, a) == doctest::Approx(a / 2.0 + 1.0 / a).epsilon(1e-8));
  }
  // At and beyond the threshold the curve sticks to the edge.
  CHECK(c_of_a(eqm, kRt2) == doctest::Approx(kRt2).epsilon(1e-8));
  CHECK(c_of_a(eqm, 2.0) == doctest::Approx(kRt2).epsilon(1e-8));
  CHECK_THROWS_AS(c_of_a(eqm, 0.0), Error);
  try {
    c_of_a(eqm, -1.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonpositiveSpike);
  }
  // c(a) is nonincreasing in the spike strength.
  double prev = 1e300;
  for (double a = 0.3; a < 1.35; a += 0.1) {
    const double c = c_of_a(eqm, a);
    CHECK(c <= prev + 1e-12);
    prev = c;
  }
}

TEST_CASE("the two rate branches join at the edge and order correctly outside") {
  const EquilibriumMeasure& eqm = semicircle();
  const auto at_edge = G_H(eqm, 0.7, eqm.b2);
  CHECK(at_edge.first == doctest::Approx(at_edge.second).epsilon(1e-9));
  // H - G = V - 2g + ell does not depend on a and is positive off the edge.
  const auto far1 = G_H(eqm, 0.7, 2.0);
  const auto far2 = G_H(eqm, 1.9, 2.0);
  CHECK(far1.second - far1.first > 0.0);
  CHECK(far1.second - far1.first ==
        doctest::Approx(far2.second - far2.first).epsilon(1e-12));
  // H gains in u beyond the transition point.
  const double d = 1e-6;
  for (double u : {1.6, 2.0, 3.0}) {
    const double up = G_H(eqm, 1.0, u + d).second;
    const double dn = G_H(eqm, 1.0, u - d).second;
    CHECK(up > dn);
  }
}

TEST_CASE("threshold spike values") {
  CHECK(critical_value(semicircle()) == doctest::Approx(kRt2).epsilon(1e-8));
  const EquilibriumMeasure strong = solve_equilibrium(make_potential({0.0, 0.0, 2.0}));
  CHECK(critical_value(strong) == doctest::Approx(2.0).epsilon(1e-8));

  const EquilibriumMeasure quart =
      solve_equilibrium(make_potential({0.0, 0.11418, 0.37448, -0.16736, 0.02093}));
  const double ac = critical_value(quart);
  CHECK(ac == doctest::Approx(0.794595329666).epsilon(1e-6));
  // This potential is convex beyond its edge, so the threshold is the
  // edge-matching value V'(e)/2 exactly.
  CHECK(ac == doctest::Approx(0.5 * eval(quart.V, quart.b2, 1)).epsilon(1e-9));
}

TEST_CASE("maximizer location and curvature above threshold") {
  const EquilibriumMeasure& eqm = semicircle();
  const auto pts = maximizers(eqm, 2.0);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].x == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(pts[0].order == 2);
  CHECK(pts[0].deriv == doctest::Approx(-4.0).epsilon(1e-8));
  CHECK(pts[0].G == doctest::Approx(G_of(eqm, 2.0, 1.5)).epsilon(1e-12));

  const auto pts3 = maximizers(eqm, 3.0);
  REQUIRE(pts3.size() == 1);
  CHECK(pts3[0].x == doctest::Approx(11.0 / 6.0).epsilon(1e-8));

  try {
    maximizers(eqm, 1.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoInteriorMaximum);
  }
}

TEST_CASE("classification across the transition") {
  const EquilibriumMeasure& eqm = semicircle();

  const PhaseReport sub = classify(eqm, 1.0);
  CHECK(sub.regime == Regime::Subcritical);
  CHECK(sub.resolved);
  CHECK(sub.a_c == doctest::Approx(kRt2).epsilon(1e-8));
  CHECK(sub.c_of_a == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(sub.predicted_location == doctest::Approx(kRt2).epsilon(1e-10));

  const PhaseReport sup = classify(eqm, 2.0);
  CHECK(sup.regime == Regime::SupercriticalUnique);
  REQUIRE(sup.maximizers.size() == 1);
  CHECK(sup.predicted_location == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(sup.g_max == doctest::Approx(G_of(eqm, 2.0, 1.5)).epsilon(1e-12));

  const PhaseReport at = classify(eqm, sub.a_c);
  CHECK(at.regime == Regime::AtCritical);
  CHECK(at.resolved);
  CHECK(at.predicted_location == doctest::Approx(kRt2).epsilon(1e-10));
}

TEST_CASE("exponential decay rate of the top eigenvalue") {
  const EquilibriumMeasure& eqm = semicircle();
  // Above the transition point the rate is G itself.
  CHECK(asymptotic_log_density(eqm, 2.0, 1.5) ==
        doctest::Approx(G_of(eqm, 2.0, 1.5)).epsilon(1e-12));
  CHECK(asymptotic_log_density(eqm, 2.0, 2.5) ==
        doctest::Approx(G_of(eqm, 2.0, 2.5)).epsilon(1e-12));
  // The two branches join continuously at c(a).
  const double c = c_of_a(eqm, 1.0);
  const double d = 1e-6;
  CHECK(std::fabs(asymptotic_log_density(eqm, 1.0, c + d) -
                  asymptotic_log_density(eqm, 1.0, c - d)) < 1e-5);
  try {
    asymptotic_log_density(eqm, 1.0, eqm.b2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AtEdge);
  }
}

TEST_CASE("two-branch example: threshold, tie point, classification") {
  const EquilibriumMeasure eqm = solve_equilibrium(make_potential(kTwoBranch));
  CHECK(critical_value(eqm) == doctest::Approx(1.92034023).epsilon(1e-6));

  const TiePoint tie = secondary_critical_point(eqm, 2.0, 5.0);
  CHECK(tie.a0 == doctest::Approx(3.468930742384).epsilon(1e-6));
  CHECK(tie.x1 == doctest::Approx(1.338666294).epsilon(1e-6));
  CHECK(tie.x2 == doctest::Approx(5.543041949).epsilon(1e-6));

  const PhaseReport rep = classify(eqm, tie.a0);
  CHECK(rep.regime == Regime::SecondaryCritical);
  REQUIRE(rep.maximizers.size() == 2);
  CHECK(std::fabs(rep.maximizers[0].G - rep.maximizers[1].G) <= 1e-8);
  CHECK(rep.predicted_location == doctest::Approx(tie.x2).epsilon(1e-8));

  // Slightly off the tie the winner is unique on the matching side.
  const PhaseReport below = classify(eqm, tie.a0 - 0.05);
  CHECK(below.regime == Regime::SupercriticalUnique);
  CHECK(below.predicted_location == doctest::Approx(tie.x1).epsilon(1e-2));
  const PhaseReport above = classify(eqm, tie.a0 + 0.05);
  CHECK(above.regime == Regime::SupercriticalUnique);
  CHECK(above.predicted_location == doctest::Approx(tie.x2).epsilon(1e-2));

  // No jump inside a bracket that stays on one branch.
  CHECK_THROWS_AS(secondary_critical_point(eqm, 4.0, 5.0), Error);
}
