#include <cmath>
#include <vector>

#include "doctest.h"
#include "spiked/equilibrium.hpp"
#include "spiked/errors.hpp"
#include "spiked/potential.hpp"

using namespace spiked;

namespace {
const std::vector<double> kQuartic = {0.0, 0.11418, 0.37448, -0.16736, 0.02093};
}

TEST_CASE("make_potential validates its inputs") {
  CHECK_NOTHROW(make_potential({0.0, 0.0, 1.0}));
  CHECK_NOTHROW(make_potential(kQuartic));
  CHECK_THROWS_AS(make_potential({}), Error);
  CHECK_THROWS_AS(make_potential({0.0, 1.0}), Error);      // odd degree
  CHECK_THROWS_AS(make_potential({0.0, 0.0, -1.0}), Error); // negative leading

  try {
    make_potential({0.0, 1.0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OddDegree);
  }
  try {
    make_potential({0.0, 0.0, -1.0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonpositiveLeading);
  }
  try {
    make_potential({});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCoefficients);
  }
}

TEST_CASE("eval values and derivatives") {
  const Potential x2 = make_potential({0.0, 0.0, 1.0});
  CHECK(eval(x2, 3.0, 0) == doctest::Approx(9.0));
  CHECK(eval(x2, 3.0, 1) == doctest::Approx(6.0));
  CHECK(eval(x2, 0.0, 2) == doctest::Approx(2.0));
  CHECK(eval(x2, 5.0, 3) == 0.0);
  CHECK(eval(x2, 5.0, 7) == 0.0);

  const Potential q = make_potential(kQuartic);
  const double want = 0.11418 + 0.37448 - 0.16736 + 0.02093;
  CHECK(eval(q, 1.0, 0) == doctest::Approx(want).epsilon(1e-15));
  CHECK(eval(q, 1.0, 0) == doctest::Approx(0.34223).epsilon(1e-12));
}

TEST_CASE("derivatives agree with centered finite differences") {
  const Potential q = make_potential(kQuartic);
  const double h = 1e-6;
  for (int order = 1; order <= 3; ++order) {
    for (double x : {-8.0, -1.0, 0.3, 4.0, 9.5}) {
      const double fd =
          (eval(q, x + h, order - 1) - eval(q, x - h, order - 1)) / (2 * h);
      const double an = eval(q, x, order);
      const double scale = std::max(1.0, std::fabs(an));
      CHECK(std::fabs(fd - an) / scale < 1e-6);
    }
  }
}

TEST_CASE("potential hash distinguishes coefficient lists") {
  const Potential a = make_potential({0.0, 0.0, 1.0});
  const Potential b = make_potential({0.0, 0.0, 2.0});
  CHECK(potential_hash(a) == potential_hash(make_potential({0.0, 0.0, 1.0})));
  CHECK(potential_hash(a) != potential_hash(b));
}

TEST_CASE("potential JSON round trip preserves coefficients exactly") {
  const Potential q = make_potential(kQuartic);
  const Potential back = potential_from_json(potential_to_json(q));
  REQUIRE(back.coeffs.size() == q.coeffs.size());
  for (size_t i = 0; i < q.coeffs.size(); ++i) CHECK(back.coeffs[i] == q.coeffs[i]);
}

TEST_CASE("condition report on the quadratic potential") {
  const Potential x2 = make_potential({0.0, 0.0, 1.0});
  const EquilibriumMeasure eqm = solve_equilibrium(x2);
  const ConditionReport cr = check_conditions(eqm);
  CHECK(cr.cond1);
  CHECK(cr.cond2);
  CHECK(cr.cond3);
  CHECK(cr.cond4);
  CHECK(cr.all());
  CHECK(cr.min_h_on_support > 0.0);
  CHECK(cr.normalization == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cr.min_exterior_margin > 0.0);
}

TEST_CASE("negating the density polynomial breaks condition 2") {
  const Potential x2 = make_potential({0.0, 0.0, 1.0});
  EquilibriumMeasure eqm = solve_equilibrium(x2);
  for (double& c : eqm.h_coeffs) c = -c;
  const ConditionReport cr = check_conditions(eqm);
  CHECK_FALSE(cr.cond2);
  CHECK_FALSE(cr.all());
}
