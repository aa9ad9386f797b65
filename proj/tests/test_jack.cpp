#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "spiked/jack.hpp"
#include "spiked/rng.hpp"

using namespace spiked;

TEST_CASE("series coefficients of small closed-form products") {
  // Two unit eigenvalues at beta = 2: (1-a)^{-2} = sum (k+1) a^k.
  const SpikeSeries s = series_coeffs({1.0, 1.0}, 2.0, 5);
  REQUIRE(s.coeffs.size() == 6);
  for (int k = 0; k <= 5; ++k) {
    CHECK(s.coeffs[k] == doctest::Approx(k + 1.0).epsilon(1e-12));
  }

  // All-zero configuration truncates to the constant term.
  const SpikeSeries z = series_coeffs({0.0, 0.0, 0.0}, 1.0, 4);
  CHECK(z.coeffs[0] == 1.0);
  for (int k = 1; k <= 4; ++k) CHECK(z.coeffs[k] == 0.0);

  // One eigenvalue 2 at beta = 4: (1-2a)^{-2} = 1 + 4a + 12a^2 + 32a^3.
  const SpikeSeries t = series_coeffs({2.0}, 4.0, 3);
  CHECK(t.coeffs[0] == doctest::Approx(1.0));
  CHECK(t.coeffs[1] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(t.coeffs[2] == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(t.coeffs[3] == doctest::Approx(32.0).epsilon(1e-12));
}

TEST_CASE("single-row polynomial special values") {
  CHECK(jack_row_value({0.3, -1.2, 0.7}, 1.7, 1) == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(jack_row_value({0.8, 0.0, 0.0}, 2.0, 3) == doctest::Approx(0.512).epsilon(1e-12));
  // At the all-ones point the value telescopes to a Pochhammer ratio.
  CHECK(jack_row_value({1, 1, 1, 1}, 2.0, 3) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(jack_row_value({1, 1, 1, 1}, 1.0, 3) == doctest::Approx(12.8).epsilon(1e-12));

  const std::vector<double> lam = {0.4, -0.9, 1.6, 0.2};
  SUBCASE("homogeneous of degree k") {
    for (int k = 1; k <= 4; ++k) {
      std::vector<double> scaled = lam;
      for (double& x : scaled) x *= 2.0;
      CHECK(jack_row_value(scaled, 1.0, k) ==
            doctest::Approx(std::pow(2.0, k) * jack_row_value(lam, 1.0, k)).epsilon(1e-12));
    }
  }
  SUBCASE("symmetric under permutations") {
    std::vector<double> perm = {1.6, 0.2, 0.4, -0.9};
    for (int k = 1; k <= 4; ++k) {
      CHECK(jack_row_value(perm, 2.5, k) ==
            doctest::Approx(jack_row_value(lam, 2.5, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("pochhammer helpers") {
  CHECK(pochhammer(3.0, 4) == doctest::Approx(360.0));
  CHECK(pochhammer(1.0, 0) == 1.0);
  CHECK(pochhammer(0.5, 2) == doctest::Approx(0.75));
  CHECK(log_pochhammer(3.0, 4) == doctest::Approx(std::log(360.0)).epsilon(1e-14));
  CHECK(log_pochhammer(7.3, 11) ==
        doctest::Approx(std::log(pochhammer(7.3, 11))).epsilon(1e-13));
}

TEST_CASE("confluent hypergeometric M(1, xi, z)") {
  CHECK(std::real(kummer_M1(1.0, cplx(1.0, 0.0))) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(std::real(kummer_M1(0.37, cplx(0.0, 0.0))) == doctest::Approx(1.0));
  // M(1, 1/2, z) = 1 + sqrt(pi z) e^z erf(sqrt z); moderate and large z pick
  // different evaluation branches.
  CHECK(std::real(kummer_M1(0.5, cplx(5.0, 0.0))) ==
        doctest::Approx(588.289139650731990).epsilon(1e-10));
  CHECK(std::real(kummer_M1(0.5, cplx(31.0, 0.0))) ==
        doctest::Approx(286671634258701.38).epsilon(1e-10));
  const cplx mi = kummer_M1(1.0, cplx(0.0, 1.0));
  CHECK(std::real(mi) == doctest::Approx(std::cos(1.0)).epsilon(1e-12));
  CHECK(std::imag(mi) == doctest::Approx(std::sin(1.0)).epsilon(1e-12));
}

TEST_CASE("spike weight closed forms") {
  SUBCASE("no spike means unit weight") {
    const SpikeWeight w = spike_weight({0.4, -0.9, 1.6}, 0.0, 3, 2.0);
    CHECK(w.value == 1.0);
    CHECK(w.logvalue == 0.0);
    CHECK(w.sign == 1);
  }
  SUBCASE("single eigenvalue reduces to an exponential") {
    for (double beta : {1.0, 2.0, 3.7}) {
      const SpikeWeight w = spike_weight({0.7}, 1.3, 1, beta);
      CHECK(w.value == doctest::Approx(std::exp(0.5 * beta * 1.3 * 0.7)).epsilon(1e-12));
    }
  }
  SUBCASE("odd half-beta multiplicity carries the contour check") {
    const SpikeWeight w = spike_weight({0.4, -0.9, 1.6}, 1.1, 3, 1.0);
    CHECK(w.contour_checked);
    CHECK(std::fabs(w.logvalue - w.contour_logvalue) <= 1e-8);
  }
}

TEST_CASE("series and contour routes agree on random configurations") {
  Rng rng(20240817);
  int checked = 0;
  for (int rep = 0; rep < 25; ++rep) {
    // Force odd sizes at beta = 1 into the mix.
    const int n = (rep % 5 == 0) ? 3 + 2 * (rep % 2) : 2 + static_cast<int>(rng.uniform() * 5);
    const double beta = (rep % 5 == 0) ? 1.0 : (rep % 3 == 0 ? 2.0 : 0.5 + 3.5 * rng.uniform());
    const double a = -2.0 + 4.0 * rng.uniform();
    std::vector<double> lam(n);
    for (double& x : lam) x = -2.0 + 4.0 * rng.uniform();
    const SpikeWeight w = spike_weight(lam, a, n, beta);
    INFO("rep=", rep, " n=", n, " beta=", beta, " a=", a);
    CHECK(w.tail_bound <= 1e-9);
    if (w.contour_checked) {
      ++checked;
      CHECK(std::fabs(w.logvalue - w.contour_logvalue) <=
            1e-6 * std::max(1.0, std::fabs(w.logvalue)));
    }
  }
  // The contour route must engage on most draws, not just a token few.
  CHECK(checked >= 20);
}

TEST_CASE("power-sum route matches the direct weight") {
  Rng rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform() * 4);
    const double beta = 0.5 + 3.0 * rng.uniform();
    const double a = -1.5 + 3.0 * rng.uniform();
    std::vector<double> lam(n);
    for (double& x : lam) x = -2.0 + 4.0 * rng.uniform();
    const double scale = 1.0 + rng.uniform();
    std::vector<double> ps(24, 0.0);
    for (int k = 0; k < 24; ++k) {
      for (double x : lam) ps[k] += std::pow(x / scale, k + 1);
    }
    const XiEval xi = xi_from_power_sums(ps, scale, a, n, beta, 1e-12);
    const SpikeWeight w = spike_weight(lam, a, n, beta);
    INFO("rep=", rep);
    CHECK(xi.converged);
    CHECK(xi.sign == w.sign);
    CHECK(xi.log_abs == doctest::Approx(w.logvalue).epsilon(1e-9));
  }
}

TEST_CASE("identity battery passes at the contract points") {
  const int ns[] = {4, 3, 5, 4};
  const double betas[] = {2.0, 1.0, 4.0, 3.0};
  const int Ks[] = {10, 10, 12, 10};
  for (int i = 0; i < 4; ++i) {
    const JackReport rep = verify_jack_identities(ns[i], betas[i], Ks[i]);
    INFO("n=", ns[i], " beta=", betas[i]);
    CHECK(rep.all_passed);
    for (const auto& c : rep.checks) {
      INFO(c.name, ": got ", c.got, " want ", c.want);
      CHECK(c.passed);
    }
    CHECK(rep.lambda.size() == static_cast<size_t>(ns[i]));
  }
}

TEST_CASE("hash of doubles separates nearby vectors") {
  CHECK(hash_doubles({1.0, 2.0}) == hash_doubles({1.0, 2.0}));
  CHECK(hash_doubles({1.0, 2.0}) != hash_doubles({2.0, 1.0}));
  CHECK(hash_doubles({1.0}) != hash_doubles({1.0 + 1e-16}));
}
