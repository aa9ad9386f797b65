#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "doctest.h"
#include "spiked/errors.hpp"
#include "spiked/numerics.hpp"
#include "spiked/special.hpp"

using namespace spiked;

namespace {
const double kPi = 3.14159265358979323846;
const double kRt2 = std::sqrt(2.0);
}

TEST_CASE("cheb grid nodes are interior, sorted high to low, weights positive") {
  const ChebGrid g = make_cheb_grid(-1.5, 2.5, 64);
  REQUIRE(g.nodes.size() == 64);
  REQUIRE(g.weights.size() == 64);
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    CHECK(g.nodes[i] > g.b1);
    CHECK(g.nodes[i] < g.b2);
    CHECK(g.weights[i] > 0.0);
    if (i > 0) CHECK(g.nodes[i] < g.nodes[i - 1]);
  }
}

TEST_CASE("integrate_mu reproduces semicircle moments") {
  // h == 2 on [-sqrt2, sqrt2] is the semicircle density for V = x^2.
  const ChebGrid g = make_cheb_grid(-kRt2, kRt2, 128);
  const std::vector<double> h = {2.0};
  CHECK(integrate_mu(g, [](double) { return 1.0; }, h) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(integrate_mu(g, [](double s) { return s; }, h)) < 1e-14);
  CHECK(integrate_mu(g, [](double s) { return s * s; }, h) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(integrate_mu(g, [](double s) { return s * s * s * s; }, h) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("low-order grid is already exact for polynomials") {
  const ChebGrid small = make_cheb_grid(-1.0, 3.0, 8);
  const ChebGrid big = make_cheb_grid(-1.0, 3.0, 400);
  const std::vector<double> h = {0.7, -0.1, 0.02};
  // degree(f) + degree(h) <= 2m - 1 with m = 8.
  auto f = [](double s) { return 1.0 + s - 0.5 * s * s + 0.125 * s * s * s; };
  CHECK(integrate_mu(small, f, h) ==
        doctest::Approx(integrate_mu(big, f, h)).epsilon(1e-12));
}

TEST_CASE("complex integrand path matches the real one") {
  const ChebGrid g = make_cheb_grid(-kRt2, kRt2, 96);
  const std::vector<double> h = {2.0};
  const cplx z(2.0, 0.5);
  const cplx got = integrate_mu_c(g, [&](double s) { return 1.0 / (z - s); }, h);
  const double re = integrate_mu(g, [&](double s) { return std::real(1.0 / (z - s)); }, h);
  const double im = integrate_mu(g, [&](double s) { return std::imag(1.0 / (z - s)); }, h);
  CHECK(std::real(got) == doctest::Approx(re).epsilon(1e-13));
  CHECK(std::imag(got) == doctest::Approx(im).epsilon(1e-13));
}

TEST_CASE("chebyshev analysis round trip") {
  auto f = [](double x) { return std::exp(0.7 * x) + x * x; };
  const std::vector<double> a = cheb_analyze(f, 40);
  for (double x : {-0.95, -0.3, 0.0, 0.41, 0.99}) {
    CHECK(cheb_eval_T(a, x) == doctest::Approx(f(x)).epsilon(1e-12));
  }
}

TEST_CASE("principal value integrals against both weights") {
  auto one = [](double) { return 1.0; };
  SUBCASE("constant against 1/sqrt weight vanishes") {
    for (double x : {-0.9, -0.25, 0.0, 0.4, 0.87}) {
      CHECK(std::fabs(pv_cauchy(one, x, 64, PvWeight::InvSqrt)) < 1e-12);
    }
  }
  SUBCASE("constant against sqrt weight gives -pi x") {
    // PV int sqrt(1-s^2)/(s-x) ds = -pi T_1(x) = -pi x.
    CHECK(pv_cauchy(one, 0.5, 64, PvWeight::Sqrt) ==
          doctest::Approx(-kPi * 0.5).epsilon(1e-12));
    CHECK(std::fabs(pv_cauchy(one, 0.0, 64, PvWeight::Sqrt)) < 1e-12);
  }
  SUBCASE("identity function against sqrt weight at the origin") {
    // f = s = U_1/2 contributes -pi T_2(0)/2 = pi/2.
    auto id = [](double s) { return s; };
    CHECK(pv_cauchy(id, 0.0, 64, PvWeight::Sqrt) ==
          doctest::Approx(kPi / 2).epsilon(1e-12));
  }
  SUBCASE("series form agrees with the direct form") {
    auto f = [](double s) { return std::cos(1.3 * s) + s * s; };
    const std::vector<double> t = cheb_analyze(f, 80);
    for (double x : {-0.8, 0.17, 0.66}) {
      CHECK(pv_cauchy_series(t, x, PvWeight::InvSqrt) ==
            doctest::Approx(pv_cauchy(f, x, 80, PvWeight::InvSqrt)).epsilon(1e-12));
      CHECK(pv_cauchy_series(t, x, PvWeight::Sqrt) ==
            doctest::Approx(pv_cauchy(f, x, 80, PvWeight::Sqrt)).epsilon(1e-12));
    }
  }
}

TEST_CASE("principal value rejects evaluation at or beyond the endpoints") {
  auto one = [](double) { return 1.0; };
  CHECK_THROWS_AS(pv_cauchy(one, 1.0, 32, PvWeight::InvSqrt), Error);
  CHECK_THROWS_AS(pv_cauchy(one, -1.0, 32, PvWeight::Sqrt), Error);
  try {
    pv_cauchy(one, 1.2, 32, PvWeight::Sqrt);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EvaluationPointOutsideOpenInterval);
  }
}

TEST_CASE("principal value varies continuously in x") {
  auto f = [](double s) { return std::exp(s); };
  const std::vector<double> t = cheb_analyze(f, 80);
  const double d = 1e-7;
  for (double x : {-0.6, 0.0, 0.55}) {
    const double a = pv_cauchy_series(t, x, PvWeight::Sqrt);
    const double b = pv_cauchy_series(t, x + d, PvWeight::Sqrt);
    CHECK(std::fabs(a - b) < 1e-4);
  }
}

TEST_CASE("contour integrals pick up residues") {
  // Open contours run to Re w = -infinity, so the integrand needs the e^w
  // factor to pass the ray-decay check.
  SUBCASE("simple pole inside a Pi contour") {
    ContourSpec spec;
    spec.kind = ContourKind::Pi;
    spec.anchor = 1.0;
    spec.s1 = 1.0;
    const cplx r = contour_integral([](cplx w) { return std::exp(w) / w; }, spec, 64);
    CHECK(std::real(r) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::imag(r) == 0.0);
  }
  SUBCASE("analytic integrand gives zero") {
    ContourSpec spec;
    spec.kind = ContourKind::Pi;
    spec.anchor = 1.0;
    spec.s1 = 1.0;
    const cplx r = contour_integral([](cplx w) { return std::exp(w); }, spec, 64);
    CHECK(std::fabs(std::real(r)) < 1e-10);
  }
  SUBCASE("shifted pole, shifted residue") {
    ContourSpec spec;
    spec.kind = ContourKind::Pi;
    spec.anchor = 1.0;
    spec.s1 = 0.8;
    const cplx r =
        contour_integral([](cplx w) { return std::exp(w) / (w + 0.3); }, spec, 64);
    CHECK(std::real(r) == doctest::Approx(std::exp(-0.3)).epsilon(1e-9));
  }
  SUBCASE("long finite wedge acts like a closed loop") {
    ContourSpec spec;
    spec.kind = ContourKind::Gamma;
    spec.anchor = 0.5;
    spec.s1 = 60.0;
    const cplx r = contour_integral([](cplx w) { return std::exp(w) / w; }, spec, 256);
    CHECK(std::real(r) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("circle around a shifted pole") {
    ContourSpec spec;
    spec.kind = ContourKind::Circle;
    spec.anchor = 2.0;
    spec.s1 = 0.75;
    const cplx r =
        contour_integral([](cplx w) { return std::exp(w - 2.0) / (w - 2.0); }, spec, 64);
    CHECK(std::real(r) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("contour value is stable under refinement and deformation") {
  auto g = [](cplx w) { return std::exp(w) * w / (w * w - 0.25); };  // poles at +-1/2
  const double want = std::cosh(0.5);  // sum of the two residues
  ContourSpec spec;
  spec.kind = ContourKind::Sigma;
  spec.anchor = 1.0;
  spec.s1 = 1.0;
  spec.s2 = 2.0;
  const cplx coarse = contour_integral(g, spec, 32);
  const cplx fine = contour_integral(g, spec, 96);
  CHECK(std::real(coarse) == doctest::Approx(std::real(fine)).epsilon(1e-10));
  CHECK(std::real(fine) == doctest::Approx(want).epsilon(1e-9));

  ContourSpec wide = spec;
  wide.s1 = 0.6;
  wide.s2 = 5.0;
  const cplx moved = contour_integral(g, wide, 96);
  CHECK(std::real(moved) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("ray cutoff rejects integrands that do not decay") {
  ContourSpec spec;
  spec.kind = ContourKind::Pi;
  spec.anchor = 1.0;
  spec.s1 = 1.0;
  CHECK_THROWS_AS(contour_integral([](cplx w) { return 1.0 / w; }, spec, 32), Error);
}

TEST_CASE("vertical segment contour integrates analytic g to zero") {
  ContourSpec spec;
  spec.kind = ContourKind::I;
  spec.anchor = 1.0;
  spec.s1 = 2.0;
  const cplx r = contour_integral([](cplx w) { return std::exp(-w * w); }, spec, 64);
  // Open segment, not a loop: value is the segment contribution only; check
  // it is real (reflection symmetry) and finite.
  CHECK(std::imag(r) == 0.0);
  CHECK(std::isfinite(std::real(r)));
}

TEST_CASE("gauss-legendre table integrates polynomials") {
  const auto& xs = gl32_nodes();
  const auto& ws = gl32_weights();
  double s0 = 0.0, s2 = 0.0;
  for (int i = 0; i < 32; ++i) {
    s0 += ws[i];
    s2 += ws[i] * xs[i] * xs[i];
  }
  CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("special function values") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(norm_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-9));
  for (double x : {0.1, 0.8, 2.5, 7.0}) {
    CHECK(gamma_p(1.3, x) + gamma_q(1.3, x) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
  }
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(kPi)).epsilon(1e-14));
}
