#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "doctest.h"
#include "spiked/kernels.hpp"
#include "spiked/rng.hpp"

using namespace spiked;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

// Sizes straddling the 4-lane vector width, including remainders.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 33, 100, 257};

} // namespace

TEST_CASE("scalar dot and dot_rev match a plain loop") {
  Rng rng(11);
  for (std::size_t n : kSizes) {
    const auto x = random_vec(rng, n, -2.0, 2.0);
    const auto y = random_vec(rng, n, -2.0, 2.0);
    double want = 0.0, want_rev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      want += x[i] * y[i];
      want_rev += x[i] * y[n - 1 - i];
    }
    const auto& sc = kernels::backend_scalar();
    CHECK(sc.dot(x.data(), y.data(), n) == doctest::Approx(want).epsilon(1e-13));
    CHECK(sc.dot_rev(x.data(), y.data(), n) ==
          doctest::Approx(want_rev).epsilon(1e-13));
  }
}

TEST_CASE("scalar horner_many evaluates the polynomial") {
  Rng rng(12);
  const std::vector<double> coeffs = {1.0, -0.5, 2.0, 0.25};
  for (std::size_t n : kSizes) {
    const auto xs = random_vec(rng, n, -3.0, 3.0);
    std::vector<double> out(n, 0.0);
    kernels::backend_scalar().horner_many(coeffs.data(), coeffs.size(), xs.data(),
                                          out.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = xs[i];
      const double want = 1.0 + x * (-0.5 + x * (2.0 + x * 0.25));
      CHECK(out[i] == doctest::Approx(want).epsilon(1e-14));
    }
  }
}

TEST_CASE("scalar log_abs_diff_sum and the skip index") {
  Rng rng(13);
  const auto arr = random_vec(rng, 9, -2.0, 2.0);
  const double x = 2.5;
  double want = 0.0;
  for (std::size_t j = 0; j < arr.size(); ++j)
    if (j != 4) want += std::log(std::fabs(x - arr[j]));
  const auto& sc = kernels::backend_scalar();
  CHECK(sc.log_abs_diff_sum(x, arr.data(), arr.size(), 4) ==
        doctest::Approx(want).epsilon(1e-13));
  double want_all = want + std::log(std::fabs(x - arr[4]));
  CHECK(sc.log_abs_diff_sum(x, arr.data(), arr.size(), arr.size()) ==
        doctest::Approx(want_all).epsilon(1e-13));
}

TEST_CASE("active backend agrees with the scalar reference") {
  Rng rng(14);
  const auto& act = kernels::backend();
  const auto& sc = kernels::backend_scalar();
  INFO("active backend: ", act.name);
  if (!kernels::avx2_available()) {
    CHECK(std::string(act.name) == std::string(sc.name));
  }
  const std::vector<double> coeffs = {0.3, 1.1, -0.7, 0.05, 0.4};
  for (std::size_t n : kSizes) {
    const auto x = random_vec(rng, n, -2.0, 2.0);
    const auto y = random_vec(rng, n, -2.0, 2.0);
    CHECK(act.dot(x.data(), y.data(), n) ==
          doctest::Approx(sc.dot(x.data(), y.data(), n)).epsilon(1e-12));
    CHECK(act.dot_rev(x.data(), y.data(), n) ==
          doctest::Approx(sc.dot_rev(x.data(), y.data(), n)).epsilon(1e-12));
    std::vector<double> oa(n, 0.0), os(n, 0.0);
    act.horner_many(coeffs.data(), coeffs.size(), x.data(), oa.data(), n);
    sc.horner_many(coeffs.data(), coeffs.size(), x.data(), os.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(oa[i] == doctest::Approx(os[i]).epsilon(1e-12));
    if (n > 0) {
      CHECK(act.log_abs_diff_sum(3.0, x.data(), n, 0) ==
            doctest::Approx(sc.log_abs_diff_sum(3.0, x.data(), n, 0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("free function wrappers route through the active backend") {
  const double x[] = {1.0, 2.0, 3.0};
  const double y[] = {4.0, 5.0, 6.0};
  CHECK(kernels::dot(x, y, 3) == doctest::Approx(32.0));
  CHECK(kernels::dot_rev(x, y, 3) == doctest::Approx(1 * 6 + 2 * 5 + 3 * 4.0));
}
