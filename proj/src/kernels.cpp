#include "spiked/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

namespace spiked::kernels {

#if defined(SPIKED_HAVE_AVX2_TU)
const Backend* avx2_backend_ptr();
#endif

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double dot_rev_scalar(const double* x, const double* y_rev, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y_rev[n - 1 - i];
  return s;
}

void horner_many_scalar(const double* coeffs, std::size_t nc, const double* xs,
                        double* out, std::size_t n) {
  if (nc == 0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i];
    double v = coeffs[nc - 1];
    for (std::size_t k = nc - 1; k > 0; --k) v = v * x + coeffs[k - 1];
    out[i] = v;
  }
}

double log_abs_diff_sum_scalar(double x, const double* arr, std::size_t n, std::size_t skip) {
  // Accumulate the product of |x - arr[j]| with exponent renormalization and
  // take one log at the end; far cheaper than n calls to log.
  double mant = 1.0;
  long ex = 0;
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == skip) continue;
    mant *= std::fabs(x - arr[j]);
    if (mant == 0.0) return -std::numeric_limits<double>::infinity();
    if (mant > 1e150 || mant < 1e-150) {
      int e;
      mant = std::frexp(mant, &e);
      ex += e;
    }
  }
  s = std::log(mant) + static_cast<double>(ex) * 0.6931471805599453;
  return s;
}

const Backend scalar_backend = {
    dot_scalar, dot_rev_scalar, horner_many_scalar, log_abs_diff_sum_scalar, "scalar"};

const Backend* select_backend() {
  const char* env = std::getenv("SPIKED_KERNEL_BACKEND");
  if (env && std::strcmp(env, "scalar") == 0) return &scalar_backend;
#if defined(SPIKED_HAVE_AVX2_TU)
  if (avx2_available() && (!env || std::strcmp(env, "avx2") == 0)) return avx2_backend_ptr();
#endif
  return &scalar_backend;
}

} // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Backend& backend_scalar() { return scalar_backend; }

const Backend& backend() {
  static const Backend* b = select_backend();
  return *b;
}

double dot(const double* x, const double* y, std::size_t n) { return backend().dot(x, y, n); }

double dot_rev(const double* x, const double* y_rev, std::size_t n) {
  return backend().dot_rev(x, y_rev, n);
}

void horner_many(const double* coeffs, std::size_t nc, const double* xs, double* out,
                 std::size_t n) {
  backend().horner_many(coeffs, nc, xs, out, n);
}

double log_abs_diff_sum(double x, const double* arr, std::size_t n, std::size_t skip) {
  return backend().log_abs_diff_sum(x, arr, n, skip);
}

} // namespace spiked::kernels
