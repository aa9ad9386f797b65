#ifndef SPIKED_KERNELS_HPP
#define SPIKED_KERNELS_HPP

#include <cstddef>

// Low-level dense loops used by the quadrature, series, and Monte Carlo code.
// Each kernel has a scalar reference implementation and (on x86-64) an AVX2
// variant; the active backend is picked once at startup from cpuid and can be
// forced with SPIKED_KERNEL_BACKEND=scalar|avx2 for equivalence testing.

namespace spiked::kernels {

struct Backend {
  double (*dot)(const double* x, const double* y, std::size_t n);
  // dot with the second array traversed backwards: sum_i x[i] * y[n-1-i].
  // This is the inner step of the series convolution c_k = sum g_m c_{k-m}.
  double (*dot_rev)(const double* x, const double* y_rev, std::size_t n);
  // Evaluate a polynomial (coefficients low-to-high, length nc) at many points.
  void (*horner_many)(const double* coeffs, std::size_t nc, const double* xs,
                      double* out, std::size_t n);
  // sum_{j != skip} log|x - arr[j]|; skip >= n disables the skip.
  double (*log_abs_diff_sum)(double x, const double* arr, std::size_t n, std::size_t skip);
  const char* name;
};

const Backend& backend();         // active backend (env override honored)
const Backend& backend_scalar();  // always available, for equivalence tests
bool avx2_available();

double dot(const double* x, const double* y, std::size_t n);
double dot_rev(const double* x, const double* y_rev, std::size_t n);
void horner_many(const double* coeffs, std::size_t nc, const double* xs,
                 double* out, std::size_t n);
double log_abs_diff_sum(double x, const double* arr, std::size_t n, std::size_t skip);

} // namespace spiked::kernels

#endif
