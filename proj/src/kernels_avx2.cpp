#include "spiked/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace spiked::kernels {

namespace {

double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d h = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, h));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum256(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double dot_rev_avx2(const double* x, const double* y_rev, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y_rev + n - 4 - i);
    vy = _mm256_permute4x64_pd(vy, _MM_SHUFFLE(0, 1, 2, 3));
    acc = _mm256_fmadd_pd(vx, vy, acc);
  }
  double s = hsum256(acc);
  for (; i < n; ++i) s += x[i] * y_rev[n - 1 - i];
  return s;
}

void horner_many_avx2(const double* coeffs, std::size_t nc, const double* xs, double* out,
                      std::size_t n) {
  if (nc == 0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(xs + i);
    __m256d v = _mm256_set1_pd(coeffs[nc - 1]);
    for (std::size_t k = nc - 1; k > 0; --k)
      v = _mm256_fmadd_pd(v, x, _mm256_set1_pd(coeffs[k - 1]));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) {
    double v = coeffs[nc - 1];
    for (std::size_t k = nc - 1; k > 0; --k) v = v * xs[i] + coeffs[k - 1];
    out[i] = v;
  }
}

double log_abs_diff_sum_avx2(double x, const double* arr, std::size_t n, std::size_t skip) {
  // Vector lanes hold running products of |x - arr[j]|; renormalize through
  // frexp whenever a lane leaves the safe range.
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d prod = _mm256_set1_pd(1.0);
  long ex = 0;
  double tail = 1.0;
  std::size_t i = 0;
  auto flush = [&](__m256d& p) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, p);
    for (int l = 0; l < 4; ++l) {
      if (lane[l] == 0.0) { tail = 0.0; lane[l] = 1.0; continue; }
      int e;
      lane[l] = std::frexp(lane[l], &e);
      ex += e;
    }
    p = _mm256_load_pd(lane);
  };
  int since_flush = 0;
  for (; i + 4 <= n; i += 4) {
    if (skip >= i && skip < i + 4) break;  // remainder handled by the scalar tail
    __m256d d = _mm256_andnot_pd(sign_mask, _mm256_sub_pd(vx, _mm256_loadu_pd(arr + i)));
    prod = _mm256_mul_pd(prod, d);
    if (++since_flush == 64) {
      flush(prod);
      since_flush = 0;
    }
  }
  flush(prod);
  alignas(32) double lane[4];
  _mm256_store_pd(lane, prod);
  double mant = tail;
  for (int l = 0; l < 4; ++l) {
    mant *= lane[l];
    if (mant > 1e150 || mant < 1e-150) {
      int e;
      mant = std::frexp(mant, &e);
      ex += e;
    }
  }
  for (; i < n; ++i) {
    if (i == skip) continue;
    mant *= std::fabs(x - arr[i]);
    if (mant == 0.0) return -std::numeric_limits<double>::infinity();
    if (mant > 1e150 || mant < 1e-150) {
      int e;
      mant = std::frexp(mant, &e);
      ex += e;
    }
  }
  if (mant == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(mant) + static_cast<double>(ex) * 0.6931471805599453;
}

const Backend avx2_backend = {dot_avx2, dot_rev_avx2, horner_many_avx2, log_abs_diff_sum_avx2,
                              "avx2"};

} // namespace

const Backend* avx2_backend_ptr() { return &avx2_backend; }

} // namespace spiked::kernels

#endif
