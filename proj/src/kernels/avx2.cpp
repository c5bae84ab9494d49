#include <immintrin.h>

#include <cmath>

#include "tensorbio/kernels.hpp"

// Compiled with -mavx2 -mfma. Only reached through the dispatcher after a
// runtime CPU check.

namespace tensorbio::kernels::avx2 {
namespace {

inline double hsum(__m256d v) noexcept {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

inline double reduce4(__m256d a0, __m256d a1, __m256d a2, __m256d a3) noexcept {
  return hsum(_mm256_add_pd(_mm256_add_pd(a0, a1), _mm256_add_pd(a2, a3)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = reduce4(acc0, acc1, acc2, acc3);
  for (; i < n; ++i) acc = std::fma(a[i], b[i], acc);
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

double sum_squares(const double* x, std::size_t n) noexcept {
  return dot(x, x, n);
}

double sum_squared_diff(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    const __m256d d2 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8));
    const __m256d d3 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    acc2 = _mm256_fmadd_pd(d2, d2, acc2);
    acc3 = _mm256_fmadd_pd(d3, d3, acc3);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double acc = reduce4(acc0, acc1, acc2, acc3);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc = std::fma(d, d, acc);
  }
  return acc;
}

void ndvi(const double* red, const double* nir, double* out, std::size_t n,
          const NdviParams& params) noexcept {
  const __m256d red_nd = _mm256_set1_pd(params.red_nodata);
  const __m256d nir_nd = _mm256_set1_pd(params.nir_nodata);
  const __m256d missing = _mm256_set1_pd(params.missing);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(red + i);
    const __m256d v = _mm256_loadu_pd(nir + i);
    const __m256d sum = _mm256_add_pd(v, r);
    const __m256d q = _mm256_div_pd(_mm256_sub_pd(v, r), sum);
    const __m256d mask = _mm256_or_pd(
        _mm256_or_pd(_mm256_cmp_pd(r, red_nd, _CMP_EQ_OQ), _mm256_cmp_pd(v, nir_nd, _CMP_EQ_OQ)),
        _mm256_cmp_pd(sum, zero, _CMP_EQ_OQ));
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(q, missing, mask));
  }
  for (; i < n; ++i) {
    const double sum = nir[i] + red[i];
    if (red[i] == params.red_nodata || nir[i] == params.nir_nodata || sum == 0.0) {
      out[i] = params.missing;
    } else {
      out[i] = (nir[i] - red[i]) / sum;
    }
  }
}

}  // namespace tensorbio::kernels::avx2
