// SPDX-License-Identifier: Apache-2.0
// AVX2/FMA kernel variants. This translation unit is the only one compiled
// with -mavx2; entry is gated at runtime by cpu feature detection.
#include "trackpred/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace trackpred::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_avx2(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(w + r * cols, x, cols);
}

void matvec_acc_avx2(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_avx2(w + r * cols, x, cols);
}

void matvec_t_acc_avx2(const double* w, std::size_t rows, std::size_t cols, const double* v, double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(v[r], w + r * cols, x, cols);
}

void ger_acc_avx2(double* w, std::size_t rows, std::size_t cols, const double* a, const double* b) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(a[r], b, w + r * cols, cols);
}

void mul_acc_avx2(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a[i] * b[i];
}

double sum_sq_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

double sum_sq_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

constexpr Table kAvx2Table = {
    "avx2",           dot_avx2,     axpy_avx2,   matvec_avx2,   matvec_acc_avx2,
    matvec_t_acc_avx2, ger_acc_avx2, mul_acc_avx2, sum_sq_avx2, sum_sq_diff_avx2,
};

}  // namespace

bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Table* avx2_table() { return avx2_supported() ? &kAvx2Table : nullptr; }

}  // namespace trackpred::kernels

#else  // non-x86 build of this TU (should not be compiled, but keep it inert)

namespace trackpred::kernels {
bool avx2_supported() { return false; }
const Table* avx2_table() { return nullptr; }
}  // namespace trackpred::kernels

#endif
