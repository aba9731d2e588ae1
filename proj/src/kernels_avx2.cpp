#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "kising/kernels.hpp"

// Built with -mavx2 only; no FMA so each element sees the same mul-then-add
// rounding as the scalar reference.

namespace kising::kernels {
namespace {

void rank1_update_avx2(double* acc, const double* a, const double* b,
                       std::size_t n, double w) {
  for (std::size_t i = 0; i < n; ++i) {
    const double c = w * a[i];
    const __m256d vc = _mm256_set1_pd(c);
    double* row = acc + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d vb = _mm256_loadu_pd(b + j);
      const __m256d vr = _mm256_loadu_pd(row + j);
      _mm256_storeu_pd(row + j, _mm256_add_pd(vr, _mm256_mul_pd(vc, vb)));
    }
    for (; j < n; ++j) {
      row[j] += c * b[j];
    }
  }
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d vs = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    vs = _mm256_add_pd(vs, _mm256_mul_pd(va, vb));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vs);
  // Tail elements belong to lane 0, matching the scalar stripe order.
  for (; i < n; ++i) {
    lanes[0] += a[i] * b[i];
  }
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{rank1_update_avx2, axpy_avx2, dot_avx2, "avx2"};
  return ops;
}

}  // namespace kising::kernels

#endif
