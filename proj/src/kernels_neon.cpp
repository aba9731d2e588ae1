#if defined(__aarch64__)

#include <arm_neon.h>

#include "kising/kernels.hpp"

// Two 128-bit accumulators emulate the 4-lane stripe of the scalar
// reference; mul and add are kept separate for bit-identical rounding.

namespace kising::kernels {
namespace {

void rank1_update_neon(double* acc, const double* a, const double* b,
                       std::size_t n, double w) {
  for (std::size_t i = 0; i < n; ++i) {
    const double c = w * a[i];
    const float64x2_t vc = vdupq_n_f64(c);
    double* row = acc + i * n;
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
      const float64x2_t vb = vld1q_f64(b + j);
      const float64x2_t vr = vld1q_f64(row + j);
      vst1q_f64(row + j, vaddq_f64(vr, vmulq_f64(vc, vb)));
    }
    for (; j < n; ++j) {
      row[j] += c * b[j];
    }
  }
}

void axpy_neon(double* y, double alpha, const double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x + i);
    const float64x2_t vy = vld1q_f64(y + i);
    vst1q_f64(y + i, vaddq_f64(vy, vmulq_f64(va, vx)));
  }
  for (; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t v01 = vdupq_n_f64(0.0);  // lanes 0, 1
  float64x2_t v23 = vdupq_n_f64(0.0);  // lanes 2, 3
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    v01 = vaddq_f64(v01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    v23 = vaddq_f64(v23, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double s0 = vgetq_lane_f64(v01, 0);
  const double s1 = vgetq_lane_f64(v01, 1);
  const double s2 = vgetq_lane_f64(v23, 0);
  const double s3 = vgetq_lane_f64(v23, 1);
  for (; i < n; ++i) {
    s0 += a[i] * b[i];
  }
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

const Ops& neon_ops() {
  static const Ops ops{rank1_update_neon, axpy_neon, dot_neon, "neon"};
  return ops;
}

}  // namespace kising::kernels

#endif
