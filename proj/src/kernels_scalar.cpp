#include "kising/kernels.hpp"

namespace kising::kernels {
namespace {

void rank1_update_scalar(double* acc, const double* a, const double* b,
                         std::size_t n, double w) {
  for (std::size_t i = 0; i < n; ++i) {
    const double c = w * a[i];
    double* row = acc + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] += c * b[j];
    }
  }
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

// Four-lane striping: lane k accumulates indices congruent to k mod 4, the
// tail goes into lane 0. SIMD backends reproduce exactly this order.
double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) {
    s0 += a[i] * b[i];
  }
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{rank1_update_scalar, axpy_scalar, dot_scalar, "scalar"};
  return ops;
}

}  // namespace kising::kernels
