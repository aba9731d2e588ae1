#pragma once

#include <cstddef>
#include <string_view>

namespace kising::kernels {

/// Dispatch table for the data-parallel inner loops (moment accumulation,
/// effective-field updates). Every backend performs the same per-element
/// operations in the same order as the scalar reference, so results are
/// bit-identical across backends.
struct Ops {
  /// acc[i*n + j] += (w * a[i]) * b[j]  for all i, j            (n x n, row-major)
  void (*rank1_update)(double* acc, const double* a, const double* b,
                       std::size_t n, double w);
  /// y[i] += alpha * x[i]
  void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
  /// Dot product with a fixed 4-lane striped summation order.
  double (*dot)(const double* a, const double* b, std::size_t n);
  const char* name;
};

const Ops& scalar_ops();

/// Backend active for this process. Chosen on first use: the env var
/// KISING_KERNEL (scalar|avx2|neon|auto) wins, otherwise the best backend
/// the CPU supports.
const Ops& active();

/// Force a backend by name. Returns false (and leaves the selection
/// unchanged) if the backend is unknown or unsupported on this CPU.
bool select(std::string_view name);

std::string_view active_name();

/// Names of all backends usable on this machine.
std::size_t available(const char* names[], std::size_t cap);

}  // namespace kising::kernels
