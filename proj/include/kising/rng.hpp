#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace kising {

/// splitmix64 finalizer; used to derive independent seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Pure function of (base, stream, index); no sequential coupling between
/// derived seeds, so work items may run in any order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t h = mix64(base ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ mix64(stream));
  h = mix64(h ^ mix64(index + 0xbb67ae8584caa73bULL));
  return h;
}

/// mt19937_64 core with explicit output transforms. The standard engine is
/// bit-specified; the standard *distributions* are not, so the transforms
/// live here to keep streams reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), unbiased (rejection sampling).
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t un = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % un);
  }

  /// Standard normal via Box-Muller; two uniforms per call, no caching.
  double gaussian() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace kising
