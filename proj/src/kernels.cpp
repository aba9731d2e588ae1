#include "kising/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace kising::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

namespace {

const Ops* find(std::string_view name) {
  if (name == "scalar") return &scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2" && __builtin_cpu_supports("avx2")) return &avx2_ops();
#endif
#if defined(__aarch64__)
  if (name == "neon") return &neon_ops();
#endif
  return nullptr;
}

const Ops* best() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) return &avx2_ops();
#endif
#if defined(__aarch64__)
  return &neon_ops();
#endif
  return &scalar_ops();
}

const Ops* initial() {
  if (const char* env = std::getenv("KISING_KERNEL")) {
    if (std::strcmp(env, "auto") != 0) {
      if (const Ops* ops = find(env)) return ops;
    }
  }
  return best();
}

std::atomic<const Ops*>& selection() {
  static std::atomic<const Ops*> sel{initial()};
  return sel;
}

}  // namespace

const Ops& active() { return *selection().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
  if (name == "auto") {
    selection().store(best(), std::memory_order_relaxed);
    return true;
  }
  const Ops* ops = find(name);
  if (!ops) return false;
  selection().store(ops, std::memory_order_relaxed);
  return true;
}

std::string_view active_name() { return active().name; }

std::size_t available(const char* names[], std::size_t cap) {
  std::size_t count = 0;
  auto push = [&](const char* n) {
    if (count < cap) names[count] = n;
    ++count;
  };
  push("scalar");
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) push("avx2");
#endif
#if defined(__aarch64__)
  push("neon");
#endif
  return count < cap ? count : cap;
}

}  // namespace kising::kernels
