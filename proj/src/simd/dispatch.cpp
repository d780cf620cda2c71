#include <atomic>
#include <cstdlib>
#include <string>

#include "bpm/common/error.hpp"
#include "bpm/simd/kernels.hpp"
#include "kernels_internal.hpp"

namespace bpm::simd {

namespace {

constexpr KernelTable kScalar{Backend::Scalar, scalar::dot, scalar::squared_distance, scalar::axpy};
#if defined(BPM_HAVE_AVX2)
constexpr KernelTable kAvx2{Backend::Avx2, avx2::dot, avx2::squared_distance, avx2::axpy};
#endif
#if defined(BPM_HAVE_NEON)
constexpr KernelTable kNeon{Backend::Neon, neon::dot, neon::squared_distance, neon::axpy};
#endif

const KernelTable* detect() {
  if (const char* env = std::getenv("BPM_SIMD"); env != nullptr && *env != '\0') {
    const Backend wanted = parse_backend(env);
    if (backend_available(wanted)) return &kernels_for(wanted);
    // Unsupported request falls back to the scalar reference.
    return &kScalar;
  }
#if defined(BPM_HAVE_AVX2)
  if (backend_available(Backend::Avx2)) return &kAvx2;
#endif
#if defined(BPM_HAVE_NEON)
  return &kNeon;
#endif
  return &kScalar;
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(BPM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(BPM_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  if (name == "neon") return Backend::Neon;
  throw ConfigError("unknown SIMD backend '" + std::string(name) + "' (scalar|avx2|neon)");
}

const KernelTable& kernels_for(Backend b) {
  if (!backend_available(b)) {
    throw Error("SIMD backend '" + std::string(backend_name(b)) + "' is not available on this CPU/build");
  }
  switch (b) {
#if defined(BPM_HAVE_AVX2)
    case Backend::Avx2:
      return kAvx2;
#endif
#if defined(BPM_HAVE_NEON)
    case Backend::Neon:
      return kNeon;
#endif
    default:
      return kScalar;
  }
}

const KernelTable& kernels() { return *active().load(std::memory_order_relaxed); }

Backend active_backend() { return kernels().backend; }

void set_backend(Backend b) { active().store(&kernels_for(b), std::memory_order_relaxed); }

}  // namespace bpm::simd
