#pragma once

// Dense double-precision kernels used by the distance and linear-algebra hot
// loops (k-NN, rough k-means, linear models, the MLP).
//
// Every kernel has a scalar reference implementation and vectorised variants
// (AVX2+FMA on x86-64, NEON on AArch64). The variant is picked once at
// startup from CPU capabilities; BPM_SIMD=scalar|avx2|neon overrides it.
// Vector variants reassociate the sums, so results agree with the scalar
// reference to rounding, not bit-for-bit.

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace bpm::simd {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
  Backend backend;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

bool backend_available(Backend b);
std::string_view backend_name(Backend b);
Backend parse_backend(std::string_view name);

// Table for a specific backend; throws bpm::Error if unavailable.
const KernelTable& kernels_for(Backend b);

// Currently selected table.
const KernelTable& kernels();
Backend active_backend();
void set_backend(Backend b);

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return kernels().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return kernels().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

// RAII backend override for tests and benchmarks.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend b) : previous_(active_backend()) { set_backend(b); }
  ~ScopedBackend() { set_backend(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

}  // namespace bpm::simd
