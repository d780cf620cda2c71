#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace bpm {

// Seeded generator with fully specified output. std::mt19937_64 is pinned by
// the standard; the distributions below are written out here because the
// standard library ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, 1] inclusive of both ends.
  double uniform_closed() {
    return static_cast<double>(engine_() >> 11) / static_cast<double>((std::uint64_t{1} << 53) - 1);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller (one value per call, no caching).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Seed splitting: every stage derives its own seed from the root seed and a
// stage tag, so a stage can be re-run in isolation.
//   derive_seed(root, tag) = splitmix64(root ^ fnv1a64(tag))
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag);

}  // namespace bpm
