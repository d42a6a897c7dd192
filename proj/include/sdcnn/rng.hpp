#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sdcnn {

/// splitmix64 step; used to derive independent substream seeds.
uint64_t mix64(uint64_t x);

/// Combine a base seed with stream tags (model index, fold index, ...).
uint64_t derive_seed(uint64_t base, uint64_t tag_a, uint64_t tag_b = 0);
uint64_t derive_seed(uint64_t base, std::string_view tag);

/// Deterministic random stream. All distributions are implemented by hand so
/// the byte-for-byte sequence does not depend on the standard library build.
class Rng {
public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform draw in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  int64_t index(int64_t n);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int64_t i = static_cast<int64_t>(v.size()) - 1; i > 0; --i) {
      std::swap(v[static_cast<size_t>(i)], v[static_cast<size_t>(index(i + 1))]);
    }
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace sdcnn
