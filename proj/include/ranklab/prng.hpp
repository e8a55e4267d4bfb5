#pragma once

#include <cstdint>
#include <vector>

#include "ranklab/errors.hpp"

namespace ranklab {

/// SplitMix64 generator. The algorithm is fixed so that seeded analyses
/// reproduce bit-for-bit across platforms and standard library versions,
/// which std::uniform_int_distribution does not guarantee.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Unbiased draw from [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw ArgumentError("draw bound must be positive");
    // 2^64 mod bound, computed without 128-bit arithmetic.
    const std::uint64_t rem = (UINT64_MAX % bound + 1) % bound;
    std::uint64_t r = next();
    if (rem != 0) {
      const std::uint64_t limit = UINT64_MAX - rem;  // last accepted value
      while (r > limit) r = next();
    }
    return r % bound;
  }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Generator for the index-th independent stream of a seeded analysis.
/// Trials, splits, and similar units each take their own stream so results
/// do not depend on evaluation order.
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(detail::mix64(detail::mix64(seed) ^ (index + 0x9e3779b97f4a7c15ull)));
}

}  // namespace ranklab
