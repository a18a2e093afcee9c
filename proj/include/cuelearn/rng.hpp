#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace cuelearn {

// Deterministic random source. Only the raw mt19937_64 output stream is used,
// which the standard pins bit-for-bit; bounded draws, unit doubles, and
// shuffling are implemented here because std::uniform_*_distribution and
// std::shuffle are implementation-defined and would not reproduce across
// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // splitmix64-style finalizer; decorrelates nearby seeds and stream indices.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed, stream));
  }

  std::uint64_t next() { return gen_(); }

  // Unbiased draw from [0, bound) by rejection. bound must be >= 1.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  int int_in(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Fisher-Yates, high index down, so the permutation depends only on the
  // draw sequence.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cuelearn
