#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

// Deterministic random numbers. std::mt19937 is bit-stable but the standard
// distributions are not (libstdc++ and libc++ disagree), and reproducibility
// down to identical output bytes is a hard requirement here. So: SplitMix64
// as the core generator plus hand-rolled samplers with fixed algorithms.
namespace dagot {

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform integer in [lo, hi], inclusive, rejection-sampled so every value
  // is equally likely.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<int64_t>(next_u64());  // full 64-bit span
    uint64_t limit = ~0ull - ~0ull % range;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + static_cast<int64_t>(x % range);
  }

  // Uniform real in [lo, hi); degenerate lo == hi yields lo.
  double uniform_real(double lo, double hi) {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;  // [0,1)
    return lo + u * (hi - lo);
  }

  // Uniform real in (0, 1]; useful when a draw of exactly zero must be
  // impossible (edge sampling with probability 0).
  double uniform_open0() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

// Stable sub-seed derivation: FNV-1a over a stage tag and up to three
// indices, then one SplitMix64 scramble. Every pipeline stage draws from
// its own stream, so parallel execution order can never change results.
inline uint64_t sub_seed(uint64_t seed, std::string_view stage, uint64_t a = 0,
                         uint64_t b = 0, uint64_t c = 0) {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix_byte = [&h](uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ull;
  };
  auto mix_u64 = [&](uint64_t v) {
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<uint8_t>(v >> (8 * i)));
  };
  mix_u64(seed);
  for (char ch : stage) mix_byte(static_cast<uint8_t>(ch));
  mix_u64(a);
  mix_u64(b);
  mix_u64(c);
  Rng scramble(h);
  return scramble.next_u64();
}

}  // namespace dagot
