#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ltm {

/// SplitMix64 (Steele, Lea & Flood): a counter-based 64-bit generator.
/// State advances by a fixed Weyl increment, so the h-th output is a pure
/// function of (seed, h) and streams derived with derive_stream() never
/// overlap in practice.  All sampling in this project goes through this
/// generator so that runs are reproducible across platforms.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) without modulo bias.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

/// Seed for the stream_id-th child stream of a master seed.  Adding more
/// streams never changes earlier ones.
constexpr std::uint64_t derive_stream(std::uint64_t master, std::uint64_t stream_id) {
  SplitMix64 g(master ^ 0x6a09e667f3bcc909ull);
  g.next();
  std::uint64_t z = g.next() + stream_id * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Unbiased Fisher-Yates shuffle.
template <typename T>
void shuffle(std::span<T> values, SplitMix64& gen) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(gen.next_below(i));
    std::swap(values[i - 1], values[j]);
  }
}

template <typename T>
void shuffle(std::vector<T>& values, SplitMix64& gen) {
  shuffle(std::span<T>(values), gen);
}

/// Identity permutation of size n, shuffled in place.
std::vector<std::uint64_t> random_permutation(std::uint64_t n, SplitMix64& gen);

}  // namespace ltm
