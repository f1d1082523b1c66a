#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace dam {

// SplitMix64 finalizer. Bijective on 64-bit words, strong avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based generator: each draw advances a Weyl sequence and mixes.
// Streams derived from (seed, key...) are independent of thread scheduling,
// so parallel trial results never depend on worker count.
class Rng {
 public:
  Rng() = default;
  explicit Rng(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Uniform in [0, 1).
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Multiply-shift map; the O(n/2^64) bias is
  // irrelevant at simulation scale and the result is platform-stable,
  // unlike std::uniform_int_distribution.
  std::uint64_t next_below(std::uint64_t n) {
    assert(n > 0);
    return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  std::int8_t next_sign() { return (next_u64() >> 63) ? std::int8_t(1) : std::int8_t(-1); }

  // Box-Muller; consumes two draws per call, no cached state.
  double next_gaussian(double mean, double stddev) {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Fisher-Yates permutation of 0..n-1.
  std::vector<int> permutation(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
      int j = int(next_below(std::uint64_t(i) + 1));
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
  }

 private:
  std::uint64_t state_ = 0;
};

namespace streams {
// Stream tags keep derived keys for distinct purposes disjoint.
inline constexpr std::uint64_t kMemories = 0x01;
inline constexpr std::uint64_t kTrialStart = 0x02;
inline constexpr std::uint64_t kTrialOrder = 0x03;
inline constexpr std::uint64_t kKHalfMemoryRow = 0x04;
inline constexpr std::uint64_t kKHalfStart = 0x05;
inline constexpr std::uint64_t kKHalfOrder = 0x06;
inline constexpr std::uint64_t kWeightInit = 0x07;
inline constexpr std::uint64_t kSplit = 0x08;
inline constexpr std::uint64_t kMinibatch = 0x09;
inline constexpr std::uint64_t kSynth = 0x0A;
inline constexpr std::uint64_t kCell = 0x0B;
}  // namespace streams

namespace detail {
constexpr std::uint64_t fold_key(std::uint64_t h) { return h; }
template <class... Rest>
constexpr std::uint64_t fold_key(std::uint64_t h, std::uint64_t part, Rest... rest) {
  return fold_key(mix64(h ^ (part + 0x9E3779B97F4A7C15ull)), rest...);
}
}  // namespace detail

// Derive an independent stream from a master seed and a key path.
template <class... Parts>
Rng make_stream(std::uint64_t seed, Parts... parts) {
  return Rng(detail::fold_key(mix64(seed ^ 0xA0761D6478BD642Full),
                              static_cast<std::uint64_t>(parts)...));
}

template <class... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Parts... parts) {
  return detail::fold_key(mix64(seed ^ 0xA0761D6478BD642Full),
                          static_cast<std::uint64_t>(parts)...);
}

}  // namespace dam
