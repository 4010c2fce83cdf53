#pragma once

#include <cstdint>

namespace spl {

/// One SplitMix64 output for a given 64-bit input.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/**
 * @brief Counter-based generator: draw k of stream s is a pure function of (seed, s, k).
 *
 * value = splitmix64(seed ^ splitmix64(s) + k); the double in [0, 1) takes
 * the top 53 bits. Trials can run in any order or in parallel and still
 * see the same numbers.
 */
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept : key_(seed ^ splitmix64(stream)) {}

  std::uint64_t bits(std::uint64_t counter) const noexcept { return splitmix64(key_ + counter); }
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }
  double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(counter);
  }

private:
  std::uint64_t key_;
};

}  // namespace spl
