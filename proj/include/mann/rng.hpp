#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace mann {

/// SplitMix64 finalizer. Used to expand seeds and derive per-run streams.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** (Blackman & Vigna), seeded through SplitMix64.
///
/// The stream for a Monte Carlo run is keyed by (seed, run_index) so that
/// runs are reproducible independently of execution order:
///
///   state_seed = splitmix64 chain over (seed, run_index)
///   uniform01  = (next() >> 11) * 2^-53          in [0, 1)
///   uniform_pm1 = 2 * uniform01 - 1               in [-1, 1)
class Xoshiro256 {
 public:
  static constexpr std::string_view kAlgorithm =
      "xoshiro256** (splitmix64 seeding, stream key = (seed, run_index))";

  explicit Xoshiro256(std::uint64_t seed, std::uint64_t run_index = 0) noexcept {
    std::uint64_t sm = seed;
    // Mix the run index in before expanding so nearby indices decorrelate.
    sm ^= splitmix64_copy(run_index ^ 0xD1B54A32D192ED03ULL);
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform_pm1() noexcept { return 2.0 * uniform01() - 1.0; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  static constexpr std::uint64_t splitmix64_copy(std::uint64_t v) noexcept {
    return splitmix64(v);
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace mann
