#pragma once

#include <array>
#include <cstdint>

namespace uavsim {

// splitmix64 step; used for seeding and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream (xoshiro256++ core, Box-Muller gaussians).
///
/// Hand-rolled rather than <random> so that realizations are bit-identical
/// across standard library implementations; simulation determinism is part
/// of the library contract.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal deviate (Box-Muller, cached spare).
  double gaussian();

  /// Uniform integer in [0, n).
  std::uint32_t uniform_index(std::uint32_t n) {
    return static_cast<std::uint32_t>((next_u64() >> 32) % n);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives an independent substream for subsystem `salt` from a run seed.
/// Streams with different salts never overlap in practice; identical
/// (seed, salt) pairs reproduce identical sequences.
inline RandomStream derive_stream(std::uint64_t run_seed, std::uint64_t salt) {
  std::uint64_t sm = run_seed ^ (0xA0761D6478BD642FULL * (salt + 1));
  std::uint64_t mixed = splitmix64(sm);
  return RandomStream(mixed ^ run_seed);
}

/// Shared table of standard-normal deviates, for bulk per-pixel sensor
/// noise where per-sample Box-Muller would dominate render time. The table
/// is built once from a fixed seed, so lookups stay deterministic.
const std::array<float, 65536>& gaussian_table();

}  // namespace uavsim
