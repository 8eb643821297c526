#pragma once

#include <cmath>
#include <cstdint>

namespace hybridcomp {

/// Deterministic 64-bit splitmix generator. The state advances by a fixed
/// increment and the output is a bijective mix of the state, so any
/// (seed, stream) pair yields the same sequence on every platform —
/// std::random distributions are implementation-defined and would break the
/// byte-identical reproducibility contract.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  std::uint64_t operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// One standard normal draw (Box-Muller; caches the second deviate).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Root of a family of independent streams derived from one 64-bit seed.
/// Stream identity is (purpose, index); the channel contract uses
/// index = ue_index * num_slots + slot so any (UE, slot) realization can be
/// regenerated in isolation.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  SplitMix64 stream(std::uint64_t purpose, std::uint64_t index = 0) const {
    std::uint64_t z = seed_ ^ (purpose * 0xD2B74407B1CE6E93ULL + 0x8BB84B93962EACC9ULL);
    z ^= index * 0xA0761D6478BD642FULL + 0xE7037ED1A0B428DBULL;
    // one mixing round so adjacent (purpose, index) pairs decorrelate
    z = (z ^ (z >> 32)) * 0xD6E8FEB86659FD93ULL;
    z = z ^ (z >> 32);
    return SplitMix64(z);
  }

 private:
  std::uint64_t seed_;
};

namespace rng_purpose {
inline constexpr std::uint64_t kPlacement = 1;
inline constexpr std::uint64_t kChannel = 2;
inline constexpr std::uint64_t kInitializer = 3;
inline constexpr std::uint64_t kOracle = 4;
}  // namespace rng_purpose

}  // namespace hybridcomp
