#pragma once

// Per-sample random streams keyed by (seed, index).
//
// Each sample gets its own xoshiro256** generator whose state is expanded by
// SplitMix64 from a hash of the key, so a sample's draws do not depend on
// which thread produced it or in what order.

#include <cstdint>
#include <limits>

namespace traptail {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256** 1.0 (Blackman & Vigna, public domain reference algorithm).
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0, 1], 53 random bits.
  double uniform_open0() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  // 53 random bits, for comparison against Bernoulli thresholds.
  std::uint64_t bits53() noexcept { return (*this)() >> 11; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

inline Xoshiro256 stream_for(std::uint64_t seed, std::uint64_t index) noexcept {
  return Xoshiro256(splitmix64_mix(seed ^ 0x6a09e667f3bcc909ULL) ^ splitmix64_mix(index + 0x3c6ef372fe94f82bULL));
}

// Threshold such that bits53() < threshold has probability p (to 2^-53).
inline std::uint64_t bernoulli_threshold(double p) noexcept {
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return std::uint64_t{1} << 53;
  return static_cast<std::uint64_t>(p * 0x1.0p53 + 0.5);
}

}  // namespace traptail
