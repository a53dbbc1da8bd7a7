#pragma once

// xorshift64* generator. State update and output:
//
//   x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;
//   out = x * 0x2545F4914F6CDD1D  (mod 2^64)
//
// The state starts at seed ^ 0x9E3779B97F4A7C15 (replaced by that constant
// if the xor is zero). uniform() maps the top 53 bits of `out` to [-1, 1).

#include <cstdint>

namespace ravflow {

class Xorshift64Star {
 public:
  static constexpr std::uint64_t kSeedMix = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kMultiplier = 0x2545F4914F6CDD1DULL;

  explicit Xorshift64Star(std::uint64_t seed)
      : state_(seed ^ kSeedMix ? seed ^ kSeedMix : kSeedMix) {}

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * kMultiplier;
  }

  /// Uniform on [-1, 1).
  double uniform() {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ravflow
