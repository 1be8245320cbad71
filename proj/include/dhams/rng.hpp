#pragma once

// Deterministic, splittable random streams.
//
// Every stochastic routine in the library draws from an RngStream that is a
// pure function of (seed, stream_id).  Chains get stream ids 0..M-1, so chain
// m's draws never depend on how many chains run, in which order, or on how
// many threads execute them.  This is what makes output files byte-identical
// across runs and across --threads settings.
//
// Generator: xoshiro256++ (Blackman & Vigna), state seeded from the 64-bit
// seed through SplitMix64, then advanced by `stream_id` jumps of 2^128 steps.
// Jumped streams are guaranteed non-overlapping for any realistic run length.
// Normal variates use Box-Muller on explicitly constructed 53-bit uniforms,
// so sequences do not depend on any standard-library distribution internals.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace dhams {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += UINT64_C(0x9E3779B97F4A7C15));
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t v, int k) {
  return (v << k) | (v >> (64 - k));
}

}  // namespace detail

class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = detail::splitmix64(sm);
    for (std::uint64_t j = 0; j < stream_id; ++j) jump();
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  // Raw 64 uniform bits (xoshiro256++).
  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 random bits, never returns 1.
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1]; safe as a log() argument.
  double uniform01_open_left() { return 1.0 - uniform01(); }

  // Uniform integer in {0, 1, ..., n-1} by rejection (unbiased).
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller; generates pairs, caches the spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01_open_left();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  // Advance 2^128 steps (xoshiro256++ jump polynomial).
  void jump() {
    static constexpr std::array<std::uint64_t, 4> kJump = {
        UINT64_C(0x180ec6d33cfd0aba), UINT64_C(0xd5a61266f0c9392c),
        UINT64_C(0xa9582618e03fc9aa), UINT64_C(0x39abdc4529b1661c)};
    std::uint64_t s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    for (std::uint64_t mask : kJump) {
      for (int b = 0; b < 64; ++b) {
        if (mask & (UINT64_C(1) << b)) {
          s0 ^= state_[0];
          s1 ^= state_[1];
          s2 ^= state_[2];
          s3 ^= state_[3];
        }
        next_u64();
      }
    }
    state_ = {s0, s1, s2, s3};
  }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// n independent N(0,1) draws; deterministic given the stream state.
inline std::vector<double> draw_std_normal_vector(RngStream& rng, int n) {
  std::vector<double> z(static_cast<std::size_t>(n));
  for (auto& v : z) v = rng.normal();
  return z;
}

}  // namespace dhams
