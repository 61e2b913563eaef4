#pragma once

#include <cstdint>

namespace bbspline {

// Counter-based stream: output i is mix64(key + (i + 1) * 0x9E3779B97F4A7C15),
// i.e. SplitMix64 started at the key. The key for (seed, replication) is
//   mix64(mix64(seed) ^ mix64(replication + 0xD1B54A32D192ED03)),
// so every (seed, replication) pair owns its own stream and results never
// depend on which thread draws them.
//
// uniform() is (x >> 11) * 2^-53. Normal draws use the Box-Muller transform
// on two consecutive uniforms, u1 = 1 - uniform() in (0, 1] and
// u2 = uniform():
//   z0 = sqrt(-2 log u1) cos(2 pi u2),  z1 = sqrt(-2 log u1) sin(2 pi u2),
// returned in that order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

// Key derivation for a (seed, replication) pair.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t replication) noexcept;

RandomStream rng_stream(std::uint64_t seed, std::uint64_t replication) noexcept;

}  // namespace bbspline
