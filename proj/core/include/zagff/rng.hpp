#pragma once

#include <array>
#include <cstdint>

namespace zagff {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
/// Pure function of (counter, key); no internal state.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter encrypt(Counter ctr, Key key) noexcept;
};

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// A single random stream: Philox keyed by a 64-bit seed, walking a 128-bit
/// counter from zero. Output depends only on the seed and the number of
/// values drawn so far.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller; values are produced in pairs and the
  /// second is cached for the next call.
  double normal() noexcept;
  /// One Box-Muller pair, bypassing the cache.
  std::array<double, 2> normal_pair() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  Philox4x32::Key key_;
  Philox4x32::Counter counter_{};
  std::array<std::uint64_t, 2> block_{};
  int block_pos_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives per-replicate stream seeds from a master seed:
/// seed(i) = mix64(master + (i + 1) * 0x9E3779B97F4A7C15). For a fixed
/// master the map is injective in i.
struct SeedPolicy {
  std::uint64_t master_seed = 0;

  std::uint64_t derive(std::uint64_t replicate_index) const noexcept;
};

}  // namespace zagff
