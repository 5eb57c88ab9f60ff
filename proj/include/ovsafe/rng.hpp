#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ovsafe {

/// Philox4x32-10 block function (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static constexpr Counter apply(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }
};

/// Identifies one independent stream: (seed, trial). Two streams with
/// different ids never share a Philox input block.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// Standard normal deviates addressed by (stream, index): the value for a
/// given index never depends on which other indices were drawn.
///
/// Each Philox block yields two 53-bit uniforms and, by Box-Muller, two
/// normals; index 2k and 2k+1 share block k. The top bit of the 64-bit block
/// counter separates the base stream from the refinement stream.
class NormalStream {
 public:
  static constexpr std::uint64_t kRefinementBit = std::uint64_t{1} << 63;

  explicit NormalStream(StreamId id)
      : key_{static_cast<std::uint32_t>(id.seed), static_cast<std::uint32_t>(id.seed >> 32)},
        trial_lo_(static_cast<std::uint32_t>(id.trial)),
        trial_hi_(static_cast<std::uint32_t>(id.trial >> 32)) {}

  /// Normal number `index` of the base stream (index < 2^63).
  double normal(std::uint64_t index) { return at(index); }

  /// Normal number `index` of the refinement stream (index < 2^63).
  double refinement_normal(std::uint64_t index) { return at(index | kRefinementBit); }

  /// Raw block for tests and stream accounting.
  Philox4x32::Counter block(std::uint64_t block_index) const {
    return Philox4x32::apply({static_cast<std::uint32_t>(block_index),
                              static_cast<std::uint32_t>(block_index >> 32), trial_lo_, trial_hi_},
                             key_);
  }

  static double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
    // 53 random bits mapped into (0, 1].
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) + 1.0) * 0x1.0p-53;
  }

 private:
  double at(std::uint64_t index) {
    // Keep the refinement flag in the block index so the two streams stay disjoint.
    const std::uint64_t flag = index & kRefinementBit;
    const std::uint64_t block_index = ((index & ~kRefinementBit) >> 1) | flag;
    if (!cached_ || block_index != cached_block_) {
      const auto r = block(block_index);
      const double u1 = to_unit_open(r[0], r[1]);
      const double u2 = to_unit_open(r[2], r[3]);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      pair_ = {radius * std::cos(angle), radius * std::sin(angle)};
      cached_block_ = block_index;
      cached_ = true;
    }
    return pair_[index & 1u];
  }

  Philox4x32::Key key_;
  std::uint32_t trial_lo_;
  std::uint32_t trial_hi_;
  bool cached_ = false;
  std::uint64_t cached_block_ = 0;
  std::array<double, 2> pair_{};
};

/// SplitMix64 finalizer, used to derive per-cell seeds from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace ovsafe
