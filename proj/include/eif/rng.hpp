#pragma once

#include <cstdint>

namespace eif {

// SplitMix64 (Steele, Lea, Flood). Fixed so that folded images decode
// identically across platforms and implementations.
class splitmix64 {
 public:
  static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

  explicit constexpr splitmix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += golden_gamma;
    return finalize(state_);
  }

  /// Uniform on [-1, 1): the top 53 bits as a fraction of 2^53, mapped affinely.
  constexpr double next_symmetric() noexcept {
    const double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return 2.0 * unit - 1.0;
  }

  /// Uniform integer in [0, bound) by 128-bit multiply-shift. bound must be > 0.
  constexpr std::uint64_t next_below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  static constexpr std::uint64_t finalize(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent 64-bit value from a root and a 0-based index
/// (per-host seeds from seed_root, per-host keys from the secret key).
constexpr std::uint64_t derive_key(std::uint64_t root, std::uint64_t index) noexcept {
  return splitmix64::finalize(root ^ (splitmix64::golden_gamma * (index + 1)));
}

}  // namespace eif
