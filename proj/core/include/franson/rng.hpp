#pragma once

#include <cstdint>

namespace franson {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based uniform stream. Every variate is a pure function of
/// (seed, stream, slot): slot i yields the SplitMix64 output at state
/// key + i*golden, so batches replay bit-identically under any thread
/// schedule. Streams are separated by hashing the stream index into the
/// start state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed + kGolden) ^
             mix64(stream * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL)) {}

  std::uint64_t bits(std::uint64_t slot) const {
    return mix64(key_ + (slot + 1) * kGolden);
  }

  /// Uniform variate in [0, 1) with 53-bit resolution.
  double uniform(std::uint64_t slot) const {
    return static_cast<double>(bits(slot) >> 11) * 0x1.0p-53;
  }

  /// Uniform variate in (0, 1), offset to bin midpoints; safe to feed
  /// through inverse CDFs with singular endpoints.
  double uniform_open(std::uint64_t slot) const {
    return (static_cast<double>(bits(slot) >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

/// Seed for a derived sub-experiment (one grid point of a scan, etc.).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + kGolden));
}

/// Standard-normal quantile; p must lie in (0, 1).
double normal_quantile(double p);

}  // namespace franson
