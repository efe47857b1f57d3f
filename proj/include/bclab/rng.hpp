#ifndef BCLAB_RNG_HPP
#define BCLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace bclab {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, hi, lo), so results do not depend on scheduling and a
// sample can be extended without replaying earlier draws.

namespace rng_stream {
inline constexpr std::uint64_t kIncrements = 1;
inline constexpr std::uint64_t kBridgeResidual = 2;
inline constexpr std::uint64_t kProp1Trials = 3;
inline constexpr std::uint64_t kProp2Trials = 4;
}  // namespace rng_stream

// SplitMix64 finalizer; full-avalanche 64-bit permutation.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t hi, std::uint64_t lo) {
  constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  std::uint64_t x = mix64(seed ^ 0x243F6A8885A308D3ull);
  x = mix64((x + kGamma) ^ stream);
  x = mix64((x + kGamma) ^ hi);
  x = mix64((x + kGamma) ^ lo);
  return x;
}

// Uniform on (0,1]; never 0, so log() is safe.
inline double u01_pos(std::uint64_t x) {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

// Uniform on [0,1).
inline double u01(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; one value per (seed, stream, hi, lo) key.
inline double counter_normal(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t hi, std::uint64_t lo) {
  const double u1 = u01_pos(counter_u64(seed, stream, hi, 2 * lo));
  const double u2 = u01(counter_u64(seed, stream, hi, 2 * lo + 1));
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Sequential stream keyed by (seed, stream, index); used where a trial
/// needs a variable number of draws. Distinct keys give disjoint streams.
class SubRng {
 public:
  SubRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : seed_(seed), stream_(stream), index_(index) {}

  std::uint64_t next_u64() { return counter_u64(seed_, stream_, index_, counter_++); }
  double next_u01() { return u01(next_u64()); }
  double next_u01_pos() { return u01_pos(next_u64()); }
  double next_exponential() { return -std::log(next_u01_pos()); }

  double next_normal() {
    const double u1 = next_u01_pos();
    const double u2 = next_u01();
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Uniform integer in [lo, hi] inclusive.
  int next_int(int lo, int hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t x = next_u64();
    return lo + static_cast<int>((static_cast<unsigned __int128>(x) * range) >> 64);
  }

  bool next_bernoulli(double p) { return next_u01() < p; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t index_;
  std::uint64_t counter_ = 0;
};

}  // namespace bclab

#endif
