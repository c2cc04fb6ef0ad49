#pragma once

#include <cstdint>

namespace orbint {

/// splitmix64 engine. Used everywhere randomness is needed so that results
/// are reproducible across platforms; standard-library distributions are
/// implementation defined and never appear in the library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Bernoulli draw with success probability p.
  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Multiply-shift rejection-free map; bias is < 2^-64 * n, negligible for
    // the sample sizes used here and fully deterministic.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent substream seed for item `index` of stream `seed`.
/// Sampling point k never depends on how many points were drawn before it,
/// so parallel and serial sampling agree bit for bit.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mix(seed ^ (0xd1342543de82ef95ULL * (index + 1)));
  mix.next();
  return mix.next();
}

}  // namespace orbint
