#pragma once

#include <cstdint>

namespace edgedam {

/// SplitMix64 (Steele, Lea and Flood). State update: s += 0x9E3779B97F4A7C15;
/// output z = s, z = (z ^ z>>30) * 0xBF58476D1CE4E5B9, z = (z ^ z>>27) *
/// 0x94D049BB133111EB, z ^= z>>31. Everything derived from it is integer or
/// IEEE arithmetic, so streams are reproducible across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// [0, n) for n >= 1.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal by Box-Muller, one draw per call (two uniforms).
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// Independent generator for a named stream of a seed.
SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace edgedam
