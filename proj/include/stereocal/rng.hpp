#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace stereocal {

/// Deterministic counter-based pseudo-random generator (SplitMix64).
///
/// Every draw is a pure function of (seed, counter), so sequences are
/// reproducible bit-for-bit across platforms and independent of any global
/// state.  This is deliberately used instead of <random> engines and
/// distributions, whose outputs are not portable across standard-library
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  /// Stateless mixing function at the core of the generator.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Next raw 64-bit word; draw number `counter_` of stream `seed_`.
  std::uint64_t next_u64() { return mix(seed_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform double in [0, 1), 53 random mantissa bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a logarithm argument.
  double next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).  The modulo bias is below 2^-60 for the
  /// small n used here.
  int next_index(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  /// Fair coin mapped to -1.0 / +1.0.
  double next_sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

  /// Uniform double in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Standard normal deviate via the Box-Muller transform.  Always consumes
  /// exactly two words; no caching, so the draw count stays predictable.
  double next_gaussian() {
    const double u1 = next_double_open();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Documented seed-splitting function: sub-stream `index` of `master`.
/// Used to hand each evaluation run (and each stage within a run) its own
/// independent deterministic stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return Rng::mix(master ^ Rng::mix(index + 0x51ed2701a9e3c24fULL));
}

}  // namespace stereocal
