#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace pdcv {

/// Seeded pseudo-random source used everywhere randomness is drawn.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Doubles are built from the top 53 bits of each draw instead of
/// going through std::uniform_real_distribution, whose algorithm is
/// implementation-defined. A single build is therefore bit-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Index drawn from a discrete distribution given by `probs`.
  /// Zero-probability entries are never returned.
  std::size_t categorical(std::span<const double> probs);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; a bijection on 64-bit integers.
std::uint64_t mix64(std::uint64_t x);

/// Seed for one run of one sweep cell. Each argument passes through mix64 so
/// that nearby inputs land far apart.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t cell_key,
                          std::uint64_t run_index);

}  // namespace pdcv
