#pragma once

#include <cstdint>
#include <random>

namespace hetq {

/// Seeded generator with a platform-independent uniform draw. The standard
/// distributions are implementation-defined, so they are avoided wherever
/// output must be bit-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Per-task seed derivation for parallel or per-tensor streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t ordinal) { return base ^ ordinal; }

}  // namespace hetq
