#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace svcindex {

/// Seeded random stream shared by key selection and workload generation.
///
/// Draws are derived from raw 64-bit engine output rather than the standard
/// distribution adaptors, whose algorithms differ between standard libraries;
/// this keeps generated workloads bit-identical across toolchains.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer on [0, n). `n` must be positive.
  std::size_t index(std::size_t n);

  /// Mixes a master seed with up to two stream coordinates (splitmix64).
  static std::uint64_t derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

 private:
  std::mt19937_64 engine_;
};

}  // namespace svcindex
