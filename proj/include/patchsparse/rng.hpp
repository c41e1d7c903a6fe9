#pragma once

#include <cstdint>

namespace patchsparse {

/// Counter-based generator: draw k of stream (seed, stream) is
/// splitmix64(seed ^ mix(stream) + k * golden). Any (trial, draw) can be
/// reproduced without replaying earlier trials. Normals use Box-Muller on two
/// consecutive uniforms; uniforms take the top 53 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  /// Independent stream for a trial index.
  Rng fork(std::uint64_t stream) const { return Rng(seed_, mix(stream_ * 0x9E3779B97F4A7C15ULL + stream + 1)); }

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal.
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace patchsparse
