#pragma once

#include <cstdint>
#include <random>

namespace msnm {

/// Seeded 64-bit Mersenne Twister with platform-independent uniform and
/// normal transforms.
///
/// std::normal_distribution is implementation-defined, so normals come from
/// the Box-Muller transform on 53-bit uniforms; the second variate of each
/// pair is cached. Not thread-safe.
class StableRng {
 public:
  explicit StableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace msnm
