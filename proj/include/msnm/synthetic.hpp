#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "msnm/dataset.hpp"

namespace msnm {

/// Two-dimensional linear-Gaussian benchmark with two anomaly families.
struct SyntheticConfig {
  std::int64_t n_calib = 1000;
  std::int64_t n_test_clean = 1000;
  std::int64_t n_anom1 = 100;
  std::int64_t n_anom2 = 100;
  /// Generative direction; used as given, not normalized.
  Eigen::Vector2d w{0.707, 0.707};
  double noise_var = 0.1;
  double anom1_var = 5.0;
  double anom2_mean = 5.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  Dataset calib;
  Dataset test;
};

/// Clean rows are x = w z + e with z ~ N(0, 1), e ~ N(0, noise_var I),
/// labeled "normal". Type-1 anomalies ("anom1") are x ~ N(0, anom1_var I).
/// Type-2 anomalies ("anom2") follow the linear model with a latent drawn
/// from N(anom2_mean, 1) and negated with probability 1/2.
///
/// Draw order: calibration latents, calibration noise, test latents, test
/// noise, then anom1 rows, then anom2 latents, signs and noise. Anomaly
/// counts therefore never change the clean rows of a given seed. Test rows
/// are emitted clean, then anom1, then anom2. Features are named x1, x2.
SyntheticData generate_synthetic(const SyntheticConfig& config);

}  // namespace msnm
