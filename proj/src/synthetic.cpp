#include "msnm/synthetic.hpp"

#include <cmath>
#include <string>

#include "msnm/error.hpp"
#include "msnm/random.hpp"

namespace msnm {

void SyntheticConfig::validate() const {
  if (n_calib < 0 || n_test_clean < 0 || n_anom1 < 0 || n_anom2 < 0) {
    throw ValidationError("sample counts must be >= 0");
  }
  if (!(noise_var > 0.0) || !(anom1_var > 0.0)) {
    throw ValidationError("variances must be > 0");
  }
  if (!w.allFinite() || !std::isfinite(anom2_mean)) {
    throw ValidationError("synthetic parameters must be finite");
  }
}

namespace {

Dataset empty_2d(Eigen::Index rows) {
  Dataset d;
  d.feature_names = {"x1", "x2"};
  d.values.resize(rows, 2);
  d.labels.emplace();
  d.labels->reserve(static_cast<std::size_t>(rows));
  return d;
}

// Writes `n` clean rows starting at `offset`: latents first, then noise.
void fill_clean(StableRng& rng, const SyntheticConfig& cfg, Dataset& out, Eigen::Index offset,
                Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
  const double noise_sd = std::sqrt(cfg.noise_var);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      out.values(offset + i, c) = cfg.w(c) * z(i) + noise_sd * rng.normal();
    }
    out.labels->push_back("normal");
  }
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  StableRng rng(config.seed);
  SyntheticData out;

  out.calib = empty_2d(config.n_calib);
  fill_clean(rng, config, out.calib, 0, config.n_calib);

  const Eigen::Index n_test = config.n_test_clean + config.n_anom1 + config.n_anom2;
  out.test = empty_2d(n_test);
  fill_clean(rng, config, out.test, 0, config.n_test_clean);

  Eigen::Index row = config.n_test_clean;
  const double anom1_sd = std::sqrt(config.anom1_var);
  for (Eigen::Index i = 0; i < config.n_anom1; ++i, ++row) {
    out.test.values(row, 0) = anom1_sd * rng.normal();
    out.test.values(row, 1) = anom1_sd * rng.normal();
    out.test.labels->push_back("anom1");
  }

  Eigen::VectorXd z(config.n_anom2);
  for (Eigen::Index i = 0; i < config.n_anom2; ++i) z(i) = rng.normal(config.anom2_mean, 1.0);
  for (Eigen::Index i = 0; i < config.n_anom2; ++i) {
    if (rng.bernoulli(0.5)) z(i) = -z(i);
  }
  const double noise_sd = std::sqrt(config.noise_var);
  for (Eigen::Index i = 0; i < config.n_anom2; ++i, ++row) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      out.test.values(row, c) = config.w(c) * z(i) + noise_sd * rng.normal();
    }
    out.test.labels->push_back("anom2");
  }
  return out;
}

}  // namespace msnm
