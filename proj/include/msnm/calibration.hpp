#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "msnm/dataset.hpp"
#include "msnm/model.hpp"
#include "msnm/scaler.hpp"
#include "msnm/scoring.hpp"

namespace msnm {

/// Empirical quantile convention.
///   linear:       interpolate between order statistics at position (n-1)p
///   nearest_rank: the ceil(n p)-th smallest value (1-based)
enum class QuantileMethod { linear, nearest_rank };

std::string_view to_string(QuantileMethod method);
QuantileMethod parse_quantile_method(std::string_view text);

double percentile_ucl(std::span<const double> scores, double percentile,
                      QuantileMethod method = QuantileMethod::linear);

/// Quantile of chi-squared(M) at `confidence`.
///
/// The PPCA anomaly score is x^T C^{-1} x / 2, while x^T C^{-1} x follows
/// chi-squared(M) under the model; compare the threshold against twice the
/// score (see is_flagged).
double chi2_threshold(int m, double confidence);

/// Upper control limits learned on calibration data.
///
/// ucl_d and ucl_q are quantiles of the D and Q statistics; ucl_combined is
/// the quantile of the configured scorer's combined score.
struct Thresholds {
  double ucl_d = 0.0;
  double ucl_q = 0.0;
  double ucl_combined = 0.0;
  double percentile = 0.99;
  QuantileMethod method = QuantileMethod::linear;
  std::optional<double> chi2_threshold;
  std::optional<double> confidence;

  void validate() const;
};

/// Calibrates on already-scaled rows. For tscore the D/Q limits are
/// computed first and fed into the scorer before its own quantile is taken.
Thresholds calibrate_scaled(const FittedModel& model, const Eigen::MatrixXd& scaled,
                            const ScoringConfig& config, double percentile,
                            std::optional<double> chi2_confidence = std::nullopt,
                            QuantileMethod method = QuantileMethod::linear);

Thresholds calibrate(const FittedModel& model, const Scaler& scaler, const Dataset& calib,
                     const ScoringConfig& config, double percentile,
                     std::optional<double> chi2_confidence = std::nullopt,
                     QuantileMethod method = QuantileMethod::linear);

/// Copies the D/Q control limits into a scoring config (used by tscore).
ScoringConfig with_limits(ScoringConfig config, const Thresholds& thresholds);

enum class ThresholdRule { percentile, chi2 };

/// percentile: combined > ucl_combined. chi2: 2 * combined > chi2_threshold.
/// Equality is not anomalous.
bool is_flagged(double combined, const Thresholds& thresholds,
                ThresholdRule rule = ThresholdRule::percentile);

}  // namespace msnm
