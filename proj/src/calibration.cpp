#include "msnm/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "msnm/chi2.hpp"
#include "msnm/error.hpp"

namespace msnm {

std::string_view to_string(QuantileMethod method) {
  return method == QuantileMethod::linear ? "linear" : "nearest_rank";
}

QuantileMethod parse_quantile_method(std::string_view text) {
  if (text == "linear") return QuantileMethod::linear;
  if (text == "nearest_rank") return QuantileMethod::nearest_rank;
  throw ValidationError("unknown quantile method '" + std::string(text) +
                        "' (expected linear or nearest_rank)");
}

double percentile_ucl(std::span<const double> scores, double percentile, QuantileMethod method) {
  if (scores.empty()) throw ValidationError("percentile of an empty score set");
  if (!(percentile > 0.0 && percentile < 1.0)) {
    throw ValidationError("percentile must lie in (0, 1), got " + std::to_string(percentile));
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (std::isnan(sorted[i])) throw ValidationError("NaN score at index " + std::to_string(i));
  }
  std::ranges::sort(sorted);
  const auto n = sorted.size();
  if (method == QuantileMethod::nearest_rank) {
    auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
  }
  const double pos = static_cast<double>(n - 1) * percentile;
  const auto lower = static_cast<std::size_t>(std::floor(pos));
  const std::size_t upper = std::min(lower + 1, n - 1);
  const double frac = pos - static_cast<double>(lower);
  if (frac == 0.0 || lower == upper) return sorted[lower];
  return sorted[lower] + frac * (sorted[upper] - sorted[lower]);
}

double chi2_threshold(int m, double confidence) {
  if (m < 1) throw ValidationError("chi-squared threshold needs M >= 1");
  return chi2_quantile(confidence, m);
}

void Thresholds::validate() const {
  for (double v : {ucl_d, ucl_q, ucl_combined}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("thresholds must be finite and >= 0");
    }
  }
  if (!(percentile > 0.0 && percentile < 1.0)) {
    throw ValidationError("threshold percentile must lie in (0, 1)");
  }
  if (chi2_threshold.has_value() != confidence.has_value()) {
    throw ValidationError("chi2 threshold and confidence must be given together");
  }
  if (chi2_threshold && (!std::isfinite(*chi2_threshold) || *chi2_threshold < 0.0)) {
    throw ValidationError("chi2 threshold must be finite and >= 0");
  }
}

Thresholds calibrate_scaled(const FittedModel& model, const Eigen::MatrixXd& scaled,
                            const ScoringConfig& config, double percentile,
                            std::optional<double> chi2_confidence, QuantileMethod method) {
  if (scaled.rows() == 0) throw ValidationError("calibration set is empty");

  ScoringConfig terms = config;
  terms.scorer = Scorer::d_only;
  const auto split = score_scaled(model, scaled, terms);
  std::vector<double> d(split.size());
  std::vector<double> q(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    d[i] = split[i].d;
    q[i] = split[i].q;
  }

  Thresholds out;
  out.percentile = percentile;
  out.method = method;
  out.ucl_d = percentile_ucl(d, percentile, method);
  out.ucl_q = percentile_ucl(q, percentile, method);

  const auto scored = score_scaled(model, scaled, with_limits(config, out));
  std::vector<double> combined(scored.size());
  std::ranges::transform(scored, combined.begin(), &ScoreBreakdown::combined);
  out.ucl_combined = percentile_ucl(combined, percentile, method);

  if (chi2_confidence) {
    out.confidence = *chi2_confidence;
    out.chi2_threshold = chi2_threshold(static_cast<int>(model.m()), *chi2_confidence);
  }
  out.validate();
  return out;
}

Thresholds calibrate(const FittedModel& model, const Scaler& scaler, const Dataset& calib,
                     const ScoringConfig& config, double percentile,
                     std::optional<double> chi2_confidence, QuantileMethod method) {
  const Dataset scaled = apply_scaler(scaler, calib);
  return calibrate_scaled(model, scaled.values, config, percentile, chi2_confidence, method);
}

ScoringConfig with_limits(ScoringConfig config, const Thresholds& thresholds) {
  config.ucl_d = thresholds.ucl_d;
  config.ucl_q = thresholds.ucl_q;
  return config;
}

bool is_flagged(double combined, const Thresholds& thresholds, ThresholdRule rule) {
  if (rule == ThresholdRule::chi2) {
    if (!thresholds.chi2_threshold) {
      throw ValidationError("no chi-squared threshold was calibrated");
    }
    return 2.0 * combined > *thresholds.chi2_threshold;
  }
  return combined > thresholds.ucl_combined;
}

}  // namespace msnm
