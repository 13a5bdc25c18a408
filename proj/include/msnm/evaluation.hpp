#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace msnm {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct ThresholdMetrics {
  double accuracy = 0.0;
  double false_alarm_ratio = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
};

/// Binary detection report for one positive class against the negatives.
struct EvalReport {
  std::string attack_label;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double auc = 0.0;
  /// From (0, 0) to (1, 1), both coordinates non-decreasing.
  std::vector<RocPoint> roc_points;
  std::optional<double> accuracy;
  std::optional<double> false_alarm_ratio;
  std::optional<double> threshold_used;
};

/// ROC curve and trapezoidal AUC; higher score means more anomalous.
///
/// The threshold sweeps the distinct score values in descending order and
/// all samples sharing a score flip together, so ties produce diagonal
/// segments and the AUC equals the Mann-Whitney statistic with ties
/// counted as 1/2.
EvalReport roc_auc(std::span<const double> scores, const std::vector<bool>& is_positive,
                   std::string attack_label = {});

/// Confusion counts for "score > threshold means anomalous".
ThresholdMetrics threshold_metrics(std::span<const double> scores,
                                   const std::vector<bool>& is_positive, double threshold);

/// Confusion counts from precomputed flags.
ThresholdMetrics flag_metrics(const std::vector<bool>& flagged, const std::vector<bool>& is_positive);

/// One report per attack label, in order of first appearance. Positives are
/// that attack's rows, negatives are rows labeled `negative_label`; rows of
/// other attacks are excluded from the slice. When `threshold` is given the
/// reports also carry accuracy and false alarm ratio.
std::vector<EvalReport> per_attack_reports(std::span<const double> scores,
                                           const std::vector<std::string>& labels,
                                           const std::string& negative_label = "background",
                                           std::optional<double> threshold = std::nullopt);

/// Every non-negative row as a positive, labeled "all".
EvalReport overall_report(std::span<const double> scores, const std::vector<std::string>& labels,
                          const std::string& negative_label = "background",
                          std::optional<double> threshold = std::nullopt);

}  // namespace msnm
