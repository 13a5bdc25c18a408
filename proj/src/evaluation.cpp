#include "msnm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msnm/error.hpp"

namespace msnm {

namespace {

void check_inputs(std::span<const double> scores, const std::vector<bool>& is_positive) {
  if (scores.size() != is_positive.size()) {
    throw ValidationError("got " + std::to_string(scores.size()) + " scores but " +
                          std::to_string(is_positive.size()) + " labels");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw ValidationError("NaN score at row " + std::to_string(i));
  }
}

}  // namespace

EvalReport roc_auc(std::span<const double> scores, const std::vector<bool>& is_positive,
                   std::string attack_label) {
  check_inputs(scores, is_positive);
  EvalReport report;
  report.attack_label = std::move(attack_label);
  report.n_pos = static_cast<std::size_t>(std::ranges::count(is_positive, true));
  report.n_neg = is_positive.size() - report.n_pos;
  if (report.n_pos == 0 || report.n_neg == 0) {
    throw ValidationError("degenerate evaluation: need at least one positive and one negative (" +
                          std::to_string(report.n_pos) + " positives, " +
                          std::to_string(report.n_neg) + " negatives)");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const auto pos = static_cast<double>(report.n_pos);
  const auto neg = static_cast<double>(report.n_neg);
  report.roc_points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  double auc = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double value = scores[order[i]];
    std::size_t j = i;
    for (; j < order.size() && scores[order[j]] == value; ++j) {
      if (is_positive[order[j]]) ++tp; else ++fp;
    }
    const RocPoint prev = report.roc_points.back();
    const RocPoint next{static_cast<double>(fp) / neg, static_cast<double>(tp) / pos};
    auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) * 0.5;
    report.roc_points.push_back(next);
    i = j;
  }
  report.auc = auc;
  return report;
}

ThresholdMetrics flag_metrics(const std::vector<bool>& flagged, const std::vector<bool>& is_positive) {
  if (flagged.size() != is_positive.size()) {
    throw ValidationError("flag and label counts differ");
  }
  if (flagged.empty()) throw ValidationError("no samples to evaluate");
  ThresholdMetrics m;
  for (std::size_t i = 0; i < flagged.size(); ++i) {
    if (is_positive[i]) {
      if (flagged[i]) ++m.tp; else ++m.fn;
    } else {
      if (flagged[i]) ++m.fp; else ++m.tn;
    }
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(flagged.size());
  const std::size_t negatives = m.fp + m.tn;
  m.false_alarm_ratio =
      negatives == 0 ? 0.0 : static_cast<double>(m.fp) / static_cast<double>(negatives);
  return m;
}

ThresholdMetrics threshold_metrics(std::span<const double> scores,
                                   const std::vector<bool>& is_positive, double threshold) {
  check_inputs(scores, is_positive);
  std::vector<bool> flagged(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) flagged[i] = scores[i] > threshold;
  return flag_metrics(flagged, is_positive);
}

namespace {

EvalReport slice_report(std::span<const double> scores, const std::vector<std::string>& labels,
                        const std::string& negative_label, std::optional<double> threshold,
                        const std::string& name, auto&& is_positive_label) {
  std::vector<double> slice_scores;
  std::vector<bool> slice_positive;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool negative = labels[i] == negative_label;
    const bool positive = !negative && is_positive_label(labels[i]);
    if (!negative && !positive) continue;
    slice_scores.push_back(scores[i]);
    slice_positive.push_back(positive);
  }
  EvalReport report = roc_auc(slice_scores, slice_positive, name);
  if (threshold) {
    const auto m = threshold_metrics(slice_scores, slice_positive, *threshold);
    report.accuracy = m.accuracy;
    report.false_alarm_ratio = m.false_alarm_ratio;
    report.threshold_used = *threshold;
  }
  return report;
}

void check_labels(std::span<const double> scores, const std::vector<std::string>& labels,
                  const std::string& negative_label) {
  if (scores.size() != labels.size()) {
    throw ValidationError("got " + std::to_string(scores.size()) + " scores but " +
                          std::to_string(labels.size()) + " labels");
  }
  if (std::ranges::find(labels, negative_label) == labels.end()) {
    throw ValidationError("no rows labeled '" + negative_label + "' to use as negatives");
  }
}

}  // namespace

std::vector<EvalReport> per_attack_reports(std::span<const double> scores,
                                           const std::vector<std::string>& labels,
                                           const std::string& negative_label,
                                           std::optional<double> threshold) {
  check_labels(scores, labels, negative_label);
  std::vector<std::string> attacks;
  for (const auto& label : labels) {
    if (label != negative_label && std::ranges::find(attacks, label) == attacks.end()) {
      attacks.push_back(label);
    }
  }
  if (attacks.empty()) throw ValidationError("no attack labels besides '" + negative_label + "'");
  std::vector<EvalReport> reports;
  for (const auto& attack : attacks) {
    reports.push_back(slice_report(scores, labels, negative_label, threshold, attack,
                                   [&](const std::string& l) { return l == attack; }));
  }
  return reports;
}

EvalReport overall_report(std::span<const double> scores, const std::vector<std::string>& labels,
                          const std::string& negative_label, std::optional<double> threshold) {
  check_labels(scores, labels, negative_label);
  return slice_report(scores, labels, negative_label, threshold, "all",
                      [](const std::string&) { return true; });
}

}  // namespace msnm
