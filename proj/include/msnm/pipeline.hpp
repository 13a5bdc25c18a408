#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msnm/calibration.hpp"
#include "msnm/evaluation.hpp"
#include "msnm/scaler.hpp"
#include "msnm/serialization.hpp"
#include "msnm/synthetic.hpp"

// File-mediated pipeline stages behind the CLI subcommands. Every stage
// reads and writes files only, records a manifest next to each output and
// reports bad input as ValidationError.

namespace msnm::pipeline {

namespace fs = std::filesystem;

struct SynthOptions {
  SyntheticConfig config;
  fs::path out_dir = ".";
};
/// Writes calib.csv and test.csv into out_dir.
SyntheticData run_synth(const SynthOptions& options);

struct IngestOptions {
  std::vector<fs::path> logs;
  fs::path features;
  std::optional<fs::path> labels;
  /// Overrides the config's window size when set.
  std::optional<std::int64_t> window_seconds;
  fs::path out = "data.csv";
};
struct IngestSummary {
  Dataset data;
  std::size_t lines_read = 0;
  std::size_t lines_skipped = 0;
  std::vector<std::string> warnings;
};
IngestSummary run_ingest(const IngestOptions& options);

struct FitOptions {
  fs::path data;
  fs::path out = "model.json";
  Eigen::Index p = 1;
  Scorer scorer = Scorer::msnm_falpha;
  /// Defaults: delta = 0 (msnm_falpha), alpha = sigma2_ml. ppca_exact and
  /// ppca_laplace always use delta = alpha = sigma2_ml.
  std::optional<double> delta;
  std::optional<double> alpha;
  double percentile = 0.99;
  std::optional<double> chi2_confidence;
  ZeroVariancePolicy zero_var = ZeroVariancePolicy::drop;
  QuantileMethod quantile = QuantileMethod::linear;
};
/// Fits scaler and model on `data`, calibrates thresholds on the same rows.
ModelBundle run_fit(const FitOptions& options, std::ostream& diagnostics);

/// Resolves the scorer settings for a fitted model, applying the defaults
/// and validation documented on FitOptions.
ScoringConfig resolve_scoring(const FittedModel& model, Scorer scorer, std::optional<double> delta,
                              std::optional<double> alpha, std::ostream& diagnostics);

struct CalibrateOptions {
  fs::path model;
  fs::path data;
  /// Defaults to overwriting `model`.
  std::optional<fs::path> out;
  double percentile = 0.99;
  std::optional<double> chi2_confidence;
  QuantileMethod quantile = QuantileMethod::linear;
};
/// Recomputes the thresholds of an existing model on another data set.
ModelBundle run_calibrate(const CalibrateOptions& options);

struct ScoreOptions {
  fs::path model;
  fs::path data;
  fs::path out = "scores.csv";
  ThresholdRule rule = ThresholdRule::percentile;
};
/// Columns: row_index, label (if present), q, d, combined, scorer, delta,
/// alpha, and flagged when the model carries thresholds.
std::vector<ScoreBreakdown> run_score(const ScoreOptions& options);

/// Score CSV as read back by eval and sweep.
struct ScoreTable {
  std::vector<double> combined;
  std::optional<std::vector<std::string>> labels;
  std::optional<std::vector<bool>> flagged;
};
ScoreTable read_score_csv(const fs::path& path);

struct EvalOptions {
  fs::path scores;
  fs::path out = "report.json";
  bool per_attack = false;
  /// Defaults to "background", falling back to "normal" when absent.
  std::optional<std::string> negative_label;
  std::optional<double> threshold;
  std::optional<fs::path> roc_csv;
};
struct EvalSummary {
  std::string negative_label;
  EvalReport overall;
  std::vector<EvalReport> per_attack;
};
EvalSummary run_eval(const EvalOptions& options);

std::string pick_negative_label(const std::vector<std::string>& labels,
                                const std::optional<std::string>& requested);

struct SweepOptions {
  fs::path model;
  fs::path data;
  /// Calibration data; required by the P grid, which refits the model.
  std::optional<fs::path> calib;
  /// Numbers or the symbols alpha, alpha/2, sigma2.
  std::vector<std::string> delta_grid;
  std::vector<Eigen::Index> p_grid;
  std::vector<std::string> scorer_list;
  fs::path out = "sweep.csv";
  /// Wide attack-by-setting AUC table with a Mean row.
  std::optional<fs::path> table;
  std::optional<std::string> negative_label;
  /// Emits f_alpha(delta) over the delta grid for this data row.
  std::optional<Eigen::Index> curve_row;
  std::optional<fs::path> curve_out;
};
struct SweepRow {
  std::string sweep;
  std::string setting;
  std::string attack;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double auc = 0.0;
};
struct CurvePoint {
  double delta = 0.0;
  double f = 0.0;
  double d = 0.0;
  double q = 0.0;
};
struct SweepSummary {
  std::vector<SweepRow> rows;
  std::vector<CurvePoint> curve;
};
SweepSummary run_sweep(const SweepOptions& options);

struct ReproOptions {
  int seeds = 10;
  std::uint64_t first_seed = 1;
  Eigen::Index p = 1;
  double percentile = 0.99;
  double chi2_confidence = 0.99;
  std::optional<fs::path> out_dir;
};
struct ReproSeedResult {
  std::uint64_t seed = 0;
  double auc_combined = 0.0;
  double auc_ppca_exact = 0.0;
  double auc_q_only = 0.0;
  double auc_d_only = 0.0;
  double accuracy = 0.0;
  double false_alarm_ratio = 0.0;
  double chi2_accuracy = 0.0;
  double chi2_false_alarm_ratio = 0.0;
};
/// synth -> fit -> score -> eval on the synthetic benchmark for a range of
/// seeds; prints one row per seed plus the mean to `table`.
std::vector<ReproSeedResult> run_repro_synthetic(const ReproOptions& options, std::ostream& table);

}  // namespace msnm::pipeline
