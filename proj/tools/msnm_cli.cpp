// Command-line front end: synth, ingest, fit, calibrate, score, eval, sweep
// and repro-synthetic. Exit codes: 0 success, 2 usage or validation error,
// 1 internal error. Diagnostics go to stderr, data to files.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msnm/error.hpp"
#include "msnm/manifest.hpp"
#include "msnm/pipeline.hpp"

namespace {

namespace pl = msnm::pipeline;

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 1;

const std::vector<std::string> kScorers = {"msnm_falpha", "ppca_exact", "ppca_laplace",
                                           "tscore",      "q_only",     "d_only"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PPCA / MSNM network anomaly detection toolkit"};
  app.set_config("--config", "", "Read option values from a TOML/INI file (same key names)");
  app.set_version_flag("--version", std::string(msnm::tool_version()));
  app.require_subcommand(1);

  // synth
  pl::SynthOptions synth;
  std::vector<double> synth_w = {0.707, 0.707};
  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic benchmark (calib.csv, test.csv)");
  synth_cmd->add_option("--seed", synth.config.seed, "RNG seed")->capture_default_str();
  synth_cmd->add_option("--n-calib", synth.config.n_calib)->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--n-test-clean", synth.config.n_test_clean)->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--n-anom1", synth.config.n_anom1)->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--n-anom2", synth.config.n_anom2)->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--w", synth_w, "Generative direction (two values)")->expected(2);
  synth_cmd->add_option("--noise-var", synth.config.noise_var)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--anom1-var", synth.config.anom1_var)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--anom2-mean", synth.config.anom2_mean)->capture_default_str();
  synth_cmd->add_option("--out-dir", synth.out_dir)->capture_default_str();

  // ingest
  pl::IngestOptions ingest;
  std::string ingest_labels;
  std::int64_t ingest_window = 0;
  auto* ingest_cmd = app.add_subcommand("ingest", "Extract per-window counter features from log files");
  ingest_cmd->add_option("--logs,logs", ingest.logs, "Line-oriented log files")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--features", ingest.features, "Feature spec config (INI)")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--labels", ingest_labels, "CSV of timestamp,label")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--window", ingest_window, "Window size in seconds (overrides the config)")->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--out", ingest.out)->capture_default_str();

  // fit
  pl::FitOptions fit;
  std::string fit_scorer = "msnm_falpha";
  std::string fit_zero_var = "drop";
  std::string fit_quantile = "linear";
  double fit_delta = 0.0;
  double fit_alpha = 0.0;
  double fit_chi2 = 0.0;
  auto* fit_cmd = app.add_subcommand("fit", "Fit scaler + PPCA model and calibrate thresholds");
  fit_cmd->add_option("--data", fit.data, "Calibration dataset CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--p", fit.p, "Latent dimension P (< M)")->capture_default_str();
  fit_cmd->add_option("--scorer", fit_scorer)->capture_default_str()->check(CLI::IsMember(kScorers));
  auto* fit_delta_opt = fit_cmd->add_option("--delta", fit_delta, "Model variance delta in [0, lambda_P)");
  auto* fit_alpha_opt = fit_cmd->add_option("--alpha", fit_alpha, "Reconstruction weight 1/alpha (default sigma2_ml)");
  fit_cmd->add_option("--percentile", fit.percentile)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  auto* fit_chi2_opt = fit_cmd->add_option("--chi2-confidence", fit_chi2, "Also store the chi2(M) threshold")->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--zero-var", fit_zero_var)->capture_default_str()->check(CLI::IsMember({"drop", "epsilon"}));
  fit_cmd->add_option("--quantile", fit_quantile)->capture_default_str()->check(CLI::IsMember({"linear", "nearest_rank"}));
  fit_cmd->add_option("--out", fit.out)->capture_default_str();

  // calibrate
  pl::CalibrateOptions calib;
  std::string calib_out;
  std::string calib_quantile = "linear";
  double calib_chi2 = 0.0;
  auto* calib_cmd = app.add_subcommand("calibrate", "Recompute the thresholds of a model on another data set");
  calib_cmd->add_option("--model", calib.model)->required()->check(CLI::ExistingFile);
  calib_cmd->add_option("--data", calib.data)->required()->check(CLI::ExistingFile);
  calib_cmd->add_option("--out", calib_out, "Output model (default: overwrite --model)");
  calib_cmd->add_option("--percentile", calib.percentile)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  auto* calib_chi2_opt = calib_cmd->add_option("--chi2-confidence", calib_chi2)->check(CLI::Range(0.0, 1.0));
  calib_cmd->add_option("--quantile", calib_quantile)->capture_default_str()->check(CLI::IsMember({"linear", "nearest_rank"}));

  // score
  pl::ScoreOptions score;
  std::string score_rule = "percentile";
  auto* score_cmd = app.add_subcommand("score", "Score a dataset with a fitted model");
  score_cmd->add_option("--model", score.model)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--data", score.data)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--out", score.out)->capture_default_str();
  score_cmd->add_option("--rule", score_rule, "Threshold used for the flagged column")->capture_default_str()->check(CLI::IsMember({"percentile", "chi2"}));

  // eval
  pl::EvalOptions eval;
  std::string eval_negative;
  std::string eval_roc;
  double eval_threshold = 0.0;
  auto* eval_cmd = app.add_subcommand("eval", "ROC/AUC and threshold metrics for a labeled score file");
  eval_cmd->add_option("--scores", eval.scores)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval.out)->capture_default_str();
  eval_cmd->add_flag("--per-attack", eval.per_attack, "One report per attack label vs negatives");
  eval_cmd->add_option("--negative-label", eval_negative, "Default: background, else normal");
  auto* eval_threshold_opt = eval_cmd->add_option("--threshold", eval_threshold, "Flag scores strictly above this value");
  eval_cmd->add_option("--roc-csv", eval_roc, "Write ROC points for plotting");

  // sweep
  pl::SweepOptions sweep;
  std::string sweep_calib;
  std::string sweep_table;
  std::string sweep_negative;
  std::string sweep_curve_out;
  Eigen::Index sweep_curve_row = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "AUC over a delta grid, a P grid or a list of scorers");
  sweep_cmd->add_option("--model", sweep.model)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--data", sweep.data)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--calib", sweep_calib, "Calibration data (needed by --p-grid)")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--delta-grid", sweep.delta_grid, "Deltas: numbers or alpha, alpha/2, sigma2")->delimiter(',');
  sweep_cmd->add_option("--p-grid", sweep.p_grid, "Latent dimensions to refit")->delimiter(',');
  sweep_cmd->add_option("--scorer-list", sweep.scorer_list)->delimiter(',')->check(CLI::IsMember(kScorers));
  sweep_cmd->add_option("--out", sweep.out)->capture_default_str();
  sweep_cmd->add_option("--table", sweep_table, "Attack x setting AUC table (CSV)");
  sweep_cmd->add_option("--negative-label", sweep_negative);
  auto* curve_row_opt = sweep_cmd->add_option("--curve-row", sweep_curve_row, "Row whose f_alpha(delta) curve is emitted");
  sweep_cmd->add_option("--curve-out", sweep_curve_out, "CSV for the f_alpha(delta) curve");

  // repro-synthetic
  pl::ReproOptions repro;
  std::string repro_out;
  auto* repro_cmd = app.add_subcommand("repro-synthetic", "synth -> fit -> score -> eval over several seeds");
  repro_cmd->add_option("--seeds", repro.seeds)->capture_default_str()->check(CLI::PositiveNumber);
  repro_cmd->add_option("--first-seed", repro.first_seed)->capture_default_str();
  repro_cmd->add_option("--p", repro.p)->capture_default_str();
  repro_cmd->add_option("--percentile", repro.percentile)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  repro_cmd->add_option("--chi2-confidence", repro.chi2_confidence)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  repro_cmd->add_option("--out-dir", repro_out, "Also write per-seed data and repro.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) {
      synth.config.w = Eigen::Vector2d(synth_w[0], synth_w[1]);
      pl::run_synth(synth);
    } else if (ingest_cmd->parsed()) {
      if (!ingest_labels.empty()) ingest.labels = ingest_labels;
      if (ingest_window > 0) ingest.window_seconds = ingest_window;
      const auto summary = pl::run_ingest(ingest);
      for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
      std::cerr << "ingested " << summary.data.rows() << " windows from " << summary.lines_read
                << " lines (" << summary.lines_skipped << " skipped)\n";
    } else if (fit_cmd->parsed()) {
      fit.scorer = msnm::parse_scorer(fit_scorer);
      fit.zero_var = msnm::parse_zero_variance_policy(fit_zero_var);
      fit.quantile = msnm::parse_quantile_method(fit_quantile);
      if (*fit_delta_opt) fit.delta = fit_delta;
      if (*fit_alpha_opt) fit.alpha = fit_alpha;
      if (*fit_chi2_opt) fit.chi2_confidence = fit_chi2;
      const auto bundle = pl::run_fit(fit, std::cerr);
      std::cerr << "fitted M=" << bundle.model.m() << " P=" << bundle.model.p()
                << " sigma2_ml=" << bundle.model.sigma2_ml()
                << " lambda_P=" << bundle.model.lambda_p() << '\n';
    } else if (calib_cmd->parsed()) {
      if (!calib_out.empty()) calib.out = calib_out;
      if (*calib_chi2_opt) calib.chi2_confidence = calib_chi2;
      calib.quantile = msnm::parse_quantile_method(calib_quantile);
      pl::run_calibrate(calib);
    } else if (score_cmd->parsed()) {
      score.rule = score_rule == "chi2" ? msnm::ThresholdRule::chi2 : msnm::ThresholdRule::percentile;
      pl::run_score(score);
    } else if (eval_cmd->parsed()) {
      if (!eval_negative.empty()) eval.negative_label = eval_negative;
      if (!eval_roc.empty()) eval.roc_csv = eval_roc;
      if (*eval_threshold_opt) eval.threshold = eval_threshold;
      const auto summary = pl::run_eval(eval);
      std::cerr << "AUC (all vs " << summary.negative_label << ") = " << summary.overall.auc << '\n';
    } else if (sweep_cmd->parsed()) {
      if (!sweep_calib.empty()) sweep.calib = sweep_calib;
      if (!sweep_table.empty()) sweep.table = sweep_table;
      if (!sweep_negative.empty()) sweep.negative_label = sweep_negative;
      if (*curve_row_opt) sweep.curve_row = sweep_curve_row;
      if (!sweep_curve_out.empty()) sweep.curve_out = sweep_curve_out;
      pl::run_sweep(sweep);
    } else if (repro_cmd->parsed()) {
      if (!repro_out.empty()) repro.out_dir = repro_out;
      pl::run_repro_synthetic(repro, std::cout);
    }
  } catch (const msnm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
