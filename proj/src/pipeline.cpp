#include "msnm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "msnm/csv.hpp"
#include "msnm/error.hpp"
#include "msnm/ingestion.hpp"
#include "msnm/manifest.hpp"

namespace msnm::pipeline {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) { return csv::format_double(v); }

RunManifest make_manifest(std::string command) {
  RunManifest m;
  m.command = std::move(command);
  m.tool_version = std::string(tool_version());
  return m;
}

void finish_manifest(RunManifest manifest, const fs::path& output) {
  manifest.add_output(output);
  write_manifest(output, manifest);
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

Json report_json(const EvalReport& r) {
  Json j;
  j["attack_label"] = r.attack_label;
  j["n_pos"] = r.n_pos;
  j["n_neg"] = r.n_neg;
  j["auc"] = r.auc;
  if (r.accuracy) j["accuracy"] = *r.accuracy;
  if (r.false_alarm_ratio) j["false_alarm_ratio"] = *r.false_alarm_ratio;
  if (r.threshold_used) j["threshold_used"] = *r.threshold_used;
  Json points = Json::array();
  for (const auto& p : r.roc_points) points.push_back({p.fpr, p.tpr});
  j["roc_points"] = std::move(points);
  return j;
}

// Attaches accuracy and false alarm ratio computed from stored flags. The
// slice is the rows labeled `attack` ("all" = every non-negative row) plus
// the negatives.
void attach_flag_metrics(EvalReport& report, const std::vector<bool>& flagged,
                         const std::vector<std::string>& labels, const std::string& negative,
                         const std::string& attack) {
  std::vector<bool> f;
  std::vector<bool> pos;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool neg = labels[i] == negative;
    const bool p = !neg && (attack == "all" || labels[i] == attack);
    if (!neg && !p) continue;
    f.push_back(flagged[i]);
    pos.push_back(p);
  }
  const auto m = flag_metrics(f, pos);
  report.accuracy = m.accuracy;
  report.false_alarm_ratio = m.false_alarm_ratio;
}

double resolve_delta_token(const std::string& token, const ScoringConfig& scoring,
                           const FittedModel& model) {
  if (token == "alpha") return scoring.alpha;
  if (token == "alpha/2") return scoring.alpha / 2.0;
  if (token == "sigma2") return model.sigma2_ml();
  return csv::parse_double(token, "delta grid");
}

std::vector<SweepRow> auc_rows(const std::string& sweep, const std::string& setting,
                               const std::vector<ScoreBreakdown>& scores,
                               const std::vector<std::string>& labels, const std::string& negative) {
  std::vector<double> combined(scores.size());
  std::ranges::transform(scores, combined.begin(), &ScoreBreakdown::combined);
  std::vector<SweepRow> rows;
  const auto overall = overall_report(combined, labels, negative);
  rows.push_back({sweep, setting, overall.attack_label, overall.n_pos, overall.n_neg, overall.auc});
  for (const auto& r : per_attack_reports(combined, labels, negative)) {
    rows.push_back({sweep, setting, r.attack_label, r.n_pos, r.n_neg, r.auc});
  }
  return rows;
}

}  // namespace

SyntheticData run_synth(const SynthOptions& options) {
  auto data = generate_synthetic(options.config);
  fs::create_directories(options.out_dir);
  const auto calib_path = options.out_dir / "calib.csv";
  const auto test_path = options.out_dir / "test.csv";
  write_dataset_csv(calib_path, data.calib);
  write_dataset_csv(test_path, data.test);

  const auto& c = options.config;
  auto manifest = make_manifest("synth");
  manifest.parameters = {{"seed", std::to_string(c.seed)},
                         {"n_calib", std::to_string(c.n_calib)},
                         {"n_test_clean", std::to_string(c.n_test_clean)},
                         {"n_anom1", std::to_string(c.n_anom1)},
                         {"n_anom2", std::to_string(c.n_anom2)},
                         {"w", num(c.w(0)) + "," + num(c.w(1))},
                         {"noise_var", num(c.noise_var)},
                         {"anom1_var", num(c.anom1_var)},
                         {"anom2_mean", num(c.anom2_mean)}};
  manifest.add_output(calib_path);
  manifest.add_output(test_path);
  write_manifest(calib_path, manifest);
  write_manifest(test_path, manifest);
  return data;
}

IngestSummary run_ingest(const IngestOptions& options) {
  if (options.logs.empty()) throw ValidationError("no log files given");
  auto config = load_ingest_config(options.features);
  if (options.window_seconds) config.windowing.window_seconds = *options.window_seconds;
  config.windowing.validate();

  auto manifest = make_manifest("ingest");
  manifest.parameters = {{"window_seconds", std::to_string(config.windowing.window_seconds)},
                         {"features", options.features.string()}};
  manifest.add_input(options.features);

  IngestSummary summary;
  std::vector<Dataset> parts;
  for (const auto& log : options.logs) {
    std::ifstream in(log);
    if (!in) throw ValidationError("cannot open log file '" + log.string() + "'");
    auto result = parse_logs(in, config.features, config.windowing);
    summary.lines_read += result.lines_read;
    summary.lines_skipped += result.lines_skipped;
    parts.push_back(std::move(result.data));
    manifest.add_input(log);
  }
  summary.data = parts.size() == 1 ? std::move(parts.front())
                                   : merge_windows(parts, config.windowing.window_seconds);

  std::vector<LabelEntry> entries;
  if (options.labels) {
    entries = read_label_file(*options.labels, config.windowing.timestamp_format);
    manifest.add_input(*options.labels);
    manifest.parameters["labels"] = options.labels->string();
  }
  auto labeled = label_windows(summary.data, entries, config.windowing.window_seconds);
  summary.data = std::move(labeled.data);
  summary.warnings = std::move(labeled.warnings);

  write_dataset_csv(options.out, summary.data);
  finish_manifest(std::move(manifest), options.out);
  return summary;
}

ScoringConfig resolve_scoring(const FittedModel& model, Scorer scorer, std::optional<double> delta,
                              std::optional<double> alpha, std::ostream& diagnostics) {
  ScoringConfig config = default_scoring(model, scorer);
  const double sigma2 = model.sigma2_ml();
  if (scorer == Scorer::ppca_exact || scorer == Scorer::ppca_laplace) {
    if ((delta && *delta != sigma2) || (alpha && *alpha != sigma2)) {
      diagnostics << "note: " << to_string(scorer) << " fixes delta = alpha = sigma2_ml = "
                  << num(sigma2) << "; ignoring --delta/--alpha\n";
    }
    if (!(sigma2 > 0.0)) {
      throw ValidationError("sigma2_ml is 0, so " + std::string(to_string(scorer)) +
                            " is undefined; use msnm_falpha with an explicit --alpha");
    }
    if (!(sigma2 < model.lambda_p())) {
      throw ValidationError("sigma2_ml equals lambda_P; delta = sigma2_ml lies outside [0, lambda_P)");
    }
    return config;
  }
  if (delta) config.delta = *delta;
  if (alpha) config.alpha = *alpha;
  if (scorer != Scorer::msnm_falpha) {
    if (delta && *delta != 0.0) {
      diagnostics << "note: " << to_string(scorer) << " uses delta = 0; ignoring --delta\n";
    }
    config.delta = 0.0;
    return config;
  }
  if (!(config.alpha > 0.0)) {
    throw ValidationError("alpha must be > 0 (sigma2_ml = " + num(sigma2) +
                          "); pass --alpha explicitly");
  }
  if (!(config.delta >= 0.0 && config.delta < model.lambda_p())) {
    throw ValidationError("delta = " + num(config.delta) + " outside the valid range [0, " +
                          num(model.lambda_p()) + ") (lambda_P = " + num(model.lambda_p()) + ")");
  }
  return config;
}

ModelBundle run_fit(const FitOptions& options, std::ostream& diagnostics) {
  const Dataset data = read_dataset_csv(options.data);
  Scaler scaler = fit_scaler(data, options.zero_var);
  if (!scaler.dropped_features.empty()) {
    diagnostics << "note: dropped " << scaler.dropped_features.size()
                << " zero-variance feature(s)\n";
  }
  const Dataset scaled = apply_scaler(scaler, data);
  if (options.p < 1 || options.p >= scaled.cols()) {
    throw ValidationError("P must be < M: P=" + std::to_string(options.p) + ", M=" +
                          std::to_string(scaled.cols()) + " after dropping zero-variance features");
  }
  FittedModel model = fit_model(scaled, options.p);
  const ScoringConfig scoring =
      resolve_scoring(model, options.scorer, options.delta, options.alpha, diagnostics);
  const Thresholds thresholds = calibrate_scaled(model, scaled.values, scoring, options.percentile,
                                                 options.chi2_confidence, options.quantile);

  ModelBundle bundle{std::move(model), std::move(scaler), scoring, thresholds};
  if (options.out.has_parent_path()) fs::create_directories(options.out.parent_path());
  save_model(options.out, bundle);

  auto manifest = make_manifest("fit");
  manifest.parameters = {{"p", std::to_string(options.p)},
                         {"scorer", std::string(to_string(scoring.scorer))},
                         {"delta", num(scoring.delta)},
                         {"alpha", num(scoring.alpha)},
                         {"percentile", num(options.percentile)},
                         {"zero_var", std::string(to_string(options.zero_var))},
                         {"quantile", std::string(to_string(options.quantile))}};
  if (options.chi2_confidence) manifest.parameters["chi2_confidence"] = num(*options.chi2_confidence);
  manifest.add_input(options.data);
  finish_manifest(std::move(manifest), options.out);
  return bundle;
}

ModelBundle run_calibrate(const CalibrateOptions& options) {
  ModelBundle bundle = load_model(options.model);
  const ScoringConfig scoring = bundle.scoring.value_or(default_scoring(bundle.model, Scorer::msnm_falpha));
  const Dataset calib = read_dataset_csv(options.data);
  bundle.scoring = scoring;
  bundle.thresholds = calibrate(bundle.model, bundle.scaler, calib, scoring, options.percentile,
                                options.chi2_confidence, options.quantile);

  auto manifest = make_manifest("calibrate");
  manifest.parameters = {{"percentile", num(options.percentile)},
                         {"quantile", std::string(to_string(options.quantile))}};
  if (options.chi2_confidence) manifest.parameters["chi2_confidence"] = num(*options.chi2_confidence);
  manifest.add_input(options.model);
  manifest.add_input(options.data);
  const fs::path out = options.out.value_or(options.model);
  save_model(out, bundle);
  finish_manifest(std::move(manifest), out);
  return bundle;
}

std::vector<ScoreBreakdown> run_score(const ScoreOptions& options) {
  const ModelBundle bundle = load_model(options.model);
  const Dataset data = read_dataset_csv(options.data);
  ScoringConfig scoring = bundle.scoring.value_or(default_scoring(bundle.model, Scorer::msnm_falpha));
  if (bundle.thresholds) scoring = with_limits(scoring, *bundle.thresholds);
  if (options.rule == ThresholdRule::chi2 && !(bundle.thresholds && bundle.thresholds->chi2_threshold)) {
    throw ValidationError("model has no chi-squared threshold; refit with --chi2-confidence");
  }
  const auto scores = score_dataset(bundle.model, bundle.scaler, data, scoring);

  auto out = open_output(options.out);
  out << "row_index";
  if (data.labels) out << ",label";
  out << ",q,d,combined,scorer,delta,alpha";
  if (bundle.thresholds) out << ",flagged";
  out << '\n';
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores[i];
    out << i;
    if (data.labels) out << ',' << csv::escape_field((*data.labels)[i]);
    out << ',' << num(s.q) << ',' << num(s.d) << ',' << num(s.combined) << ','
        << to_string(s.scorer) << ',' << num(s.delta) << ',' << num(s.alpha);
    if (bundle.thresholds) {
      out << ',' << (is_flagged(s.combined, *bundle.thresholds, options.rule) ? "true" : "false");
    }
    out << '\n';
  }
  out.close();

  auto manifest = make_manifest("score");
  manifest.parameters = {{"rule", options.rule == ThresholdRule::chi2 ? "chi2" : "percentile"}};
  manifest.add_input(options.model);
  manifest.add_input(options.data);
  finish_manifest(std::move(manifest), options.out);
  return scores;
}

ScoreTable read_score_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scores '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("scores file '" + path.string() + "' is empty");
  csv::chomp(line);
  const auto header = csv::split_record(line);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::ranges::find(header, name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto combined_col = column("combined");
  if (!combined_col) throw ValidationError("scores file has no 'combined' column");
  const auto label_col = column("label");
  const auto flagged_col = column("flagged");

  ScoreTable table;
  if (label_col) table.labels.emplace();
  if (flagged_col) table.flagged.emplace();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    csv::chomp(line);
    if (line.empty()) continue;
    const auto fields = csv::split_record(line);
    if (fields.size() != header.size()) {
      throw ValidationError("scores line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
    }
    table.combined.push_back(
        csv::parse_double(fields[*combined_col], "scores line " + std::to_string(line_no)));
    if (label_col) table.labels->push_back(fields[*label_col]);
    if (flagged_col) table.flagged->push_back(fields[*flagged_col] == "true");
  }
  return table;
}

std::string pick_negative_label(const std::vector<std::string>& labels,
                                const std::optional<std::string>& requested) {
  if (requested) return *requested;
  if (std::ranges::find(labels, "background") != labels.end()) return "background";
  if (std::ranges::find(labels, "normal") != labels.end()) return "normal";
  return "background";
}

EvalSummary run_eval(const EvalOptions& options) {
  const ScoreTable table = read_score_csv(options.scores);
  if (!table.labels) {
    throw ValidationError("scores file '" + options.scores.string() +
                          "' has no label column; evaluation needs labeled rows");
  }
  const auto& labels = *table.labels;
  EvalSummary summary;
  summary.negative_label = pick_negative_label(labels, options.negative_label);
  summary.overall = overall_report(table.combined, labels, summary.negative_label, options.threshold);
  if (options.per_attack) {
    summary.per_attack =
        per_attack_reports(table.combined, labels, summary.negative_label, options.threshold);
  }
  if (!options.threshold && table.flagged) {
    attach_flag_metrics(summary.overall, *table.flagged, labels, summary.negative_label, "all");
    for (auto& r : summary.per_attack) {
      attach_flag_metrics(r, *table.flagged, labels, summary.negative_label, r.attack_label);
    }
  }

  Json j;
  j["negative_label"] = summary.negative_label;
  j["overall"] = report_json(summary.overall);
  if (options.per_attack) {
    Json arr = Json::array();
    for (const auto& r : summary.per_attack) arr.push_back(report_json(r));
    j["per_attack"] = std::move(arr);
  }
  {
    auto out = open_output(options.out);
    out << j.dump(2) << '\n';
  }

  auto manifest = make_manifest("eval");
  manifest.parameters = {{"per_attack", options.per_attack ? "true" : "false"},
                         {"negative_label", summary.negative_label}};
  if (options.threshold) manifest.parameters["threshold"] = num(*options.threshold);
  manifest.add_input(options.scores);
  if (options.roc_csv) {
    {
      auto roc = open_output(*options.roc_csv);
      roc << "attack,fpr,tpr\n";
      auto emit = [&](const EvalReport& r) {
        for (const auto& p : r.roc_points) {
          roc << csv::escape_field(r.attack_label) << ',' << num(p.fpr) << ',' << num(p.tpr) << '\n';
        }
      };
      emit(summary.overall);
      for (const auto& r : summary.per_attack) emit(r);
    }
    finish_manifest(manifest, *options.roc_csv);
  }
  finish_manifest(std::move(manifest), options.out);
  return summary;
}

SweepSummary run_sweep(const SweepOptions& options) {
  const int grids = static_cast<int>(!options.delta_grid.empty()) +
                    static_cast<int>(!options.p_grid.empty()) +
                    static_cast<int>(!options.scorer_list.empty());
  if (grids == 0) throw ValidationError("sweep needs a non-empty --delta-grid, --p-grid or --scorer-list");
  if (grids > 1) throw ValidationError("sweep takes exactly one of --delta-grid, --p-grid, --scorer-list");

  const ModelBundle bundle = load_model(options.model);
  const Dataset data = read_dataset_csv(options.data);
  if (!data.labels) throw ValidationError("sweep data has no label column");
  const auto& labels = *data.labels;
  const std::string negative = pick_negative_label(labels, options.negative_label);
  const Dataset scaled = apply_scaler(bundle.scaler, data);
  const ScoringConfig stored =
      bundle.scoring.value_or(default_scoring(bundle.model, Scorer::msnm_falpha));

  auto manifest = make_manifest("sweep");
  manifest.add_input(options.model);
  manifest.add_input(options.data);

  SweepSummary summary;
  std::vector<std::string> settings;
  auto append = [&](std::vector<SweepRow> rows, const std::string& setting) {
    settings.push_back(setting);
    for (auto& r : rows) summary.rows.push_back(std::move(r));
  };

  if (!options.delta_grid.empty()) {
    const double alpha = stored.alpha;
    std::vector<double> deltas;
    for (const auto& token : options.delta_grid) {
      const double delta = resolve_delta_token(token, stored, bundle.model);
      if (!(delta >= 0.0 && delta < bundle.model.lambda_p())) {
        throw ValidationError("delta grid value " + num(delta) + " outside [0, " +
                              num(bundle.model.lambda_p()) + ")");
      }
      deltas.push_back(delta);
    }
    std::string grid_text;
    for (const auto& t : options.delta_grid) grid_text += (grid_text.empty() ? "" : ",") + t;
    manifest.parameters = {{"delta_grid", grid_text}, {"alpha", num(alpha)}};
    for (double delta : deltas) {
      ScoringConfig config = stored;
      config.scorer = Scorer::msnm_falpha;
      config.delta = delta;
      config.alpha = alpha;
      const std::string setting = "delta=" + num(delta);
      append(auc_rows("delta", setting, score_scaled(bundle.model, scaled.values, config), labels,
                      negative),
             setting);
    }
    if (options.curve_row) {
      const auto r = *options.curve_row;
      if (r < 0 || r >= scaled.rows()) {
        throw ValidationError("curve row " + std::to_string(r) + " out of range");
      }
      const Eigen::VectorXd x = scaled.values.row(r).transpose();
      for (double delta : deltas) {
        const auto s = f_alpha_score(bundle.model, x, alpha, delta);
        summary.curve.push_back({delta, s.combined, s.d, s.q});
      }
      manifest.parameters["curve_row"] = std::to_string(r);
    }
  } else if (!options.p_grid.empty()) {
    if (!options.calib) throw ValidationError("--p-grid refits the model and needs --calib");
    const Eigen::Index m = bundle.model.m();
    for (auto p : options.p_grid) {
      if (p < 1 || p >= m) {
        throw ValidationError("P grid value " + std::to_string(p) + " is invalid: P must be < M = " +
                              std::to_string(m) + " (and >= 1)");
      }
    }
    const Dataset calib = read_dataset_csv(*options.calib);
    manifest.add_input(*options.calib);
    const Dataset calib_scaled = apply_scaler(bundle.scaler, calib);
    std::string grid_text;
    for (auto p : options.p_grid) grid_text += (grid_text.empty() ? "" : ",") + std::to_string(p);
    manifest.parameters = {{"p_grid", grid_text}, {"scorer", std::string(to_string(stored.scorer))}};
    const double percentile = bundle.thresholds ? bundle.thresholds->percentile : 0.99;
    for (auto p : options.p_grid) {
      const FittedModel model = fit_model(calib_scaled, p);
      ScoringConfig config = default_scoring(model, stored.scorer);
      if (stored.scorer == Scorer::tscore) {
        config = with_limits(config, calibrate_scaled(model, calib_scaled.values, config, percentile));
      }
      const std::string setting = "P=" + std::to_string(p);
      append(auc_rows("p", setting, score_scaled(model, scaled.values, config), labels, negative),
             setting);
    }
  } else {
    std::string list_text;
    for (const auto& name : options.scorer_list) list_text += (list_text.empty() ? "" : ",") + name;
    manifest.parameters = {{"scorer_list", list_text}};
    std::vector<Scorer> scorers;
    for (const auto& name : options.scorer_list) scorers.push_back(parse_scorer(name));
    for (auto scorer : scorers) {
      ScoringConfig config = scorer == stored.scorer ? stored : default_scoring(bundle.model, scorer);
      if (bundle.thresholds) config = with_limits(config, *bundle.thresholds);
      if (scorer == Scorer::tscore && !bundle.thresholds) {
        throw ValidationError("tscore needs a calibrated model (no thresholds stored)");
      }
      const std::string setting(to_string(scorer));
      append(auc_rows("scorer", setting, score_scaled(bundle.model, scaled.values, config), labels,
                      negative),
             setting);
    }
  }
  manifest.parameters["negative_label"] = negative;

  {
    auto out = open_output(options.out);
    out << "sweep,setting,attack,n_pos,n_neg,auc\n";
    for (const auto& r : summary.rows) {
      out << r.sweep << ',' << csv::escape_field(r.setting) << ',' << csv::escape_field(r.attack)
          << ',' << r.n_pos << ',' << r.n_neg << ',' << num(r.auc) << '\n';
    }
  }
  finish_manifest(manifest, options.out);

  if (options.table) {
    std::vector<std::string> attacks;
    for (const auto& r : summary.rows) {
      if (r.attack != "all" && std::ranges::find(attacks, r.attack) == attacks.end()) {
        attacks.push_back(r.attack);
      }
    }
    std::map<std::pair<std::string, std::string>, double> auc;
    for (const auto& r : summary.rows) auc[{r.attack, r.setting}] = r.auc;
    {
      auto out = open_output(*options.table);
      out << "attack";
      for (const auto& s : settings) out << ',' << csv::escape_field(s);
      out << '\n';
      out << std::fixed << std::setprecision(4);
      std::vector<double> sums(settings.size(), 0.0);
      for (const auto& attack : attacks) {
        out << csv::escape_field(attack);
        for (std::size_t k = 0; k < settings.size(); ++k) {
          const double v = auc.at({attack, settings[k]});
          sums[k] += v;
          out << ',' << v;
        }
        out << '\n';
      }
      out << "Mean";
      for (double s : sums) out << ',' << s / static_cast<double>(attacks.size());
      out << '\n';
    }
    finish_manifest(manifest, *options.table);
  }

  if (options.curve_out) {
    if (summary.curve.empty()) {
      throw ValidationError("--curve-out needs --curve-row together with --delta-grid");
    }
    {
      auto out = open_output(*options.curve_out);
      out << "delta,f_alpha,d_part,q_part\n";
      for (const auto& c : summary.curve) {
        out << num(c.delta) << ',' << num(c.f) << ',' << num(c.d) << ',' << num(c.q) << '\n';
      }
    }
    finish_manifest(manifest, *options.curve_out);
  }
  return summary;
}

std::vector<ReproSeedResult> run_repro_synthetic(const ReproOptions& options, std::ostream& table) {
  if (options.seeds < 1) throw ValidationError("need at least one seed");
  std::vector<ReproSeedResult> results;
  for (int k = 0; k < options.seeds; ++k) {
    SyntheticConfig config;
    config.seed = options.first_seed + static_cast<std::uint64_t>(k);
    const auto data = generate_synthetic(config);
    if (options.out_dir) {
      const auto dir = *options.out_dir / ("seed_" + std::to_string(config.seed));
      fs::create_directories(dir);
      write_dataset_csv(dir / "calib.csv", data.calib);
      write_dataset_csv(dir / "test.csv", data.test);
    }

    const Scaler scaler = fit_scaler(data.calib);
    const Dataset calib = apply_scaler(scaler, data.calib);
    const Dataset test = apply_scaler(scaler, data.test);
    const FittedModel model = fit_model(calib, options.p);
    const ScoringConfig scoring = default_scoring(model, Scorer::msnm_falpha);
    const Thresholds thresholds = calibrate_scaled(model, calib.values, scoring, options.percentile,
                                                   options.chi2_confidence);
    const auto& labels = *test.labels;
    std::vector<bool> positive(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) positive[i] = labels[i] != "normal";

    auto combined_of = [&](Scorer scorer) {
      const auto scores = score_scaled(model, test.values, default_scoring(model, scorer));
      std::vector<double> out(scores.size());
      std::ranges::transform(scores, out.begin(), &ScoreBreakdown::combined);
      return out;
    };
    const auto combined = combined_of(Scorer::msnm_falpha);
    const auto exact = combined_of(Scorer::ppca_exact);

    ReproSeedResult r;
    r.seed = config.seed;
    r.auc_combined = roc_auc(combined, positive).auc;
    r.auc_ppca_exact = roc_auc(exact, positive).auc;
    r.auc_q_only = roc_auc(combined_of(Scorer::q_only), positive).auc;
    r.auc_d_only = roc_auc(combined_of(Scorer::d_only), positive).auc;
    const auto pct = threshold_metrics(combined, positive, thresholds.ucl_combined);
    r.accuracy = pct.accuracy;
    r.false_alarm_ratio = pct.false_alarm_ratio;
    std::vector<bool> chi2_flags(exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
      chi2_flags[i] = is_flagged(exact[i], thresholds, ThresholdRule::chi2);
    }
    const auto chi = flag_metrics(chi2_flags, positive);
    r.chi2_accuracy = chi.accuracy;
    r.chi2_false_alarm_ratio = chi.false_alarm_ratio;
    results.push_back(r);
  }

  auto row = [&](std::ostream& os, const std::string& name, const ReproSeedResult& r) {
    os << std::left << std::setw(6) << name << std::right << std::fixed << std::setprecision(4)
       << std::setw(10) << r.auc_combined << std::setw(10) << r.auc_ppca_exact << std::setw(10)
       << r.auc_q_only << std::setw(10) << r.auc_d_only << std::setw(10) << r.accuracy
       << std::setw(10) << r.false_alarm_ratio << std::setw(10) << r.chi2_accuracy << std::setw(10)
       << r.chi2_false_alarm_ratio << '\n';
  };
  table << std::left << std::setw(6) << "seed" << std::right << std::setw(10) << "AUC" << std::setw(10)
        << "AUC_ppca" << std::setw(10) << "AUC_Q" << std::setw(10) << "AUC_D" << std::setw(10)
        << "acc" << std::setw(10) << "FAR" << std::setw(10) << "acc_chi2" << std::setw(10)
        << "FAR_chi2" << '\n';
  ReproSeedResult mean;
  for (const auto& r : results) {
    row(table, std::to_string(r.seed), r);
    mean.auc_combined += r.auc_combined;
    mean.auc_ppca_exact += r.auc_ppca_exact;
    mean.auc_q_only += r.auc_q_only;
    mean.auc_d_only += r.auc_d_only;
    mean.accuracy += r.accuracy;
    mean.false_alarm_ratio += r.false_alarm_ratio;
    mean.chi2_accuracy += r.chi2_accuracy;
    mean.chi2_false_alarm_ratio += r.chi2_false_alarm_ratio;
  }
  const auto n = static_cast<double>(results.size());
  for (double* v : {&mean.auc_combined, &mean.auc_ppca_exact, &mean.auc_q_only, &mean.auc_d_only,
                    &mean.accuracy, &mean.false_alarm_ratio, &mean.chi2_accuracy,
                    &mean.chi2_false_alarm_ratio}) {
    *v /= n;
  }
  row(table, "mean", mean);

  if (options.out_dir) {
    const auto path = *options.out_dir / "repro.csv";
    {
      auto out = open_output(path);
      out << "seed,auc_combined,auc_ppca_exact,auc_q_only,auc_d_only,accuracy,false_alarm_ratio,"
             "chi2_accuracy,chi2_false_alarm_ratio\n";
      for (const auto& r : results) {
        out << r.seed << ',' << num(r.auc_combined) << ',' << num(r.auc_ppca_exact) << ','
            << num(r.auc_q_only) << ',' << num(r.auc_d_only) << ',' << num(r.accuracy) << ','
            << num(r.false_alarm_ratio) << ',' << num(r.chi2_accuracy) << ','
            << num(r.chi2_false_alarm_ratio) << '\n';
      }
    }
    auto manifest = make_manifest("repro-synthetic");
    manifest.parameters = {{"seeds", std::to_string(options.seeds)},
                           {"first_seed", std::to_string(options.first_seed)},
                           {"p", std::to_string(options.p)},
                           {"percentile", num(options.percentile)},
                           {"chi2_confidence", num(options.chi2_confidence)}};
    finish_manifest(std::move(manifest), path);
  }
  return results;
}

}  // namespace msnm::pipeline
