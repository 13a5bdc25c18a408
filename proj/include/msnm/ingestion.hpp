#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "msnm/dataset.hpp"

namespace msnm {

enum class FeatureMode {
  /// number of non-overlapping matches in the line
  count_matches,
  /// sum of the first capture group of every match, read as a number
  sum_capture,
};

std::string_view to_string(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view text);

/// A named regex counter evaluated on every log line.
class FeatureSpec {
 public:
  /// Throws ValidationError naming the feature if the pattern does not
  /// compile, or if sum_capture is requested without a capture group.
  FeatureSpec(std::string name, std::string pattern, FeatureMode mode = FeatureMode::count_matches);

  const std::string& name() const { return name_; }
  const std::string& pattern() const { return pattern_; }
  FeatureMode mode() const { return mode_; }

  /// Contribution of one line to this feature's window counter.
  double evaluate(const std::string& line) const;

 private:
  std::string name_;
  std::string pattern_;
  FeatureMode mode_;
  std::regex regex_;
};

/// How lines map onto fixed time windows.
struct WindowingConfig {
  std::int64_t window_seconds = 60;
  /// Regex whose first capture group holds the timestamp text.
  std::string timestamp_pattern = R"(^([0-9]{4}-[0-9]{2}-[0-9]{2}[ T][0-9]{2}:[0-9]{2}:[0-9]{2}))";
  /// strptime-style format (e.g. "%Y-%m-%d %H:%M:%S"), or "epoch" for
  /// numeric seconds since 1970. Times are taken as written (read as UTC,
  /// no zone conversion).
  std::string timestamp_format = "%Y-%m-%d %H:%M:%S";

  void validate() const;
};

/// Parses timestamp text with the given format; nullopt if it does not fit.
std::optional<std::int64_t> parse_timestamp(std::string_view text, std::string_view format);

/// Formats epoch seconds with a strptime-style format (UTC).
std::string format_timestamp(std::int64_t epoch_seconds, std::string_view format);

/// Feature definitions plus windowing, as read from a config file.
///
/// The file is INI-style: `;` starts a comment line, `key = value` pairs
/// follow a `[section]` header. One optional `[window]` section holds
/// `seconds`, `timestamp_pattern` and `timestamp_format`; every
/// `[feature:<name>]` section holds `pattern` and optionally `mode`
/// (count_matches or sum_capture). Features keep file order.
struct IngestConfig {
  WindowingConfig windowing;
  std::vector<FeatureSpec> features;
};

IngestConfig parse_ingest_config(std::istream& in);
IngestConfig load_ingest_config(const std::filesystem::path& path);

struct IngestResult {
  /// One row per window from the first to the last observed window (gaps
  /// become all-zero rows), window start times in `timestamps`.
  Dataset data;
  std::size_t lines_read = 0;
  /// Non-empty lines without an extractable timestamp.
  std::size_t lines_skipped = 0;
};

/// Skips lines whose timestamp cannot be read; if more than half of the
/// non-empty lines are skipped, throws "timestamp pattern mismatch".
IngestResult parse_logs(std::istream& lines, const std::vector<FeatureSpec>& specs,
                        const WindowingConfig& windows);

/// Sums per-window counters of datasets parsed from separate files (rows
/// keyed by window start) and re-fills gaps with zero rows. All inputs must
/// share feature names.
Dataset merge_windows(const std::vector<Dataset>& parts, std::int64_t window_seconds);

struct LabelEntry {
  std::int64_t timestamp = 0;
  std::string label;
};

/// Reads a `timestamp,label` CSV. Timestamps may be epoch seconds or text
/// in `timestamp_format`. A header row whose first field is "timestamp" is
/// skipped.
std::vector<LabelEntry> read_label_file(std::istream& in, std::string_view timestamp_format);
std::vector<LabelEntry> read_label_file(const std::filesystem::path& path,
                                        std::string_view timestamp_format);

struct LabelResult {
  Dataset data;
  /// Entries that fell outside the data's window range.
  std::vector<std::string> warnings;
};

/// Tags rows by window start (label timestamps are floored to the window
/// size); unlabeled rows become "background". Two different labels for one
/// window throw "conflicting labels".
LabelResult label_windows(const Dataset& data, const std::vector<LabelEntry>& labels,
                          std::int64_t window_seconds);

}  // namespace msnm
