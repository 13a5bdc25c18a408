#include "msnm/ingestion.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "msnm/csv.hpp"
#include "msnm/error.hpp"

namespace msnm {

std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::count_matches ? "count_matches" : "sum_capture";
}

FeatureMode parse_feature_mode(std::string_view text) {
  if (text == "count_matches") return FeatureMode::count_matches;
  if (text == "sum_capture") return FeatureMode::sum_capture;
  throw ValidationError("unknown feature mode '" + std::string(text) +
                        "' (expected count_matches or sum_capture)");
}

FeatureSpec::FeatureSpec(std::string name, std::string pattern, FeatureMode mode)
    : name_(std::move(name)), pattern_(std::move(pattern)), mode_(mode) {
  if (name_.empty()) throw ValidationError("feature name must not be empty");
  try {
    regex_ = std::regex(pattern_, std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw ValidationError("feature '" + name_ + "': invalid regular expression '" + pattern_ +
                          "': " + e.what());
  }
  if (mode_ == FeatureMode::sum_capture && regex_.mark_count() < 1) {
    throw ValidationError("feature '" + name_ + "': sum_capture needs a capture group");
  }
}

double FeatureSpec::evaluate(const std::string& line) const {
  double total = 0.0;
  for (auto it = std::sregex_iterator(line.begin(), line.end(), regex_); it != std::sregex_iterator();
       ++it) {
    if (mode_ == FeatureMode::count_matches) {
      total += 1.0;
      continue;
    }
    const std::string capture = (*it)[1].str();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(capture.data(), capture.data() + capture.size(), value);
    // non-numeric captures contribute nothing
    if (ec == std::errc() && ptr == capture.data() + capture.size() && std::isfinite(value)) {
      total += value;
    }
  }
  return total;
}

void WindowingConfig::validate() const {
  if (window_seconds < 1) throw ValidationError("window size must be >= 1 second");
  try {
    const std::regex re(timestamp_pattern);
    if (re.mark_count() < 1) {
      throw ValidationError("timestamp pattern needs one capture group");
    }
  } catch (const std::regex_error& e) {
    throw ValidationError("invalid timestamp pattern '" + timestamp_pattern + "': " + e.what());
  }
  if (timestamp_format.empty()) throw ValidationError("timestamp format must not be empty");
}

std::optional<std::int64_t> parse_timestamp(std::string_view text, std::string_view format) {
  if (format == "epoch") {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
      return std::nullopt;
    }
    return static_cast<std::int64_t>(std::floor(value));
  }
  std::tm tm{};
  std::istringstream in{std::string(text)};
  in >> std::get_time(&tm, std::string(format).c_str());
  if (in.fail()) return std::nullopt;
  return static_cast<std::int64_t>(timegm(&tm));
}

std::string format_timestamp(std::int64_t epoch_seconds, std::string_view format) {
  if (format == "epoch") return std::to_string(epoch_seconds);
  const auto t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, std::string(format).c_str());
  return out.str();
}

IngestConfig parse_ingest_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("feature config: ") + e.what());
  }

  IngestConfig config;
  std::set<std::string> names;
  constexpr std::string_view kFeaturePrefix = "feature:";
  for (const auto& [section, body] : tree) {
    if (section == "window") {
      for (const auto& [key, value] : body) {
        const auto text = value.get_value<std::string>();
        if (key == "seconds") {
          config.windowing.window_seconds =
              static_cast<std::int64_t>(csv::parse_double(text, "window seconds"));
        } else if (key == "timestamp_pattern") {
          config.windowing.timestamp_pattern = text;
        } else if (key == "timestamp_format") {
          config.windowing.timestamp_format = text;
        } else {
          throw ValidationError("feature config: unknown key '" + key + "' in [window]");
        }
      }
    } else if (section.starts_with(kFeaturePrefix)) {
      const std::string name = section.substr(kFeaturePrefix.size());
      if (!names.insert(name).second) {
        throw ValidationError("feature config: duplicate feature '" + name + "'");
      }
      const auto pattern = body.get_optional<std::string>("pattern");
      if (!pattern) throw ValidationError("feature '" + name + "': missing 'pattern'");
      const auto mode = parse_feature_mode(body.get<std::string>("mode", "count_matches"));
      for (const auto& [key, value] : body) {
        if (key != "pattern" && key != "mode") {
          throw ValidationError("feature '" + name + "': unknown key '" + key + "'");
        }
      }
      config.features.emplace_back(name, *pattern, mode);
    } else {
      throw ValidationError("feature config: unknown section [" + section + "]");
    }
  }
  config.windowing.validate();
  if (config.features.empty()) throw ValidationError("feature config defines no features");
  return config;
}

IngestConfig load_ingest_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open feature config '" + path.string() + "'");
  return parse_ingest_config(in);
}

IngestResult parse_logs(std::istream& lines, const std::vector<FeatureSpec>& specs,
                        const WindowingConfig& windows) {
  windows.validate();
  if (specs.empty()) throw ValidationError("at least one feature spec is required");
  std::set<std::string> names;
  for (const auto& spec : specs) {
    if (!names.insert(spec.name()).second) {
      throw ValidationError("duplicate feature '" + spec.name() + "'");
    }
  }

  const std::regex ts_regex(windows.timestamp_pattern);
  const auto n_features = specs.size();
  std::map<std::int64_t, std::vector<double>> counters;
  IngestResult result;

  std::string line;
  while (std::getline(lines, line)) {
    csv::chomp(line);
    if (line.empty()) continue;
    ++result.lines_read;
    std::smatch match;
    std::optional<std::int64_t> ts;
    if (std::regex_search(line, match, ts_regex) && match.size() > 1) {
      ts = parse_timestamp(match[1].str(), windows.timestamp_format);
    }
    if (!ts) {
      ++result.lines_skipped;
      continue;
    }
    // floor, also for times before the epoch
    std::int64_t start = *ts / windows.window_seconds * windows.window_seconds;
    if (start > *ts) start -= windows.window_seconds;
    auto& row = counters.try_emplace(start, n_features, 0.0).first->second;
    for (std::size_t f = 0; f < n_features; ++f) row[f] += specs[f].evaluate(line);
  }

  if (result.lines_read > 0 && 2 * result.lines_skipped > result.lines_read) {
    throw ValidationError("timestamp pattern mismatch: " + std::to_string(result.lines_skipped) +
                          " of " + std::to_string(result.lines_read) +
                          " lines have no readable timestamp");
  }

  Dataset& data = result.data;
  for (const auto& spec : specs) data.feature_names.push_back(spec.name());
  data.timestamps.emplace();
  if (counters.empty()) {
    data.values.resize(0, static_cast<Eigen::Index>(n_features));
    return result;
  }
  const std::int64_t first = counters.begin()->first;
  const std::int64_t last = counters.rbegin()->first;
  const auto n_rows = static_cast<Eigen::Index>((last - first) / windows.window_seconds + 1);
  data.values = Eigen::MatrixXd::Zero(n_rows, static_cast<Eigen::Index>(n_features));
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    data.timestamps->push_back(first + r * windows.window_seconds);
  }
  for (const auto& [start, row] : counters) {
    const auto r = static_cast<Eigen::Index>((start - first) / windows.window_seconds);
    for (std::size_t f = 0; f < n_features; ++f) {
      data.values(r, static_cast<Eigen::Index>(f)) = row[f];
    }
  }
  return result;
}

Dataset merge_windows(const std::vector<Dataset>& parts, std::int64_t window_seconds) {
  if (window_seconds < 1) throw ValidationError("window size must be >= 1 second");
  if (parts.empty()) throw ValidationError("nothing to merge");
  const auto& names = parts.front().feature_names;
  const auto n_features = static_cast<Eigen::Index>(names.size());
  std::map<std::int64_t, Eigen::VectorXd> counters;
  for (const auto& part : parts) {
    if (part.feature_names != names) throw ValidationError("cannot merge datasets with different features");
    if (!part.timestamps) throw ValidationError("cannot merge datasets without window timestamps");
    for (Eigen::Index r = 0; r < part.rows(); ++r) {
      const auto start = (*part.timestamps)[static_cast<std::size_t>(r)];
      auto& row = counters.try_emplace(start, Eigen::VectorXd::Zero(n_features)).first->second;
      row += part.values.row(r).transpose();
    }
  }
  Dataset out;
  out.feature_names = names;
  out.timestamps.emplace();
  if (counters.empty()) {
    out.values.resize(0, n_features);
    return out;
  }
  const std::int64_t first = counters.begin()->first;
  const std::int64_t last = counters.rbegin()->first;
  const auto n_rows = static_cast<Eigen::Index>((last - first) / window_seconds + 1);
  out.values = Eigen::MatrixXd::Zero(n_rows, n_features);
  for (Eigen::Index r = 0; r < n_rows; ++r) out.timestamps->push_back(first + r * window_seconds);
  for (const auto& [start, row] : counters) {
    if ((start - first) % window_seconds != 0) {
      throw ValidationError("window start " + std::to_string(start) + " is not aligned to " +
                            std::to_string(window_seconds) + " s windows");
    }
    out.values.row(static_cast<Eigen::Index>((start - first) / window_seconds)) = row.transpose();
  }
  return out;
}

std::vector<LabelEntry> read_label_file(std::istream& in, std::string_view timestamp_format) {
  std::vector<LabelEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    csv::chomp(line);
    if (line.empty()) continue;
    auto fields = csv::split_record(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "timestamp") continue;
    if (fields.size() != 2) {
      throw ValidationError("label file line " + std::to_string(line_no) +
                            ": expected 'timestamp,label'");
    }
    auto ts = parse_timestamp(fields[0], "epoch");
    if (!ts) ts = parse_timestamp(fields[0], timestamp_format);
    if (!ts) {
      throw ValidationError("label file line " + std::to_string(line_no) +
                            ": cannot read timestamp '" + fields[0] + "'");
    }
    if (fields[1].empty()) {
      throw ValidationError("label file line " + std::to_string(line_no) + ": empty label");
    }
    entries.push_back({*ts, fields[1]});
  }
  return entries;
}

std::vector<LabelEntry> read_label_file(const std::filesystem::path& path,
                                        std::string_view timestamp_format) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open label file '" + path.string() + "'");
  return read_label_file(in, timestamp_format);
}

LabelResult label_windows(const Dataset& data, const std::vector<LabelEntry>& labels,
                          std::int64_t window_seconds) {
  if (window_seconds < 1) throw ValidationError("window size must be >= 1 second");
  if (!data.timestamps) throw ValidationError("dataset has no window timestamps to label");
  LabelResult result;
  result.data = data;
  const auto& times = *data.timestamps;
  std::map<std::int64_t, std::size_t> row_of;
  for (std::size_t r = 0; r < times.size(); ++r) row_of.emplace(times[r], r);

  std::map<std::int64_t, std::string> assigned;
  for (const auto& entry : labels) {
    std::int64_t start = entry.timestamp / window_seconds * window_seconds;
    if (start > entry.timestamp) start -= window_seconds;
    auto [it, inserted] = assigned.try_emplace(start, entry.label);
    if (!inserted && it->second != entry.label) {
      throw ValidationError("conflicting labels for window " + std::to_string(start) + ": '" +
                            it->second + "' and '" + entry.label + "'");
    }
  }

  std::vector<std::string> row_labels(times.size(), "background");
  for (const auto& [start, label] : assigned) {
    const auto it = row_of.find(start);
    if (it == row_of.end()) {
      result.warnings.push_back("label '" + label + "' for window " + std::to_string(start) +
                                " is outside the data range");
      continue;
    }
    row_labels[it->second] = label;
  }
  result.data.labels = std::move(row_labels);
  return result;
}

}  // namespace msnm
