#include "msnm/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "msnm/csv.hpp"
#include "msnm/error.hpp"

namespace msnm {

void Dataset::validate() const {
  if (static_cast<Eigen::Index>(feature_names.size()) != values.cols()) {
    throw ValidationError("dataset has " + std::to_string(values.cols()) +
                          " columns but " + std::to_string(feature_names.size()) +
                          " feature names");
  }
  std::set<std::string> seen;
  for (const auto& name : feature_names) {
    if (!seen.insert(name).second) {
      throw ValidationError("duplicate feature name '" + name + "'");
    }
  }
  if (labels && static_cast<Eigen::Index>(labels->size()) != values.rows()) {
    throw ValidationError("dataset has " + std::to_string(values.rows()) + " rows but " +
                          std::to_string(labels->size()) + " labels");
  }
  if (timestamps && static_cast<Eigen::Index>(timestamps->size()) != values.rows()) {
    throw ValidationError("dataset has " + std::to_string(values.rows()) + " rows but " +
                          std::to_string(timestamps->size()) + " timestamps");
  }
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (!std::isfinite(values(r, c))) {
        throw ValidationError("non-finite value at row " + std::to_string(r) + ", feature '" +
                              feature_names[static_cast<std::size_t>(c)] + "'");
      }
    }
  }
}

void Dataset::validate_for_fitting() const {
  validate();
  if (values.rows() < 2) {
    throw ValidationError("fitting needs at least 2 observations, got " +
                          std::to_string(values.rows()));
  }
  if (values.cols() < 1) throw ValidationError("fitting needs at least 1 feature");
}

Dataset Dataset::select_rows(std::span<const Eigen::Index> indices) const {
  Dataset out;
  out.feature_names = feature_names;
  out.values.resize(static_cast<Eigen::Index>(indices.size()), values.cols());
  if (labels) out.labels.emplace();
  if (timestamps) out.timestamps.emplace();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Eigen::Index r = indices[i];
    if (r < 0 || r >= values.rows()) {
      throw ValidationError("row index " + std::to_string(r) + " out of range");
    }
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(r);
    if (labels) out.labels->push_back((*labels)[static_cast<std::size_t>(r)]);
    if (timestamps) out.timestamps->push_back((*timestamps)[static_cast<std::size_t>(r)]);
  }
  return out;
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty CSV: missing header row");
  csv::chomp(line);
  // tolerate a UTF-8 byte order mark
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  auto header = csv::split_record(line);

  std::size_t first_feature = 0;
  bool has_timestamp = false;
  bool has_label = false;
  if (first_feature < header.size() && header[first_feature] == "timestamp") {
    has_timestamp = true;
    ++first_feature;
  }
  if (first_feature < header.size() && header[first_feature] == "label") {
    has_label = true;
    ++first_feature;
  }

  Dataset data;
  data.feature_names.assign(header.begin() + static_cast<std::ptrdiff_t>(first_feature),
                            header.end());
  if (has_label) data.labels.emplace();
  if (has_timestamp) data.timestamps.emplace();

  std::vector<double> flat;
  std::size_t n_rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    csv::chomp(line);
    if (line.empty()) continue;
    auto fields = csv::split_record(line);
    if (fields.size() != header.size()) {
      throw ValidationError("CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
    }
    std::size_t col = 0;
    if (has_timestamp) {
      const std::string context = "line " + std::to_string(line_no) + ", timestamp";
      data.timestamps->push_back(static_cast<std::int64_t>(csv::parse_double(fields[col++], context)));
    }
    if (has_label) data.labels->push_back(fields[col++]);
    for (; col < fields.size(); ++col) {
      flat.push_back(csv::parse_double(
          fields[col], "line " + std::to_string(line_no) + ", column '" + header[col] + "'"));
    }
    ++n_rows;
  }

  const auto m = static_cast<Eigen::Index>(data.feature_names.size());
  data.values.resize(static_cast<Eigen::Index>(n_rows), m);
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      data.values(static_cast<Eigen::Index>(r), c) =
          flat[r * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)];
    }
  }
  data.validate();
  return data;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset '" + path.string() + "'");
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  data.validate();
  bool first = true;
  auto sep = [&] {
    if (!first) out << ',';
    first = false;
  };
  if (data.timestamps) {
    sep();
    out << "timestamp";
  }
  if (data.labels) {
    sep();
    out << "label";
  }
  for (const auto& name : data.feature_names) {
    sep();
    out << csv::escape_field(name);
  }
  out << '\n';
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    first = true;
    const auto ri = static_cast<std::size_t>(r);
    if (data.timestamps) {
      sep();
      out << (*data.timestamps)[ri];
    }
    if (data.labels) {
      sep();
      out << csv::escape_field((*data.labels)[ri]);
    }
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      sep();
      out << csv::format_double(data.values(r, c));
    }
    out << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_dataset_csv(out, data);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace msnm
