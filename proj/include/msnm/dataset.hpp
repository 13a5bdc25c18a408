#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace msnm {

/// N x M observation matrix with named columns.
///
/// Rows are observations, columns are features. `labels` tags each row with
/// a class ("background", "normal", an attack name, ...). `timestamps` holds
/// window start times (epoch seconds) for datasets produced by log ingestion.
struct Dataset {
  Eigen::MatrixXd values;
  std::vector<std::string> feature_names;
  std::optional<std::vector<std::string>> labels;
  std::optional<std::vector<std::int64_t>> timestamps;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  /// Checks the structural invariants: finite entries, one unique name per
  /// column, per-row metadata lengths. Throws ValidationError.
  void validate() const;

  /// Additionally requires at least two rows and one column.
  void validate_for_fitting() const;

  /// Copy of the given rows, in the given order, metadata included.
  Dataset select_rows(std::span<const Eigen::Index> indices) const;
};

// CSV layout: header row of feature names, optionally preceded by the
// reserved metadata columns `timestamp` and/or `label` (in that order).
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace msnm
