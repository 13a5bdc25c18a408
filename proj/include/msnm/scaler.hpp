#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "msnm/dataset.hpp"

namespace msnm {

enum class ZeroVariancePolicy { drop, epsilon };

std::string_view to_string(ZeroVariancePolicy policy);
ZeroVariancePolicy parse_zero_variance_policy(std::string_view text);

/// Standard deviation assigned to constant columns under the epsilon policy.
inline constexpr double kZeroVarianceEpsilon = 1e-12;

/// Per-feature centering and scaling learned on calibration data.
///
/// `means` and `stds` cover every original feature (indexed like
/// `feature_names`); columns listed in `dropped_features` are removed by
/// apply_scaler.
struct Scaler {
  std::vector<std::string> feature_names;
  Eigen::VectorXd means;
  Eigen::VectorXd stds;
  std::vector<Eigen::Index> dropped_features;
  ZeroVariancePolicy policy = ZeroVariancePolicy::drop;

  /// Names of the columns that survive the transform, in order.
  std::vector<std::string> retained_names() const;
  Eigen::Index retained_count() const;

  /// Inverse of apply on retained columns; dropped columns are not restored.
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& scaled) const;
};

/// Column means and sample standard deviations (1/(N-1) normalization).
Scaler fit_scaler(const Dataset& data, ZeroVariancePolicy policy = ZeroVariancePolicy::drop);

/// Maps columns by name, so column order in `data` may differ from the
/// calibration data; extra columns are ignored. Labels and timestamps carry
/// over unchanged.
Dataset apply_scaler(const Scaler& scaler, const Dataset& data);

}  // namespace msnm
