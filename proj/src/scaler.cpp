#include "msnm/scaler.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "msnm/error.hpp"

namespace msnm {

std::string_view to_string(ZeroVariancePolicy policy) {
  return policy == ZeroVariancePolicy::drop ? "drop" : "epsilon";
}

ZeroVariancePolicy parse_zero_variance_policy(std::string_view text) {
  if (text == "drop") return ZeroVariancePolicy::drop;
  if (text == "epsilon") return ZeroVariancePolicy::epsilon;
  throw ValidationError("unknown zero-variance policy '" + std::string(text) +
                        "' (expected drop or epsilon)");
}

std::vector<std::string> Scaler::retained_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (!std::ranges::binary_search(dropped_features, static_cast<Eigen::Index>(i))) {
      names.push_back(feature_names[i]);
    }
  }
  return names;
}

Eigen::Index Scaler::retained_count() const {
  return static_cast<Eigen::Index>(feature_names.size() - dropped_features.size());
}

Eigen::MatrixXd Scaler::inverse(const Eigen::MatrixXd& scaled) const {
  if (scaled.cols() != retained_count()) {
    throw ValidationError("inverse transform expects " + std::to_string(retained_count()) +
                          " columns, got " + std::to_string(scaled.cols()));
  }
  Eigen::MatrixXd out(scaled.rows(), scaled.cols());
  Eigen::Index c = 0;
  for (Eigen::Index j = 0; j < means.size(); ++j) {
    if (std::ranges::binary_search(dropped_features, j)) continue;
    out.col(c) = (scaled.col(c).array() * stds(j) + means(j)).matrix();
    ++c;
  }
  return out;
}

Scaler fit_scaler(const Dataset& data, ZeroVariancePolicy policy) {
  data.validate_for_fitting();
  const auto n = static_cast<double>(data.rows());

  Scaler scaler;
  scaler.feature_names = data.feature_names;
  scaler.policy = policy;
  scaler.means = data.values.colwise().mean().transpose();
  scaler.stds.resize(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const double ss = (data.values.col(j).array() - scaler.means(j)).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    // round-off in the mean can leave a constant column with a tiny spread
    const bool constant = sd <= 1e-14 * std::max(1.0, std::abs(scaler.means(j)));
    if (constant) {
      if (policy == ZeroVariancePolicy::drop) {
        scaler.dropped_features.push_back(j);
        scaler.stds(j) = 0.0;
      } else {
        scaler.stds(j) = kZeroVarianceEpsilon;
      }
    } else {
      scaler.stds(j) = sd;
    }
  }
  if (scaler.retained_count() == 0) {
    throw ValidationError("empty feature space: every column has zero variance");
  }
  return scaler;
}

Dataset apply_scaler(const Scaler& scaler, const Dataset& data) {
  data.validate();
  std::unordered_map<std::string, Eigen::Index> column_of;
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    column_of.emplace(data.feature_names[static_cast<std::size_t>(c)], c);
  }
  std::vector<std::string> missing;
  for (const auto& name : scaler.feature_names) {
    if (!column_of.contains(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& name : missing) list += (list.empty() ? "" : ", ") + name;
    throw ValidationError("dataset is missing features: " + list);
  }

  Dataset out;
  out.labels = data.labels;
  out.timestamps = data.timestamps;
  out.feature_names = scaler.retained_names();
  out.values.resize(data.rows(), scaler.retained_count());
  Eigen::Index c = 0;
  for (Eigen::Index j = 0; j < scaler.means.size(); ++j) {
    if (std::ranges::binary_search(scaler.dropped_features, j)) continue;
    const auto src = column_of.at(scaler.feature_names[static_cast<std::size_t>(j)]);
    out.values.col(c) = ((data.values.col(src).array() - scaler.means(j)) / scaler.stds(j)).matrix();
    ++c;
  }
  return out;
}

}  // namespace msnm
