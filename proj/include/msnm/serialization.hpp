#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "msnm/calibration.hpp"
#include "msnm/model.hpp"
#include "msnm/scaler.hpp"
#include "msnm/scoring.hpp"

namespace msnm {

inline constexpr std::string_view kModelFormatVersion = "1";

/// Everything needed to score new data: the fitted model, its scaler and,
/// once calibrated, the scorer settings and thresholds.
struct ModelBundle {
  FittedModel model;
  Scaler scaler;
  std::optional<ScoringConfig> scoring;
  std::optional<Thresholds> thresholds;
};

/// JSON layout, version "1":
///
///   {"version": "1", "M": m, "P": p, "features": [...], "zero_var_policy": "drop",
///    "means": [...], "stds": [...], "dropped": [...], "eigenvalues": [...],
///    "U": [... M*P values, row-major ...], "sigma2_ml": s,
///    "scoring": {"scorer", "delta", "alpha"},
///    "thresholds": {"ucl_d", "ucl_q", "ucl_combined", "percentile",
///                   "quantile_method", "chi2_threshold"?, "confidence"?}}
///
/// Doubles are written in their shortest round-trip form, so a payload
/// parses back to bit-identical values. Output is deterministic.
std::string serialize_model(const ModelBundle& bundle);
std::string serialize_model(const FittedModel& model, const Scaler& scaler);

/// When thresholds are stored, the returned scoring config carries their
/// UCL_D and UCL_Q. Throws ValidationError on malformed JSON, missing keys, an unsupported
/// version or parameters that break the model invariants.
ModelBundle deserialize_model(std::string_view bytes);

void save_model(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace msnm
