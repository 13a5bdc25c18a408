#include "msnm/serialization.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msnm/error.hpp"

namespace msnm {

using Json = nlohmann::ordered_json;

namespace {

Json to_array(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from(const Json& j, const char* key, Eigen::Index expected) {
  const auto& arr = j.at(key);
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != expected) {
    throw ValidationError(std::string("model field '") + key + "' must be an array of " +
                          std::to_string(expected) + " numbers");
  }
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v(i) = arr[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace

std::string serialize_model(const ModelBundle& bundle) {
  const auto& model = bundle.model;
  const auto& scaler = bundle.scaler;
  Json j;
  j["version"] = kModelFormatVersion;
  j["M"] = model.m();
  j["P"] = model.p();
  j["features"] = scaler.feature_names;
  j["zero_var_policy"] = to_string(scaler.policy);
  j["means"] = to_array(scaler.means);
  j["stds"] = to_array(scaler.stds);
  j["dropped"] = scaler.dropped_features;
  j["eigenvalues"] = to_array(model.eigenvalues());
  Json u = Json::array();
  for (Eigen::Index r = 0; r < model.m(); ++r) {
    for (Eigen::Index c = 0; c < model.p(); ++c) u.push_back(model.U()(r, c));
  }
  j["U"] = std::move(u);
  j["sigma2_ml"] = model.sigma2_ml();
  if (bundle.scoring) {
    j["scoring"] = {{"scorer", to_string(bundle.scoring->scorer)},
                    {"delta", bundle.scoring->delta},
                    {"alpha", bundle.scoring->alpha}};
  }
  if (bundle.thresholds) {
    const auto& t = *bundle.thresholds;
    Json tj = {{"ucl_d", t.ucl_d},
               {"ucl_q", t.ucl_q},
               {"ucl_combined", t.ucl_combined},
               {"percentile", t.percentile},
               {"quantile_method", to_string(t.method)}};
    if (t.chi2_threshold) {
      tj["chi2_threshold"] = *t.chi2_threshold;
      tj["confidence"] = *t.confidence;
    }
    j["thresholds"] = std::move(tj);
  }
  return j.dump(2) + "\n";
}

std::string serialize_model(const FittedModel& model, const Scaler& scaler) {
  return serialize_model(ModelBundle{model, scaler, std::nullopt, std::nullopt});
}

ModelBundle deserialize_model(std::string_view bytes) {
  Json j;
  try {
    j = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("corrupt model file: ") + e.what());
  }
  try {
    if (!j.is_object()) throw ValidationError("corrupt model file: top level is not an object");
    const auto version = j.at("version").get<std::string>();
    if (version != kModelFormatVersion) {
      throw ValidationError("unsupported model version '" + version + "' (supported: " +
                            std::string(kModelFormatVersion) + ")");
    }
    const auto m = j.at("M").get<Eigen::Index>();
    const auto p = j.at("P").get<Eigen::Index>();
    if (m < 2 || p < 1 || p >= m) {
      throw ValidationError("model dimensions invalid: M=" + std::to_string(m) +
                            ", P=" + std::to_string(p));
    }

    Scaler scaler;
    scaler.feature_names = j.at("features").get<std::vector<std::string>>();
    const auto n_features = static_cast<Eigen::Index>(scaler.feature_names.size());
    scaler.policy = parse_zero_variance_policy(j.at("zero_var_policy").get<std::string>());
    scaler.means = vector_from(j, "means", n_features);
    scaler.stds = vector_from(j, "stds", n_features);
    scaler.dropped_features = j.at("dropped").get<std::vector<Eigen::Index>>();
    for (std::size_t i = 0; i < scaler.dropped_features.size(); ++i) {
      const auto idx = scaler.dropped_features[i];
      if (idx < 0 || idx >= n_features || (i > 0 && idx <= scaler.dropped_features[i - 1])) {
        throw ValidationError("model field 'dropped' must hold sorted, unique feature indices");
      }
    }
    if (scaler.retained_count() != m) {
      throw ValidationError("model has " + std::to_string(scaler.retained_count()) +
                            " retained features but M=" + std::to_string(m));
    }
    for (Eigen::Index i = 0; i < n_features; ++i) {
      if (!std::ranges::binary_search(scaler.dropped_features, i) && !(scaler.stds(i) > 0.0)) {
        throw ValidationError("model scaler has a non-positive standard deviation");
      }
    }

    const Eigen::VectorXd flat_u = vector_from(j, "U", m * p);
    Eigen::MatrixXd u(m, p);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < p; ++c) u(r, c) = flat_u(r * p + c);
    }
    auto model = FittedModel::from_parts(std::move(u), vector_from(j, "eigenvalues", m),
                                         j.at("sigma2_ml").get<double>());

    ModelBundle bundle{std::move(model), std::move(scaler), std::nullopt, std::nullopt};
    if (j.contains("scoring")) {
      const auto& s = j.at("scoring");
      ScoringConfig config;
      config.scorer = parse_scorer(s.at("scorer").get<std::string>());
      config.delta = s.at("delta").get<double>();
      config.alpha = s.at("alpha").get<double>();
      bundle.scoring = config;
    }
    if (j.contains("thresholds")) {
      const auto& tj = j.at("thresholds");
      Thresholds t;
      t.ucl_d = tj.at("ucl_d").get<double>();
      t.ucl_q = tj.at("ucl_q").get<double>();
      t.ucl_combined = tj.at("ucl_combined").get<double>();
      t.percentile = tj.at("percentile").get<double>();
      t.method = parse_quantile_method(tj.at("quantile_method").get<std::string>());
      if (tj.contains("chi2_threshold")) t.chi2_threshold = tj.at("chi2_threshold").get<double>();
      if (tj.contains("confidence")) t.confidence = tj.at("confidence").get<double>();
      t.validate();
      bundle.thresholds = t;
    }
    if (bundle.scoring) {
      if (bundle.scoring->scorer == Scorer::tscore && !bundle.thresholds) {
        throw ValidationError("tscore model has no thresholds to take UCL_D and UCL_Q from");
      }
      if (bundle.thresholds) bundle.scoring = with_limits(*bundle.scoring, *bundle.thresholds);
      // constructing a scorer re-validates delta and alpha against the model
      const SampleScorer check(bundle.model, *bundle.scoring);
    }
    return bundle;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("corrupt model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << serialize_model(bundle);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open model '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace msnm
