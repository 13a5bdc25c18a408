#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "msnm/calibration.hpp"
#include "msnm/chi2.hpp"
#include "msnm/error.hpp"
#include "msnm/evaluation.hpp"
#include "msnm/manifest.hpp"
#include "msnm/model.hpp"
#include "msnm/scaler.hpp"
#include "msnm/scoring.hpp"
#include "msnm/serialization.hpp"
#include "msnm/synthetic.hpp"

namespace py = pybind11;
using namespace msnm;

namespace {

Dataset to_dataset(const Eigen::MatrixXd& values, std::optional<std::vector<std::string>> names) {
  Dataset d;
  d.values = values;
  if (names) {
    d.feature_names = std::move(*names);
  } else {
    for (Eigen::Index c = 0; c < values.cols(); ++c) d.feature_names.push_back("x" + std::to_string(c + 1));
  }
  d.validate();
  return d;
}

py::dict score_arrays(const std::vector<ScoreBreakdown>& scores) {
  const auto n = static_cast<Eigen::Index>(scores.size());
  Eigen::VectorXd q(n), d(n), c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = scores[static_cast<std::size_t>(i)];
    q(i) = s.q;
    d(i) = s.d;
    c(i) = s.combined;
  }
  py::dict out;
  out["q"] = q;
  out["d"] = d;
  out["combined"] = c;
  return out;
}

py::dict dataset_dict(const Dataset& d) {
  py::dict out;
  out["values"] = d.values;
  out["features"] = d.feature_names;
  out["labels"] = d.labels.value_or(std::vector<std::string>{});
  return out;
}

}  // namespace

PYBIND11_MODULE(_msnm, m) {
  m.doc() = "PPCA / MSNM anomaly scoring";
  m.attr("__version__") = tool_version();

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::enum_<Scorer>(m, "Scorer")
      .value("msnm_falpha", Scorer::msnm_falpha)
      .value("ppca_exact", Scorer::ppca_exact)
      .value("ppca_laplace", Scorer::ppca_laplace)
      .value("tscore", Scorer::tscore)
      .value("q_only", Scorer::q_only)
      .value("d_only", Scorer::d_only);

  py::enum_<ZeroVariancePolicy>(m, "ZeroVariancePolicy")
      .value("drop", ZeroVariancePolicy::drop)
      .value("epsilon", ZeroVariancePolicy::epsilon);

  py::enum_<QuantileMethod>(m, "QuantileMethod")
      .value("linear", QuantileMethod::linear)
      .value("nearest_rank", QuantileMethod::nearest_rank);

  py::enum_<ThresholdRule>(m, "ThresholdRule")
      .value("percentile", ThresholdRule::percentile)
      .value("chi2", ThresholdRule::chi2);

  m.def(
      "eig_symmetric",
      [](const Eigen::MatrixXd& s) {
        auto e = eig_symmetric(s);
        return py::make_tuple(e.eigenvalues, e.eigenvectors);
      },
      py::arg("s"), "Eigenvalues (descending) and sign-normalized eigenvectors of a PSD matrix.");

  py::class_<FittedModel>(m, "FittedModel")
      .def_static("from_parts", &FittedModel::from_parts, py::arg("u"), py::arg("eigenvalues"),
                  py::arg("sigma2_ml"))
      .def_property_readonly("U", &FittedModel::U)
      .def_property_readonly("eigenvalues", &FittedModel::eigenvalues)
      .def_property_readonly("leading", &FittedModel::leading)
      .def_property_readonly("lambda_p", &FittedModel::lambda_p)
      .def_property_readonly("sigma2_ml", &FittedModel::sigma2_ml)
      .def_property_readonly("m", &FittedModel::m)
      .def_property_readonly("p", &FittedModel::p)
      .def("loadings", [](const FittedModel& model, double delta) {
        return projection_operators(model, delta).W;
      }, py::arg("delta") = 0.0)
      .def("latent_mode", [](const FittedModel& model, const Eigen::VectorXd& x, double delta) {
        return latent_mode(projection_operators(model, delta), x);
      }, py::arg("x"), py::arg("delta") = 0.0)
      .def("__repr__", [](const FittedModel& model) {
        return "<FittedModel M=" + std::to_string(model.m()) + " P=" + std::to_string(model.p()) + ">";
      });

  m.def(
      "fit_model",
      [](const Eigen::MatrixXd& scaled, Eigen::Index p) { return fit_model(to_dataset(scaled, std::nullopt), p); },
      py::arg("scaled"), py::arg("p"), "ML PPCA fit on already-scaled rows.");
  m.def("ml_noise_variance", &ml_noise_variance, py::arg("eigenvalues"), py::arg("p"));

  py::class_<Scaler>(m, "Scaler")
      .def_readonly("feature_names", &Scaler::feature_names)
      .def_readonly("means", &Scaler::means)
      .def_readonly("stds", &Scaler::stds)
      .def_readonly("dropped_features", &Scaler::dropped_features)
      .def_property_readonly("retained_names", &Scaler::retained_names)
      .def("transform", [](const Scaler& s, const Eigen::MatrixXd& x,
                           std::optional<std::vector<std::string>> names) {
        if (!names) names = s.feature_names;
        return apply_scaler(s, to_dataset(x, std::move(names))).values;
      }, py::arg("x"), py::arg("feature_names") = py::none())
      .def("inverse", &Scaler::inverse, py::arg("scaled"));

  m.def(
      "fit_scaler",
      [](const Eigen::MatrixXd& x, std::optional<std::vector<std::string>> names,
         ZeroVariancePolicy policy) { return fit_scaler(to_dataset(x, std::move(names)), policy); },
      py::arg("x"), py::arg("feature_names") = py::none(),
      py::arg("policy") = ZeroVariancePolicy::drop);

  py::class_<ScoringConfig>(m, "ScoringConfig")
      .def(py::init([](Scorer scorer, double delta, double alpha, double ucl_d, double ucl_q) {
             return ScoringConfig{scorer, delta, alpha, ucl_d, ucl_q};
           }),
           py::arg("scorer") = Scorer::msnm_falpha, py::arg("delta") = 0.0, py::arg("alpha") = 0.0,
           py::arg("ucl_d") = 0.0, py::arg("ucl_q") = 0.0)
      .def_readwrite("scorer", &ScoringConfig::scorer)
      .def_readwrite("delta", &ScoringConfig::delta)
      .def_readwrite("alpha", &ScoringConfig::alpha)
      .def_readwrite("ucl_d", &ScoringConfig::ucl_d)
      .def_readwrite("ucl_q", &ScoringConfig::ucl_q);

  m.def("default_scoring", &default_scoring, py::arg("model"), py::arg("scorer") = Scorer::msnm_falpha);
  m.def("q_statistic", &q_statistic, py::arg("model"), py::arg("x"));
  m.def("d_statistic", &d_statistic, py::arg("model"), py::arg("x"));
  m.def(
      "f_alpha",
      [](const FittedModel& model, const Eigen::VectorXd& x, double alpha, double delta) {
        auto s = f_alpha_score(model, x, alpha, delta);
        return py::make_tuple(s.combined, s.d, s.q);
      },
      py::arg("model"), py::arg("x"), py::arg("alpha"), py::arg("delta"),
      "(f, latent term, reconstruction term) at the given delta.");
  m.def("ppca_exact_score", &ppca_exact_score, py::arg("model"), py::arg("x"));
  m.def("ppca_precision_apply", &ppca_precision_apply, py::arg("model"), py::arg("x"));
  m.def("ppca_log_density", [](const FittedModel& model, const Eigen::VectorXd& x) {
    return ppca_density(model, x).log_density;
  }, py::arg("model"), py::arg("x"));
  m.def("t_score", &t_score, py::arg("model"), py::arg("x"), py::arg("ucl_d"), py::arg("ucl_q"));
  m.def(
      "score",
      [](const FittedModel& model, const Eigen::MatrixXd& scaled, const ScoringConfig& config) {
        return score_arrays(score_scaled(model, scaled, config));
      },
      py::arg("model"), py::arg("scaled"), py::arg("config"),
      "Scores scaled rows; returns a dict of q, d and combined arrays.");

  m.def("chi2_cdf", &chi2_cdf, py::arg("x"), py::arg("dof"));
  m.def("chi2_quantile", &chi2_quantile, py::arg("p"), py::arg("dof"));
  m.def("chi2_threshold", &chi2_threshold, py::arg("m"), py::arg("confidence"));
  m.def(
      "percentile_ucl",
      [](const std::vector<double>& s, double p, QuantileMethod method) { return percentile_ucl(s, p, method); },
      py::arg("scores"), py::arg("percentile"), py::arg("method") = QuantileMethod::linear);

  py::class_<Thresholds>(m, "Thresholds")
      .def_readonly("ucl_d", &Thresholds::ucl_d)
      .def_readonly("ucl_q", &Thresholds::ucl_q)
      .def_readonly("ucl_combined", &Thresholds::ucl_combined)
      .def_readonly("percentile", &Thresholds::percentile)
      .def_readonly("chi2_threshold", &Thresholds::chi2_threshold)
      .def_readonly("confidence", &Thresholds::confidence)
      .def("is_flagged", [](const Thresholds& t, double combined, ThresholdRule rule) {
        return is_flagged(combined, t, rule);
      }, py::arg("combined"), py::arg("rule") = ThresholdRule::percentile);

  m.def("calibrate", &calibrate_scaled, py::arg("model"), py::arg("scaled"), py::arg("config"),
        py::arg("percentile") = 0.99, py::arg("chi2_confidence") = py::none(),
        py::arg("method") = QuantileMethod::linear);
  m.def("with_limits", &with_limits, py::arg("config"), py::arg("thresholds"));

  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<bool>& positive) {
        auto r = roc_auc(scores, positive);
        std::vector<double> fpr, tpr;
        for (const auto& p : r.roc_points) {
          fpr.push_back(p.fpr);
          tpr.push_back(p.tpr);
        }
        return py::make_tuple(r.auc, fpr, tpr);
      },
      py::arg("scores"), py::arg("is_positive"), "(auc, fpr, tpr); higher score = more anomalous.");

  m.def(
      "per_attack_auc",
      [](const std::vector<double>& scores, const std::vector<std::string>& labels,
         const std::string& negative) {
        py::dict out;
        for (const auto& r : per_attack_reports(scores, labels, negative)) out[py::str(r.attack_label)] = r.auc;
        return out;
      },
      py::arg("scores"), py::arg("labels"), py::arg("negative_label") = "background");

  m.def(
      "generate_synthetic",
      [](std::uint64_t seed, std::int64_t n_calib, std::int64_t n_test_clean, std::int64_t n_anom1,
         std::int64_t n_anom2, double noise_var, double anom1_var, double anom2_mean) {
        SyntheticConfig cfg;
        cfg.seed = seed;
        cfg.n_calib = n_calib;
        cfg.n_test_clean = n_test_clean;
        cfg.n_anom1 = n_anom1;
        cfg.n_anom2 = n_anom2;
        cfg.noise_var = noise_var;
        cfg.anom1_var = anom1_var;
        cfg.anom2_mean = anom2_mean;
        auto data = generate_synthetic(cfg);
        return py::make_tuple(dataset_dict(data.calib), dataset_dict(data.test));
      },
      py::arg("seed") = 0, py::arg("n_calib") = 1000, py::arg("n_test_clean") = 1000,
      py::arg("n_anom1") = 100, py::arg("n_anom2") = 100, py::arg("noise_var") = 0.1,
      py::arg("anom1_var") = 5.0, py::arg("anom2_mean") = 5.0,
      "(calib, test) dicts with values, features and labels.");

  py::class_<ModelBundle>(m, "ModelBundle")
      .def(py::init([](FittedModel model, Scaler scaler, std::optional<ScoringConfig> scoring,
                       std::optional<Thresholds> thresholds) {
             return ModelBundle{std::move(model), std::move(scaler), scoring, thresholds};
           }),
           py::arg("model"), py::arg("scaler"), py::arg("scoring") = py::none(),
           py::arg("thresholds") = py::none())
      .def_readonly("model", &ModelBundle::model)
      .def_readonly("scaler", &ModelBundle::scaler)
      .def_readonly("scoring", &ModelBundle::scoring)
      .def_readonly("thresholds", &ModelBundle::thresholds);

  m.def("serialize_model", py::overload_cast<const ModelBundle&>(&serialize_model), py::arg("bundle"));
  m.def("deserialize_model", [](const std::string& text) { return deserialize_model(text); },
        py::arg("text"));
  m.def("save_model", &save_model, py::arg("path"), py::arg("bundle"));
  m.def("load_model", &load_model, py::arg("path"));
}
