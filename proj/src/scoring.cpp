#include "msnm/scoring.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "msnm/error.hpp"

namespace msnm {

namespace {

void check_dims(const FittedModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.m()) {
    throw ValidationError("sample has " + std::to_string(x.size()) + " features, model expects " +
                          std::to_string(model.m()));
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("alpha must be > 0, got " + std::to_string(alpha));
  }
}

void check_latent_rank(const FittedModel& model) {
  if (!(model.lambda_p() > 0.0)) {
    throw ValidationError("rank-deficient latent space: lambda_P = 0");
  }
}

}  // namespace

std::string_view to_string(Scorer scorer) {
  switch (scorer) {
    case Scorer::msnm_falpha: return "msnm_falpha";
    case Scorer::ppca_exact: return "ppca_exact";
    case Scorer::ppca_laplace: return "ppca_laplace";
    case Scorer::tscore: return "tscore";
    case Scorer::q_only: return "q_only";
    case Scorer::d_only: return "d_only";
  }
  return "unknown";
}

Scorer parse_scorer(std::string_view text) {
  for (auto s : {Scorer::msnm_falpha, Scorer::ppca_exact, Scorer::ppca_laplace, Scorer::tscore,
                 Scorer::q_only, Scorer::d_only}) {
    if (to_string(s) == text) return s;
  }
  throw ValidationError("unknown scorer '" + std::string(text) +
                        "' (expected msnm_falpha, ppca_exact, ppca_laplace, tscore, q_only or "
                        "d_only)");
}

ScoringConfig default_scoring(const FittedModel& model, Scorer scorer) {
  ScoringConfig config;
  config.scorer = scorer;
  config.alpha = model.sigma2_ml();
  config.delta = (scorer == Scorer::ppca_exact || scorer == Scorer::ppca_laplace)
                     ? model.sigma2_ml()
                     : 0.0;
  return config;
}

double q_statistic(const FittedModel& model, const Eigen::VectorXd& x) {
  check_dims(model, x);
  const Eigen::VectorXd residual = x - model.U() * (model.U().transpose() * x);
  return residual.squaredNorm();
}

double d_statistic(const FittedModel& model, const Eigen::VectorXd& x) {
  check_dims(model, x);
  check_latent_rank(model);
  const Eigen::VectorXd z0 =
      (model.U().transpose() * x).cwiseQuotient(model.leading().cwiseSqrt());
  return z0.squaredNorm();
}

ScoreBreakdown f_alpha_score(const ProjectionOperators& ops, const Eigen::VectorXd& x,
                             double alpha) {
  check_alpha(alpha);
  const Eigen::VectorXd z = latent_mode(ops, x);
  ScoreBreakdown out;
  out.d = z.squaredNorm();
  out.q = (x - ops.W * z).squaredNorm();
  out.combined = 0.5 * (out.d + out.q / alpha);
  out.scorer = Scorer::msnm_falpha;
  out.delta = ops.delta;
  out.alpha = alpha;
  return out;
}

ScoreBreakdown f_alpha_score(const FittedModel& model, const Eigen::VectorXd& x, double alpha,
                             double delta) {
  check_dims(model, x);
  check_alpha(alpha);
  check_latent_rank(model);
  return f_alpha_score(projection_operators(model, delta), x, alpha);
}

Eigen::VectorXd ppca_precision_apply(const FittedModel& model, const Eigen::VectorXd& x) {
  check_dims(model, x);
  const double sigma2 = model.sigma2_ml();
  if (!(sigma2 > 0.0)) {
    throw ValidationError(
        "sigma2_ml = 0: the PPCA density is singular; score with msnm_falpha at delta = 0 "
        "and an explicit alpha instead");
  }
  // W_ML = U (L - sigma2 I)^{1/2}
  const Eigen::VectorXd shrunk = (model.leading().array() - sigma2).max(0.0).sqrt().matrix();
  const Eigen::MatrixXd w = model.U() * shrunk.asDiagonal();
  const Eigen::MatrixXd m_matrix =
      w.transpose() * w + sigma2 * Eigen::MatrixXd::Identity(model.p(), model.p());
  const Eigen::VectorXd wtx = w.transpose() * x;
  return (x - w * m_matrix.ldlt().solve(wtx)) / sigma2;
}

PpcaDensity ppca_density(const FittedModel& model, const Eigen::VectorXd& x) {
  const Eigen::VectorXd cinv_x = ppca_precision_apply(model, x);
  PpcaDensity out;
  out.score = 0.5 * x.dot(cinv_x);
  out.log_det = model.leading().array().log().sum() +
                static_cast<double>(model.m() - model.p()) * std::log(model.sigma2_ml());
  out.log_density = -0.5 * static_cast<double>(model.m()) * std::log(2.0 * std::numbers::pi) -
                    0.5 * out.log_det - out.score;
  return out;
}

double ppca_exact_score(const FittedModel& model, const Eigen::VectorXd& x) {
  return ppca_density(model, x).score;
}

double t_score_from_terms(Eigen::Index m, Eigen::Index p, double d, double q, double ucl_d,
                          double ucl_q) {
  if (!(ucl_d > 0.0) || !(ucl_q > 0.0)) {
    throw ValidationError("t-score needs positive control limits (UCL_D=" + std::to_string(ucl_d) +
                          ", UCL_Q=" + std::to_string(ucl_q) + ")");
  }
  const auto md = static_cast<double>(m);
  const auto pd = static_cast<double>(p);
  return pd * d / (md * ucl_d) + (md - pd) * q / (md * ucl_q);
}

double t_score(const FittedModel& model, const Eigen::VectorXd& x, double ucl_d, double ucl_q) {
  return t_score_from_terms(model.m(), model.p(), d_statistic(model, x), q_statistic(model, x),
                            ucl_d, ucl_q);
}

SampleScorer::SampleScorer(const FittedModel& model, const ScoringConfig& config)
    : model_(&model), config_(config) {
  switch (config_.scorer) {
    case Scorer::ppca_exact:
      if (!(model.sigma2_ml() > 0.0)) {
        throw ValidationError(
            "sigma2_ml = 0: the PPCA density is singular; use msnm_falpha with delta = 0 "
            "and an explicit alpha");
      }
      config_.delta = config_.alpha = model.sigma2_ml();
      break;
    case Scorer::ppca_laplace:
      config_.delta = config_.alpha = model.sigma2_ml();
      break;
    case Scorer::tscore:
      t_score_from_terms(model.m(), model.p(), 0.0, 0.0, config_.ucl_d, config_.ucl_q);
      config_.delta = 0.0;
      break;
    case Scorer::q_only:
    case Scorer::d_only:
      config_.delta = 0.0;
      break;
    case Scorer::msnm_falpha:
      break;
  }
  check_latent_rank(model);
  if (config_.scorer == Scorer::msnm_falpha || config_.scorer == Scorer::ppca_laplace ||
      config_.scorer == Scorer::ppca_exact) {
    check_alpha(config_.alpha);
  }
  // ppca_exact reports its split terms at delta = sigma2_ml, which the
  // half-open range excludes when lambda_P == sigma2_ml
  const double ops_delta =
      config_.delta < model.lambda_p() || config_.scorer != Scorer::ppca_exact ? config_.delta : 0.0;
  ops_ = projection_operators(model, ops_delta);
}

ScoreBreakdown SampleScorer::score(const Eigen::VectorXd& x) const {
  check_dims(*model_, x);
  ScoreBreakdown out;
  switch (config_.scorer) {
    case Scorer::msnm_falpha:
    case Scorer::ppca_laplace:
      out = f_alpha_score(ops_, x, config_.alpha);
      break;
    case Scorer::ppca_exact:
      out = f_alpha_score(ops_, x, config_.alpha);
      out.combined = ppca_exact_score(*model_, x);
      break;
    case Scorer::tscore:
    case Scorer::q_only:
    case Scorer::d_only: {
      // delta = 0 split terms are exactly D and Q
      out = f_alpha_score(ops_, x, config_.alpha > 0.0 ? config_.alpha : 1.0);
      if (config_.scorer == Scorer::tscore) {
        out.combined = t_score_from_terms(model_->m(), model_->p(), out.d, out.q, config_.ucl_d,
                                          config_.ucl_q);
      } else {
        out.combined = config_.scorer == Scorer::q_only ? out.q : out.d;
      }
      break;
    }
  }
  out.scorer = config_.scorer;
  out.delta = config_.delta;
  out.alpha = config_.alpha;
  return out;
}

std::vector<ScoreBreakdown> score_scaled(const FittedModel& model, const Eigen::MatrixXd& scaled,
                                         const ScoringConfig& config) {
  if (scaled.cols() != model.m() && scaled.rows() > 0) {
    throw ValidationError("data has " + std::to_string(scaled.cols()) +
                          " features after scaling, model expects " + std::to_string(model.m()));
  }
  const SampleScorer scorer(model, config);
  std::vector<ScoreBreakdown> out;
  out.reserve(static_cast<std::size_t>(scaled.rows()));
  for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
    try {
      out.push_back(scorer.score(scaled.row(r).transpose()));
    } catch (const ValidationError& e) {
      throw ValidationError("row " + std::to_string(r) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ScoreBreakdown> score_dataset(const FittedModel& model, const Scaler& scaler,
                                          const Dataset& data, const ScoringConfig& config) {
  const Dataset scaled = apply_scaler(scaler, data);
  return score_scaled(model, scaled.values, config);
}

}  // namespace msnm
