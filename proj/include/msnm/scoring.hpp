#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "msnm/dataset.hpp"
#include "msnm/model.hpp"
#include "msnm/scaler.hpp"

namespace msnm {

enum class Scorer { msnm_falpha, ppca_exact, ppca_laplace, tscore, q_only, d_only };

std::string_view to_string(Scorer scorer);
Scorer parse_scorer(std::string_view text);

/// Per-sample score terms. Higher is more anomalous for every scorer.
///
/// For msnm_falpha and ppca_laplace, `combined` is (d + q / alpha) / 2 with
/// d the latent (regularization) term and q the reconstruction error at the
/// stored delta. For ppca_exact, `combined` is x^T C^{-1} x / 2 evaluated
/// through the Woodbury form, and q, d report the delta = alpha = sigma2_ml
/// terms. tscore, q_only and d_only report the Q and D statistics.
struct ScoreBreakdown {
  double q = 0.0;
  double d = 0.0;
  double combined = 0.0;
  Scorer scorer = Scorer::msnm_falpha;
  double delta = 0.0;
  double alpha = 0.0;
};

/// Scorer parameters. UCLs are only read by tscore.
struct ScoringConfig {
  Scorer scorer = Scorer::msnm_falpha;
  double delta = 0.0;
  double alpha = 0.0;
  double ucl_d = 0.0;
  double ucl_q = 0.0;
};

/// Model-implied defaults: msnm_falpha uses delta = 0, alpha = sigma2_ml;
/// ppca_exact and ppca_laplace use delta = alpha = sigma2_ml.
ScoringConfig default_scoring(const FittedModel& model, Scorer scorer);

/// Squared prediction error ||x - U U^T x||^2.
double q_statistic(const FittedModel& model, const Eigen::VectorXd& x);

/// Hotelling's T^2, x^T U L^{-1} U^T x.
double d_statistic(const FittedModel& model, const Eigen::VectorXd& x);

/// f_alpha(delta) = (z^T z + ||x - W(delta) z||^2 / alpha) / 2 with z the
/// latent mode at delta. delta = 0 gives the MSNM form (D + Q / alpha) / 2;
/// delta = alpha = sigma2_ml gives the PPCA Laplace score.
ScoreBreakdown f_alpha_score(const FittedModel& model, const Eigen::VectorXd& x, double alpha,
                             double delta);
ScoreBreakdown f_alpha_score(const ProjectionOperators& ops, const Eigen::VectorXd& x, double alpha);

/// Gaussian marginal of the ML PPCA model evaluated at x.
struct PpcaDensity {
  /// x^T C^{-1} x / 2, the thresholded quantity.
  double score = 0.0;
  /// ln |C| = sum_{i<=P} ln lambda_i + (M - P) ln sigma2.
  double log_det = 0.0;
  /// -(M/2) ln 2pi - ln|C| / 2 - score.
  double log_density = 0.0;
};

/// C^{-1} x with C = W W^T + sigma2 I, through
/// C^{-1} = sigma2^{-1} (I - W M^{-1} W^T), M = W^T W + sigma2 I.
Eigen::VectorXd ppca_precision_apply(const FittedModel& model, const Eigen::VectorXd& x);

PpcaDensity ppca_density(const FittedModel& model, const Eigen::VectorXd& x);
double ppca_exact_score(const FittedModel& model, const Eigen::VectorXd& x);

/// P D / (M UCL_D) + (M - P) Q / (M UCL_Q).
double t_score(const FittedModel& model, const Eigen::VectorXd& x, double ucl_d, double ucl_q);
double t_score_from_terms(Eigen::Index m, Eigen::Index p, double d, double q, double ucl_d,
                          double ucl_q);

/// Validated scorer with its operators precomputed; immutable, so one
/// instance may be shared across threads.
class SampleScorer {
 public:
  SampleScorer(const FittedModel& model, const ScoringConfig& config);

  ScoreBreakdown score(const Eigen::VectorXd& x) const;
  const ScoringConfig& config() const { return config_; }

 private:
  const FittedModel* model_;
  ScoringConfig config_;
  ProjectionOperators ops_;
};

/// Scores already-scaled rows.
std::vector<ScoreBreakdown> score_scaled(const FittedModel& model, const Eigen::MatrixXd& scaled,
                                         const ScoringConfig& config);

/// Scales `data` with `scaler`, then scores each row in order.
std::vector<ScoreBreakdown> score_dataset(const FittedModel& model, const Scaler& scaler,
                                          const Dataset& data, const ScoringConfig& config);

}  // namespace msnm
