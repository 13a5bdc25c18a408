#pragma once

#include <Eigen/Dense>

#include "msnm/dataset.hpp"

namespace msnm {

/// Eigenpairs of a symmetric PSD matrix, eigenvalues non-increasing.
///
/// Column i of `eigenvectors` pairs with `eigenvalues(i)`. Each column is
/// sign-normalized so that its entry of largest magnitude is positive (the
/// lowest index wins a tie), which makes the basis reproducible.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Magnitude below which slightly negative eigenvalues are clamped to zero.
inline constexpr double kEigenvalueClamp = 1e-10;

/// Symmetric eigensolve. Negative eigenvalues in [-1e-10, 0) are clamped to
/// 0; anything lower means the input was not PSD and raises an error.
/// Equal eigenvalues keep the solver's output order, so the basis of a
/// repeated eigenspace is solver-dependent.
EigenDecomposition eig_symmetric(const Eigen::MatrixXd& s);

/// Eigendecomposition of S = X^T X / N for already-scaled data X.
///
/// The covariance uses 1/N while the scaler's standard deviations use
/// 1/(N-1). Absolute D/Q magnitudes therefore carry a factor N/(N-1)
/// relative to a fully unbiased pipeline; thresholds are calibrated on the
/// same scale, so detections and rankings are unaffected.
EigenDecomposition eig_covariance(const Dataset& scaled);

/// Maximum-likelihood PPCA fit with the rotation fixed to identity.
///
/// The loading matrix is W = U (L - sigma2 I)^{1/2}; the model stores U, the
/// full spectrum and sigma2_ml, from which every W(delta) is derived.
class FittedModel {
 public:
  FittedModel() = default;

  /// Builds a model from a decomposition; 1 <= p < M.
  static FittedModel from_decomposition(const EigenDecomposition& eig, Eigen::Index p);

  /// Restores a model from stored parts and re-checks every invariant.
  static FittedModel from_parts(Eigen::MatrixXd u, Eigen::VectorXd eigenvalues, double sigma2_ml);

  const Eigen::MatrixXd& U() const { return u_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Diagonal of L: the leading P eigenvalues.
  Eigen::VectorXd leading() const { return eigenvalues_.head(p()); }
  double lambda_p() const { return eigenvalues_(p() - 1); }
  double sigma2_ml() const { return sigma2_ml_; }
  Eigen::Index m() const { return u_.rows(); }
  Eigen::Index p() const { return u_.cols(); }

 private:
  void validate() const;

  Eigen::MatrixXd u_;
  Eigen::VectorXd eigenvalues_;
  double sigma2_ml_ = 0.0;
};

/// Mean of the trailing M - P eigenvalues.
double ml_noise_variance(const Eigen::VectorXd& eigenvalues, Eigen::Index p);

FittedModel fit_model(const Dataset& scaled, Eigen::Index p);

/// Loading matrix, latent precision and MAP operator for a model variance
/// delta in [0, lambda_P).
struct ProjectionOperators {
  double delta = 0.0;
  /// M x P, U (L - delta I)^{1/2}.
  Eigen::MatrixXd W;
  /// P x P, W^T W + delta I, which equals L.
  Eigen::MatrixXd gram;
  /// P x M, L^{-1} (L - delta I)^{1/2} U^T.
  Eigen::MatrixXd z_map;
};

ProjectionOperators projection_operators(const FittedModel& model, double delta);

/// Posterior mode (and mean) of the latent variable for a scaled sample.
Eigen::VectorXd latent_mode(const ProjectionOperators& ops, const Eigen::VectorXd& x);

}  // namespace msnm
